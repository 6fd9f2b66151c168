#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cnmc/kernels.hpp"

using namespace cnmc;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

QuadSpec oracle_spec() {
    QuadSpec q;
    q.abs_tol = 1e-300;
    q.rel_tol = 1e-12;
    q.max_subdivisions = 400;
    return q;
}

// b_alpha = int_S int_R p^2 (tau^2 + p^2)^{-m} dtau dsigma by nested
// quadrature in (theta, y) with sigma_1 = cos(theta), tau = p y and
// y = t / (1 - t).
double b_alpha_brute(const ModelParams& P) {
    const double m = P.m();
    const SphereReduction sr = SphereReduction::of(P);
    QuadSpec q = oracle_spec();
    q.rel_tol = 1e-13;
    QuadSpec qo = oracle_spec();
    qo.rel_tol = 1e-10;
    auto outer = [&](double th) {
        const double p = 2.0 * std::sin(0.5 * th);
        auto inner = [&](double t) {
            const double y = t / (1.0 - t);
            return std::pow(y * y + 1.0, -m) / ((1.0 - t) * (1.0 - t));
        };
        const double ti = integrate_adaptive(inner, 0.0, 0.5, q) + integrate_adaptive(inner, 0.5, 1.0, q);
        return 2.0 * ti * std::exp((3.0 - 2.0 * m) * std::log(p) + (P.N - 3) * std::log(std::sin(th)));
    };
    // the theta integrand grows like theta^{-alpha} at 0
    return sr.c_n * (integrate_de(outer, 0.0, 0.5, true, false, qo) + integrate_adaptive(outer, 0.5, pi, qo));
}

}  // namespace

TEST_CASE("tau integral closed form") {
    CHECK(tau_integral_closed(1.0, 1.0) == doctest::Approx(pi).epsilon(1e-14));
    CHECK(tau_integral_closed(1.5, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(tau_integral_closed(2.0, 1.0) == doctest::Approx(pi / 2).epsilon(1e-14));
}

TEST_CASE("one minus cos moment matches quadrature") {
    for (double s : {0.3, 1.2, 1.8}) {
        // int_R (1 - cos t)|t|^{-1-s} = 2 int_0^inf
        QuadSpec q = oracle_spec();
        auto f = [&](double t) {
            const double sn = std::sin(0.5 * t) / t;
            return 4.0 * sn * sn * std::pow(t, 1.0 - s);
        };
        double acc = integrate_de(f, 0.0, 1.0, true, false, q);
        for (int k = 0; k < 4000; ++k) acc += integrate_adaptive(f, 1.0 + k * pi, 1.0 + (k + 1) * pi, q);
        // remaining tail: int_T^inf 2 t^{-1-s} dt minus an oscillatory part of order T^{-1-s}
        const double T = 1.0 + 4000 * pi;
        acc += 2.0 * std::pow(T, -s) / s;
        CHECK(rel(one_minus_cos_moment(s), acc) < 1e-4);
    }
}

TEST_CASE("G_alpha") {
    SUBCASE("N=2 two-point value") {
        CHECK(G_alpha(1.0, {2, 0.5}) == doctest::Approx(2.0 * (1.0 + std::pow(5.0, -1.25))).epsilon(1e-13));
    }
    SUBCASE("evenness") {
        for (int N : {2, 3, 4, 5})
            for (double t : {0.3, 1.7, 6.0}) CHECK(G_alpha(-t, {N, 0.4}) == G_alpha(t, {N, 0.4}));
    }
    SUBCASE("large tau limit for N=3") {
        const double t = 100.0;
        CHECK(rel(std::pow(t, 3.5) * G_alpha(t, {3, 0.5}), 4.0 * pi) < 1e-3);
    }
    SUBCASE("series and quadrature agree across |tau| = 4") {
        for (int N : {3, 4, 5}) {
            const ModelParams P{N, 0.6};
            const double lo = G_alpha(4.0 * (1.0 - 1e-12), P), hi = G_alpha(4.0 * (1.0 + 1e-12), P);
            CHECK(rel(lo, hi) < 1e-10);
        }
    }
    SUBCASE("growth bounds on a log grid") {
        for (int N : {3, 4, 5}) {
            const ModelParams P{N, 0.5};
            double small_max = 0.0, large_max = 0.0;
            for (int i = 0; i <= 40; ++i) {
                const double t = std::pow(10.0, -4.0 + 0.1 * i);
                small_max = std::max(small_max, std::pow(t, 2.5) * G_alpha(t, P));
                const double T = std::pow(10.0, 0.1 * i);
                large_max = std::max(large_max, std::pow(T, N + 0.5) * G_alpha(T, P));
            }
            CHECK(std::isfinite(small_max));
            CHECK(small_max < 10.0 * g0_const(P));
            CHECK(large_max < 1e3);
        }
    }
}

TEST_CASE("g identity and limit") {
    for (int N : {3, 4, 5}) {
        const ModelParams P{N, 0.5};
        for (double t : {0.25, 0.5, 1.0, 3.0, 4.0})
            CHECK(rel(g_of_rho(t * t, P) * std::pow(t, -2.5), G_alpha(t, P)) < 1e-8);
        const double g0 = g0_const(P);
        CHECK(g0 > 0.0);
        CHECK(rel(g_of_rho(1e-6, P), g0) < 1e-5);
        const double c = std::max(std::abs(g_of_rho(1e-2, P) - g0) / 1e-2, std::abs(g_of_rho(1e-3, P) - g0) / 1e-3);
        CHECK(std::abs(g_of_rho(1e-3, P) - g0) <= c * 1e-3 * (1.0 + 1e-9));
    }
    SUBCASE("N=4 g decreasing") {
        const ModelParams P{4, 0.5};
        double prev = g_of_rho(0.1, P);
        for (int i = 2; i <= 19; ++i) {
            const double g = g_of_rho(0.1 * i, P);
            CHECK(g < prev);
            prev = g;
        }
    }
}

TEST_CASE("g0 against the tangent-plane integral") {
    // near sigma = e_1 the sphere is flat: g0 = 2 C_N int_0^inf (2r)^e (1 + 2r)^{-m} dr
    //                                     = C_N B((N-2)/2, (2+alpha)/2)
    for (int N : {3, 4, 5})
        for (double a : {0.3, 0.5, 0.8}) {
            const ModelParams P{N, a};
            const double cn = SphereReduction::of(P).c_n;
            const double x = 0.5 * (N - 2), y = 0.5 * (2 + a);
            const double oracle = cn * std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y));
            CHECK(rel(g0_const(P), oracle) < 1e-10);
        }
    // value quoted for (3, 0.5)
    CHECK(rel(g0_const({3, 0.5}), 3.49607673905616) < 1e-12);
}

TEST_CASE("b_alpha against raw double quadrature") {
    for (auto P : {ModelParams{3, 0.5}, ModelParams{4, 0.5}, ModelParams{5, 0.3}, ModelParams{3, 0.8}}) {
        const double b = b_alpha_const(P);
        CHECK(b > 0.0);
        CHECK(rel(b, b_alpha_brute(P)) < 1e-8);
    }
    SUBCASE("N=2") {
        const ModelParams P{2, 0.5};
        CHECK(rel(b_alpha_const(P), 4.0 * tau_integral_closed(1.25, 2.0)) < 1e-12);
        QuadSpec q = oracle_spec();
        auto f = [](double t) {
            const double tau = t / (1.0 - t);
            return 2.0 * 4.0 * std::pow(tau * tau + 4.0, -1.25) / ((1.0 - t) * (1.0 - t));
        };
        CHECK(rel(b_alpha_const(P), integrate_adaptive(f, 0.0, 1.0, q)) < 1e-9);
    }
}

TEST_CASE("h(b)") {
    for (int N : {2, 3, 4, 5}) {
        const ModelParams P{N, 0.5};
        CAPTURE(N);
        CHECK(h_of_b(0.0, P) == 0.0);
        CHECK(std::abs(h_of_b(1e-6, P)) < 1e-6);
        double prev = 0.0;
        for (int i = 1; i <= 20; ++i) {
            const double h = h_of_b(0.5 * i, P);
            CHECK(h > prev);
            prev = h;
        }
        const KernelConstants kc = kernel_constants(P);
        CHECK(rel(h_of_b(64.0, P) / std::pow(64.0, 1.5), kc.h_limit_const) < 0.02);
    }
}

TEST_CASE("h(b) against the defining quadrature of G_alpha") {
    // h(b) = int_R (1 - cos b tau) G_alpha(tau) dtau, computed from G_alpha itself
    const ModelParams P{3, 0.5};
    const double b = 1.3;
    QuadSpec q;
    q.abs_tol = 1e-14;
    q.rel_tol = 1e-11;
    q.max_subdivisions = 400;
    auto f = [&](double t) {
        // G_alpha = t^{-2-alpha} G_scaled, grouped to stay finite as t -> 0
        const double sn = std::sin(0.5 * b * t) / t;
        return 4.0 * sn * sn * std::pow(t, -0.5) * detail::G_scaled(t, P, {});
    };
    double acc = integrate_de(f, 0.0, 1.0, true, false, q);
    acc += integrate_adaptive(f, 1.0, 60.0, q);
    // beyond 60 the series coefficients give the tail of G; cos part is O(60^{-N-alpha-1})
    const double m = P.m();
    const std::vector<double> c = detail::G_series_coeffs(P, 60.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double e = 2.0 * m + 2.0 * j;
        acc += 2.0 * c[j] * std::pow(60.0, 1.0 - e) / (e - 1.0);
    }
    CHECK(rel(h_of_b(b, P), acc) < 1e-6);
}

TEST_CASE("h'(b)") {
    for (int N : {2, 3, 4, 5}) {
        const ModelParams P{N, 0.5};
        CAPTURE(N);
        for (double b : {0.1, 1.0, 5.0}) CHECK(h_prime(b, P) > 0.0);
        const double d = 1e-4;
        const double fd = (h_of_b(1.0 + d, P) - h_of_b(1.0 - d, P)) / (2 * d);
        CHECK(rel(fd, h_prime(1.0, P)) < 1e-5);
        for (double b : {0.3, 2.0, 7.0}) CHECK(rel(h_prime_closed(b, P), h_prime(b, P)) < 1e-9);
    }
    SUBCASE("Bessel form for N=3") {
        for (auto [a, b] : {std::pair{0.3, 0.7}, std::pair{0.5, 1.0}, std::pair{0.8, 2.0}}) {
            const double hb = h_prime_bessel(b, a);
            CHECK(hb > 0.0);
            CHECK(rel(hb, h_prime(b, {3, a})) < 1e-5);
        }
    }
    SUBCASE("V_b homogeneity") {
        for (double a : {0.3, 0.7}) {
            // equal products b xi share K; the rest scales as b^{1+a/2} xi^{-a/2}
            CHECK(rel(V_b(1.0, 2.0, a) / V_b(2.0, 1.0, a), std::pow(2.0, 1.0 + a)) < 1e-12);
            CHECK(V_b(0.5, 3.0, a) > 0.0);
        }
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(ModelParams({1, 0.5}).validate(), DomainError);
    CHECK_THROWS_AS(ModelParams({3, 1.0}).validate(), DomainError);
    CHECK_THROWS_AS(ModelParams({3, 0.0}).validate(), DomainError);
    CHECK_THROWS_AS(h_prime_bessel(0.0, 0.5), DomainError);
}
