#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>

#include "cnmc/nmc.hpp"

namespace cnmc {

namespace {

using std::numbers::pi;

// int_{theta0}^{pi/2} sin^k(th) cos^a(th) dth, with cos^2(theta0) = x,
// sin^2(theta0) = y = 1 - x and theta0 of the sign of `dir`.
double sin_cos_tail(int k, double a, double x, double y, double dir) {
    const double pa = 0.5 * (a + 1.0), pb = 0.5 * (k + 1.0);
    const double full = boost::math::beta(pa, pb);
    // B(x; pa, pb) and its complement B(y; pb, pa), each from its small argument
    const double lower = x <= 0.5 ? boost::math::beta(pa, pb, x) : full - boost::math::beta(pb, pa, y);
    const double upper = y <= 0.5 ? boost::math::beta(pb, pa, y) : full - boost::math::beta(pa, pb, x);
    if (dir >= 0.0) return 0.5 * lower;
    return 0.5 * full + (k % 2 == 0 ? 0.5 : -0.5) * upper;
}

QuadSpec tight(const QuadSpec& spec) {
    QuadSpec q = spec;
    q.abs_tol = 1e-300;
    q.rel_tol = std::min(spec.rel_tol, 1e-11);
    q.de_levels = std::max(spec.de_levels, 12);
    return q;
}

}  // namespace

double I_qp(double q, double p, const ModelParams& params, const QuadSpec& spec) {
    params.validate();
    if (params.N < 3) throw DomainError("I_qp needs N >= 3");
    if (!(q >= 0.0)) throw DomainError("I_qp needs q >= 0");
    if (p == 0.0 && q <= 1.0) throw DomainError("I(q, 0) diverges for q <= 1");
    const int N = params.N;
    const double m = params.m();
    const SphereReduction sr = SphereReduction::of(params);
    const double e = sr.weight_exponent;
    const double p2 = p * p;
    const QuadSpec qs = tight(spec);

    // For fixed r = 1 - sigma_1, the tau integral of tau^{N-2} ((tau - c)^2 + beta^2)^{-m}
    // over [q, inf) with c = 1 - r is a sum of incomplete beta functions.
    auto inner = [&](double r, double rc) {
        const double c = 1.0 - r;
        const double beta2 = p2 + r * rc;
        const double d = q - c;
        const double x = beta2 / (beta2 + d * d);
        const double y = d * d / (beta2 + d * d);
        const double beta = std::sqrt(beta2);
        double sum = 0.0, binom = 1.0;
        for (int k = 0; k <= N - 2; ++k) {
            if (k > 0) binom *= static_cast<double>(N - 1 - k) / k;
            const double a = 2.0 * m - 2.0 - k;
            sum += binom * std::pow(c, N - 2 - k) * std::pow(beta, k + 1 - 2.0 * m) * sin_cos_tail(k, a, x, y, d);
        }
        return (e == 0.0 ? 1.0 : std::pow(r * rc, e)) * sum;
    };
    double total;
    const double r0 = p2;
    if (r0 > 0.0 && r0 < 1.0)
        total = integrate_de_dist([&](double r, double, double) { return inner(r, 2.0 - r); }, 0.0, r0, true, false,
                                  qs) +
                integrate_de_dist([&](double r, double, double rc) { return inner(r, rc); }, r0, 2.0, true, e < 0, qs);
    else
        total = integrate_de_dist([&](double r, double, double rc) { return inner(r, rc); }, 0.0, 2.0, true, e < 0,
                                  qs);
    return sr.c_n * total;
}

double nmc_eval_iform(const Profile& u, double s, const ModelParams& params, const QuadSpec& spec) {
    params.validate();
    if (params.N < 3) throw DomainError("nmc_eval_iform needs N >= 3");
    require_positive(u);
    const double u0 = eval_u(u, s);
    const double alpha = params.alpha;

    // symmetrized combined difference at offset w from s
    auto G = [&](double w) {
        const double P = w / u0;
        const double i0 = I_qp(0.0, P, params, spec);
        return 2.0 * (I_qp(eval_u(u, s + w) / u0, P, params, spec) + I_qp(eval_u(u, s - w) / u0, P, params, spec)) -
               2.0 * i0;
    };

    QuadSpec outer = spec;
    outer.rel_tol = std::max(spec.rel_tol, 1e-7);
    outer.abs_tol = 1e-300;
    outer.max_subdivisions = std::max(spec.max_subdivisions, 400);

    // G ~ c w^{-alpha} near 0
    constexpr double w_min = 1e-6;
    double sum = G(w_min) * w_min / (1.0 - alpha);
    sum += integrate_de(G, w_min, 1.0, true, false, outer);
    double umax = u0;
    for (int i = 0; i < 256; ++i) umax = std::max(umax, eval_u(u, 2.0 * pi * i / 256));
    const double L = 2.0 * pi * std::ceil(30.0 * umax / (2.0 * pi));
    sum += integrate_adaptive(G, 1.0, L, outer);
    // beyond L the difference is 2 I(0, P) up to O(P^{-N-alpha}); with x = 1/P,
    // I(0, 1/x) / x^2 ~ K x^{alpha-1} as x -> 0
    const int N = params.N;
    const double m = params.m();
    const SphereReduction sr = SphereReduction::of(params);
    const double e = sr.weight_exponent;
    const double area = sr.c_n * std::pow(2.0, 2 * e + 1) * std::beta(e + 1, e + 1);
    const double K = area * 0.5 * std::beta(0.5 * (N - 1), m - 0.5 * (N - 1));
    const double x_max = u0 / L;
    constexpr double x_c = 1e-8;
    const double far = K * std::pow(x_c, alpha) / alpha +
                       integrate_de([&](double x) { return I_qp(0.0, 1.0 / x, params, spec) / (x * x); }, x_c, x_max,
                                    true, false, outer);
    sum += 2.0 * u0 * far;
    return std::pow(u0, -1.0 - alpha) * sum;
}

}  // namespace cnmc
