#pragma once
//
// Numerical substrate shared by every other module: adaptive Gauss-Kronrod
// and tanh-sinh quadrature, half-line integration of even integrands, the
// Gamma function, the modified Bessel function K_nu and a few helpers
// (Gauss-Legendre rules, Hurwitz zeta) used to sum algebraic tails.
//
// Integrators are templates so that inner loops inline the integrand.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <vector>

#include "cnmc/errors.hpp"

namespace cnmc {

struct QuadSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 60;
    double tail_rel_tol = 1e-10;
    int de_levels = 10;

    /// Throws DomainError unless all tolerances are positive.
    void validate() const;
};

namespace detail {

// Kronrod 15 / Gauss 7 abscissae and weights on [-1, 1] (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkPanel {
    double a, b, value, error;
    bool operator<(const GkPanel& o) const { return error < o.error; }
};

template <class F>
GkPanel gk15(F& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    const double fc = f(c);
    double kron = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double s = f(c - dx) + f(c + dx);
        kron += kWgk[j] * s;
        if (j % 2 == 1) gauss += kWg[j / 2] * s;
    }
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7-15) quadrature on [a, b]. Bisects the
/// panel with the largest error estimate until the summed estimate meets
/// max(abs_tol, rel_tol*|Q|) or max_subdivisions panels are in use.
template <class F>
double integrate_adaptive(F&& f, double a, double b, const QuadSpec& spec = {}) {
    if (!(a < b)) {
        if (a == b) return 0.0;
        throw DomainError("integrate_adaptive: requires a < b");
    }
    std::priority_queue<detail::GkPanel> panels;
    panels.push(detail::gk15(f, a, b));
    double total = panels.top().value;
    double error = panels.top().error;
    int count = 1;
    while (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (count >= spec.max_subdivisions) {
            throw NonConvergence("integrate_adaptive: subdivision limit reached", total, error);
        }
        const detail::GkPanel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const detail::GkPanel left = detail::gk15(f, worst.a, mid);
        const detail::GkPanel right = detail::gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        panels.push(left);
        panels.push(right);
        ++count;
        error += left.error + right.error - worst.error;
    }
    std::vector<detail::GkPanel> all;
    all.reserve(panels.size());
    while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
    }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    double sum = 0.0;
    for (const auto& p : all) sum += p.value;
    return sum;
}

/// Tanh-sinh quadrature of f3(x, x - a, b - x) on [a, b]. The integrand
/// receives both endpoint distances computed without cancellation, so
/// weights like (b - x)^{-1/2} stay accurate right up to the endpoint.
/// Levels halve the step until successive estimates agree.
template <class F3>
double integrate_de_dist(F3&& f3, double a, double b, bool singular_left, bool singular_right,
                         const QuadSpec& spec = {}) {
    if (!(a < b)) {
        if (a == b) return 0.0;
        throw DomainError("integrate_de: requires a < b");
    }
    constexpr double kHalfPi = std::numbers::pi / 2.0;
    const double hw = 0.5 * (b - a);
    const double t_cap_left = singular_left ? 6.5 : 4.0;
    const double t_cap_right = singular_right ? 6.5 : 4.0;

    // Contribution of the node at parameter t (without the step factor).
    auto term = [&](double t) {
        const double u = kHalfPi * std::sinh(t);
        const double au = std::abs(u);
        const double e = std::exp(-2.0 * au);
        const double near = hw * 2.0 * e / (1.0 + e);  // distance to the closer end
        const double far = 2.0 * hw - near;
        const double sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
        const double w = hw * kHalfPi * std::cosh(t) * sech2;
        if (near <= 0.0 || w == 0.0) return 0.0;
        if (t >= 0.0) {
            const double x = b - near;
            return w * f3(x, far, near);
        }
        const double x = a + near;
        return w * f3(x, near, far);
    };

    // Level 0 (h = 1) fixes how far out each tail is summed.
    double raw = term(0.0);
    double t_right = 0.0;
    double t_left = 0.0;
    for (int side = 0; side < 2; ++side) {
        const double sign = side == 0 ? 1.0 : -1.0;
        const double cap = side == 0 ? t_cap_right : t_cap_left;
        double t = 1.0;
        int small = 0;
        for (; t <= cap; t += 1.0) {
            const double v = term(sign * t);
            raw += v;
            if (std::abs(v) <= 1e-18 * std::abs(raw)) {
                if (++small >= 2) break;
            } else {
                small = 0;
            }
        }
        (side == 0 ? t_right : t_left) = std::min(t, cap);
    }
    t_right = std::min(t_right + 0.5, t_cap_right);
    t_left = std::min(t_left + 0.5, t_cap_left);

    double h = 1.0;
    double estimate = raw * h;
    double previous = estimate;
    double diff = std::numeric_limits<double>::infinity();
    for (int level = 1; level <= spec.de_levels; ++level) {
        h *= 0.5;
        // Odd multiples of the new step.
        for (double t = h; t <= t_right; t += 2.0 * h) raw += term(t);
        for (double t = h; t <= t_left; t += 2.0 * h) raw += term(-t);
        estimate = raw * h;
        diff = std::abs(estimate - previous);
        if (level >= 3 && diff <= std::max(spec.abs_tol, spec.rel_tol * std::abs(estimate))) {
            return estimate;
        }
        previous = estimate;
    }
    throw NonConvergence("integrate_de: level limit reached", estimate, diff);
}

/// Tanh-sinh quadrature of f on [a, b]; the flags mark endpoints where f
/// may have an integrable algebraic singularity. Nodes that round onto an
/// endpoint are dropped, so an integrand like (b - x)^{-1/2} written in
/// terms of x is only good to about sqrt(machine epsilon); use
/// integrate_de_dist when the singular factor can be built from distances.
template <class F>
double integrate_de(F&& f, double a, double b, bool singular_left, bool singular_right,
                    const QuadSpec& spec = {}) {
    return integrate_de_dist(
        [&](double x, double, double) { return (x <= a || x >= b) ? 0.0 : f(x); }, a, b, singular_left,
        singular_right, spec);
}

/// 2 * int_0^inf f for even f. The window [0, T] doubles from T = 8 until the
/// latest increment is below tail_rel_tol times the accumulated value.
template <class F>
double integrate_halfline_even(F&& f, const QuadSpec& spec = {}) {
    QuadSpec panel = spec;
    panel.max_subdivisions = std::max(spec.max_subdivisions, 200);
    double t = 8.0;
    double acc = integrate_adaptive(f, 0.0, t, panel);
    constexpr double kLimit = 1073741824.0;  // 2^30
    while (true) {
        panel.abs_tol = std::max(spec.abs_tol * 1e-3, spec.rel_tol * 1e-3 * std::abs(acc));
        const double inc = integrate_adaptive(f, t, 2.0 * t, panel);
        acc += inc;
        t *= 2.0;
        if (std::abs(inc) < spec.tail_rel_tol * std::abs(acc)) break;
        if (t > kLimit) {
            throw NonConvergence("integrate_halfline_even: truncation exceeded 2^30", 2.0 * acc,
                                 2.0 * std::abs(inc));
        }
    }
    return 2.0 * acc;
}

/// Gamma function for x > 0 (Lanczos, 15-term series with g = 607/128).
double gamma(double x);

/// Gamma function for any real x that is not a non-positive integer,
/// extended to negative arguments by reflection.
double gamma_reflect(double x);

/// Modified Bessel function of the second kind K_nu(x), x > 0, from
/// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt. Even in nu.
double bessel_k(double nu, double x, const QuadSpec& spec = {});

/// Hurwitz zeta function sum_{k>=0} (k + a)^{-s}, s > 1, a > 0.
double hurwitz_zeta(double s, double a);

/// n-point Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

/// Type-erased overloads for bindings and the CLI.
using ScalarFn = std::function<double(double)>;
double integrate_adaptive_fn(const ScalarFn& f, double a, double b, const QuadSpec& spec);
double integrate_de_fn(const ScalarFn& f, double a, double b, bool singular_left, bool singular_right,
                       const QuadSpec& spec);
double integrate_halfline_even_fn(const ScalarFn& f, const QuadSpec& spec);

}  // namespace cnmc
