#include "cnmc/linearized.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <numbers>

#include "cnmc/parallel.hpp"

namespace cnmc {

using std::numbers::pi;

double eigenvalue(int k, double mu, const ModelParams& params, const QuadSpec& spec) {
    if (k < 0) throw DomainError("eigenvalue: k must be non-negative");
    if (!(mu > 0.0)) throw DomainError("eigenvalue: mu must be positive");
    const double b = b_alpha_const(params, spec);
    return k == 0 ? -b : h_of_b(k * mu, params, spec) - b;
}

SpectralData spectral_data(double mu, int K, const ModelParams& params, const QuadSpec& spec, int threads) {
    if (!(mu > 0.0)) throw DomainError("spectral_data: mu must be positive");
    SpectralData d;
    d.mu = mu;
    d.b_alpha = b_alpha_const(params, spec);
    d.eigenvalues.assign(K + 1, -d.b_alpha);
    parallel_for(K, threads, [&](int i) { d.eigenvalues[i + 1] = h_of_b((i + 1) * mu, params, spec) - d.b_alpha; });
    return d;
}

Profile apply_L_mu(double mu, const Profile& v, const ModelParams& params, const QuadSpec& spec) {
    const int K = static_cast<int>(std::max(v.coeffs.size(), v.sin_coeffs.size())) - 1;
    const SpectralData d = spectral_data(mu, std::max(K, 0), params, spec);
    Profile out = v;
    for (std::size_t k = 0; k < out.coeffs.size(); ++k) out.coeffs[k] *= d.eigenvalues[k];
    for (std::size_t k = 1; k < out.sin_coeffs.size(); ++k) out.sin_coeffs[k] *= d.eigenvalues[k];
    return out;
}

double apply_L_mu_quadrature(double mu, const Profile& v, double s, const ModelParams& params,
                             const QuadSpec& spec) {
    params.validate();
    if (!(mu > 0.0)) throw DomainError("apply_L_mu_quadrature: mu must be positive");
    const int K = std::max(1, static_cast<int>(std::max(v.coeffs.size(), v.sin_coeffs.size())) - 1);
    const double m = params.m();
    const double v0 = eval_u(v, s);

    // mode amplitudes at s: v(s - x) + v(s + x) = 2 sum_k A_k cos(k x)
    std::vector<double> A(K + 1, 0.0);
    for (int k = 0; k <= K; ++k) {
        if (k < static_cast<int>(v.coeffs.size())) A[k] += v.coeffs[k] * std::cos(k * s);
        if (k >= 1 && k < static_cast<int>(v.sin_coeffs.size())) A[k] += v.sin_coeffs[k] * std::sin(k * s);
    }
    // second difference; below x = 0.1 from the half-angle form to avoid cancellation
    auto second_diff_over_t2 = [&](double t) {
        const double x = mu * t;
        if (x > 0.1) return (2.0 * v0 - eval_u(v, s - x) - eval_u(v, s + x)) / (t * t);
        double sum = 0.0;
        for (int k = 1; k <= K; ++k) {
            const double sk = std::sin(0.5 * k * x) / t;
            sum += 4.0 * A[k] * sk * sk;
        }
        return sum;
    };
    auto F = [&](double t) {
        return second_diff_over_t2(t) * std::pow(t, -params.alpha) * detail::G_scaled(t, params, spec);
    };

    QuadSpec q = spec;
    q.abs_tol = std::min(spec.abs_tol, 1e-13);
    q.rel_tol = std::min(spec.rel_tol, 1e-11);
    q.max_subdivisions = std::max(spec.max_subdivisions, 200);
    const double omega = K * mu;
    const double t0 = std::min(1.0, 0.5 * pi / omega);
    double sum = integrate_de_dist([&](double, double t, double) { return t > 0.0 ? F(t) : 0.0; }, 0.0, t0, true,
                                   false, q);
    // whole periods of every mode up to T
    const double T = 2.0 * pi / mu * std::ceil(40.0 * mu / (2.0 * pi));
    const double width = std::min(1.0, 0.5 * pi / omega);
    const int panels = static_cast<int>(std::ceil((T - t0) / width));
    const double w = (T - t0) / panels;
    for (int i = 0; i < panels; ++i) sum += integrate_adaptive(F, t0 + i * w, t0 + (i + 1) * w, q);

    // tail: G = sum_j c_j tau^{-2m-2j}; int_T^inf cos(w tau) tau^{-q} = (q / w) sin_tail(q + 1, w, T)
    const std::vector<double> c = detail::G_series_coeffs(params, T);
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double qe = 2.0 * m + 2.0 * j;
        double tail = 2.0 * v0 * std::pow(T, 1.0 - qe) / (qe - 1.0);
        for (int k = 0; k <= K; ++k) {
            if (A[k] == 0.0) continue;
            const double cos_int =
                k == 0 ? std::pow(T, 1.0 - qe) / (qe - 1.0) : qe / (k * mu) * detail::sin_tail(qe + 1.0, k * mu, T);
            tail -= 2.0 * A[k] * cos_int;
        }
        sum += c[j] * tail;
    }
    return sum - b_alpha_const(params, spec) * v0;
}

Profile dh_at_constant(double kappa, const Profile& v, const ModelParams& params, const QuadSpec& spec) {
    if (!(kappa > 0.0)) throw DomainError("dh_at_constant: kappa must be positive");
    return scaled(apply_L_mu(kappa, v, params, spec), std::pow(kappa, -1.0 - params.alpha));
}

double find_mu_star(const ModelParams& params, const QuadSpec& spec) {
    params.validate();
    const double b = b_alpha_const(params, spec);
    auto f = [&](double x) { return h_of_b(x, params, spec) - b; };
    double lo = 1e-3, hi = 8.0;
    double flo = f(lo), fhi = f(hi);
    if (flo >= 0.0) throw BracketFailure("find_mu_star: h(1e-3) already exceeds b_alpha");
    while (fhi <= 0.0) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        if (hi > 1e6) throw BracketFailure("find_mu_star: no sign change below b = 1e6");
        fhi = f(hi);
    }
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                     boost::math::tools::eps_tolerance<double>(50), iters);
    const double x = 0.5 * (r.first + r.second);
    if (!(std::abs(f(x)) < 1e-10 * b))
        throw NonConvergence("find_mu_star: root not resolved to 1e-10 b_alpha", x, r.second - r.first);
    return x;
}

double transversality(double mu_star, const ModelParams& params, const QuadSpec& spec) {
    const double d = h_prime(mu_star, params, spec);
    if (!(d > 1e-12)) throw TransversalityFailure("h'(mu*) is not positive");
    return d;
}

}  // namespace cnmc
