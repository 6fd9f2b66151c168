#pragma once
//
// Kernel functions of the linearized nonlocal mean curvature operator on
// cylinders: G_alpha, its scaled profile g, the constants b_alpha and g0,
// the symbol h(b) and its derivative.
//
// Every integral over the sphere S^{N-2} is reduced to one dimension in
// r = 1 - sigma_1 with density C_N (r(2-r))^{(N-4)/2}; for N = 2 the sphere
// is the two points r = 0 and r = 2.

#include "cnmc/quad.hpp"

namespace cnmc {

struct ModelParams {
    int N = 3;
    double alpha = 0.5;

    /// Throws DomainError unless N >= 2 and 0 < alpha < 1.
    void validate() const;
    double m() const { return 0.5 * (N + alpha); }
};

struct SphereReduction {
    double c_n = 0.0;
    double weight_exponent = 0.0;

    static SphereReduction of(const ModelParams& params);
};

struct KernelConstants {
    double b_alpha = 0.0;
    double g0 = 0.0;
    double h_limit_const = 0.0;
};

/// int_R (tau^2 + c^2)^{-m} dtau = c^{1-2m} sqrt(pi) Gamma(m-1/2)/Gamma(m).
double tau_integral_closed(double m, double c);

/// int_R (1 - cos tau) |tau|^{-1-s} dtau for 0 < s < 2.
double one_minus_cos_moment(double s);

double G_alpha(double tau, const ModelParams& params, const QuadSpec& spec = {});
double g_of_rho(double rho, const ModelParams& params, const QuadSpec& spec = {});
double g0_const(const ModelParams& params, const QuadSpec& spec = {});
double b_alpha_const(const ModelParams& params, const QuadSpec& spec = {});

/// b_alpha, g0 and lim h(b)/b^{1+alpha}. For N = 2 the small-tau constant
/// of G_alpha is 2, which plays the role of g0.
KernelConstants kernel_constants(const ModelParams& params, const QuadSpec& spec = {});

double h_of_b(double b, const ModelParams& params, const QuadSpec& spec = {});
double h_prime(double b, const ModelParams& params, const QuadSpec& spec = {});

/// h'(b) for N = 3 from the Bessel representation.
double h_prime_bessel(double b, double alpha, const QuadSpec& spec = {});
double V_b(double xi, double b, double alpha);

/// h'(b) from differentiating the closed form of h under the sphere
/// integral (d/dz [z^nu K_nu(z)] = -z^nu K_{nu-1}(z)). Used as a cross-check.
double h_prime_closed(double b, const ModelParams& params, const QuadSpec& spec = {});

namespace detail {

/// Large-|tau| expansion G_alpha(tau) = sum_j coeff[j] |tau|^{-2m-2j}.
/// Converges for |tau| > 2; coefficients are truncated once negligible at
/// |tau| = tau_min.
std::vector<double> G_series_coeffs(const ModelParams& params, double tau_min);

/// |tau|^{2+alpha} G_alpha(tau), finite as tau -> 0 (equal to g(tau^2) for N >= 3).
double G_scaled(double tau, const ModelParams& params, const QuadSpec& spec);

/// K_nu(x) from the power series of I_{+-nu}; accurate for x <= 2 and nu
/// away from integers.
double bessel_k_series(double nu, double x);

/// int_R (1 - cos(b tau)) (tau^2 + c^2)^{-m} dtau, without cancellation.
double one_minus_cos_tau_integral(double m, double c, double b, const QuadSpec& spec);

/// int_T^inf sin(b tau) tau^{-q} dtau by its asymptotic series; needs b T a
/// multiple of 2 pi and b T large.
double sin_tail(double q, double b, double T);

}  // namespace detail

}  // namespace cnmc
