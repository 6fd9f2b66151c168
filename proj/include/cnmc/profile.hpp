#pragma once
//
// Radial profiles u(s) of cylindrical graphs E_u = {|zeta| < u(s)}, stored as
// 2pi-periodic trigonometric polynomials. Branch and operator code works
// with even profiles (cosine series); sine coefficients exist so that
// translated profiles can be represented exactly.

#include <vector>

#include "cnmc/kernels.hpp"

namespace cnmc {

struct Profile {
    std::vector<double> coeffs;      // u(s) = sum_k coeffs[k] cos(ks)
    std::vector<double> sin_coeffs;  //      + sum_k sin_coeffs[k] sin(ks), k >= 1

    Profile() = default;
    explicit Profile(std::vector<double> c) : coeffs(std::move(c)) {}
    static Profile constant(double kappa) { return Profile({kappa}); }

    /// Highest mode index carrying a coefficient above 1e-15 of the total.
    int effective_degree() const;
    bool is_even() const;
};

double eval_u(const Profile& u, double s);
double eval_du(const Profile& u, double s);

/// n-th derivative u^{(n)}(s).
double eval_derivative(const Profile& u, int n, double s);

/// Minimum of u on a uniform grid of `points` samples of [0, 2pi).
double min_on_grid(const Profile& u, int points = 4096);

/// Throws PositivityViolation unless min_on_grid(u) > 0.
void require_positive(const Profile& u);

/// The profile s -> u(s - c), as an exact trigonometric polynomial.
Profile shifted(const Profile& u, double c);

/// Same profile with every coefficient multiplied by lam: (lam u)(s).
Profile scaled(const Profile& u, double lam);

double lambda0(const Profile& u, double s, double t, double p);
double lambda_fn(const Profile& u, double s, double t, double p);
double kernel_K_alpha(const Profile& u, double s, double t, double p, const ModelParams& params);

}  // namespace cnmc
