#pragma once
//
// Bifurcating branch of periodic CNMC cylinders. In rescaled variables the
// profile is w = mu + a (cos + v) with v orthogonal to cos, and
//   Phi(mu, phi) = mu^{1+alpha} (H(mu + phi) - H(mu))
// is solved by cosine collocation on [0, pi] and Newton's method in the
// unknowns (mu, c_0, c_2, ..., c_K).

#include <string>
#include <vector>

#include "cnmc/profile.hpp"

namespace cnmc {

struct BranchConfig {
    int K = 24;
    int M = 128;
    double a_step = 0.005;
    double a_max = 0.06;
    double newton_tol = 1e-10;
    int newton_max_iters = 12;
    double fd_step = 1e-6;
    int threads = 1;

    /// Throws DomainError on K < 8, M < 4K or non-positive steps.
    void validate() const;
};

struct BranchPoint {
    double a = 0.0;
    double mu = 0.0;
    double lambda = 1.0;            // mu / mu*
    std::vector<double> v_coeffs;   // c_0 .. c_K, c_1 = 0
    double residual_sup = 0.0;
    int newton_iters = 0;

    /// w(s) = mu + a (cos s + v(s)).
    Profile rescaled() const;
};

/// Jacobian of the Galerkin system divided by a, kept between solves.
struct NewtonJacobian {
    int n = 0;
    std::vector<double> scaled;  // row-major n x n
    bool from_differences = false;
    bool empty() const { return n == 0; }
};

/// s_i = i pi / M, i = 0..M.
std::vector<double> collocation_nodes(int M);

/// F_j = (2/M) sum'' f_i cos(j s_i), j = 0..K, halved end weights. For a
/// cosine polynomial of degree < M this returns 2 c_0, c_1, ..., c_K.
std::vector<double> dct_project(const std::vector<double>& values, int K);

std::vector<double> phi_residual(double mu, const Profile& phi, int M, const ModelParams& params,
                                 const QuadSpec& spec = {}, int threads = 1);

std::vector<double> galerkin_residual(double mu, const std::vector<double>& v_coeffs, double a,
                                      const BranchConfig& config, const ModelParams& params,
                                      const QuadSpec& spec = {});

/// Newton solve at amplitude a from (mu, v). An empty `jacobian` is filled
/// analytically when v = 0, otherwise by forward differences; on return it
/// holds the matrix last used.
BranchPoint solve_branch_point(double a, double mu_guess, const std::vector<double>& v_guess,
                               const BranchConfig& config, const ModelParams& params,
                               const QuadSpec& spec = {}, NewtonJacobian* jacobian = nullptr);

struct BranchTrace {
    double mu_star = 0.0;
    std::vector<BranchPoint> points;  // ascending in a, including a = 0
    std::vector<std::string> diagnostics;
    bool first_step_failed = false;
};

BranchTrace trace_branch(const BranchConfig& config, const ModelParams& params, const QuadSpec& spec = {});

/// u_a(s) = R + (a / lambda) (cos(lambda s) + v(lambda s)) with R = mu / lambda.
double reconstruct_profile(const BranchPoint& bp, double s);

}  // namespace cnmc
