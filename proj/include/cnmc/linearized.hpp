#pragma once
//
// Linearization of the NMC operator at straight cylinders. In the cosine
// basis the operator L_mu is diagonal with eigenvalues
//   lambda_k(mu) = h(k mu) - b_alpha.

#include <vector>

#include "cnmc/profile.hpp"

namespace cnmc {

struct SpectralData {
    double mu = 0.0;
    std::vector<double> eigenvalues;  // lambda_0 .. lambda_K
    double b_alpha = 0.0;
    double mu_star = 0.0;  // 0 until filled in by the caller
};

double eigenvalue(int k, double mu, const ModelParams& params, const QuadSpec& spec = {});

/// lambda_0 .. lambda_K at mu, computed on `threads` workers.
SpectralData spectral_data(double mu, int K, const ModelParams& params, const QuadSpec& spec = {}, int threads = 1);

/// L_mu v, mode by mode.
Profile apply_L_mu(double mu, const Profile& v, const ModelParams& params, const QuadSpec& spec = {});

/// (L_mu v)(s) by direct quadrature of
///   int_0^inf (2 v(s) - v(s - mu tau) - v(s + mu tau)) G_alpha(tau) dtau - b_alpha v(s).
double apply_L_mu_quadrature(double mu, const Profile& v, double s, const ModelParams& params,
                             const QuadSpec& spec = {});

/// DH(kappa) v = kappa^{-1-alpha} L_kappa v.
Profile dh_at_constant(double kappa, const Profile& v, const ModelParams& params, const QuadSpec& spec = {});

/// The unique mu* > 0 with h(mu*) = b_alpha. Throws BracketFailure if h
/// stays below b_alpha up to b = 1e6.
double find_mu_star(const ModelParams& params, const QuadSpec& spec = {});

/// h'(mu*); throws TransversalityFailure unless it exceeds 1e-12.
double transversality(double mu_star, const ModelParams& params, const QuadSpec& spec = {});

}  // namespace cnmc
