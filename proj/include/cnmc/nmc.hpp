#pragma once
//
// Nonlocal mean curvature H(u)(s) of the cylindrical graph E_u, from three
// equivalent integral expressions:
//
//   nmc_eval          outer integral over p = |sigma - e_1|, inner over the
//                     axial offset (production path)
//   nmc_eval_lemma21  outer axial offset, inner sphere integral (oracle)
//   nmc_eval_iform    the I(q, p) form with an integral over s-bar (coarse
//                     cross-check)

#include <span>
#include <vector>

#include "cnmc/profile.hpp"

namespace cnmc {

/// NMC of the straight cylinder of radius kappa: kappa^{-alpha} b_alpha / alpha.
double nmc_constant(double kappa, const ModelParams& params, const QuadSpec& spec = {});

double nmc_eval(const Profile& u, double s, const ModelParams& params, const QuadSpec& spec = {});

/// nmc_eval at many points, split over `threads` workers. The positivity
/// check runs once; results are identical for any thread count.
std::vector<double> nmc_eval_batch(const Profile& u, std::span<const double> s, const ModelParams& params,
                                   const QuadSpec& spec = {}, int threads = 1);

double nmc_eval_lemma21(const Profile& u, double s, const ModelParams& params, const QuadSpec& spec = {});

/// I(q, p) = int_q^inf int_{S^{N-2}} tau^{N-2} (p^2 + 1 + tau^2 - 2 sigma_1 tau)^{-(N+alpha)/2}.
/// Diverges at (q, p) = (1, 0) for q <= 1; throws DomainError there.
double I_qp(double q, double p, const ModelParams& params, const QuadSpec& spec = {});

double nmc_eval_iform(const Profile& u, double s, const ModelParams& params, const QuadSpec& spec = {});

namespace detail {

/// Sum_{n >= n0} over whole periods of tau^{-q} times a periodic function,
/// folded onto x in [0, 2pi): Z_q(x) = (2pi)^{-q} zeta(q, n0 + x / 2pi).
double periodic_zeta_weight(double q, int n0, double x);

}  // namespace detail

}  // namespace cnmc
