#include "cnmc/branch.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cnmc/linearized.hpp"
#include "cnmc/nmc.hpp"
#include "cnmc/parallel.hpp"

namespace cnmc {

using std::numbers::pi;

void BranchConfig::validate() const {
    if (K < 8) throw DomainError("BranchConfig: K must be at least 8");
    if (M < 4 * K) throw DomainError("BranchConfig: M must be at least 4K");
    if (!(a_step > 0.0) || !(a_max > 0.0)) throw DomainError("BranchConfig: a_step and a_max must be positive");
    if (!(newton_tol > 0.0) || !(fd_step > 0.0)) throw DomainError("BranchConfig: tolerances must be positive");
    if (newton_max_iters < 1) throw DomainError("BranchConfig: newton_max_iters must be positive");
    if (threads < 1) throw DomainError("BranchConfig: threads must be positive");
}

Profile BranchPoint::rescaled() const {
    std::vector<double> c(std::max<std::size_t>(v_coeffs.size(), 2), 0.0);
    for (std::size_t k = 0; k < v_coeffs.size(); ++k) c[k] = a * v_coeffs[k];
    c[0] += mu;
    c[1] = a;
    return Profile(c);
}

std::vector<double> collocation_nodes(int M) {
    std::vector<double> s(M + 1);
    for (int i = 0; i <= M; ++i) s[i] = pi * i / M;
    return s;
}

std::vector<double> dct_project(const std::vector<double>& values, int K) {
    const int M = static_cast<int>(values.size()) - 1;
    if (M < 1) throw DomainError("dct_project: need at least two nodes");
    std::vector<double> F(K + 1, 0.0);
    for (int j = 0; j <= K; ++j) {
        double sum = 0.0;
        for (int i = 0; i <= M; ++i) {
            const double w = (i == 0 || i == M) ? 0.5 : 1.0;
            // cos(j i pi / M) with the angle reduced exactly modulo 2 pi
            const long r = (static_cast<long>(j) * i) % (2L * M);
            sum += w * values[i] * std::cos(pi * r / M);
        }
        F[j] = 2.0 * sum / M;
    }
    return F;
}

namespace {

// Phi at the nodes for several rescaled profiles, one flat parallel loop
std::vector<std::vector<double>> phi_many(double mu, const std::vector<Profile>& w, int M,
                                          const std::vector<double>& mus, const ModelParams& params,
                                          const QuadSpec& spec, int threads) {
    const std::vector<double> s = collocation_nodes(M);
    const double b = b_alpha_const(params, spec);
    for (const Profile& p : w) require_positive(p);
    const int n = static_cast<int>(w.size()), per = M + 1;
    std::vector<std::vector<double>> out(n, std::vector<double>(per));
    parallel_for(n * per, threads, [&](int idx) {
        const int p = idx / per, i = idx % per;
        const double m = mus.empty() ? mu : mus[p];
        out[p][i] = std::pow(m, 1.0 + params.alpha) * nmc_eval(w[p], s[i], params, spec) -
                    m * b / params.alpha;
    });
    return out;
}

Profile rescaled_profile(double mu, const std::vector<double>& v, double a) {
    BranchPoint bp;
    bp.a = a;
    bp.mu = mu;
    bp.v_coeffs = v;
    return bp.rescaled();
}

// x = (mu, c_0, c_2, ..., c_K)
std::vector<double> pack(double mu, const std::vector<double>& v) {
    std::vector<double> x;
    x.push_back(mu);
    x.push_back(v[0]);
    for (std::size_t k = 2; k < v.size(); ++k) x.push_back(v[k]);
    return x;
}

void unpack(const std::vector<double>& x, double& mu, std::vector<double>& v) {
    mu = x[0];
    v.assign(x.size(), 0.0);
    v[0] = x[1];
    for (std::size_t k = 2; k < x.size(); ++k) v[k] = x[k];
}

struct System {
    double a;
    const BranchConfig& cfg;
    const ModelParams& params;
    const QuadSpec& spec;

    std::vector<std::vector<double>> residuals(const std::vector<std::vector<double>>& xs) const {
        std::vector<Profile> w;
        std::vector<double> mus;
        for (const auto& x : xs) {
            double mu;
            std::vector<double> v;
            unpack(x, mu, v);
            w.push_back(rescaled_profile(mu, v, a));
            mus.push_back(mu);
        }
        const auto vals = phi_many(0.0, w, cfg.M, mus, params, spec, cfg.threads);
        std::vector<std::vector<double>> F;
        for (const auto& v : vals) F.push_back(dct_project(v, cfg.K));
        return F;
    }
    std::vector<double> residual(const std::vector<double>& x) const { return residuals({x})[0]; }

    Eigen::MatrixXd fd_jacobian(const std::vector<double>& x, const std::vector<double>& F0) const {
        const int n = static_cast<int>(x.size());
        std::vector<std::vector<double>> xs(n, x);
        std::vector<double> h(n);
        for (int i = 0; i < n; ++i) {
            h[i] = cfg.fd_step * (1.0 + std::abs(x[i]));
            xs[i][i] += h[i];
        }
        const auto Fs = residuals(xs);
        Eigen::MatrixXd J(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) J(j, i) = (Fs[i][j] - F0[j]) / h[i];
        return J;
    }

    // linearization at the constant mu: F_j = a lambda_j(mu) c_j (doubled for j = 0)
    Eigen::MatrixXd analytic_jacobian(double mu) const {
        const int n = cfg.K + 1;
        const SpectralData d = spectral_data(mu, cfg.K, params, spec, cfg.threads);
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
        J(1, 0) = a * h_prime(mu, params, spec);
        J(0, 1) = 2.0 * a * d.eigenvalues[0];
        for (int k = 2; k <= cfg.K; ++k) J(k, k) = a * d.eigenvalues[k];
        return J;
    }
};

double sup(const std::vector<double>& F) {
    double r = 0.0;
    for (double f : F) r = std::isfinite(f) ? std::max(r, std::abs(f)) : INFINITY;
    return r;
}

Eigen::MatrixXd load(const NewtonJacobian& J, double a) {
    Eigen::MatrixXd m(J.n, J.n);
    for (int i = 0; i < J.n; ++i)
        for (int j = 0; j < J.n; ++j) m(i, j) = a * J.scaled[i * J.n + j];
    return m;
}

void store(NewtonJacobian& J, const Eigen::MatrixXd& m, double a, bool fd) {
    J.n = static_cast<int>(m.rows());
    J.scaled.resize(J.n * J.n);
    for (int i = 0; i < J.n; ++i)
        for (int j = 0; j < J.n; ++j) J.scaled[i * J.n + j] = m(i, j) / a;
    J.from_differences = fd;
}

}  // namespace

std::vector<double> phi_residual(double mu, const Profile& phi, int M, const ModelParams& params,
                                 const QuadSpec& spec, int threads) {
    params.validate();
    if (!(mu > 0.0)) throw DomainError("phi_residual: mu must be positive");
    if (M < 1) throw DomainError("phi_residual: M must be positive");
    Profile w = phi;
    if (w.coeffs.empty()) w.coeffs.push_back(0.0);
    w.coeffs[0] += mu;
    return phi_many(mu, {w}, M, {}, params, spec, threads)[0];
}

std::vector<double> galerkin_residual(double mu, const std::vector<double>& v_coeffs, double a,
                                      const BranchConfig& config, const ModelParams& params,
                                      const QuadSpec& spec) {
    config.validate();
    params.validate();
    std::vector<double> v = v_coeffs;
    v.resize(config.K + 1, 0.0);
    v[1] = 0.0;
    const Profile w = rescaled_profile(mu, v, a);
    return dct_project(phi_many(mu, {w}, config.M, {}, params, spec, config.threads)[0], config.K);
}

BranchPoint solve_branch_point(double a, double mu_guess, const std::vector<double>& v_guess,
                               const BranchConfig& config, const ModelParams& params, const QuadSpec& spec,
                               NewtonJacobian* jacobian) {
    config.validate();
    params.validate();
    if (a == 0.0) throw DomainError("solve_branch_point: a must be nonzero");
    if (!(mu_guess > 0.0)) throw DomainError("solve_branch_point: mu must be positive");
    std::vector<double> v = v_guess;
    v.resize(config.K + 1, 0.0);
    v[1] = 0.0;
    NewtonJacobian local;
    NewtonJacobian& cache = jacobian ? *jacobian : local;
    if (!cache.empty() && cache.n != config.K + 1) cache = NewtonJacobian{};

    const System sys{a, config, params, spec};
    std::vector<double> x = pack(mu_guess, v);
    std::vector<double> F = sys.residual(x);
    double r = sup(F);

    Eigen::MatrixXd J;
    bool fresh = false;
    if (cache.empty()) {
        bool trivial = true;
        for (double c : v) trivial = trivial && c == 0.0;
        J = trivial ? sys.analytic_jacobian(mu_guess) : sys.fd_jacobian(x, F);
        store(cache, J, a, !trivial);
        fresh = true;
    } else {
        J = load(cache, a);
    }

    int it = 0;
    double prev = INFINITY;
    while (r >= config.newton_tol && it < config.newton_max_iters) {
        // slow contraction with a reused matrix: rebuild it here
        if (!fresh && r > 0.1 * prev) {
            J = sys.fd_jacobian(x, F);
            store(cache, J, a, true);
            fresh = true;
        }
        const Eigen::Map<const Eigen::VectorXd> Fv(F.data(), F.size());
        const Eigen::VectorXd dx = J.partialPivLu().solve(-Fv);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
        prev = r;
        F = sys.residual(x);
        r = sup(F);
        fresh = false;
        ++it;
        if (!std::isfinite(r)) break;
    }
    if (!(r < config.newton_tol)) {
        std::ostringstream msg;
        msg << "solve_branch_point: residual " << r << " after " << it << " iterations at a = " << a;
        throw NewtonDivergence(msg.str(), r);
    }
    BranchPoint bp;
    bp.a = a;
    unpack(x, bp.mu, bp.v_coeffs);
    bp.residual_sup = r;
    bp.newton_iters = it;
    return bp;
}

BranchTrace trace_branch(const BranchConfig& config, const ModelParams& params, const QuadSpec& spec) {
    config.validate();
    params.validate();
    BranchTrace out;
    out.mu_star = find_mu_star(params, spec);
    transversality(out.mu_star, params, spec);

    BranchPoint zero;
    zero.mu = out.mu_star;
    zero.v_coeffs.assign(config.K + 1, 0.0);
    const int steps = static_cast<int>(std::floor(config.a_max / config.a_step + 1e-9));

    std::vector<BranchPoint> neg;
    std::vector<BranchPoint> pos;
    for (int sign : {1, -1}) {
        std::vector<BranchPoint>& dst = sign > 0 ? pos : neg;
        NewtonJacobian J;
        BranchPoint prev = zero;
        for (int i = 1; i <= steps; ++i) {
            const double a = sign * i * config.a_step;
            try {
                BranchPoint bp = solve_branch_point(a, prev.mu, prev.v_coeffs, config, params, spec, &J);
                bp.lambda = bp.mu / out.mu_star;
                dst.push_back(bp);
                prev = bp;
            } catch (const NewtonDivergence& e) {
                if (i == 1) out.first_step_failed = true;
                out.diagnostics.push_back(e.what());
                break;
            } catch (const PositivityViolation& e) {
                if (i == 1) out.first_step_failed = true;
                out.diagnostics.push_back(std::string("positivity lost: ") + e.what());
                break;
            }
        }
    }
    for (auto it = neg.rbegin(); it != neg.rend(); ++it) out.points.push_back(*it);
    out.points.push_back(zero);
    for (const BranchPoint& bp : pos) out.points.push_back(bp);
    return out;
}

double reconstruct_profile(const BranchPoint& bp, double s) {
    const double lam = bp.lambda;
    const double t = lam * s;
    double v = 0.0;
    for (std::size_t k = 0; k < bp.v_coeffs.size(); ++k) v += bp.v_coeffs[k] * std::cos(k * t);
    return bp.mu / lam + bp.a / lam * (std::cos(t) + v);
}

}  // namespace cnmc
