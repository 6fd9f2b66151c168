#include "cnmc/nmc.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <tuple>

#include "cnmc/parallel.hpp"
#include "trig_profile.hpp"

namespace cnmc {

using std::numbers::pi;

double nmc_constant(double kappa, const ModelParams& params, const QuadSpec& spec) {
    if (!(kappa > 0.0)) throw PositivityViolation("nmc_constant: radius must be positive");
    return std::pow(kappa, -params.alpha) * b_alpha_const(params, spec) / params.alpha;
}

namespace detail {

double periodic_zeta_weight(double q, int n0, double x) {
    const double two_pi = 2.0 * pi;
    return std::pow(two_pi, -q) * hurwitz_zeta(q, n0 + x / two_pi);
}

}  // namespace detail

namespace {

using internal::TrigProfile;

constexpr int kTaylorTerms = 24;
constexpr double kLogMargin = 34.0;

// Gauss-Legendre nodes of the fold [0, 2pi) and the weights Z_q(x) for the
// exponents needed by the algebraic tail. Cached per thread.
struct ZetaTable {
    int n0 = -1;
    double m = 0.0;
    int J = -1;
    int nx = 0;
    std::vector<double> x, w;
    std::vector<std::vector<double>> z;  // z[2j] ~ q = 2m+2j, z[2j+1] ~ q = 2m+2j-1
};

const ZetaTable& zeta_table(int n0, double m, int J, int nx) {
    thread_local std::map<std::tuple<int, double, int, int>, std::unique_ptr<ZetaTable>> cache;
    auto key = std::make_tuple(n0, m, J, nx);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    if (cache.size() > 64) cache.clear();
    auto t = std::make_unique<ZetaTable>();
    t->n0 = n0;
    t->m = m;
    t->J = J;
    t->nx = nx;
    const GaussRule& g = gauss_legendre(nx);
    t->x.resize(nx);
    t->w.resize(nx);
    for (int i = 0; i < nx; ++i) {
        t->x[i] = pi * (1.0 + g.nodes[i]);
        t->w[i] = pi * g.weights[i];
    }
    t->z.assign(2 * J + 2, std::vector<double>(nx));
    for (int j = 0; j <= J; ++j) {
        for (int i = 0; i < nx; ++i) {
            t->z[2 * j][i] = detail::periodic_zeta_weight(2.0 * m + 2.0 * j, n0, t->x[i]);
            t->z[2 * j + 1][i] = detail::periodic_zeta_weight(2.0 * m + 2.0 * j - 1.0, n0, t->x[i]);
        }
    }
    return *cache.emplace(key, std::move(t)).first->second;
}

// Coefficients of the tail beyond tau = 2 pi n0 as a polynomial in p^2:
//   tail(p) = sum_i p^{2i} (ta[i] - (u0/2) p^2 tb[i]).
// (tau^2 + E)^{-m} is expanded binomially in E / tau^2 and the sum over whole
// periods is carried by Hurwitz zeta weights on one folded period.
void tail_coefficients(const TrigProfile& prof, double s, double u0, double m, int N, int n0, double e_max,
                       std::vector<double>& ta, std::vector<double>& tb) {
    const double T = 2.0 * pi * n0;
    const double ratio = e_max / (T * T);
    int J = 0;
    double binom = 1.0;
    for (J = 0; J < 60; ++J) {
        const double next = binom * (-m - J) / (J + 1);
        if (std::abs(next) * std::pow(ratio, J + 1) / (1.0 - ratio) < 1e-17) break;
        binom = next;
    }
    const int band = std::max(1, prof.k_eff) * (2 * J + N + 1);
    const int nx = std::max(32, static_cast<int>(std::ceil(1.6 * band + 40)));
    const ZetaTable& zt = zeta_table(n0, m, J, nx);

    std::vector<double> beta((J + 1) * (J + 2) / 2);
    {
        double bj = 1.0;
        for (int j = 0; j <= J; ++j) {
            if (j > 0) bj *= (-m - j + 1) / j;
            double c = 1.0;
            for (int i = 0; i <= j; ++i) {
                if (i > 0) c *= static_cast<double>(j - i + 1) / i;
                beta[j * (j + 1) / 2 + i] = bj * c;
            }
        }
    }
    ta.assign(J + 1, 0.0);
    tb.assign(J + 1, 0.0);
    std::vector<double> pb(J + 1), pd(J + 1);
    for (int l = 0; l < nx; ++l) {
        const double x = zt.x[l];
        for (int side = 0; side < 2; ++side) {
            double v, dv;
            prof.eval(side == 0 ? s - x : s + x, v, dv);
            const double delta = u0 - v;
            const double sign = side == 0 ? -1.0 : 1.0;
            const double base = zt.w[l] * (N == 2 ? 1.0 : std::pow(v, N - 2));
            pb[0] = pd[0] = 1.0;
            for (int i = 1; i <= J; ++i) {
                pb[i] = pb[i - 1] * u0 * v;
                pd[i] = pd[i - 1] * delta * delta;
            }
            for (int j = 0; j <= J; ++j) {
                const double za = zt.z[2 * j][l];
                const double zv = zt.z[2 * j + 1][l];
                const double ca = base * (delta * za + sign * dv * zv);
                const double cb = base * za;
                for (int i = 0; i <= j; ++i) {
                    const double w = beta[j * (j + 1) / 2 + i] * pb[i] * pd[j - i];
                    ta[i] += w * ca;
                    tb[i] += w * cb;
                }
            }
        }
    }
}


struct Node {
    double tau, a, b, wa, wb;
};

// Everything needed to evaluate, at one axial point s, the inner integral
//   f(p) = int_R [(Delta - tau v') - (u0/2) p^2] v^{N-2} (tau^2 + Delta^2 + u0 v p^2)^{-m} dtau
// for any p in [0, 2], where v = u(s - tau) and Delta = u(s) - v.
class PointIntegral {
public:
    PointIntegral(const TrigProfile& prof, const ModelParams& params, double s, double y_min)
        : m_(params.m()), N_(params.N) {
        double du0;
        prof.eval(s, u0_, du0);
        const int k = std::max(1, prof.k_eff);
        const double tau_c = 0.5 / k;
        const double w_u = std::min(1.0, 4.0 / k);

        // Tail start: whole periods, far enough out for the binomial series.
        const double dmax = std::max(u0_ - prof.umin, prof.umax - u0_);
        const double e_max = 1.05 * (dmax * dmax + 4.0 * u0_ * prof.umax);
        const int n0 = std::max(1, static_cast<int>(std::ceil(4.0 * std::sqrt(e_max) / (2.0 * pi))));
        const double T = 2.0 * pi * n0;

        // Taylor coefficients u^{(n)}(s)/n!
        double taylor[kTaylorTerms + 1];
        double fact = 1.0;
        for (int n = 1; n <= kTaylorTerms; ++n) {
            fact *= n;
            taylor[n] = prof.derivative(n, s) / fact;
        }
        d1_ = taylor[1];
        d2_ = 2.0 * taylor[2];

        auto push = [&](double tau, double w, bool series) {
            for (int side = 0; side < 2; ++side) {
                double v, delta, num;
                if (series) {
                    // right side expands in -tau, left side in +tau
                    const double x = side == 0 ? -tau : tau;
                    double xp = 1.0, dsum = 0.0, nsum = 0.0;
                    for (int n = 1; n <= kTaylorTerms; ++n) {
                        xp *= x;
                        const double t = taylor[n] * xp;
                        dsum += t;
                        nsum += (n - 1) * t;
                    }
                    delta = -dsum;
                    num = nsum;
                    v = u0_ - delta;
                } else {
                    double dv;
                    prof.eval(side == 0 ? s - tau : s + tau, v, dv);
                    delta = u0_ - v;
                    num = side == 0 ? delta - tau * dv : delta + tau * dv;
                }
                const double vn = N_ == 2 ? 1.0 : std::pow(v, N_ - 2);
                nodes_.push_back({tau, tau * tau + delta * delta, u0_ * v, w * num * vn, w * vn});
            }
        };

        const double tau_g = w_u;
        const double y_top = std::log(tau_g);
        const int n_log = static_cast<int>(std::ceil(y_top - y_min));
        tau_lo_ = std::exp(y_top - n_log);
        const GaussRule& g10 = gauss_legendre(10);
        for (int j = n_log - 1; j >= 0; --j) {
            const double yc = y_top - j - 0.5;
            for (int i = 0; i < 10; ++i) {
                const double tau = std::exp(yc + 0.5 * g10.nodes[i]);
                push(tau, 0.5 * g10.weights[i] * tau, tau <= tau_c);
            }
        }
        const GaussRule& g12 = gauss_legendre(12);
        const int n_u = static_cast<int>(std::ceil((T - tau_g) / w_u));
        const double width = (T - tau_g) / n_u;
        for (int j = 0; j < n_u; ++j) {
            const double c = tau_g + (j + 0.5) * width;
            for (int i = 0; i < 12; ++i) push(c + 0.5 * width * g12.nodes[i], 0.5 * width * g12.weights[i], false);
        }

        tail_coefficients(prof, s, u0_, m_, N_, n0, e_max, ta_, tb_);
    }

    double operator()(double p) const { return weighted(p, 0); }

    /// p^{k} f(p), formed without intermediate overflow for tiny p.
    double weighted(double p, int k) const {
        const double p2 = p * p;
        const double h = 0.5 * u0_ * p2;
        double tail = 0.0, pw = 1.0;
        for (std::size_t i = 0; i < ta_.size(); ++i) {
            tail += pw * (ta_[i] - h * tb_[i]);
            pw *= p2;
        }
        if (p == 0.0) {
            double sum = 0.0;
            for (const Node& n : nodes_) sum += n.wa * std::pow(n.a, -m_);
            // integrand ~ u''(s) (1 + u'(s)^2)^{-m} tau^{2-2m} / 2 on each side below tau_lo
            const double e = 3.0 - 2.0 * m_;
            sum += d2_ * std::pow(1.0 + d1_ * d1_, -m_) * std::pow(tau_lo_, e) / e;
            return k == 0 ? sum + tail : 0.0;
        }
        const double cut = p * std::exp(-kLogMargin);
        const auto first = std::lower_bound(nodes_.begin(), nodes_.end(), cut,
                                            [](const Node& n, double c) { return n.tau < c; });
        // D^{-m} = p^{-2m} (a / p^2 + b)^{-m}
        const double ip2 = 1.0 / p2;
        double sum = 0.0;
        for (auto it = first; it != nodes_.end(); ++it) sum += (it->wa - h * it->wb) * std::pow(it->a * ip2 + it->b, -m_);
        const double lp = std::log(p);
        double scaled = 0.0;
        if (sum != 0.0) scaled = std::copysign(std::exp(std::log(std::abs(sum)) + (k - 2.0 * m_) * lp), sum);
        return scaled + std::exp(k * lp) * tail;
    }

    double u0() const { return u0_; }

private:
    double m_;
    int N_;
    double u0_ = 0.0;
    double d1_ = 0.0, d2_ = 0.0;
    double tau_lo_ = 0.0;
    std::vector<Node> nodes_;
    std::vector<double> ta_, tb_;
};

double p_cutoff(double alpha) { return std::max(1e-250, std::pow(1e-16, 1.0 / (1.0 - alpha))); }

double eval_at(const TrigProfile& prof, double s, const ModelParams& params, const QuadSpec& spec) {
    const double m = params.m();
    if (params.N == 2) {
        const PointIntegral f(prof, params, s, -40.0);
        return -2.0 / params.alpha * (f(0.0) + f(2.0));
    }
    const double p_min = p_cutoff(params.alpha);
    const PointIntegral f(prof, params, s, std::log(p_min) - kLogMargin - 1.0);
    const SphereReduction sr = SphereReduction::of(params);
    const double e = sr.weight_exponent;
    QuadSpec q = spec;
    q.abs_tol = 1e-300;
    q.rel_tol = std::min(spec.rel_tol, 1e-13);
    q.de_levels = std::max(spec.de_levels, 12);
    auto g = [&](double, double p, double rc) {
        if (p < p_min) return 0.0;
        return (e == 0.0 ? 1.0 : std::pow(rc * (2.0 + p), e)) * f.weighted(p, params.N - 3);
    };
    (void)m;
    const double res = sr.c_n * std::pow(2.0, 4 - params.N) * integrate_de_dist(g, 0.0, 2.0, true, e < 0, q);
    return -2.0 / params.alpha * res;
}

}  // namespace

double nmc_eval(const Profile& u, double s, const ModelParams& params, const QuadSpec& spec) {
    params.validate();
    const TrigProfile prof(u);
    return eval_at(prof, s, params, spec);
}

std::vector<double> nmc_eval_batch(const Profile& u, std::span<const double> s, const ModelParams& params,
                                   const QuadSpec& spec, int threads) {
    params.validate();
    const TrigProfile prof(u);
    std::vector<double> out(s.size());
    parallel_for(static_cast<int>(s.size()), threads, [&](int i) { out[i] = eval_at(prof, s[i], params, spec); });
    return out;
}

double nmc_eval_lemma21(const Profile& u, double s, const ModelParams& params, const QuadSpec& spec) {
    params.validate();
    if (params.N < 3) throw DomainError("nmc_eval_lemma21 needs N >= 3");
    const TrigProfile prof(u);
    const int N = params.N;
    const double m = params.m();
    const double alpha = params.alpha;
    const SphereReduction sr = SphereReduction::of(params);
    const double e = sr.weight_exponent;

    double u0, du0;
    prof.eval(s, u0, du0);
    const int k = std::max(1, prof.k_eff);
    const double tau_c = 0.5 / k;
    double taylor[kTaylorTerms + 1];
    double fact = 1.0;
    for (int n = 1; n <= kTaylorTerms; ++n) {
        fact *= n;
        taylor[n] = prof.derivative(n, s) / fact;
    }

    QuadSpec inner = spec;
    inner.abs_tol = 1e-300;
    inner.rel_tol = std::min(spec.rel_tol, 1e-12);
    inner.de_levels = std::max(spec.de_levels, 12);

    // sphere integral in r = 1 - sigma_1 of both sides at offset tau
    auto sphere = [&](double tau) {
        double total = 0.0;
        for (int side = 0; side < 2; ++side) {
            double v, delta, num;
            if (tau <= tau_c) {
                const double x = side == 0 ? -tau : tau;
                double xp = 1.0, dsum = 0.0, nsum = 0.0;
                for (int n = 1; n <= kTaylorTerms; ++n) {
                    xp *= x;
                    dsum += taylor[n] * xp;
                    nsum += (n - 1) * taylor[n] * xp;
                }
                delta = -dsum;
                num = nsum;
                v = u0 - delta;
            } else {
                double dv;
                prof.eval(side == 0 ? s - tau : s + tau, v, dv);
                delta = u0 - v;
                num = side == 0 ? delta - tau * dv : delta + tau * dv;
            }
            const double a = tau * tau + delta * delta;
            const double b = 2.0 * u0 * v;
            const double vn = std::pow(v, N - 2);
            auto f = [&](double r, double rc) {
                const double w = e == 0.0 ? 1.0 : std::pow(r * rc, e);
                return w * (num - u0 * r) * vn * std::pow(a + b * r, -m);
            };
            const double r0 = a / b;
            if (r0 < 1.0)
                total += integrate_de_dist([&](double r, double, double) { return f(r, 2.0 - r); }, 0.0, r0, e < 0,
                                           false, inner) +
                         integrate_de_dist([&](double r, double, double rc) { return f(r, rc); }, r0, 2.0, true,
                                           e < 0, inner);
            else
                total += integrate_de_dist([&](double, double r, double rc) { return f(r, rc); }, 0.0, 2.0, e < 0,
                                           e < 0, inner);
        }
        return sr.c_n * total;
    };

    // The summed integrand behaves like c tau^{-alpha} near 0.
    constexpr double tau_min = 1e-10;
    const double tau_1 = std::min(1.0, 4.0 / k);
    double sum = sphere(tau_min) * tau_min / (1.0 - alpha);
    sum += integrate_de([&](double t) { return sphere(t); }, tau_min, tau_1, true, false, spec);

    const double dmax = std::max(u0 - prof.umin, prof.umax - u0);
    const double e_max = 1.05 * (dmax * dmax + 4.0 * u0 * prof.umax);
    const int n0 = std::max(1, static_cast<int>(std::ceil(6.0 * std::sqrt(e_max) / (2.0 * pi))));
    QuadSpec mid = spec;
    mid.max_subdivisions = std::max(spec.max_subdivisions, 400);
    sum += integrate_adaptive([&](double t) { return sphere(t); }, tau_1, 2.0 * pi * n0, mid);

    // tail, integrated against the sphere moments int (2r)^i dsigma
    std::vector<double> ta, tb;
    tail_coefficients(prof, s, u0, m, N, n0, e_max, ta, tb);
    auto moment = [&](int i) {
        return sr.c_n * std::pow(2.0, 2 * i + 2 * e + 1) * std::exp(std::lgamma(i + e + 1) + std::lgamma(e + 1) -
                                                                    std::lgamma(i + 2 * e + 2));
    };
    for (std::size_t i = 0; i < ta.size(); ++i)
        sum += moment(static_cast<int>(i)) * ta[i] - 0.5 * u0 * moment(static_cast<int>(i) + 1) * tb[i];
    return -2.0 / alpha * sum;
}

}  // namespace cnmc
