#include "cnmc/verify.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "cnmc/branch.hpp"
#include "cnmc/io.hpp"
#include "cnmc/linearized.hpp"
#include "cnmc/nmc.hpp"
#include "cnmc/parallel.hpp"

namespace cnmc {

using std::numbers::pi;

bool VerifyReport::all_pass() const {
    for (const CheckResult& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string VerifyReport::text() const {
    std::string out;
    for (const CheckResult& c : checks)
        out += std::string(c.pass ? "PASS " : "FAIL ") + c.suite + "/" + c.name + " value=" + fmt17(c.value) +
               " bound=" + fmt17(c.bound) + "\n";
    return out;
}

std::string VerifyReport::json() const {
    int passed = 0;
    std::string items;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const CheckResult& c = checks[i];
        passed += c.pass;
        if (i) items += ",\n    ";
        items += "{\"suite\": " + json_string(c.suite) + ", \"name\": " + json_string(c.name) +
                 ", \"pass\": " + (c.pass ? "true" : "false") + ", \"value\": " + fmt17(c.value) +
                 ", \"bound\": " + fmt17(c.bound) + "}";
    }
    return "{\n  \"passed\": " + std::to_string(passed) + ",\n  \"failed\": " +
           std::to_string(checks.size() - passed) + ",\n  \"checks\": [\n    " + items + "\n  ]\n}\n";
}

const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> s = {"quad", "kernels", "nmc", "linearized", "branch"};
    return s;
}

namespace {

struct Sink {
    std::vector<CheckResult>& out;
    std::string suite;

    void add(const std::string& name, double value, double bound) {
        out.push_back({suite, name, value, bound, value < bound});
    }
    // a check that threw counts as failed with an infinite value
    void guarded(const std::string& name, double bound, const std::function<double()>& f) {
        double v;
        try {
            v = f();
        } catch (const std::exception&) {
            v = INFINITY;
        }
        if (std::isnan(v)) v = INFINITY;
        add(name, v, bound);
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

QuadSpec oracle_spec(double rtol) {
    QuadSpec q;
    q.abs_tol = 1e-300;
    q.rel_tol = rtol;
    q.max_subdivisions = 400;
    return q;
}

// b_alpha from the raw double integral over the sphere angle and tau
double b_alpha_brute(const ModelParams& P) {
    const double m = P.m();
    const SphereReduction sr = SphereReduction::of(P);
    const QuadSpec qi = oracle_spec(1e-13), qo = oracle_spec(1e-10);
    auto outer = [&](double th) {
        const double p = 2.0 * std::sin(0.5 * th);
        auto inner = [&](double t) {
            const double y = t / (1.0 - t);
            return std::pow(y * y + 1.0, -m) / ((1.0 - t) * (1.0 - t));
        };
        const double ti = integrate_adaptive(inner, 0.0, 0.5, qi) + integrate_adaptive(inner, 0.5, 1.0, qi);
        return 2.0 * ti * std::exp((3.0 - 2.0 * m) * std::log(p) + (P.N - 3) * std::log(std::sin(th)));
    };
    return sr.c_n * (integrate_de(outer, 0.0, 0.5, true, false, qo) + integrate_adaptive(outer, 0.5, pi, qo));
}

// root of h - b_alpha by nested 100-point scans
double mu_star_scan(const ModelParams& P) {
    const double b = b_alpha_const(P);
    double lo = 1e-2, hi = 20.0;
    while (hi - lo > 1e-8) {
        const double step = (hi - lo) / 100;
        double nlo = lo, nhi = hi;
        for (int i = 1; i <= 100; ++i) {
            const double x = lo + i * step;
            if (h_of_b(x, P) - b >= 0.0) {
                nlo = x - step;
                nhi = x;
                break;
            }
        }
        if (nlo == lo && nhi == hi) throw BracketFailure("mu_star_scan: no crossing");
        lo = nlo;
        hi = nhi;
    }
    return 0.5 * (lo + hi);
}

void quad_suite(Sink& s) {
    s.guarded("adaptive_additivity", 10 * QuadSpec{}.abs_tol, [] {
        auto f = [](double x) { return std::exp(-x) * std::cos(3 * x) + 1.0 / (1.0 + x * x); };
        return std::abs(integrate_adaptive(f, 0.0, 1.0) + integrate_adaptive(f, 1.0, 2.5) -
                        integrate_adaptive(f, 0.0, 2.5));
    });
    s.guarded("halfline_even", 1e-9, [] {
        auto f = [](double t) { return std::pow(1.0 + t * t, -2.0); };
        const double T = 64.0;
        const double tail = pi / 4 - T / (2 * (1 + T * T)) - 0.5 * std::atan(T);
        QuadSpec q = oracle_spec(1e-13);
        const double windowed = integrate_adaptive(f, -T, T, q) + 2 * tail;
        return rel(integrate_halfline_even(f), windowed);
    });
    s.guarded("gamma_recurrence", 1e-12, [] {
        double e = 0.0;
        for (double x : {0.1, 0.5, 1.3, 4.7}) e = std::max(e, rel(gamma(x + 1.0), x * gamma(x)));
        return e;
    });
    s.guarded("bessel_k_half", 1e-9, [] {
        double e = 0.0;
        for (double x : {0.5, 1.0, 2.0, 10.0})
            e = std::max(e, rel(bessel_k(0.5, x), std::sqrt(pi / (2 * x)) * std::exp(-x)));
        return e;
    });
}

void kernels_suite(Sink& s) {
    s.guarded("G_near_bound", 10.0, [] {
        double worst = 0.0;
        for (auto P : {ModelParams{3, 0.5}, ModelParams{4, 0.3}, ModelParams{5, 0.7}}) {
            double mx = 0.0, ends = 0.0;
            for (int i = 0; i <= 40; ++i) {
                const double t = std::pow(10.0, -6.0 + 6.0 * i / 40);
                const double v = std::pow(t, 2 + P.alpha) * G_alpha(t, P);
                mx = std::max(mx, v);
                if (i == 0 || i == 40) ends = std::max(ends, v);
            }
            worst = std::max(worst, mx / ends);
        }
        return worst;
    });
    s.guarded("G_far_bound", 10.0, [] {
        double worst = 0.0;
        for (auto P : {ModelParams{3, 0.5}, ModelParams{4, 0.3}, ModelParams{5, 0.7}}) {
            double mx = 0.0, ends = 0.0;
            for (int i = 0; i <= 40; ++i) {
                const double t = std::pow(10.0, 4.0 * i / 40);
                const double v = std::pow(t, P.N + P.alpha) * G_alpha(t, P);
                mx = std::max(mx, v);
                if (i == 0 || i == 40) ends = std::max(ends, v);
            }
            worst = std::max(worst, mx / ends);
        }
        return worst;
    });
    s.guarded("G_g_identity", 1e-8, [] {
        double e = 0.0;
        for (auto P : {ModelParams{3, 0.5}, ModelParams{4, 0.3}, ModelParams{5, 0.7}})
            for (double t : {0.25, 1.0, 4.0})
                e = std::max(e, rel(G_alpha(t, P), std::pow(t, -2 - P.alpha) * g_of_rho(t * t, P)));
        return e;
    });
    s.guarded("g_lipschitz_at_zero", 2.0, [] {
        double worst = 0.0;
        for (auto P : {ModelParams{3, 0.5}, ModelParams{4, 0.3}}) {
            const double g0 = g0_const(P);
            const double q2 = std::abs(g_of_rho(1e-2, P) - g0) / 1e-2;
            const double q3 = std::abs(g_of_rho(1e-3, P) - g0) / 1e-3;
            worst = std::max(worst, q3 / q2);
        }
        return worst;
    });
    s.guarded("h_growth_b64", 0.02, [] {
        const ModelParams P{3, 0.5};
        const double b = 64.0;
        const double lim = g0_const(P) * one_minus_cos_moment(1.0 + P.alpha);
        return rel(h_of_b(b, P) / std::pow(b, 1.0 + P.alpha), lim);
    });
    s.guarded("h_increasing_violations", 0.5, [] {
        int bad = 0;
        for (int N : {2, 3, 4, 5}) {
            const ModelParams P{N, 0.5};
            double prev = h_of_b(0.5, P);
            for (int i = 2; i <= 20; ++i) {
                const double v = h_of_b(0.5 * i, P);
                bad += !(v > prev);
                prev = v;
            }
        }
        return static_cast<double>(bad);
    });
    s.guarded("b_alpha_raw_quadrature", 1e-8, [] {
        double e = 0.0;
        for (auto P : {ModelParams{3, 0.5}, ModelParams{4, 0.5}, ModelParams{5, 0.3}})
            e = std::max(e, rel(b_alpha_const(P), b_alpha_brute(P)));
        return e;
    });
    s.guarded("h_prime_bessel", 1e-5, [] {
        double e = 0.0;
        for (auto [a, b] : {std::pair{0.5, 1.0765}, std::pair{0.3, 0.7}, std::pair{0.7, 2.5}})
            e = std::max(e, rel(h_prime(b, {3, a}), h_prime_bessel(b, a)));
        return e;
    });
}

void nmc_suite(Sink& s, int threads) {
    s.guarded("constant_identity", 1e-6, [] {
        double e = 0.0;
        for (int N : {2, 3, 4, 5})
            for (double a : {0.25, 0.5, 0.75})
                for (double k : {1.0, 2.0}) {
                    const ModelParams P{N, a};
                    e = std::max(e, rel(a * std::pow(k, a) * nmc_eval(Profile::constant(k), 0.3, P), b_alpha_const(P)));
                }
        return e;
    });

    struct Item {
        ModelParams P;
        Profile u;
        double s;
    };
    std::vector<Item> items;
    for (auto P : {ModelParams{3, 0.5}, ModelParams{4, 0.3}})
        for (const Profile& u : {Profile({1.0, 0.1}), Profile({1.2, 0.15, -0.05}), Profile({0.9, 0.05, 0.02, 0.01})})
            for (double x : {0.0, 1.0, 2.5}) items.push_back({P, u, x});
    std::vector<double> e21(items.size()), eif(items.size());
    bool failed = false;
    try {
        parallel_for(static_cast<int>(items.size()), threads, [&](int i) {
            const Item& it = items[i];
            const double H = nmc_eval(it.u, it.s, it.P);
            e21[i] = rel(nmc_eval_lemma21(it.u, it.s, it.P), H);
            eif[i] = rel(nmc_eval_iform(it.u, it.s, it.P), H);
        });
    } catch (const std::exception&) {
        failed = true;
    }
    double m21 = 0.0, mif = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        m21 = std::max(m21, e21[i]);
        mif = std::max(mif, eif[i]);
    }
    s.add("cross_lemma21", failed ? INFINITY : m21, 1e-6);
    s.add("cross_iform", failed ? INFINITY : mif, 1e-3);

    s.guarded("evenness_periodicity", 1e-8, [] {
        const Profile u({1.0, 0.2, -0.04, 0.01});
        double e = 0.0;
        for (auto P : {ModelParams{3, 0.5}, ModelParams{2, 0.5}})
            for (double x : {0.3, 1.9}) {
                const double H = nmc_eval(u, x, P);
                e = std::max({e, std::abs(nmc_eval(u, -x, P) - H), std::abs(nmc_eval(u, x + 2 * pi, P) - H)});
            }
        return e;
    });
    s.guarded("smaller_radius_larger_H", 0.0, [] {
        const ModelParams P{3, 0.5};
        return nmc_eval(Profile::constant(1.2), 0.0, P) - nmc_eval(Profile::constant(0.8), 0.0, P);
    });
}

void linearized_suite(Sink& s, int threads) {
    struct Item {
        ModelParams P;
        double mu;
        int k;
    };
    std::vector<Item> items;
    for (auto P : {ModelParams{2, 0.5}, ModelParams{3, 0.5}, ModelParams{4, 0.3}})
        for (double mu : {0.5, 1.0, 2.0})
            for (int k = 0; k <= 8; ++k) items.push_back({P, mu, k});
    s.guarded("spectral_vs_quadrature", 1e-6, [&] {
        std::vector<double> err(items.size());
        parallel_for(static_cast<int>(items.size()), threads, [&](int i) {
            const Item& it = items[i];
            std::vector<double> c(it.k + 1, 0.0);
            c[it.k] = 1.0;
            const double lam = eigenvalue(it.k, it.mu, it.P);
            const double q = apply_L_mu_quadrature(it.mu, Profile(c), 0.5, it.P);
            err[i] = std::abs(q - lam * std::cos(0.5 * it.k)) / (1.0 + std::abs(lam));
        });
        double e = 0.0;
        for (double x : err) e = std::max(e, x);
        return e;
    });
    s.guarded("dh_second_order_ratio", 0.8, [] {
        double worst = 0.0;
        for (auto P : {ModelParams{2, 0.5}, ModelParams{3, 0.5}, ModelParams{4, 0.3}}) {
            const double kappa = 1.2;
            const double dh = eval_u(dh_at_constant(kappa, Profile({0.0, 1.0, 0.3}), P), 0.4);
            double err[2];
            int i = 0;
            for (double eps : {2e-3, 1e-3}) {
                const Profile up({kappa, eps, 0.3 * eps}), dn({kappa, -eps, -0.3 * eps});
                err[i++] = std::abs((nmc_eval(up, 0.4, P) - nmc_eval(dn, 0.4, P)) / (2 * eps) - dh);
            }
            worst = std::max(worst, std::abs(err[0] / err[1] - 4.0));
        }
        return worst;
    });
    s.guarded("eigenvalue_order_violations", 0.5, [&] {
        int bad = 0;
        for (auto P : {ModelParams{2, 0.5}, ModelParams{3, 0.5}, ModelParams{4, 0.3}})
            for (double mu : {0.5, 1.0, 2.0}) {
                const SpectralData d = spectral_data(mu, 32, P, {}, threads);
                for (int k = 1; k <= 32; ++k) bad += !(d.eigenvalues[k] > d.eigenvalues[k - 1]);
            }
        return static_cast<double>(bad);
    });
    s.guarded("mu_star_sign_changes_minus_one", 0.5, [] {
        double worst = 0.0;
        for (auto P : {ModelParams{2, 0.5}, ModelParams{3, 0.5}, ModelParams{4, 0.3}}) {
            const double b = b_alpha_const(P);
            int changes = 0;
            double prev = h_of_b(1e-3, P) - b;
            for (int i = 1; i < 200; ++i) {
                const double f = h_of_b(std::pow(10.0, -3.0 + 6.0 * i / 199), P) - b;
                changes += (f > 0) != (prev > 0);
                prev = f;
            }
            worst = std::max(worst, std::abs(changes - 1.0));
        }
        return worst;
    });
    for (auto P : {ModelParams{2, 0.5}, ModelParams{3, 0.5}, ModelParams{4, 0.3}}) {
        char tag_buf[32];
        std::snprintf(tag_buf, sizeof tag_buf, "N%d_a%g", P.N, P.alpha);
        const std::string tag = tag_buf;
        double ms = NAN;
        try {
            ms = find_mu_star(P);
        } catch (const std::exception&) {
        }
        const double b = b_alpha_const(P);
        s.guarded("mu_star_residual_" + tag, 1e-10, [&] { return std::abs(h_of_b(ms, P) - b) / b; });
        s.guarded("mu_star_spectrum_" + tag, 0.5, [&] {
            const double l0 = eigenvalue(0, ms, P), l1 = eigenvalue(1, ms, P), l2 = eigenvalue(2, ms, P);
            return static_cast<double>(!(l0 < 0.0) + !(std::abs(l1) < 1e-10 * b) + !(l2 > 0.0));
        });
        s.guarded("minus_h_prime_at_mu_star_" + tag, 0.0, [&] { return -transversality(ms, P); });
        s.guarded("mu_star_grid_scan_" + tag, 1e-6, [&] { return std::abs(ms - mu_star_scan(P)); });
    }
}

void branch_suite(Sink& s, int threads) {
    for (auto P : {ModelParams{3, 0.5}, ModelParams{2, 0.5}}) {
        const std::string tag = "N" + std::to_string(P.N) + "_";
        BranchConfig cfg;
        cfg.K = 8;
        cfg.M = 32;
        cfg.a_step = 0.01;
        cfg.a_max = 0.03;
        cfg.threads = threads;
        BranchTrace tr;
        bool ok = true;
        try {
            tr = trace_branch(cfg, P);
        } catch (const std::exception&) {
            ok = false;
        }
        ok = ok && tr.diagnostics.empty() && tr.points.size() == 7;
        s.add(tag + "points_missing", ok ? 0.0 : 1.0, 0.5);
        if (!ok) continue;
        const auto& pts = tr.points;
        double res = 0.0;
        for (const BranchPoint& bp : pts) res = std::max(res, bp.residual_sup);
        s.add(tag + "max_residual", res, cfg.newton_tol);

        int same = 0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                same += pts[i].a / pts[i].lambda == pts[j].a / pts[j].lambda;
        s.add(tag + "equal_first_modes", same, 0.5);

        s.guarded(tag + "offgrid_cnmc", 1e-7, [&] {
            const BranchPoint& bp = pts.back();
            const Profile w = bp.rescaled();
            const double target = std::pow(bp.mu, -P.alpha) * b_alpha_const(P) / P.alpha;
            std::vector<double> nodes;
            for (int i = 0; i < 16; ++i) nodes.push_back((i + 0.37) * pi / 16);
            double e = 0.0;
            for (double h : nmc_eval_batch(w, nodes, P, {}, threads)) e = std::max(e, std::abs(h - target));
            return e;
        });
        s.add(tag + "mu_even_in_a", std::abs(pts[5].mu - pts[1].mu), 1e-8);
        double shift = 0.0, slope = 0.0;
        for (int i = 0; i < 64; ++i) {
            const double x = 0.1 * i;
            shift = std::max(shift, std::abs(reconstruct_profile(pts[1], x) -
                                             reconstruct_profile(pts[5], x + pi / pts[5].lambda)));
            const double d = (reconstruct_profile(pts[4], x / pts[4].lambda) -
                              reconstruct_profile(pts[2], x / pts[4].lambda)) /
                             (2 * pts[4].a);
            slope = std::max(slope, std::abs(d - std::cos(x)));
        }
        s.add(tag + "half_period_shift", shift, 1e-7);
        s.add(tag + "first_mode_derivative", slope, 1e-3);

        Eigen::MatrixXd A(pts.size(), 3);
        Eigen::VectorXd y(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            A.row(i) << 1.0, pts[i].a, pts[i].a * pts[i].a;
            y(i) = pts[i].mu;
        }
        const Eigen::Vector3d fit = A.colPivHouseholderQr().solve(y);
        s.add(tag + "mu_quadratic_fit", (A * fit - y).cwiseAbs().maxCoeff(), 1e-6);
        s.add(tag + "lambda_linear_coefficient", std::abs(fit[1] / tr.mu_star), 1e-3);
    }
    s.guarded("mode_K_tail_K16", 1e-9, [&] {
        const ModelParams P{2, 0.5};
        BranchConfig cfg;
        cfg.K = 16;
        cfg.M = 64;
        cfg.threads = threads;
        const double a = 0.02;
        const BranchPoint bp = solve_branch_point(a, find_mu_star(P), std::vector<double>(17, 0.0), cfg, P);
        return std::abs(bp.v_coeffs[16]) / a;
    });
}

}  // namespace

VerifyReport run_verify(const std::string& suite, int threads) {
    if (threads < 1) throw DomainError("run_verify: threads must be positive");
    bool known = suite.empty();
    for (const std::string& n : verify_suites()) known = known || n == suite;
    if (!known) throw DomainError("run_verify: unknown suite '" + suite + "'");
    VerifyReport r;
    auto want = [&](const char* n) { return suite.empty() || suite == n; };
    if (want("quad")) {
        Sink s{r.checks, "quad"};
        quad_suite(s);
    }
    if (want("kernels")) {
        Sink s{r.checks, "kernels"};
        kernels_suite(s);
    }
    if (want("nmc")) {
        Sink s{r.checks, "nmc"};
        nmc_suite(s, threads);
    }
    if (want("linearized")) {
        Sink s{r.checks, "linearized"};
        linearized_suite(s, threads);
    }
    if (want("branch")) {
        Sink s{r.checks, "branch"};
        branch_suite(s, threads);
    }
    return r;
}

}  // namespace cnmc
