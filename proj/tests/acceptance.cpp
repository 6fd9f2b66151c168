// One line per acceptance criterion; exit status 1 if any fails.
// Usage: acceptance [path-to-cnmc]

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "cnmc/branch.hpp"
#include "cnmc/linearized.hpp"
#include "cnmc/nmc.hpp"
#include "cnmc/verify.hpp"

using namespace cnmc;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Outcome {
    bool pass;
    std::string detail;
};

std::string num(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", x);
    return b;
}

Outcome criterion1() {
    double e = 0.0;
    const std::array<std::tuple<int, double, double>, 5> cases = {
        {{2, 0.5, 1.0}, {3, 0.25, 1.0}, {3, 0.5, 2.0}, {4, 0.3, 1.0}, {5, 0.7, 1.0}}};
    for (auto [N, a, k] : cases) {
        const ModelParams P{N, a};
        e = std::max(e, rel(a * std::pow(k, a) * nmc_eval(Profile::constant(k), 0.0, P), b_alpha_const(P)));
    }
    return {e < 1e-6, "max rel " + num(e)};
}

Outcome criterion2() {
    double e21 = 0.0, eif = 0.0;
    for (auto P : {ModelParams{3, 0.5}, ModelParams{4, 0.3}})
        for (const Profile& u : {Profile({1.0, 0.1}), Profile({1.2, 0.15, -0.05}), Profile({0.9, 0.05, 0.02, 0.01})})
            for (double s : {0.0, 1.0, 2.5}) {
                const double H = nmc_eval(u, s, P);
                e21 = std::max(e21, rel(nmc_eval_lemma21(u, s, P), H));
                eif = std::max(eif, rel(nmc_eval_iform(u, s, P), H));
            }
    return {e21 < 1e-6 && eif < 1e-3, "lemma21 rel " + num(e21) + ", iform rel " + num(eif)};
}

Outcome criterion3() {
    double e = 0.0, worst_ratio = 4.0;
    for (auto P : {ModelParams{2, 0.5}, ModelParams{3, 0.5}, ModelParams{4, 0.3}}) {
        for (double mu : {0.5, 1.0, 2.0})
            for (int k = 0; k <= 8; ++k)
                for (double s : {0.0, 0.5}) {
                    std::vector<double> c(k + 1, 0.0);
                    c[k] = 1.0;
                    const double lam = eigenvalue(k, mu, P);
                    const double q = apply_L_mu_quadrature(mu, Profile(c), s, P);
                    e = std::max(e, std::abs(q - lam * std::cos(k * s)) / (1.0 + std::abs(lam)));
                }
        const double kappa = 1.2;
        const double dh = eval_u(dh_at_constant(kappa, Profile({0.0, 1.0, 0.3}), P), 0.4);
        double err[2];
        int i = 0;
        for (double eps : {2e-3, 1e-3}) {
            const Profile up({kappa, eps, 0.3 * eps}), dn({kappa, -eps, -0.3 * eps});
            err[i++] = std::abs((nmc_eval(up, 0.4, P) - nmc_eval(dn, 0.4, P)) / (2 * eps) - dh);
        }
        const double r = err[0] / err[1];
        if (std::abs(r - 4.0) > std::abs(worst_ratio - 4.0)) worst_ratio = r;
    }
    return {e < 1e-6 && worst_ratio >= 3.2 && worst_ratio <= 4.8,
            "spectral vs quadrature " + num(e) + ", worst FD ratio " + num(worst_ratio)};
}

Outcome criterion4() {
    double id = 0.0, lip = 0.0, growth = 0.0;
    int bad = 0;
    for (auto P : {ModelParams{3, 0.5}, ModelParams{4, 0.3}, ModelParams{5, 0.7}}) {
        for (double t : {0.25, 1.0, 4.0})
            id = std::max(id, rel(G_alpha(t, P), std::pow(t, -2 - P.alpha) * g_of_rho(t * t, P)));
        const double g0 = g0_const(P);
        const double q2 = std::abs(g_of_rho(1e-2, P) - g0) / 1e-2;
        const double q3 = std::abs(g_of_rho(1e-3, P) - g0) / 1e-3;
        lip = std::max(lip, q3 / q2);
        const double b = 64.0;
        growth = std::max(growth, rel(h_of_b(b, P) / std::pow(b, 1 + P.alpha), g0 * one_minus_cos_moment(1 + P.alpha)));
        double prev = h_of_b(0.5, P);
        for (int i = 2; i <= 20; ++i) {
            const double v = h_of_b(0.5 * i, P);
            bad += !(v > prev);
            prev = v;
        }
    }
    return {id < 1e-8 && lip < 2.0 && growth < 0.02 && bad == 0,
            "identity " + num(id) + ", |g-g0|/rho ratio " + num(lip) + ", h growth " + num(growth) +
                ", monotonicity violations " + std::to_string(bad)};
}

Outcome criterion5() {
    double e = 0.0;
    for (auto [a, b] : {std::pair{0.5, 1.0765}, std::pair{0.3, 0.7}, std::pair{0.7, 2.5}})
        e = std::max(e, rel(h_prime(b, {3, a}), h_prime_bessel(b, a)));
    return {e < 1e-5, "max rel " + num(e)};
}

double mu_star_scan(const ModelParams& P) {
    const double b = b_alpha_const(P);
    double lo = 1e-2, hi = 20.0;
    while (hi - lo > 1e-8) {
        const double step = (hi - lo) / 100;
        for (int i = 1; i <= 100; ++i) {
            const double x = lo + i * step;
            if (h_of_b(x, P) >= b) {
                hi = x;
                lo = x - step;
                break;
            }
        }
    }
    return 0.5 * (lo + hi);
}

Outcome criterion6() {
    bool ok = true;
    double scan = 0.0, res = 0.0;
    for (auto P : {ModelParams{2, 0.5}, ModelParams{3, 0.5}, ModelParams{4, 0.3}}) {
        const double ms = find_mu_star(P);
        const double b = b_alpha_const(P);
        res = std::max(res, std::abs(h_of_b(ms, P) - b) / b);
        ok = ok && eigenvalue(0, ms, P) < 0.0 && std::abs(eigenvalue(1, ms, P)) < 1e-10 * b &&
             eigenvalue(2, ms, P) > 0.0 && h_prime(ms, P) > 0.0;
        scan = std::max(scan, std::abs(ms - mu_star_scan(P)));
    }
    return {ok && res < 1e-10 && scan < 1e-6, "rel residual " + num(res) + ", grid scan gap " + num(scan)};
}

Outcome criterion7() {
    std::string detail;
    bool ok = true;
    for (auto P : {ModelParams{3, 0.5}, ModelParams{2, 0.5}}) {
        BranchConfig cfg;
        cfg.K = 8;
        cfg.M = 32;
        cfg.a_step = 0.005;
        cfg.a_max = 0.05;
        const BranchTrace tr = trace_branch(cfg, P);
        const auto& pts = tr.points;
        int neg = 0, pos = 0;
        double res = 0.0;
        for (const BranchPoint& bp : pts) {
            neg += bp.a < 0;
            pos += bp.a > 0;
            res = std::max(res, bp.residual_sup);
        }
        bool reach = !pts.empty() && std::abs(pts.front().a + 0.05) < 1e-12 && std::abs(pts.back().a - 0.05) < 1e-12;
        const std::size_t z = static_cast<std::size_t>(neg);  // index of a = 0
        const double b = b_alpha_const(P);

        double off = 0.0, even = 0.0, shift = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (pts[i].a == 0.0) continue;
            const Profile w = pts[i].rescaled();
            const double target = std::pow(pts[i].mu, -P.alpha) * b / P.alpha;
            const int n = std::abs(std::abs(pts[i].a) - 0.05) < 1e-12 ? 16 : 3;
            for (int j = 0; j < n; ++j) off = std::max(off, std::abs(nmc_eval(w, (j + 0.37) * pi / n, P) - target));
        }
        for (int k = 1; k <= std::min(neg, pos); ++k) {
            const BranchPoint& up = pts[z + k];
            const BranchPoint& dn = pts[z - k];
            even = std::max(even, std::abs(up.mu - dn.mu));
            for (int i = 0; i < 64; ++i) {
                const double s = 0.1 * i;
                shift = std::max(shift, std::abs(reconstruct_profile(dn, s) - reconstruct_profile(up, s + pi / up.lambda)));
            }
        }
        // lambda(a) at a = +-0.01, +-0.02
        Eigen::MatrixXd A(4, 3);
        Eigen::VectorXd y(4);
        int r = 0;
        for (int k : {-4, -2, 2, 4}) {
            const BranchPoint& bp = pts[z + k];
            A.row(r) << 1.0, bp.a, bp.a * bp.a;
            y(r++) = bp.lambda;
        }
        const double lin = std::abs(A.colPivHouseholderQr().solve(y)[1]);
        double slope = 0.0;
        const BranchPoint& p1 = pts[z + 2];
        const BranchPoint& m1 = pts[z - 2];
        for (int i = 0; i < 64; ++i) {
            const double t = 0.1 * i;
            const double d =
                (reconstruct_profile(p1, t / p1.lambda) - reconstruct_profile(m1, t / p1.lambda)) / (2 * p1.a);
            slope = std::max(slope, std::abs(d - std::cos(t)));
        }
        int same = 0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) same += pts[i].a / pts[i].lambda == pts[j].a / pts[j].lambda;

        const bool this_ok = reach && neg >= 10 && pos >= 10 && res < 1e-10 && off < 1e-7 && even < 1e-8 &&
                             shift < 1e-7 && lin < 1e-3 && slope < 1e-3 && same == 0;
        ok = ok && this_ok;
        detail += (detail.empty() ? "" : "; ") + std::string("N=") + std::to_string(P.N) + " points " +
                  std::to_string(neg) + "+" + std::to_string(pos) + " residual " + num(res) + " offgrid " + num(off) +
                  " mu-even " + num(even) + " shift " + num(shift) + " lambda' " + num(lin) + " dU/da-cos " +
                  num(slope) + " equal modes " + std::to_string(same);
    }
    return {ok, detail};
}

std::string capture(const std::string& cmd, int& status) {
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) {
        status = -1;
        return out;
    }
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    status = pclose(p);
    return out;
}

Outcome criterion8(const std::string& cli) {
    std::string r1, r2, r8;
    bool pass_all = true;
    if (!cli.empty()) {
        int s1, s2, s8;
        r1 = capture("'" + cli + "' verify", s1);
        r2 = capture("'" + cli + "' verify", s2);
        r8 = capture("'" + cli + "' --threads 8 verify", s8);
        pass_all = s1 == 0 && s2 == 0 && s8 == 0;
    } else {
        const VerifyReport a = run_verify("", 1), b = run_verify("", 1), c = run_verify("", 8);
        r1 = a.text() + a.json();
        r2 = b.text() + b.json();
        r8 = c.text() + c.json();
        pass_all = a.all_pass() && b.all_pass() && c.all_pass();
    }
    const bool same = !r1.empty() && r1 == r2 && r1 == r8;
    return {same && pass_all, std::string(same ? "byte-identical" : "reports differ") + " (" +
                                   std::to_string(r1.size()) + " bytes), all checks " + (pass_all ? "pass" : "FAIL")};
}

}  // namespace

int main(int argc, char** argv) {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    const std::string cli = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"constant-cylinder identity", criterion1},
        {"cross-expression agreement", criterion2},
        {"linearization", criterion3},
        {"kernel estimates", criterion4},
        {"Bessel identity", criterion5},
        {"bifurcation point", criterion6},
        {"branch", criterion7},
        {"determinism", [&] { return criterion8(cli); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str());
    }
    return failed ? 1 : 0;
}
