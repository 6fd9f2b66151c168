#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "cnmc/branch.hpp"
#include "cnmc/linearized.hpp"
#include "cnmc/nmc.hpp"

using namespace cnmc;
using std::numbers::pi;

namespace {

BranchConfig small_config() {
    BranchConfig c;
    c.K = 8;
    c.M = 32;
    c.a_step = 0.01;
    c.a_max = 0.03;
    return c;
}

double sup_abs(const std::vector<double>& v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}

// least-squares coefficients of y = c0 + c1 x + c2 x^2
Eigen::Vector3d quad_fit(const std::vector<double>& x, const std::vector<double>& y) {
    Eigen::MatrixXd A(x.size(), 3);
    Eigen::VectorXd b(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = x[i];
        A(i, 2) = x[i] * x[i];
        b(i) = y[i];
    }
    return A.colPivHouseholderQr().solve(b);
}

}  // namespace

TEST_CASE("cosine transform") {
    const int M = 32;
    const std::vector<double> c = {0.7, -0.2, 0.05, 0.0, 1e-3, 0.3, 0.0, 0.0, 2e-6};
    const std::vector<double> s = collocation_nodes(M);
    REQUIRE(s.size() == M + 1);
    CHECK(s[M] == pi);
    std::vector<double> f(M + 1);
    for (int i = 0; i <= M; ++i) {
        f[i] = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) f[i] += c[k] * std::cos(k * s[i]);
    }
    const std::vector<double> F = dct_project(f, 12);
    CHECK(std::abs(F[0] - 2.0 * c[0]) < 1e-13);
    for (std::size_t k = 1; k < F.size(); ++k) CHECK(std::abs(F[k] - (k < c.size() ? c[k] : 0.0)) < 1e-13);
}

TEST_CASE("rescaled residual") {
    const ModelParams P{3, 0.5};
    const double b = b_alpha_const(P);
    SUBCASE("zero perturbation") {
        for (double mu : {0.7, 1.4}) CHECK(sup_abs(phi_residual(mu, Profile({0.0}), 16, P)) < 1e-12);
    }
    SUBCASE("constant shift") {
        const double mu = 1.1, c = 0.2;
        const double expect = std::pow(mu, 1.0 + P.alpha) * (std::pow(mu + c, -P.alpha) - std::pow(mu, -P.alpha)) * b /
                              P.alpha;
        for (double v : phi_residual(mu, Profile::constant(c), 8, P))
            CHECK(v == doctest::Approx(expect).epsilon(1e-9));
    }
    SUBCASE("no linear term at the bifurcation point") {
        const double ms = find_mu_star(P);
        double ratio[2];
        int i = 0;
        for (double a : {1e-2, 1e-3}) ratio[i++] = sup_abs(phi_residual(ms, Profile({0.0, a}), 32, P)) / a;
        CHECK(ratio[0] < 10 * 1e-2);
        CHECK(ratio[1] < 10 * 1e-3);
        CHECK(ratio[0] / ratio[1] > 7.0);
        CHECK(ratio[0] / ratio[1] < 13.0);
    }
    CHECK_THROWS_AS(phi_residual(0.5, Profile({0.0, 0.6}), 8, P), PositivityViolation);
}

TEST_CASE("Galerkin system") {
    const ModelParams P{2, 0.5};
    BranchConfig cfg = small_config();
    CHECK(sup_abs(galerkin_residual(0.9, std::vector<double>(9, 0.0), 0.0, cfg, P)) < 1e-12);
    const std::vector<double> v = {0.01, 0.0, -0.02, 0.001};
    cfg.threads = 1;
    const auto one = galerkin_residual(0.52, v, 0.03, cfg, P);
    cfg.threads = 3;
    const auto three = galerkin_residual(0.52, v, 0.03, cfg, P);
    REQUIRE(one.size() == 9);
    for (int j = 0; j < 9; ++j) CHECK(one[j] == three[j]);
    CHECK(std::abs(one[1]) > 1e-6);

    BranchConfig bad = small_config();
    bad.M = 31;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = small_config();
    bad.K = 7;
    bad.M = 28;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("single points") {
    const ModelParams P{2, 0.5};
    const BranchConfig cfg = small_config();
    const double ms = find_mu_star(P);
    const std::vector<double> zero(cfg.K + 1, 0.0);
    std::vector<double> as = {-0.02, -0.01, 0.01, 0.02}, lam;
    std::vector<BranchPoint> pts;
    for (double a : as) {
        const BranchPoint bp = solve_branch_point(a, ms, zero, cfg, P);
        CHECK(bp.residual_sup < cfg.newton_tol);
        CHECK(bp.v_coeffs[1] == 0.0);
        CHECK(sup_abs(galerkin_residual(bp.mu, bp.v_coeffs, a, cfg, P)) < cfg.newton_tol);
        lam.push_back(bp.mu / ms);
        pts.push_back(bp);
    }
    CHECK(std::abs(pts[0].mu - pts[3].mu) < 1e-8);
    CHECK(std::abs(pts[1].mu - pts[2].mu) < 1e-8);
    CHECK(std::abs(quad_fit(as, lam)[1]) < 1e-3);
    // a -> 0: mu -> mu* and v -> 0
    CHECK(std::abs(pts[2].mu - ms) < std::abs(pts[3].mu - ms));
    CHECK(sup_abs(pts[2].v_coeffs) < sup_abs(pts[3].v_coeffs));

    SUBCASE("failures") {
        BranchConfig tight = cfg;
        tight.newton_max_iters = 1;
        CHECK_THROWS_AS(solve_branch_point(0.04, ms, zero, tight, P), NewtonDivergence);
        CHECK_THROWS_AS(solve_branch_point(2.0, ms, zero, cfg, P), PositivityViolation);
        CHECK_THROWS_AS(solve_branch_point(0.0, ms, zero, cfg, P), DomainError);
    }
    SUBCASE("spectral tail") {
        BranchConfig wide = cfg;
        wide.K = 16;
        wide.M = 64;
        const BranchPoint bp = solve_branch_point(0.02, ms, std::vector<double>(17, 0.0), wide, P);
        CHECK(std::abs(bp.v_coeffs[16]) < 1e-9 * 0.02);
    }
}

TEST_CASE("traced branch") {
    const ModelParams P{2, 0.5};
    const BranchConfig cfg = small_config();
    const BranchTrace tr = trace_branch(cfg, P);
    REQUIRE(tr.diagnostics.empty());
    REQUIRE(tr.points.size() == 7);
    const BranchPoint& z = tr.points[3];
    CHECK(z.a == 0.0);
    CHECK(z.mu == tr.mu_star);
    for (double s : {0.0, 1.0, 4.0}) CHECK(reconstruct_profile(z, s) == tr.mu_star);

    std::vector<double> as, mus;
    for (const BranchPoint& bp : tr.points) {
        CHECK(bp.residual_sup < cfg.newton_tol);
        CHECK(bp.lambda == doctest::Approx(bp.mu / tr.mu_star).epsilon(1e-15));
        CHECK(min_on_grid(bp.rescaled()) > 0.0);
        as.push_back(bp.a);
        mus.push_back(bp.mu);
    }
    for (std::size_t i = 0; i < tr.points.size(); ++i)
        for (std::size_t j = i + 1; j < tr.points.size(); ++j)
            CHECK(tr.points[i].a / tr.points[i].lambda != tr.points[j].a / tr.points[j].lambda);

    const Eigen::Vector3d fit = quad_fit(as, mus);
    for (std::size_t i = 0; i < as.size(); ++i)
        CHECK(std::abs(fit[0] + fit[1] * as[i] + fit[2] * as[i] * as[i] - mus[i]) < 1e-6);

    const BranchPoint& up = tr.points[5];  // a = 0.02
    const BranchPoint& dn = tr.points[1];
    REQUIRE(up.a == doctest::Approx(0.02));
    REQUIRE(dn.a == doctest::Approx(-0.02));
    CHECK(std::abs(up.mu - dn.mu) < 1e-8);
    double shift = 0.0, period = 0.0;
    for (int i = 0; i < 64; ++i) {
        const double s = 0.1 * i;
        shift = std::max(shift, std::abs(reconstruct_profile(dn, s) - reconstruct_profile(up, s + pi / up.lambda)));
        period = std::max(period, std::abs(reconstruct_profile(up, s + 2 * pi / up.lambda) - reconstruct_profile(up, s)));
    }
    CHECK(shift < 1e-7);
    CHECK(period < 1e-12);

    const BranchPoint& p1 = tr.points[4];  // a = 0.01
    const BranchPoint& m1 = tr.points[2];
    double dev = 0.0;
    for (int i = 0; i < 64; ++i) {
        const double t = 0.1 * i;
        const double d = (reconstruct_profile(p1, t / p1.lambda) - reconstruct_profile(m1, t / p1.lambda)) / (2 * p1.a);
        dev = std::max(dev, std::abs(d - std::cos(t)));
    }
    CHECK(dev < 1e-3);

    const BranchPoint& last = tr.points.back();
    const Profile w = last.rescaled();
    const double target = std::pow(last.mu, -P.alpha) * b_alpha_const(P) / P.alpha;
    for (int i = 0; i < 16; ++i) CHECK(std::abs(nmc_eval(w, (i + 0.37) * pi / 16, P) - target) < 1e-7);
}
