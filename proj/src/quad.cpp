#include "cnmc/quad.hpp"

#include <map>
#include <mutex>

namespace cnmc {

void QuadSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(tail_rel_tol > 0.0)) {
        throw DomainError("QuadSpec: tolerances must be strictly positive");
    }
    if (max_subdivisions < 1) throw DomainError("QuadSpec: max_subdivisions must be >= 1");
    if (de_levels < 3) throw DomainError("QuadSpec: de_levels must be >= 3");
}

namespace {

constexpr double kLanczos[14] = {
    57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
    -0.491913816097620199,   .339946499848118887e-4,  .465236289270485756e-4,
    -.983744753048795646e-4, .158088703224912494e-3,  -.210264441724104883e-3,
    .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
    -.261908384015814087e-4, .368991826595316234e-5};

double lanczos_gamma(double x) {
    double y = x;
    const double tmp = x + 671.0 / 128.0;
    double ser = 0.999999999999997092;
    for (double c : kLanczos) ser += c / ++y;
    return std::exp((x + 0.5) * std::log(tmp) - tmp) * 2.5066282746310005 * ser / x;
}

}  // namespace

double gamma(double x) {
    if (!(x > 0.0)) throw DomainError("gamma: argument must be positive");
    if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
    return lanczos_gamma(x);
}

double gamma_reflect(double x) {
    if (x > 0.0) return gamma(x);
    if (x == std::floor(x)) throw DomainError("gamma: pole at non-positive integer");
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma(1.0 - x));
}

double bessel_k(double nu, double x, const QuadSpec& spec) {
    if (!(x > 0.0)) throw DomainError("bessel_k: argument must be positive");
    nu = std::abs(nu);
    // exponent of the integrand, e^{-x cosh t + nu t} up to the even part
    auto expo = [&](double t) { return -x * std::cosh(t) + nu * t; };
    const double t_peak = nu > x ? std::asinh(nu / x) : 0.0;
    const double peak = expo(t_peak);
    if (peak < -760.0) return 0.0;
    double t_max = std::max(std::min(1.0, std::sqrt(90.0 / x)), 2.0 * t_peak);
    while (expo(t_max) - peak > -45.0) t_max *= 1.25;
    QuadSpec q = spec;
    q.abs_tol = 1e-300;
    q.rel_tol = std::min(spec.rel_tol, 1e-14);
    q.max_subdivisions = std::max(spec.max_subdivisions, 400);
    auto f = [&](double t) {
        return 0.5 * (std::exp(expo(t) - peak) + std::exp(-x * std::cosh(t) - nu * t - peak));
    };
    std::vector<double> cuts = {0.0};
    if (t_peak > 1.0) cuts.push_back(t_peak);
    cuts.push_back(t_max);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += integrate_adaptive(f, cuts[i], cuts[i + 1], q);
    return sum * std::exp(peak);
}

double hurwitz_zeta(double s, double a) {
    if (!(s > 1.0) || !(a > 0.0)) throw DomainError("hurwitz_zeta: requires s > 1 and a > 0");
    constexpr double kB2j[8] = {1.0 / 6.0,     -1.0 / 30.0,   1.0 / 42.0,  -1.0 / 30.0,
                                5.0 / 66.0,    -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0};
    double sum = 0.0;
    const double shift = std::max(0.0, std::ceil(12.0 + s / 4.0 - a));
    for (int k = 0; k < static_cast<int>(shift); ++k) sum += std::pow(a + k, -s);
    const double A = a + shift;
    const double Ams = std::pow(A, -s);
    sum += A * Ams / (s - 1.0) + 0.5 * Ams;
    // Euler-Maclaurin corrections B_{2j}/(2j)! * (s)_{2j-1} * A^{-s-2j+1}
    double rising = s;  // (s)_{1}
    double fact = 2.0;  // (2j)!
    double pw = Ams / A;
    for (int j = 1; j <= 8; ++j) {
        const double t = kB2j[j - 1] / fact * rising * pw;
        sum += t;
        if (std::abs(t) < 1e-17 * std::abs(sum)) break;
        rising *= (s + 2 * j - 1) * (s + 2 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        pw /= A * A;
    }
    return sum;
}

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: n must be >= 1");
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            dp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / dp;
            if (std::abs(z - z1) < 1e-16) {
                // one more evaluation at the converged node for the weight
                p1 = 1.0, p2 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
                }
                dp = n * (z * p1 - p2) / (z * z - 1.0);
                break;
            }
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return cache.emplace(n, std::move(rule)).first->second;
}

double integrate_adaptive_fn(const ScalarFn& f, double a, double b, const QuadSpec& spec) {
    spec.validate();
    return integrate_adaptive(f, a, b, spec);
}

double integrate_de_fn(const ScalarFn& f, double a, double b, bool singular_left, bool singular_right,
                       const QuadSpec& spec) {
    spec.validate();
    return integrate_de(f, a, b, singular_left, singular_right, spec);
}

double integrate_halfline_even_fn(const ScalarFn& f, const QuadSpec& spec) {
    spec.validate();
    return integrate_halfline_even(f, spec);
}

}  // namespace cnmc
