#include "cnmc/profile.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cnmc {

int Profile::effective_degree() const {
    double total = 0.0;
    for (double c : coeffs) total += std::abs(c);
    for (double c : sin_coeffs) total += std::abs(c);
    int deg = 0;
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        if (std::abs(coeffs[k]) > 1e-15 * total) deg = static_cast<int>(k);
    for (std::size_t k = 1; k < sin_coeffs.size(); ++k)
        if (std::abs(sin_coeffs[k]) > 1e-15 * total) deg = std::max(deg, static_cast<int>(k));
    return deg;
}

bool Profile::is_even() const {
    for (double c : sin_coeffs)
        if (c != 0.0) return false;
    return true;
}

double eval_derivative(const Profile& u, int n, double s) {
    // d^n/ds^n cos(ks) = k^n cs(ks) with cs cycling through cos, -sin, -cos, sin
    const int r = ((n % 4) + 4) % 4;
    double sum = 0.0;
    const std::size_t kmax = std::max(u.coeffs.size(), u.sin_coeffs.size());
    for (std::size_t k = (n == 0 ? 0 : 1); k < kmax; ++k) {
        const double kn = n == 0 ? 1.0 : std::pow(static_cast<double>(k), n);
        const double arg = static_cast<double>(k) * s;
        const double c = std::cos(arg), sn = std::sin(arg);
        const double dc = r == 0 ? c : r == 1 ? -sn : r == 2 ? -c : sn;
        const double ds = r == 0 ? sn : r == 1 ? c : r == 2 ? -sn : -c;
        if (k < u.coeffs.size()) sum += u.coeffs[k] * kn * dc;
        if (k >= 1 && k < u.sin_coeffs.size()) sum += u.sin_coeffs[k] * kn * ds;
    }
    return sum;
}

double eval_u(const Profile& u, double s) { return eval_derivative(u, 0, s); }
double eval_du(const Profile& u, double s) { return eval_derivative(u, 1, s); }

double min_on_grid(const Profile& u, int points) {
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) lo = std::min(lo, eval_u(u, 2.0 * std::numbers::pi * i / points));
    return lo;
}

void require_positive(const Profile& u) {
    if (u.coeffs.empty()) throw PositivityViolation("profile has no coefficients");
    if (!(min_on_grid(u) > 0.0)) throw PositivityViolation("profile is not positive on the sampling grid");
}

Profile shifted(const Profile& u, double c) {
    // cos(k(s - c)) = cos(kc) cos(ks) + sin(kc) sin(ks)
    // sin(k(s - c)) = cos(kc) sin(ks) - sin(kc) cos(ks)
    const std::size_t n = std::max(u.coeffs.size(), u.sin_coeffs.size());
    Profile out;
    out.coeffs.assign(n, 0.0);
    out.sin_coeffs.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = k < u.coeffs.size() ? u.coeffs[k] : 0.0;
        const double b = k >= 1 && k < u.sin_coeffs.size() ? u.sin_coeffs[k] : 0.0;
        if (k == 0) {
            out.coeffs[0] = a;
            continue;
        }
        const double ck = std::cos(k * c), sk = std::sin(k * c);
        out.coeffs[k] = a * ck - b * sk;
        out.sin_coeffs[k] = a * sk + b * ck;
    }
    return out;
}

Profile scaled(const Profile& u, double lam) {
    Profile out = u;
    for (double& c : out.coeffs) c *= lam;
    for (double& c : out.sin_coeffs) c *= lam;
    return out;
}

double lambda0(const Profile& u, double s, double t, double p) {
    const double pt = p * t;
    if (std::abs(pt) < 1e-8) return eval_du(u, s);
    return (eval_u(u, s) - eval_u(u, s - pt)) / pt;
}

double lambda_fn(const Profile& u, double s, double t, double p) {
    return lambda0(u, s, t, p) - eval_du(u, s - p * t);
}

double kernel_K_alpha(const Profile& u, double s, double t, double p, const ModelParams& params) {
    const double l0 = lambda0(u, s, t, p);
    const double d = t * t + t * t * l0 * l0 + eval_u(u, s) * eval_u(u, s - p * t);
    return std::pow(d, -params.m());
}

}  // namespace cnmc
