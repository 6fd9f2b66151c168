#include "cnmc/kernels.hpp"

#include <cmath>
#include <numbers>

namespace cnmc {

using std::numbers::pi;

void ModelParams::validate() const {
    if (N < 2) throw DomainError("ModelParams: N must be >= 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ModelParams: alpha must lie in (0, 1)");
}

SphereReduction SphereReduction::of(const ModelParams& params) {
    params.validate();
    SphereReduction s;
    s.weight_exponent = 0.5 * (params.N - 4);
    if (params.N >= 3) {
        const double a = 0.5 * (params.N - 2);
        s.c_n = 2.0 * std::pow(pi, a) / gamma(a);
    }
    return s;
}

double tau_integral_closed(double m, double c) {
    if (!(m > 0.5) || !(c > 0.0)) throw DomainError("tau_integral_closed: requires m > 1/2 and c > 0");
    return std::pow(c, 1.0 - 2.0 * m) * std::sqrt(pi) * gamma(m - 0.5) / gamma(m);
}

double one_minus_cos_moment(double s) {
    if (!(s > 0.0 && s < 2.0)) throw DomainError("one_minus_cos_moment: requires 0 < s < 2");
    if (s == 1.0) return pi;
    return -2.0 * gamma_reflect(-s) * std::cos(0.5 * pi * s);
}

namespace {

QuadSpec inner_spec(const QuadSpec& spec) {
    QuadSpec q = spec;
    q.abs_tol = 1e-300;
    q.rel_tol = std::min(spec.rel_tol, 1e-13);
    q.max_subdivisions = std::max(spec.max_subdivisions, 600);
    q.de_levels = std::max(spec.de_levels, 12);
    return q;
}

// Density of the reduced sphere measure in r = 1 - sigma_1, without C_N.
inline double sphere_weight(double r, double two_minus_r, double e) {
    return e == 0.0 ? 1.0 : std::pow(r * two_minus_r, e);
}

}  // namespace

namespace detail {

std::vector<double> G_series_coeffs(const ModelParams& params, double tau_min) {
    params.validate();
    const double m = params.m();
    std::vector<double> c;
    const double x = 1.0 / (tau_min * tau_min);
    if (params.N == 2) {
        // 2 tau^{-2m} + 2 (tau^2 + 4)^{-m}
        double binom = 1.0;
        double p4 = 1.0;
        c.push_back(4.0);
        for (int j = 1; j < 400; ++j) {
            binom *= (-m - j + 1) / j;
            p4 *= 4.0;
            const double cj = 2.0 * binom * p4;
            c.push_back(cj);
            if (std::abs(cj) * std::pow(x, j) < 1e-18 * c[0]) break;
        }
        return c;
    }
    const SphereReduction sr = SphereReduction::of(params);
    const double a = 0.5 * (params.N - 2);
    double M = std::pow(2.0, params.N - 3) * gamma(a) * gamma(a) / gamma(2.0 * a);
    double binom = 1.0;
    double p2 = 1.0;
    c.push_back(2.0 * sr.c_n * M);
    for (int j = 1; j < 400; ++j) {
        binom *= (-m - j + 1) / j;
        p2 *= 2.0;
        M *= 2.0 * (a + j - 1) / (2.0 * a + j - 1);
        const double cj = 2.0 * sr.c_n * binom * p2 * M;
        c.push_back(cj);
        if (std::abs(cj) * std::pow(x, j) < 1e-18 * c[0]) break;
    }
    return c;
}

double G_scaled(double tau, const ModelParams& params, const QuadSpec& spec) {
    const double t = std::abs(tau);
    const double m = params.m();
    if (params.N == 2) return 2.0 * (1.0 + std::pow(t, 2.0 * m) * std::pow(t * t + 4.0, -m));
    if (t >= 0.5) return std::pow(t, 2.0 * m - params.N + 2.0) * G_alpha(t, params, spec);
    const double rho = t * t;
    if (rho < 1e-150) {
        thread_local ModelParams cached{0, 0.0};
        thread_local double g0 = 0.0;
        if (cached.N != params.N || cached.alpha != params.alpha) {
            g0 = g0_const(params, spec);
            cached = params;
        }
        return g0;
    }
    return g_of_rho(rho, params, spec);
}

double bessel_k_series(double nu, double x) {
    nu = std::abs(nu);
    const double s = std::sin(pi * nu);
    const double h = 0.5 * x;
    const double h2 = h * h;
    double tm = std::pow(h, -nu) / gamma_reflect(1.0 - nu);
    double tp = std::pow(h, nu) / gamma_reflect(1.0 + nu);
    double sm = tm, sp = tp;
    for (int k = 1; k < 200; ++k) {
        tm *= h2 / (k * (k - nu));
        tp *= h2 / (k * (k + nu));
        sm += tm;
        sp += tp;
        if (std::abs(tm) + std::abs(tp) < 1e-18 * std::abs(sm)) break;
    }
    return 0.5 * pi * (sm - sp) / s;
}

double one_minus_cos_tau_integral(double m, double c, double b, const QuadSpec& spec) {
    if (b == 0.0) return 0.0;
    if (c == 0.0) return std::pow(b, 2.0 * m - 1.0) * one_minus_cos_moment(2.0 * m - 1.0);
    const double nu = m - 0.5;
    const double z = b * c;
    const double pref = 2.0 * std::sqrt(pi) / gamma(m) * std::pow(c, -2.0 * nu);
    if (z < 2.0) {
        const double h2 = 0.25 * z * z;
        double s = 0.5 * gamma(nu);
        double r = 0.5 * pi / std::sin(pi * nu) * std::pow(0.5 * z, 2.0 * nu) / gamma(nu + 1.0);
        double sum = -r;
        for (int k = 1; k < 200; ++k) {
            s *= h2 / (k * (k - nu));
            r *= h2 / (k * (k + nu));
            sum += s - r;
            if (std::abs(s) + std::abs(r) < 1e-18 * std::abs(sum)) break;
        }
        // the k = 0 term of the I_{-nu} series cancels tau_integral_closed
        return -pref * sum;
    }
    const double basset = pref * std::pow(0.5 * z, nu) * bessel_k(nu, z, spec);
    return tau_integral_closed(m, c) - basset;
}

}  // namespace detail

double G_alpha(double tau, const ModelParams& params, const QuadSpec& spec) {
    params.validate();
    if (tau == 0.0) throw DomainError("G_alpha: tau must be nonzero");
    const double t = std::abs(tau);
    const double m = params.m();
    if (params.N == 2) return 2.0 * (std::pow(t, -2.0 * m) + std::pow(t * t + 4.0, -m));
    if (t > 4.0) {
        thread_local ModelParams cached{0, 0.0};
        thread_local std::vector<double> coeffs;
        if (cached.N != params.N || cached.alpha != params.alpha) {
            coeffs = detail::G_series_coeffs(params, 4.0);
            cached = params;
        }
        const double x = 1.0 / (t * t);
        double sum = 0.0;
        for (std::size_t j = coeffs.size(); j-- > 0;) sum = sum * x + coeffs[j];
        return sum * std::pow(t, -2.0 * m);
    }
    const SphereReduction sr = SphereReduction::of(params);
    const QuadSpec q = inner_spec(spec);
    const double t2 = t * t;
    if (params.N == 3) {
        auto f = [&](double th) {
            const double s = std::sin(0.5 * th);
            return std::pow(t2 + 4.0 * s * s, -m);
        };
        return 2.0 * sr.c_n * integrate_adaptive(f, 0.0, pi, q);
    }
    const double e = sr.weight_exponent;
    auto f = [&](double, double r, double rc) { return sphere_weight(r, rc, e) * std::pow(t2 + 2.0 * r, -m); };
    return 2.0 * sr.c_n * integrate_de_dist(f, 0.0, 2.0, e < 0, e < 0, q);
}

double g_of_rho(double rho, const ModelParams& params, const QuadSpec& spec) {
    params.validate();
    if (params.N < 3) throw DomainError("g_of_rho: requires N >= 3");
    if (!(rho > 0.0)) throw DomainError("g_of_rho: rho must be positive");
    const SphereReduction sr = SphereReduction::of(params);
    const QuadSpec q = inner_spec(spec);
    const double m = params.m();
    const double e = sr.weight_exponent;
    const double inv = 1.0 / rho;
    const bool sing = e < 0;
    double sum = 0.0;
    // near t = 0
    const double s1 = std::min(1.0, inv);
    sum += integrate_de_dist(
        [&](double, double t, double) { return sphere_weight(t, 2.0 - rho * t, e) * std::pow(1.0 + 2.0 * t, -m); },
        0.0, s1, sing, false, q);
    if (inv > 1.0) {
        sum += integrate_adaptive(
            [&](double y) {
                const double t = std::exp(y);
                return t * sphere_weight(t, 2.0 - rho * t, e) * std::pow(1.0 + 2.0 * t, -m);
            },
            0.0, std::log(inv), q);
    }
    // near t = 2/rho, where 2 - rho t = rho (2/rho - t)
    QuadSpec qt = q;
    qt.abs_tol = 1e-3 * q.rel_tol * sum;
    sum += integrate_de_dist(
        [&](double t, double, double d) { return sphere_weight(t, rho * d, e) * std::pow(1.0 + 2.0 * t, -m); },
        s1 == 1.0 && inv > 1.0 ? inv : s1, 2.0 * inv, false, sing, qt);
    return 2.0 * sr.c_n * sum;
}

double g0_const(const ModelParams& params, const QuadSpec& spec) {
    params.validate();
    if (params.N < 3) throw DomainError("g0_const: requires N >= 3");
    const SphereReduction sr = SphereReduction::of(params);
    const QuadSpec q = inner_spec(spec);
    const double m = params.m();
    const double e = sr.weight_exponent;
    const double c_prime = std::pow(2.0, 0.5 * (params.N - 2)) * sr.c_n;
    const double lower = integrate_de_dist(
        [&](double, double t, double) { return (e == 0.0 ? 1.0 : std::pow(t, e)) * std::pow(1.0 + 2.0 * t, -m); },
        0.0, 1.0, e < 0, false, q);
    // t = 1/s on [1, inf)
    const double a2 = 0.5 * params.alpha;
    const double upper = integrate_de_dist(
        [&](double, double s, double) { return std::pow(s, a2) * std::pow(s + 2.0, -m); }, 0.0, 1.0, true, false, q);
    return c_prime * (lower + upper);
}

double b_alpha_const(const ModelParams& params, const QuadSpec& spec) {
    params.validate();
    const double m = params.m();
    if (params.N == 2) return 4.0 * tau_integral_closed(m, 2.0);
    const SphereReduction sr = SphereReduction::of(params);
    const QuadSpec q = inner_spec(spec);
    const double e = sr.weight_exponent;
    // p^2 = 2r and tau_integral_closed(m, p) = p^{1-2m} * k
    const double k = std::sqrt(pi) * gamma(m - 0.5) / gamma(m);
    const double scale = std::pow(2.0, 0.5 - m) * k;
    auto f = [&](double, double r, double rc) {
        return scale * std::pow(r, e + 1.5 - m) * (e == 0.0 ? 1.0 : std::pow(rc, e));
    };
    return 2.0 * sr.c_n * integrate_de_dist(f, 0.0, 2.0, true, e < 0, q);
}

KernelConstants kernel_constants(const ModelParams& params, const QuadSpec& spec) {
    params.validate();
    KernelConstants kc;
    kc.b_alpha = b_alpha_const(params, spec);
    kc.g0 = params.N == 2 ? 2.0 : g0_const(params, spec);
    kc.h_limit_const = kc.g0 * one_minus_cos_moment(1.0 + params.alpha);
    return kc;
}

namespace {

// r^e * int_R (1 - cos(b tau)) (tau^2 + 2r)^{-m} dtau, arranged so that no
// intermediate overflows as r -> 0.
double h_density(double m, double r, double e, double b, const QuadSpec& spec) {
    const double nu = m - 0.5;
    const double h2 = 0.5 * b * b * r;  // (z/2)^2 with z = b sqrt(2r)
    const double k0 = 2.0 * std::sqrt(pi) / gamma(m);
    if (h2 < 1.0) {
        double s = 0.5 * gamma(nu) * 0.25 * b * b / (1.0 - nu) * std::pow(2.0, 1.0 - nu) * std::pow(r, 1.0 - nu + e);
        double rr = 0.5 * pi / std::sin(pi * nu) * std::pow(0.5 * b, 2.0 * nu) / gamma(nu + 1.0) *
                    (e == 0.0 ? 1.0 : std::pow(r, e));
        double sum = s - rr;
        for (int k = 1; k < 200; ++k) {
            s *= h2 / ((k + 1) * (k + 1 - nu));
            rr *= h2 / (k * (k + nu));
            sum += s - rr;
            if (std::abs(s) + std::abs(rr) < 1e-18 * std::abs(sum)) break;
        }
        return -k0 * sum;
    }
    return (e == 0.0 ? 1.0 : std::pow(r, e)) * detail::one_minus_cos_tau_integral(m, std::sqrt(2.0 * r), b, spec);
}

// r^e * (-d/db) int_R cos(b tau) (tau^2 + 2r)^{-m} dtau
double h_prime_density(double m, double r, double e, double b, const QuadSpec& spec) {
    const double mu = m - 1.5;
    const double c = std::sqrt(2.0 * r);
    const double z = b * c;
    const double k0 = 2.0 * std::sqrt(pi) / gamma(m);
    if (z < 2.0) {
        const double h2 = 0.25 * z * z;
        // (z/2)^{mu+1} K_mu(z) c^{-1-2mu} split into the I_{-mu} and I_mu parts
        double a = 0.5 * b * std::pow(2.0, -mu) * std::pow(r, e - mu) / gamma_reflect(1.0 - mu);
        double bb = std::pow(0.5 * b, 1.0 + 2.0 * mu) * (e == 0.0 ? 1.0 : std::pow(r, e)) / gamma_reflect(1.0 + mu);
        double sum = a - bb;
        for (int k = 1; k < 200; ++k) {
            a *= h2 / (k * (k - mu));
            bb *= h2 / (k * (k + mu));
            sum += a - bb;
            if (std::abs(a) + std::abs(bb) < 1e-18 * std::abs(sum)) break;
        }
        return k0 * 0.5 * pi / std::sin(pi * mu) * sum;
    }
    return (e == 0.0 ? 1.0 : std::pow(r, e)) * k0 * std::pow(c, -1.0 - 2.0 * mu) * std::pow(0.5 * z, mu + 1.0) *
           bessel_k(mu, z, spec);
}

}  // namespace

double h_of_b(double b, const ModelParams& params, const QuadSpec& spec) {
    params.validate();
    if (!(b >= 0.0)) throw DomainError("h_of_b: b must be >= 0");
    if (b == 0.0) return 0.0;
    const double m = params.m();
    const QuadSpec q = inner_spec(spec);
    if (params.N == 2) {
        return 2.0 * (detail::one_minus_cos_tau_integral(m, 0.0, b, q) +
                      detail::one_minus_cos_tau_integral(m, 2.0, b, q));
    }
    const SphereReduction sr = SphereReduction::of(params);
    const double e = sr.weight_exponent;
    auto f = [&](double, double r, double rc) {
        return (e == 0.0 ? 1.0 : std::pow(rc, e)) * h_density(m, r, e, b, q);
    };
    return 2.0 * sr.c_n * integrate_de_dist(f, 0.0, 2.0, true, e < 0, q);
}

double detail::sin_tail(double q, double b, double T) {
    const double x = 1.0 / (b * T);
    double term = std::pow(T, -q) / b;
    double sum = term;
    for (int r = 1; r < 60; ++r) {
        const double next = -term * (q + 2 * r - 2) * (q + 2 * r - 1) * x * x;
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

double h_prime_closed(double b, const ModelParams& params, const QuadSpec& spec) {
    params.validate();
    if (!(b > 0.0)) throw DomainError("h_prime_closed: b must be positive");
    const double m = params.m();
    const QuadSpec q = inner_spec(spec);
    if (params.N == 2) {
        const double s = 1.0 + params.alpha;
        return 2.0 * (s * std::pow(b, params.alpha) * one_minus_cos_moment(s) + h_prime_density(m, 2.0, 0.0, b, q));
    }
    const SphereReduction sr = SphereReduction::of(params);
    const double e = sr.weight_exponent;
    auto f = [&](double, double r, double rc) {
        return (e == 0.0 ? 1.0 : std::pow(rc, e)) * h_prime_density(m, r, e, b, q);
    };
    return 2.0 * sr.c_n * integrate_de_dist(f, 0.0, 2.0, true, e < 0, q);
}

double h_prime(double b, const ModelParams& params, const QuadSpec& spec) {
    params.validate();
    if (!(b > 0.0)) throw DomainError("h_prime: b must be positive");
    const double m = params.m();
    const double n = std::ceil(std::max(60.0, 8.0 * b) / (2.0 * pi));
    const double T = 2.0 * pi * n / b;
    QuadSpec q = spec;
    q.rel_tol = std::min(spec.rel_tol, 1e-12);
    q.abs_tol = std::min(spec.abs_tol, 1e-14);
    q.max_subdivisions = std::max(spec.max_subdivisions, 200);
    auto F = [&](double t) {
        return std::sin(b * t) / t * std::pow(t, -params.alpha) * detail::G_scaled(t, params, spec);
    };
    const double t0 = std::min(1.0, 0.5 * pi / b);
    double sum = integrate_de_dist(
        [&](double, double t, double) { return t > 0.0 ? F(t) : 0.0; }, 0.0, t0, true, false, q);
    const double width = std::min(1.0, 0.5 * pi / b);
    const int panels = static_cast<int>(std::ceil((T - t0) / width));
    const double w = (T - t0) / panels;
    for (int i = 0; i < panels; ++i) sum += integrate_adaptive(F, t0 + i * w, t0 + (i + 1) * w, q);
    const std::vector<double> c = detail::G_series_coeffs(params, T);
    for (std::size_t j = 0; j < c.size(); ++j) sum += c[j] * detail::sin_tail(2.0 * m + 2.0 * j - 1.0, b, T);
    return 2.0 * sum;
}

double V_b(double xi, double b, double alpha) {
    const double nu = 0.5 * alpha;
    const double chi = std::pow(2.0, -1.0 - nu) * std::sqrt(pi) / gamma(0.5 * (3.0 + alpha));
    const double z = b * xi;
    const double kv = z < 2.0 ? detail::bessel_k_series(nu, z) : bessel_k(nu, z);
    return 4.0 * chi * std::pow(b, 1.0 + nu) * std::pow(xi, -nu) * kv;
}

double h_prime_bessel(double b, double alpha, const QuadSpec& spec) {
    ModelParams{3, alpha}.validate();
    if (!(b > 0.0)) throw DomainError("h_prime_bessel: b must be positive");
    const QuadSpec q = inner_spec(spec);
    auto f = [&](double, double th, double) { return V_b(2.0 * std::sin(0.5 * th), b, alpha); };
    return 2.0 * integrate_de_dist(f, 0.0, pi, true, false, q);
}

}  // namespace cnmc
