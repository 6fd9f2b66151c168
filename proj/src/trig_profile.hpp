#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "cnmc/profile.hpp"

namespace cnmc::internal {

// Profile with precomputed extrema and a fast evaluator for u and u'.
struct TrigProfile {
    std::vector<double> a, b;
    int K = 0;
    int k_eff = 0;
    double umin = 0.0, umax = 0.0;

    explicit TrigProfile(const Profile& u) {
        K = static_cast<int>(std::max(u.coeffs.size(), u.sin_coeffs.size())) - 1;
        K = std::max(K, 0);
        a.assign(K + 1, 0.0);
        b.assign(K + 1, 0.0);
        for (std::size_t k = 0; k < u.coeffs.size(); ++k) a[k] = u.coeffs[k];
        for (std::size_t k = 1; k < u.sin_coeffs.size(); ++k) b[k] = u.sin_coeffs[k];
        k_eff = u.effective_degree();
        umin = std::numeric_limits<double>::infinity();
        umax = -umin;
        for (int i = 0; i < 4096; ++i) {
            double v, dv;
            eval(2.0 * std::numbers::pi * i / 4096, v, dv);
            umin = std::min(umin, v);
            umax = std::max(umax, v);
        }
        if (!(umin > 0.0)) throw PositivityViolation("profile is not positive on the sampling grid");
    }

    void eval(double x, double& u, double& du) const {
        const double c1 = std::cos(x), s1 = std::sin(x);
        double ck = 1.0, sk = 0.0;
        u = a[0];
        du = 0.0;
        for (int k = 1; k <= K; ++k) {
            const double cn = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = cn;
            u += a[k] * ck + b[k] * sk;
            du += k * (b[k] * ck - a[k] * sk);
        }
    }

    double derivative(int n, double s) const {
        const double phase = 0.5 * std::numbers::pi * n;
        double sum = 0.0;
        for (int k = 1; k <= K; ++k) {
            const double kn = std::pow(static_cast<double>(k), n);
            sum += kn * (a[k] * std::cos(k * s + phase) + b[k] * std::sin(k * s + phase));
        }
        return sum;
    }
};

}  // namespace cnmc::internal
