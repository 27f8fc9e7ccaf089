#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "morsejt/errors.hpp"

namespace morsejt {

/// log Gamma(x) for x > 0. Thin wrapper so callers never touch the
/// thread-unsafe signgam machinery.
inline double log_gamma(double x) {
    if (x <= 0.0)
        throw NonPositiveArgument("log_gamma requires x > 0, got " + std::to_string(x));
    return std::lgamma(x);
}

/// Digamma psi(x) for x > 0: recurrence shift below 15, asymptotic series above.
inline double digamma(double x) {
    if (x <= 0.0)
        throw NonPositiveArgument("digamma requires x > 0, got " + std::to_string(x));
    double result = 0.0;
    while (x < 15.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Bernoulli tail: 1/(2x) + 1/(12x^2) - 1/(120x^4) + 1/(252x^6) - 1/(240x^8)
    result += std::log(x) - 0.5 * inv
            - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
    return result;
}

/// Generalized Laguerre polynomial L_n^{(a)}(x) by the three-term recurrence.
inline double laguerre(int n, double a, double x) {
    if (n < 0)
        throw NonPositiveArgument("laguerre degree must be >= 0");
    if (n == 0) return 1.0;
    double lm1 = 1.0;
    double l0 = 1.0 + a - x;
    for (int k = 1; k < n; ++k) {
        const double l1 = ((2.0 * k + 1.0 + a - x) * l0 - (k + a) * lm1) / (k + 1.0);
        lm1 = l0;
        l0 = l1;
    }
    return l0;
}

/// L_n^{(a)}(x) in scaled form (log magnitude + sign), overflow-free for the
/// large-argument tail where the plain recurrence leaves double range.
struct ScaledValue {
    double log_abs = 0.0;
    double sign = 1.0;
};

inline ScaledValue laguerre_log(int n, double a, double x) {
    if (n < 0)
        throw NonPositiveArgument("laguerre degree must be >= 0");
    double scale = 0.0;
    double lm1 = 1.0;
    double l0 = (n == 0) ? 1.0 : 1.0 + a - x;
    for (int k = 1; k < n; ++k) {
        double l1 = ((2.0 * k + 1.0 + a - x) * l0 - (k + a) * lm1) / (k + 1.0);
        lm1 = l0;
        l0 = l1;
        const double m = std::max(std::abs(l0), std::abs(lm1));
        if (m > 1e100) {
            l0 /= m;
            lm1 /= m;
            scale += std::log(m);
        }
    }
    if (l0 == 0.0) return {-std::numeric_limits<double>::infinity(), 1.0};
    return {std::log(std::abs(l0)) + scale, l0 > 0.0 ? 1.0 : -1.0};
}

/// Confluent hypergeometric F(-n, b, x) with nonpositive integer first argument:
/// the terminating polynomial, evaluated through the Laguerre recurrence
/// F(-n, a+1, x) = n! L_n^{(a)}(x) / (a+1)_n.
inline double confluent_f(int n, double b, double x) {
    if (n < 0)
        throw NonPositiveArgument("confluent_f degree must be >= 0");
    if (n == 0) return 1.0;
    const double a = b - 1.0;
    const double log_poch = log_gamma(a + 1.0 + n) - log_gamma(a + 1.0);
    return laguerre(n, a, x) * std::exp(log_gamma(n + 1.0) - log_poch);
}

/// Normalized harmonic-oscillator eigenfunctions h_0..h_nmax at scaled
/// coordinate xi = x*sqrt(m w / hbar); prefactor (m w / pi hbar)^{1/4} applied.
inline std::vector<double> hermite_functions(int nmax, double xi, double prefactor) {
    std::vector<double> h(nmax + 1);
    h[0] = prefactor * std::exp(-0.5 * xi * xi);
    if (nmax >= 1) h[1] = std::sqrt(2.0) * xi * h[0];
    for (int p = 1; p < nmax; ++p)
        h[p + 1] = std::sqrt(2.0 / (p + 1)) * xi * h[p] - std::sqrt(double(p) / (p + 1)) * h[p - 1];
    return h;
}

/// n! k^{p-n} L_n^{(p-n)}(k^2) / p!  -- the coefficient family of the
/// generating identity e^{k u}(u - k)^n = sum_p coeff(n,p,k) u^p.
/// Negative upper index handled by L_n^{(-j)}(x) = (-x)^j (n-j)!/n! L_{n-j}^{(j)}(x).
inline double laguerre_expansion_coefficient(int n, int p, double kappa) {
    if (kappa == 0.0) return (p == n) ? 1.0 : 0.0;
    const double nf_over_pf = std::exp(log_gamma(n + 1.0) - log_gamma(p + 1.0));
    if (p >= n)
        return nf_over_pf * std::pow(kappa, p - n) * laguerre(n, p - n, kappa * kappa);
    const int j = n - p;
    const double reflect = std::pow(-kappa * kappa, j)
                         * std::exp(log_gamma(n - j + 1.0) - log_gamma(n + 1.0));
    return nf_over_pf * std::pow(kappa, p - n) * reflect * laguerre(n - j, j, kappa * kappa);
}

} // namespace morsejt
