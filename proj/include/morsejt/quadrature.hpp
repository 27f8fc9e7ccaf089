#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "morsejt/errors.hpp"
#include "morsejt/special.hpp"

namespace morsejt {

/// Gauss quadrature for the weight y^a e^{-y} on (0, inf), a > -1.
///
/// Weights are stored normalized (sum to 1, i.e. expectations under the
/// Gamma(a+1) probability density); the total mass Gamma(a+1) is kept as
/// log_mass so integrals against very deep wells never overflow.
struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;   // normalized: sum == 1
    double alpha_power = 0.0;      // the exponent a in y^a e^{-y}
    double log_mass = 0.0;         // log Gamma(a+1)
    int order = 0;

    /// Expectation of f under the Gamma(a+1) density.
    template <typename F>
    double expect(F&& f) const {
        double acc = 0.0;
        for (int i = 0; i < order; ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }

    /// Full integral of f(y) y^a e^{-y} dy (may overflow for large a; prefer expect + log_mass).
    template <typename F>
    double integrate(F&& f) const {
        return std::exp(log_mass) * expect(f);
    }

    /// Max relative error of the monomial moments E[y^k] = (a+1)_k, k = 1..kmax.
    double moment_error(int kmax) const {
        double worst = 0.0;
        for (int k = 1; k <= kmax; ++k) {
            const double exact = std::exp(log_gamma(alpha_power + 1.0 + k) - log_mass);
            const double got = expect([k](double y) { return std::pow(y, k); });
            worst = std::max(worst, std::abs(got - exact) / exact);
        }
        return worst;
    }
};

/// Expectation of f under the Gamma(a+1) density via the substitution y = e^t
/// and a uniform trapezoid in t. The transformed integrand decays doubly
/// exponentially on both ends, so the rule converges spectrally even for
/// integrands (ln y, 1/y powers) that defeat polynomial-exact Gauss rules.
template <typename F>
double log_substituted_expect(double a, F&& f, double step_fraction = 6.0) {
    if (a <= -1.0)
        throw NonPositiveInput("weight exponent must be > -1, got " + std::to_string(a));
    const double ap1 = a + 1.0;
    const double t_peak = std::log(ap1);
    const double sigma = 1.0 / std::sqrt(ap1);
    const double h = sigma / step_fraction;
    const double t_lo = t_peak - 1.0 - 80.0 / ap1;
    const double t_hi = std::log(ap1 + 40.0 * std::sqrt(ap1) + 120.0);
    const double log_mass = log_gamma(ap1);

    double acc = 0.0;
    for (double t = t_lo; t <= t_hi; t += h) {
        const double y = std::exp(t);
        const double log_w = ap1 * t - y - log_mass;
        if (log_w < -60.0) continue;
        acc += std::exp(log_w) * f(y);
    }
    return acc * h;
}

/// Self-test of the substituted rule against the exact log moment
/// E[ln y] = psi(a+1).
inline double log_substituted_moment_error(double a) {
    const double got = log_substituted_expect(a, [](double y) { return std::log(y); });
    return std::abs(got - digamma(a + 1.0));
}

/// Golub-Welsch on the Jacobi matrix of the generalized Laguerre family:
/// diagonal 2k+a+1, off-diagonal sqrt(k(k+a)). Nodes come from the eigenvalue
/// problem; weights from the closed form
///   w_i = Gamma(n+a+1) x_i / (n! (n+1)^2 [L_{n+1}^{(a)}(x_i)]^2),
/// evaluated in log space: eigenvector first components lose the far tail
/// (absolute noise ~1e-16 dwarfs true weights ~1e-60 there), and those phantom
/// weights would get amplified by large polynomial integrands.
inline QuadratureGrid gauss_laguerre(int order, double a) {
    if (order < 1)
        throw NonPositiveInput("quadrature order must be >= 1");
    if (a <= -1.0)
        throw NonPositiveInput("quadrature exponent must be > -1, got " + std::to_string(a));

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
    for (int k = 0; k < order; ++k) {
        J(k, k) = 2.0 * k + a + 1.0;
        if (k + 1 < order) {
            const double b = std::sqrt((k + 1.0) * (k + 1.0 + a));
            J(k, k + 1) = b;
            J(k + 1, k) = b;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);

    QuadratureGrid g;
    g.order = order;
    g.alpha_power = a;
    g.log_mass = log_gamma(a + 1.0);
    g.nodes.resize(order);
    g.weights.resize(order);
    const double log_pref = log_gamma(order + a + 1.0) - log_gamma(a + 1.0)
                            - log_gamma(order + 1.0) - 2.0 * std::log(order + 1.0);
    for (int i = 0; i < order; ++i) {
        double x = es.eigenvalues()(i);
        // Newton polish against L_n (derivative via L_n' = (n L_n - (n+a) L_{n-1}) / x)
        for (int it = 0; it < 3; ++it) {
            const ScaledValue ln = laguerre_log(order, a, x);
            const ScaledValue lnm1 = laguerre_log(order - 1, a, x);
            const double deriv_over_val =
                (order - (order + a) * lnm1.sign * ln.sign * std::exp(lnm1.log_abs - ln.log_abs))
                / x;
            if (!std::isfinite(deriv_over_val) || deriv_over_val == 0.0) break;
            const double dx = -1.0 / deriv_over_val;
            x += dx;
            if (std::abs(dx) < 1e-15 * x) break;
        }
        g.nodes[i] = x;
        const ScaledValue l = laguerre_log(order + 1, a, x);
        g.weights[i] = std::exp(log_pref + std::log(x) - 2.0 * l.log_abs);
    }

    if (g.moment_error(std::min(order, 6)) > 1e-10)
        throw QuadratureDegraded("moment self-test failed at order " + std::to_string(order)
                                 + ", a = " + std::to_string(a));
    return g;
}

} // namespace morsejt
