#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "morsejt/errors.hpp"
#include "morsejt/matrix.hpp"
#include "morsejt/quadrature.hpp"
#include "morsejt/special.hpp"

namespace morsejt {

/// Physical inputs of a Morse well V0 (e^{-2 a x} - 2 e^{-a x}) together with
/// the derived dimensionless shape.
struct MorseParams {
    double m = 0.0;
    double V0 = 0.0;
    double alpha = 0.0;
    double hbar = 0.0;

    double nu = 0.0;          // sqrt(8 m V0 / (alpha^2 hbar^2))
    double hbar_omega = 0.0;  // hbar Omega = 4 V0 / nu^2
    double omega = 0.0;
    double omega_harm = 0.0;  // alpha sqrt(2 V0 / m)
    int n_nominal = 0;          // floor((nu - 1)/2)
    int n_eff = 0;            // largest n with s_n above the normalizability threshold

    double s(int n) const { return 0.5 * (nu - 1.0) - n; }
    int basis_size() const { return n_eff + 1; }
};

// States with s_n at or below this are excluded from the basis: their norm
// under dy/(alpha y) is log-divergent.
inline constexpr double kThresholdS = 1e-9;

inline MorseParams derive_params(double m, double V0, double alpha, double hbar) {
    if (m <= 0.0 || V0 <= 0.0 || alpha <= 0.0 || hbar <= 0.0)
        throw NonPositiveInput("Morse parameters must all be strictly positive");
    MorseParams p;
    p.m = m;
    p.V0 = V0;
    p.alpha = alpha;
    p.hbar = hbar;
    p.nu = std::sqrt(8.0 * m * V0 / (alpha * alpha * hbar * hbar));
    if (p.nu <= 1.0)
        throw NoBoundStates("nu = " + std::to_string(p.nu) + " <= 1: no bound states");
    p.hbar_omega = 4.0 * V0 / (p.nu * p.nu);
    p.omega = p.hbar_omega / hbar;
    p.omega_harm = alpha * std::sqrt(2.0 * V0 / m);
    p.n_nominal = static_cast<int>(std::floor(0.5 * (p.nu - 1.0)));
    p.n_eff = p.n_nominal;
    if (p.s(p.n_nominal) <= kThresholdS) p.n_eff = p.n_nominal - 1;
    if (p.n_eff < 0)
        throw NoBoundStates("no normalizable bound state at nu = " + std::to_string(p.nu));
    return p;
}

/// Convenience completion of the reduced parameterization (nu, hbar Omega):
/// fixes alpha = 1 and hbar = 1, which determines V0 and m.
inline MorseParams params_from_reduced(double nu, double hbar_omega) {
    if (nu <= 0.0 || hbar_omega <= 0.0)
        throw NonPositiveInput("reduced parameters must be strictly positive");
    const double V0 = 0.25 * nu * nu * hbar_omega;
    const double m = 0.5 / hbar_omega;
    return derive_params(m, V0, 1.0, 1.0);
}

inline double energy_level(const MorseParams& p, int n) {
    if (n < 0 || n > p.n_eff)
        throw IndexOutOfBasis("level index " + std::to_string(n) + " outside 0.."
                              + std::to_string(p.n_eff));
    const double s = p.s(n);
    return -p.hbar_omega * s * s;
}

struct MorseState {
    int n = 0;
    double s = 0.0;
    double log_c_closed_form = 0.0;    // documentary constant from the closed form
    double log_c_numeric = 0.0;  // canonical, fixed by quadrature under dy/(alpha y)

    double c_closed_form() const { return std::exp(log_c_closed_form); }
    double c_numeric() const { return std::exp(log_c_numeric); }
};

/// Bound-state basis with quadrature-backed normalization and matrix elements.
///
/// All pair integrals run on Gauss grids for the weight y^a e^{-y} with a
/// matched per pair, the Gamma(a+1) mass kept in log space so deep wells
/// (large nu) never overflow.
class MorseBasis {
public:
    explicit MorseBasis(const MorseParams& p, int dim = 0, int order = 0)
        : p_(p),
          dim_(dim > 0 ? dim : p.basis_size()),
          order_(order > 0 ? order : std::min(4 * (dim > 0 ? dim : p.basis_size()) + 16, 256)) {
        if (dim_ > p_.basis_size())
            throw IndexOutOfBasis("requested dim " + std::to_string(dim_) + " exceeds basis size "
                                  + std::to_string(p_.basis_size()));
        states_.reserve(dim_);
        for (int n = 0; n < dim_; ++n) states_.push_back(make_state(n));
    }

    const MorseParams& params() const { return p_; }
    int dim() const { return dim_; }
    int order() const { return order_; }
    const MorseState& state(int n) const {
        check_index(n);
        return states_[n];
    }

    /// psi_n(y) with the canonical (quadrature) normalization.
    double eval(int n, double y) const {
        check_index(n);
        if (y <= 0.0)
            throw NonPositiveArgument("eigenfunction argument must be > 0");
        const MorseState& st = states_[n];
        const double expo = st.log_c_numeric + st.s * std::log(y) - 0.5 * y;
        return std::exp(expo) * confluent_f(n, 2.0 * st.s + 1.0, y);
    }

    /// <n| f(y) |n2> under the measure dy/(alpha y); f defaults to 1.
    template <typename F>
    double pair_element(int n, int n2, F&& f, double extra_weight_shift = 0.0) const {
        check_index(n);
        check_index(n2);
        const MorseState& a = states_[n];
        const MorseState& b = states_[n2];
        const QuadratureGrid& g = pair_grid(n + n2, extra_weight_shift);
        const double e = g.expect([&](double y) {
            return confluent_f(n, 2.0 * a.s + 1.0, y) * confluent_f(n2, 2.0 * b.s + 1.0, y) * f(y);
        });
        const double log_pref = a.log_c_numeric + b.log_c_numeric - std::log(p_.alpha) + g.log_mass;
        return std::exp(log_pref) * e;
    }

    double overlap(int n, int n2) const {
        return pair_element(n, n2, [](double) { return 1.0; });
    }

    OperatorMatrix gram() const {
        OperatorMatrix out{Matrix(dim_, dim_), {BasisKind::SingleMode, dim_}};
        for (int n = 0; n < dim_; ++n)
            for (int n2 = n; n2 < dim_; ++n2)
                out.mat(n, n2) = out.mat(n2, n) = overlap(n, n2);
        return out;
    }

    /// Exact x = (1/alpha)(ln nu - ln y) matrix by quadrature; the oracle for
    /// the operator series. The logarithmic integrand goes through the
    /// exp-substituted rule: polynomial-exact Gauss grids converge too slowly
    /// against ln y when s_n + s_n2 is small.
    OperatorMatrix x_matrix() const {
        const double log_nu = std::log(p_.nu);
        const double inv_alpha = 1.0 / p_.alpha;
        OperatorMatrix out{Matrix(dim_, dim_), {BasisKind::SingleMode, dim_}};
        for (int n = 0; n < dim_; ++n)
            for (int n2 = n; n2 < dim_; ++n2) {
                const MorseState& a = states_[n];
                const MorseState& b = states_[n2];
                const double apow = a.s + b.s - 1.0;
                const double e = log_substituted_expect(apow, [&](double y) {
                    return confluent_f(n, 2.0 * a.s + 1.0, y)
                           * confluent_f(n2, 2.0 * b.s + 1.0, y)
                           * inv_alpha * (log_nu - std::log(y));
                });
                const double log_pref = a.log_c_numeric + b.log_c_numeric
                                        - std::log(p_.alpha) + log_gamma(apow + 1.0);
                out.mat(n, n2) = out.mat(n2, n) = std::exp(log_pref) * e;
            }
        return out;
    }

    /// Quadrature matrix of 1/y. Entries with s_n + s_n2 <= 1 are not
    /// integrable; they get the finite Gauss estimate and are flagged by
    /// inverse_y_integrable.
    OperatorMatrix inverse_y_matrix() const {
        OperatorMatrix out{Matrix(dim_, dim_), {BasisKind::SingleMode, dim_}};
        for (int n = 0; n < dim_; ++n)
            for (int n2 = n; n2 < dim_; ++n2) {
                double v;
                if (inverse_y_integrable(n, n2))
                    v = pair_element(n, n2, [](double) { return 1.0; }, -1.0);
                else
                    v = pair_element(n, n2, [](double y) { return 1.0 / y; });
                out.mat(n, n2) = out.mat(n2, n) = v;
            }
        return out;
    }

    bool inverse_y_integrable(int n, int n2) const {
        return states_[n].s + states_[n2].s > 1.0 + 1e-12;
    }

private:
    void check_index(int n) const {
        if (n < 0 || n >= dim_)
            throw IndexOutOfBasis("state index " + std::to_string(n) + " outside 0.."
                                  + std::to_string(dim_ - 1));
    }

    MorseState make_state(int n) const {
        MorseState st;
        st.n = n;
        st.s = p_.s(n);
        st.log_c_closed_form = 0.5 * (log_gamma(p_.nu - n) - log_gamma(n + 1.0)) - log_gamma(p_.nu - 2.0 * n);
        // norm^2 of y^s e^{-y/2} F(-n, 2s+1, y) under dy/(alpha y)
        const QuadratureGrid g = gauss_laguerre(order_, 2.0 * st.s - 1.0);
        const double e = g.expect([&](double y) {
            const double f = confluent_f(n, 2.0 * st.s + 1.0, y);
            return f * f;
        });
        const double log_norm2 = -std::log(p_.alpha) + g.log_mass + std::log(e);
        st.log_c_numeric = -0.5 * log_norm2;
        return st;
    }

    const QuadratureGrid& pair_grid(int n_sum, double shift) const {
        // a = nu - 2 - (n + n2) + shift; key by n_sum and the integer shift
        const int key = n_sum * 4 + static_cast<int>(shift * 2.0 + 2.0);
        auto it = grids_.find(key);
        if (it == grids_.end()) {
            const double a = p_.nu - 2.0 - n_sum + shift;
            it = grids_.emplace(key, gauss_laguerre(order_, a)).first;
        }
        return it->second;
    }

    MorseParams p_;
    int dim_;
    int order_;
    std::vector<MorseState> states_;
    mutable std::map<int, QuadratureGrid> grids_;
};

inline double eval_eigenfunction(const MorseParams& p, int n, double y) {
    if (n < 0 || n > p.n_eff)
        throw IndexOutOfBasis("state index " + std::to_string(n));
    return MorseBasis(p, n + 1).eval(n, y);
}

inline double overlap(const MorseParams& p, int n, int n2) {
    const int need = std::max(n, n2) + 1;
    return MorseBasis(p, need).overlap(n, n2);
}

inline OperatorMatrix x_matrix(const MorseParams& p, int dim) {
    return MorseBasis(p, dim).x_matrix();
}

} // namespace morsejt
