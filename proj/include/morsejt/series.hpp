#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "morsejt/errors.hpp"
#include "morsejt/ladder.hpp"
#include "morsejt/matrix.hpp"
#include "morsejt/morse.hpp"

namespace morsejt {

/// Truncation of the formal operator series: M_inner cuts the sum over powers
/// of (2 a0), L_outer cuts the outer logarithm sum.
struct SeriesTruncation {
    int M_inner = 8;
    int L_outer = 4;
    bool radius_ok = false;  // spectral radius of 2 A0 on the active subspace < 1

    static SeriesTruncation for_params(const MorseParams& p, int m_inner, int l_outer) {
        if (m_inner < 0 || l_outer < 1)
            throw NonPositiveInput("series truncation requires M_inner >= 0, L_outer >= 1");
        SeriesTruncation t{m_inner, l_outer, true};
        for (int n = 0; n <= p.n_eff; ++n)
            if (std::abs(p.nu - 1.0 - 2.0 * n) >= 1.0) t.radius_ok = false;
        return t;
    }
};

enum class SeriesTarget { InverseY, DDy };

struct SeriesResult {
    OperatorMatrix matrix;           // assembled truncated sum, action basis
    std::vector<double> term_norms;  // Frobenius norm of each m term
    bool radius_ok = false;
};

/// Bridge an action-basis matrix to the quadrature-orthonormal basis:
/// entry (m, n) picks up sqrt(s_n / s_m).
inline OperatorMatrix to_orthonormal_basis(const MorseParams& p, const OperatorMatrix& action) {
    OperatorMatrix out = action;
    const int d = action.dim();
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n)
            out.mat(m, n) *= std::sqrt(p.s(n) / p.s(m));
    return out;
}

namespace detail {

inline Matrix a0_power(const Matrix& a0, int power) {
    const int d = static_cast<int>(a0.rows());
    Matrix out = Matrix::Identity(d, d);
    if (power >= 0) {
        for (int k = 0; k < power; ++k) out = out * a0;
    } else {
        Matrix inv = Matrix::Zero(d, d);
        for (int i = 0; i < d; ++i) inv(i, i) = 1.0 / a0(i, i);
        for (int k = 0; k < -power; ++k) out = out * inv;
    }
    return out;
}

} // namespace detail

/// Truncated series for d/dy or 1/y in terms of the phase-extended ladder
/// operators. Divergence is reported through the term norms, never thrown.
///
/// d/dy = -(1/2) sum_m (2a0)^m     [a+ - (-1)^m a- + (nu/2)(1 + (-1)^m)]
/// 1/y  = -      sum_m (2a0)^(m-1) [a+ + (-1)^m a- + (nu/2)(1 - (-1)^m)]
inline SeriesResult series_operator(const MorseParams& p, SeriesTarget target,
                                    const SeriesTruncation& t) {
    const PhasedLadderSet A = phased_ladder(p);
    const int d = p.basis_size();
    const Matrix two_a0 = 2.0 * A.A0.mat;
    const Matrix id = Matrix::Identity(d, d);

    SeriesResult res{{Matrix::Zero(d, d), A.A0.basis}, {}, t.radius_ok};
    res.term_norms.reserve(t.M_inner + 1);
    for (int m = 0; m <= t.M_inner; ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        Matrix term;
        if (target == SeriesTarget::DDy) {
            term = -0.5 * detail::a0_power(two_a0, m)
                   * (A.Aplus.mat - sign * A.Aminus.mat + 0.5 * p.nu * (1.0 + sign) * id);
        } else {
            term = -detail::a0_power(two_a0, m - 1)
                   * (A.Aplus.mat + sign * A.Aminus.mat + 0.5 * p.nu * (1.0 - sign) * id);
        }
        res.term_norms.push_back(term.norm());
        res.matrix.mat += term;
    }
    return res;
}

/// The operator expansion of (1 - 1/y):
/// W = 1 + nu sum_m (2a0)^{2m} + sum_m (2a0)^{m-1} [a+ + (-1)^m a-].
inline Matrix series_one_minus_inv_y(const MorseParams& p, const SeriesTruncation& t) {
    const PhasedLadderSet A = phased_ladder(p);
    const int d = p.basis_size();
    const Matrix two_a0 = 2.0 * A.A0.mat;
    Matrix w = Matrix::Identity(d, d);
    for (int m = 0; m <= t.M_inner; ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        w += p.nu * detail::a0_power(two_a0, 2 * m);
        w += detail::a0_power(two_a0, m - 1) * (A.Aplus.mat + sign * A.Aminus.mat);
    }
    return w;
}

/// The ladder-only part of W (the development's last term), used for the
/// vanishing-matrix-element claim.
inline OperatorMatrix series_last_term(const MorseParams& p, const SeriesTruncation& t) {
    const PhasedLadderSet A = phased_ladder(p);
    const int d = p.basis_size();
    const Matrix two_a0 = 2.0 * A.A0.mat;
    Matrix w = Matrix::Zero(d, d);
    for (int m = 0; m <= t.M_inner; ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        w += detail::a0_power(two_a0, m - 1) * (A.Aplus.mat + sign * A.Aminus.mat);
    }
    return {std::move(w), A.A0.basis};
}

struct SeriesXResult {
    OperatorMatrix matrix;              // truncated x series, action basis
    std::vector<Matrix> partial_sums;   // after each outer order 1..L_outer
    bool radius_ok = false;
};

/// x = (1/alpha)(ln nu - sum_{n>=1} (1/n) W^n), W from series_one_minus_inv_y.
/// Fixed summation order: inner m sums first, then left-to-right powers of W.
inline SeriesXResult series_x(const MorseParams& p, const SeriesTruncation& t) {
    const int d = p.basis_size();
    const Matrix w = series_one_minus_inv_y(p, t);
    SeriesXResult res{{Matrix::Zero(d, d), {BasisKind::SingleMode, d}}, {}, t.radius_ok};
    Matrix acc = std::log(p.nu) * Matrix::Identity(d, d);
    Matrix wp = Matrix::Identity(d, d);
    for (int n = 1; n <= t.L_outer; ++n) {
        wp = wp * w;
        acc -= wp / double(n);
        res.partial_sums.push_back(acc / p.alpha);
    }
    res.matrix.mat = acc / p.alpha;
    return res;
}

struct ConvergenceRow {
    int m_inner = 0;
    int l_outer = 0;
    double frobenius_error = 0.0;
    std::string classification;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::string classification;  // of the whole escalation sequence
};

/// Frobenius distance of the truncated x series (bridged to the orthonormal
/// basis) from the quadrature x matrix, for each requested truncation.
inline ConvergenceReport convergence_report(const MorseParams& p,
                                            const std::vector<SeriesTruncation>& truncations) {
    if (truncations.empty())
        throw EmptyInput("convergence_report needs at least one truncation");
    const MorseBasis basis(p);
    const Matrix oracle = basis.x_matrix().mat;

    ConvergenceReport rep;
    rep.rows.reserve(truncations.size());
    for (const auto& t : truncations) {
        const SeriesXResult sx = series_x(p, t);
        const Matrix bridged = to_orthonormal_basis(p, sx.matrix).mat;
        rep.rows.push_back({t.M_inner, t.L_outer, (bridged - oracle).norm(), ""});
    }
    bool increasing = true, decreasing = true;
    for (size_t i = 1; i < rep.rows.size(); ++i) {
        if (rep.rows[i].frobenius_error <= rep.rows[i - 1].frobenius_error) increasing = false;
        if (rep.rows[i].frobenius_error >= rep.rows[i - 1].frobenius_error) decreasing = false;
    }
    if (rep.rows.size() < 2) rep.classification = "single";
    else if (decreasing) rep.classification = "converging";
    else if (increasing) rep.classification = "diverging";
    else rep.classification = "oscillating";
    for (auto& r : rep.rows) r.classification = rep.classification;
    return rep;
}

/// Scalar partial sum sum_{n=1}^{terms} (1/n)(1 - 1/y)^n; equals ln y inside
/// the radius y > 1/2.
inline double scalar_log_series(double y, int terms) {
    if (y <= 0.0)
        throw NonPositiveArgument("scalar_log_series requires y > 0");
    const double q = 1.0 - 1.0 / y;
    double acc = 0.0, qp = 1.0;
    for (int n = 1; n <= terms; ++n) {
        qp *= q;
        acc += qp / n;
    }
    return acc;
}

} // namespace morsejt
