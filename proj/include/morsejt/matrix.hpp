#pragma once

#include <string>

#include <Eigen/Dense>

#include "morsejt/errors.hpp"

namespace morsejt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// The basis a matrix is expressed in. mode_dim is the per-mode dimension;
/// electronic doubles the total when set.
enum class BasisKind { SingleMode, TwoMode, Vibronic };

struct BasisSpec {
    BasisKind kind = BasisKind::SingleMode;
    int mode_dim = 0;

    int total_dim() const {
        switch (kind) {
        case BasisKind::SingleMode: return mode_dim;
        case BasisKind::TwoMode: return mode_dim * mode_dim;
        case BasisKind::Vibronic: return 2 * mode_dim * mode_dim;
        }
        return 0;
    }
    bool operator==(const BasisSpec&) const = default;

    std::string label() const {
        switch (kind) {
        case BasisKind::SingleMode: return "single_mode(" + std::to_string(mode_dim) + ")";
        case BasisKind::TwoMode: return "two_mode(" + std::to_string(mode_dim) + ")";
        case BasisKind::Vibronic: return "vibronic(" + std::to_string(mode_dim) + ")";
        }
        return "?";
    }
};

/// Dense square matrix over a declared basis.
struct OperatorMatrix {
    Matrix mat;
    BasisSpec basis;

    int dim() const { return static_cast<int>(mat.rows()); }
};

inline void require_same_basis(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (!(a.basis == b.basis))
        throw BasisMismatch("operator bases differ: " + a.basis.label() + " vs " + b.basis.label());
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline double hermiticity_deviation(const Matrix& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff();
}

inline double frobenius(const Matrix& m) { return m.norm(); }

/// Vibronic index layout: electronic slowest, then mode 1, then mode 2.
inline int vibronic_index(int elec, int n1, int n2, int mode_dim) {
    return (elec * mode_dim + n1) * mode_dim + n2;
}

} // namespace morsejt
