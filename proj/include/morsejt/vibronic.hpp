#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "morsejt/errors.hpp"
#include "morsejt/ladder.hpp"
#include "morsejt/matrix.hpp"
#include "morsejt/morse.hpp"
#include "morsejt/report.hpp"
#include "morsejt/series.hpp"
#include "morsejt/special.hpp"

namespace morsejt {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Electronic doublet
// ---------------------------------------------------------------------------

struct ElectronicDoublet {
    Eigen::Matrix2d Dtheta;
    Eigen::Matrix2d Deps;
    Eigen::Matrix2d Melec;  // stands for (mu+ mu)^(E); configurable, default Dtheta

    static ElectronicDoublet standard() {
        ElectronicDoublet e;
        e.Dtheta << -1.0, 0.0, 0.0, 1.0;
        e.Deps << 0.0, 1.0, 1.0, 0.0;
        e.Melec = e.Dtheta;
        return e;
    }
};

inline std::vector<CheckResult> electronic_invariants(const ElectronicDoublet& e) {
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    std::vector<CheckResult> out;
    out.push_back(CheckResult::make("dtheta_squared",
                                    (e.Dtheta * e.Dtheta - id).cwiseAbs().maxCoeff(), 1e-15));
    out.push_back(CheckResult::make("deps_squared",
                                    (e.Deps * e.Deps - id).cwiseAbs().maxCoeff(), 1e-15));
    out.push_back(CheckResult::make(
        "anticommutator", (e.Dtheta * e.Deps + e.Deps * e.Dtheta).cwiseAbs().maxCoeff(), 1e-15));
    out.push_back(CheckResult::make("traceless",
                                    std::abs(e.Dtheta.trace()) + std::abs(e.Deps.trace()), 1e-15));
    out.push_back(CheckResult::make("melec_hermitian",
                                    (e.Melec - e.Melec.transpose()).cwiseAbs().maxCoeff(), 1e-15));
    return out;
}

enum class Branch { Lower, Upper };

/// phi-dependent rotation of the doublet diagonalizing the adiabatic coupling.
struct BranchState {
    Branch branch = Branch::Lower;
    double phi = 0.0;
    Eigen::Vector2d coeffs;  // components on (|theta>, |eps>)
};

inline std::pair<BranchState, BranchState> branch_states(double phi) {
    const double c = std::cos(0.5 * phi);
    const double s = std::sin(0.5 * phi);
    BranchState l{Branch::Lower, phi, {}};
    BranchState u{Branch::Upper, phi, {}};
    l.coeffs << c, -s;
    u.coeffs << s, c;
    return {l, u};
}

inline Eigen::Vector2d branch_vector(Branch b, double phi) {
    auto [l, u] = branch_states(phi);
    return b == Branch::Lower ? l.coeffs : u.coeffs;
}

// ---------------------------------------------------------------------------
// phi quadrature
// ---------------------------------------------------------------------------

/// Uniform nodes over the common 4 pi period of the integrand with weights
/// that reproduce int_0^{2pi} exactly for every harmonic e^{i k phi / 2},
/// |k| <= Nphi/2 - 1.
///
/// The full integrand (branch vector x e^{i z phi} x vibrational part) is
/// 2 pi periodic for half-integer z but only 4 pi periodic for integer z; a
/// plain uniform rule on [0, 2 pi) would converge at O(1/Nphi^2) for z = 0.
struct PhiQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
    int nphi = 0;
    int max_harmonic = 0;  // exact for |k| <= max_harmonic (units of half-harmonics)

    static PhiQuadrature make(int nphi) {
        if (nphi < 8 || nphi % 2 != 0)
            throw NphiTooSmall("Nphi must be even and >= 8, got " + std::to_string(nphi));
        PhiQuadrature q;
        q.nphi = nphi;
        q.max_harmonic = nphi / 2 - 1;
        q.nodes.resize(nphi);
        q.weights.resize(nphi);
        const double two_pi = 2.0 * M_PI;
        for (int j = 0; j < nphi; ++j) {
            q.nodes[j] = 2.0 * two_pi * j / nphi;
            double w = two_pi;
            for (int k = 1; k <= q.max_harmonic; k += 2)
                w += (8.0 / k) * std::sin(two_pi * k * j / nphi);
            q.weights[j] = w / nphi;
        }
        return q;
    }
};

// ---------------------------------------------------------------------------
// Coherent states
// ---------------------------------------------------------------------------

struct CoherentSpec {
    Branch beta = Branch::Lower;
    int n = 0;
    double z = 0.5;      // coupling-type label, 0 or 1/2
    double kappa = 0.0;
    int nphi = 64;
};

struct VibronicState {
    ComplexVector coeffs;
    BasisSpec basis;
    std::optional<CoherentSpec> meta;
    double norm_factor = 1.0;  // recorded when normalized

    double norm() const { return coeffs.norm(); }
    VibronicState normalized() const {
        VibronicState out = *this;
        out.norm_factor = coeffs.norm();
        if (out.norm_factor > 0.0) out.coeffs /= out.norm_factor;
        return out;
    }
};

namespace detail {

inline void require_phi_resolution(const PhiQuadrature& q, int p, double z) {
    const int needed = 2 * p + 1 + (z != std::floor(z) ? 1 : 0);
    if (needed > q.max_harmonic)
        throw NphiTooSmall("Nphi = " + std::to_string(q.nphi) + " cannot resolve p = "
                           + std::to_string(p) + "; need Nphi >= " + std::to_string(2 * needed + 2));
}

} // namespace detail

/// |beta p z>_0: phi integral of e^{i z phi} (a+)^p acting on the two-mode
/// ground state tensored with the branch vector. a+ = a+1 cos phi + a+2 sin phi.
inline VibronicState beta_p_z0(const MorseParams& p, int power, double z, Branch beta,
                               int nphi = 64) {
    if (power < 0 || power > p.n_eff)
        throw IndexOutOfBasis("coherent power " + std::to_string(power));
    const PhiQuadrature q = PhiQuadrature::make(nphi);
    detail::require_phi_resolution(q, power, z);

    const LadderSet L = ladder_matrices(p);
    const int d = p.basis_size();
    const Matrix id = Matrix::Identity(d, d);
    const Matrix ap1 = kron(L.Bplus.mat, id);
    const Matrix ap2 = kron(id, L.Bplus.mat);

    const BasisSpec basis{BasisKind::Vibronic, d};
    VibronicState st{ComplexVector::Zero(basis.total_dim()), basis, std::nullopt, 1.0};
    for (int j = 0; j < q.nphi; ++j) {
        const double phi = q.nodes[j];
        const Matrix ap = std::cos(phi) * ap1 + std::sin(phi) * ap2;
        Vector v = Vector::Zero(d * d);
        v(0) = 1.0;
        for (int k = 0; k < power; ++k) v = ap * v;
        const Complex c = q.weights[j] * std::exp(Complex(0.0, z * phi));
        const Eigen::Vector2d b = branch_vector(beta, phi);
        for (int e = 0; e < 2; ++e)
            st.coeffs.segment(e * d * d, d * d) += c * b(e) * v;
    }
    return st;
}

/// Anharmonic coherent state by the Laguerre-coefficient expansion
///   sum_p (-i)^p (n! kappa^{p-n} / p!) L_n^{p-n}(kappa^2) |beta p z>_0,
/// truncated at p = n_eff. The assembled norm is recorded on normalization.
inline VibronicState coherent_state(const MorseParams& p, const CoherentSpec& spec) {
    if (spec.n < 0 || spec.n > p.n_eff)
        throw IndexOutOfBasis("coherent n = " + std::to_string(spec.n));
    const int d = p.basis_size();
    const BasisSpec basis{BasisKind::Vibronic, d};
    VibronicState st{ComplexVector::Zero(basis.total_dim()), basis, spec, 1.0};

    const Complex minus_i(0.0, -1.0);
    Complex phase(1.0, 0.0);
    for (int pw = 0; pw <= p.n_eff; ++pw) {
        const double coef = laguerre_expansion_coefficient(spec.n, pw, spec.kappa);
        if (coef != 0.0)
            st.coeffs += phase * coef * beta_p_z0(p, pw, spec.z, spec.beta, spec.nphi).coeffs;
        phase *= minus_i;
    }
    return st;
}

// ---------------------------------------------------------------------------
// Jahn-Teller Hamiltonians
// ---------------------------------------------------------------------------

enum class HjtForm { HarmonicEq3, MorseEq8, MorseEq9Series, MorseTwoOperator };

inline Matrix harmonic_lowering(int dim) {
    Matrix a = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

/// Unperturbed H_e + H_v on the vibronic product basis (H_e contributes zero;
/// the doublet is degenerate). The harmonic form pairs with the harmonic
/// oscillator ladder at omega_harm on an equally sized Fock basis.
/// dim = 0 means the full bound basis per mode.
inline OperatorMatrix build_h0(const MorseParams& p, HjtForm form, int dim = 0) {
    const int d = dim > 0 ? dim : p.basis_size();
    const BasisSpec basis{BasisKind::Vibronic, d};
    Matrix hv = Matrix::Zero(d * d, d * d);
    const double hw = p.hbar * p.omega_harm;
    for (int n1 = 0; n1 < d; ++n1)
        for (int n2 = 0; n2 < d; ++n2) {
            const double e = (form == HjtForm::HarmonicEq3)
                                 ? hw * (n1 + n2 + 1.0)
                                 : energy_level(p, n1) + energy_level(p, n2);
            hv(n1 * d + n2, n1 * d + n2) = e;
        }
    return {kron(Eigen::Matrix2d::Identity(), hv), basis};
}

/// The three structural pictures of the linear Jahn-Teller coupling, plus the
/// documented two-operator alternative (x1 Dtheta + x2 Deps with Morse x).
/// The series form is a diagnostic: Hermiticity is not guaranteed there and
/// should be read off hermiticity_deviation.
inline OperatorMatrix build_hjt(const MorseParams& p, double kappa, HjtForm form,
                                const ElectronicDoublet& e,
                                const std::optional<SeriesTruncation>& t = std::nullopt,
                                int dim = 0) {
    if (kappa < 0.0)
        throw NonPositiveInput("kappa must be >= 0");
    const int d = dim > 0 ? dim : p.basis_size();
    const BasisSpec basis{BasisKind::Vibronic, d};
    const Matrix id = Matrix::Identity(d, d);
    const double k_energy = kappa * p.hbar_omega;

    switch (form) {
    case HjtForm::HarmonicEq3: {
        const Matrix a = harmonic_lowering(d);
        const Matrix q = a + a.transpose();
        const Matrix q1 = kron(q, id), q2 = kron(id, q);
        return {k_energy * (kron(e.Dtheta, q1) + kron(e.Deps, q2)), basis};
    }
    case HjtForm::MorseEq8: {
        const Matrix x = MorseBasis(p, d).x_matrix().mat;
        const Matrix xsum = kron(x, id) + kron(id, x);
        return {k_energy * kron(e.Melec, xsum), basis};
    }
    case HjtForm::MorseEq9Series: {
        if (!t)
            throw MissingTruncation("morse_eq9_series requires a SeriesTruncation");
        Matrix xs = to_orthonormal_basis(p, series_x(p, *t).matrix).mat;
        xs.conservativeResize(d, d);
        const Matrix xsum = kron(xs, id) + kron(id, xs);
        return {k_energy * kron(e.Melec, xsum), basis};
    }
    case HjtForm::MorseTwoOperator: {
        const Matrix x = MorseBasis(p, d).x_matrix().mat;
        return {k_energy * (kron(e.Dtheta, kron(x, id)) + kron(e.Deps, kron(id, x))), basis};
    }
    }
    throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// First-order perturbation theory
// ---------------------------------------------------------------------------

struct PtMember {
    double ejt = 0.0;
    double energy = 0.0;  // E0 + ejt
    ComplexVector zeroth;
    ComplexVector psi1;
};

struct PtResult {
    double e0 = 0.0;
    std::vector<PtMember> members;  // sorted by ejt; one entry when nondegenerate
    int block_dim = 1;
    bool block_unresolved = false;  // H_JT vanished on the degenerate block
};

/// First-order energies and wavefunction for a state in an eigenspace of
/// H_e + H_v. Inside a degenerate block H_JT is diagonalized first and every
/// block eigenvector is reported; the correction sum excludes the block.
/// When H_JT vanishes on the block there is no preferred zeroth-order basis:
/// the members span the block starting from the input state, all with
/// EJT = 0 and block_unresolved set.
inline PtResult pt_first_order(const MorseParams& p, double kappa, HjtForm form,
                               const ElectronicDoublet& e, const VibronicState& state,
                               const std::optional<SeriesTruncation>& t = std::nullopt) {
    const OperatorMatrix h0 = build_h0(p, form);
    const OperatorMatrix hjt = build_hjt(p, kappa, form, e, t);
    if (!(state.basis == h0.basis))
        throw BasisMismatch("state basis " + state.basis.label() + " vs " + h0.basis.label());

    const int dim = h0.dim();
    ComplexVector psi = state.coeffs;
    const double nrm = psi.norm();
    if (nrm <= 0.0)
        throw NotAnEigenstate("zero state");
    psi /= nrm;

    const Vector diag = h0.mat.diagonal();
    double e0 = 0.0;
    for (int i = 0; i < dim; ++i) e0 += diag(i) * std::norm(psi(i));

    const double tol_deg = 1e-9 * p.hbar_omega;
    double resid = 0.0;
    for (int i = 0; i < dim; ++i) resid += std::norm((diag(i) - e0) * psi(i));
    if (std::sqrt(resid) > 1e-6 * std::max(1.0, std::abs(e0)))
        throw NotAnEigenstate("state is not an eigenvector of H_e + H_v");

    std::vector<int> block;
    for (int i = 0; i < dim; ++i)
        if (std::abs(diag(i) - e0) < tol_deg) block.push_back(i);
    const int bd = static_cast<int>(block.size());

    std::vector<ComplexVector> zeroth;
    std::vector<double> ejt;
    bool unresolved = false;
    if (bd <= 1) {
        zeroth.push_back(psi);
        Complex val(0.0, 0.0);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) val += std::conj(psi(i)) * hjt.mat(i, j) * psi(j);
        ejt.push_back(val.real());
    } else {
        Matrix b(bd, bd);
        for (int i = 0; i < bd; ++i)
            for (int j = 0; j < bd; ++j) b(i, j) = hjt.mat(block[i], block[j]);
        Eigen::SelfAdjointEigenSolver<Matrix> es(b);
        unresolved = es.eigenvalues().cwiseAbs().maxCoeff()
                     < 1e-14 * std::max(1.0, hjt.mat.norm());
        if (unresolved) {
            // span the block starting from the input state (Gram-Schmidt)
            zeroth.push_back(psi);
            for (int i = 0; i < bd && static_cast<int>(zeroth.size()) < bd; ++i) {
                ComplexVector cand = ComplexVector::Zero(dim);
                cand(block[i]) = 1.0;
                for (const auto& v : zeroth) cand -= v.dot(cand) * v;
                if (cand.norm() > 1e-8) zeroth.push_back(cand / cand.norm());
            }
            ejt.assign(zeroth.size(), 0.0);
        } else {
            for (int k = 0; k < bd; ++k) {
                ComplexVector v = ComplexVector::Zero(dim);
                for (int i = 0; i < bd; ++i) v(block[i]) = es.eigenvectors()(i, k);
                zeroth.push_back(std::move(v));
                ejt.push_back(es.eigenvalues()(k));
            }
        }
    }

    PtResult out;
    out.e0 = e0;
    out.block_dim = std::max(bd, 1);
    out.block_unresolved = unresolved;
    const Eigen::MatrixXcd hjt_c = hjt.mat.cast<Complex>();
    for (size_t k = 0; k < zeroth.size(); ++k) {
        PtMember m;
        m.ejt = ejt[k];
        m.energy = e0 + m.ejt;
        m.zeroth = zeroth[k];
        const ComplexVector hz = hjt_c * zeroth[k];
        ComplexVector corr = ComplexVector::Zero(dim);
        for (int j = 0; j < dim; ++j) {
            if (std::abs(diag(j) - e0) < tol_deg) continue;  // excluded: degenerate terms
            corr(j) = hz(j) / (diag(j) - e0);
        }
        m.psi1 = zeroth[k] - corr;
        out.members.push_back(std::move(m));
    }
    std::sort(out.members.begin(), out.members.end(),
              [](const PtMember& a, const PtMember& b) { return a.ejt < b.ejt; });
    return out;
}

// ---------------------------------------------------------------------------
// Closed-form E_JT of the final development
// ---------------------------------------------------------------------------

struct EjtValue {
    double value = 0.0;
    bool diverged = false;
};

/// Double Laguerre sum over p, q <= n_eff with the bracket
///   { 2 ln nu - 2 sum_{l>=1} (1/l) [1 + nu sum_m (nu-1-2p)^{2m}]^l }.
/// The l sum starts at l = 1 (an l = 0 term would divide by zero), matching
/// the coordinate expansion. The inner geometric sum is replaced by its closed
/// form where |nu-1-2p| < 1; anywhere the geometric data leaves the
/// convergence region the result is flagged diverged and the partial value at
/// the given truncation is returned.
inline EjtValue ejt_closed_form(const MorseParams& p, const CoherentSpec& spec,
                                const ElectronicDoublet& e, const SeriesTruncation& t,
                                double phi = 0.0) {
    if (spec.n < 0 || spec.n > p.n_eff)
        throw IndexOutOfBasis("ejt_closed_form n = " + std::to_string(spec.n));
    if (spec.kappa == 0.0) return {0.0, false};

    const Eigen::Vector2d b = branch_vector(spec.beta, phi);
    const double melec = b.dot(e.Melec * b);

    bool diverged = false;
    double sum = 0.0;
    for (int pi = 0; pi <= p.n_eff; ++pi) {
        const double two_s = p.nu - 1.0 - 2.0 * pi;
        double inner;
        if (std::abs(two_s) < 1.0) {
            inner = 1.0 / (1.0 - two_s * two_s);
        } else {
            diverged = true;
            inner = 0.0;
            double pw = 1.0;
            for (int m = 0; m <= t.M_inner; ++m) {
                inner += pw;
                pw *= two_s * two_s;
            }
        }
        const double g = 1.0 + p.nu * inner;
        if (std::abs(g) >= 1.0) diverged = true;
        double lsum = 0.0, gp = 1.0;
        for (int l = 1; l <= t.L_outer; ++l) {
            gp *= g;
            lsum += gp / l;
        }
        const double bracket = 2.0 * std::log(p.nu) - 2.0 * lsum;
        const double cp = laguerre_expansion_coefficient(spec.n, pi, spec.kappa);
        const double sign = (pi % 2 == 0) ? 1.0 : -1.0;
        for (int qi = 0; qi <= p.n_eff; ++qi) {
            const double cq = laguerre_expansion_coefficient(spec.n, qi, spec.kappa);
            sum += sign * cp * cq * bracket;
        }
    }
    const double value = spec.kappa * p.hbar_omega / p.alpha * melec * sum;
    return {value, diverged};
}

/// The development's last term has no matrix elements between states of equal
/// (n1, n2) occupation: each summand shifts one mode by one quantum. This is
/// the testable core of the vanishing claim.
inline CheckResult last_term_equal_occupation(const MorseParams& p, const SeriesTruncation& t) {
    const OperatorMatrix last = series_last_term(p, t);
    const Matrix lifted = two_mode(last, 1).mat + two_mode(last, 2).mat;
    const double dev = lifted.diagonal().cwiseAbs().maxCoeff();
    return CheckResult::make("last_term_equal_occupation_M" + std::to_string(t.M_inner), dev, 1e-10);
}

/// Reported finding, not a gate: at second order in the development the ladder
/// part does contribute on the diagonal (a+ a- products).
inline double last_term_power2_diagonal(const MorseParams& p, const SeriesTruncation& t) {
    const OperatorMatrix last = series_last_term(p, t);
    const Matrix lifted = two_mode(last, 1).mat + two_mode(last, 2).mat;
    return (lifted * lifted).diagonal().cwiseAbs().maxCoeff();
}

} // namespace morsejt
