#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "morsejt/vibronic.hpp"
#include "oracles.hpp"

using namespace morsejt;
using Catch::Approx;

TEST_CASE("branch states at special angles", "[vibronic]") {
    {
        auto [l, u] = branch_states(0.0);
        CHECK(l.coeffs(0) == 1.0);
        CHECK(l.coeffs(1) == 0.0);
        CHECK(u.coeffs(0) == 0.0);
        CHECK(u.coeffs(1) == 1.0);
    }
    {
        auto [l, u] = branch_states(M_PI);
        CHECK(l.coeffs(0) == Approx(0.0).margin(1e-15));
        CHECK(l.coeffs(1) == Approx(-1.0).epsilon(1e-15));
        CHECK(u.coeffs(0) == Approx(1.0).epsilon(1e-15));
        CHECK(u.coeffs(1) == Approx(0.0).margin(1e-15));
    }
    for (double phi : {0.1, 1.3, 2.9, 5.5}) {
        auto [l, u] = branch_states(phi);
        CHECK(l.coeffs.norm() == Approx(1.0).epsilon(1e-15));
        CHECK(u.coeffs.norm() == Approx(1.0).epsilon(1e-15));
        CHECK(std::abs(l.coeffs.dot(u.coeffs)) < 1e-15);
    }
}

TEST_CASE("electronic doublet invariants", "[vibronic]") {
    for (const auto& c : electronic_invariants(ElectronicDoublet::standard())) {
        INFO(c.name);
        CHECK(c.passed);
    }
}

TEST_CASE("phi quadrature reproduces half-harmonic integrals", "[vibronic]") {
    for (int nphi : {8, 32, 64}) {
        const PhiQuadrature q = PhiQuadrature::make(nphi);
        double s0 = 0, c_half = 0, s_half = 0, c1 = 0, c2 = 0;
        for (int j = 0; j < q.nphi; ++j) {
            s0 += q.weights[j];
            c_half += q.weights[j] * std::cos(0.5 * q.nodes[j]);
            s_half += q.weights[j] * std::sin(0.5 * q.nodes[j]);
            c1 += q.weights[j] * std::cos(q.nodes[j]);
            c2 += q.weights[j] * std::pow(std::cos(q.nodes[j]), 2);
        }
        CHECK(s0 == Approx(2.0 * M_PI).epsilon(1e-13));
        CHECK(c_half == Approx(0.0).margin(1e-12));
        CHECK(s_half == Approx(4.0).epsilon(1e-13));
        CHECK(c1 == Approx(0.0).margin(1e-12));
        CHECK(c2 == Approx(M_PI).epsilon(1e-13));
    }
    CHECK_THROWS_AS(PhiQuadrature::make(6), NphiTooSmall);
    CHECK_THROWS_AS(PhiQuadrature::make(33), NphiTooSmall);
}

TEST_CASE("beta_p_z0 ground overlap has the closed-form value", "[vibronic]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    const int d = p.basis_size();
    // p = 0, z = 0, lower branch: integral of (cos(phi/2), -sin(phi/2)) over
    // [0, 2pi] is (0, -4), tensored with |00>
    const VibronicState st = beta_p_z0(p, 0, 0.0, Branch::Lower, 64);
    CHECK(std::abs(st.coeffs(vibronic_index(0, 0, 0, d))) < 1e-12);
    CHECK(st.coeffs(vibronic_index(1, 0, 0, d)).real() == Approx(-4.0).epsilon(1e-12));
    CHECK(std::abs(st.coeffs(vibronic_index(1, 0, 0, d)).imag()) < 1e-13);
    // every other component vanishes
    double rest = 0.0;
    for (int i = 0; i < st.coeffs.size(); ++i) {
        if (i == vibronic_index(1, 0, 0, d)) continue;
        rest = std::max(rest, std::abs(st.coeffs(i)));
    }
    CHECK(rest < 1e-12);
}

TEST_CASE("coherent state: kappa = 0 reduction", "[vibronic]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    for (double z : {0.0, 0.5}) {
        for (int n = 0; n <= 2; ++n) {
            const VibronicState c0 =
                coherent_state(p, {Branch::Lower, n, z, 0.0, 64}).normalized();
            const VibronicState ref = beta_p_z0(p, n, z, Branch::Lower, 64).normalized();
            CHECK(std::abs(c0.coeffs.dot(ref.coeffs)) == Approx(1.0).margin(1e-10));
        }
    }
}

TEST_CASE("coherent state agrees with the exponential-operator build", "[vibronic]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    for (double z : {0.0, 0.5})
        for (int n = 0; n <= 2; ++n)
            for (double kappa : {0.25, 0.5}) {
                const CoherentSpec spec{Branch::Lower, n, z, kappa, 64};
                const VibronicState lag = coherent_state(p, spec);
                const VibronicState exp_build = oracles::coherent_exponential_build(p, spec);
                const double diff = (lag.coeffs - exp_build.coeffs).norm();
                INFO("z=" << z << " n=" << n << " kappa=" << kappa << " diff=" << diff);
                CHECK(diff < 1e-8 * std::max(1.0, lag.coeffs.norm()));
            }
}

TEST_CASE("coherent state is stable under Nphi doubling", "[vibronic]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    for (double z : {0.0, 0.5})
        for (int n = 0; n <= 2; ++n) {
            const VibronicState a = coherent_state(p, {Branch::Lower, n, z, 0.3, 32});
            const VibronicState b = coherent_state(p, {Branch::Lower, n, z, 0.3, 64});
            const VibronicState c = coherent_state(p, {Branch::Lower, n, z, 0.3, 128});
            CHECK((a.coeffs - b.coeffs).cwiseAbs().maxCoeff() < 1e-8);
            CHECK((b.coeffs - c.coeffs).cwiseAbs().maxCoeff() < 1e-8);
        }
}

TEST_CASE("z = 0 and z = 1/2 builds are both normalizable; overlap reported", "[vibronic]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    const VibronicState a = coherent_state(p, {Branch::Lower, 0, 0.0, 0.3, 64});
    const VibronicState b = coherent_state(p, {Branch::Lower, 0, 0.5, 0.3, 64});
    CHECK(a.norm() > 1e-6);
    CHECK(b.norm() > 1e-6);
    const double overlap = std::abs(a.normalized().coeffs.dot(b.normalized().coeffs));
    CHECK(overlap >= 0.0);
    CHECK(overlap <= 1.0 + 1e-12);
    // no closed-form target; the value must at least be resolution independent
    const VibronicState a2 = coherent_state(p, {Branch::Lower, 0, 0.0, 0.3, 128});
    const VibronicState b2 = coherent_state(p, {Branch::Lower, 0, 0.5, 0.3, 128});
    const double overlap2 = std::abs(a2.normalized().coeffs.dot(b2.normalized().coeffs));
    CHECK(overlap == Approx(overlap2).margin(1e-8));
}

TEST_CASE("coherent state contracts", "[vibronic]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    CHECK_THROWS_AS(coherent_state(p, {Branch::Lower, 5, 0.5, 0.1, 64}), IndexOutOfBasis);
    const MorseParams wide = params_from_reduced(29.5, 0.5);
    // p up to 14 needs Nphi >= 2(2p+2)+2
    CHECK_THROWS_AS(coherent_state(wide, {Branch::Lower, 0, 0.5, 0.1, 16}), NphiTooSmall);
    const VibronicState st = coherent_state(p, {Branch::Upper, 1, 0.5, 0.4, 64});
    const VibronicState nrm = st.normalized();
    CHECK(nrm.coeffs.norm() == Approx(1.0).epsilon(1e-12));
    CHECK(nrm.norm_factor == Approx(st.coeffs.norm()).epsilon(1e-14));
}

TEST_CASE("build_hjt structural properties", "[vibronic]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    const ElectronicDoublet e = ElectronicDoublet::standard();
    const int d = p.basis_size();

    for (auto form : {HjtForm::HarmonicEq3, HjtForm::MorseEq8, HjtForm::MorseTwoOperator}) {
        const OperatorMatrix h = build_hjt(p, 0.0, form, e);
        CHECK(h.mat.cwiseAbs().maxCoeff() == 0.0);
        const OperatorMatrix h1 = build_hjt(p, 0.07, form, e);
        CHECK(hermiticity_deviation(h1.mat) < 1e-12);
        const OperatorMatrix h2 = build_hjt(p, 0.14, form, e);
        CHECK((h2.mat - 2.0 * h1.mat).cwiseAbs().maxCoeff() == 0.0);
    }

    const double kappa = 0.05;
    const OperatorMatrix h8 = build_hjt(p, kappa, HjtForm::MorseEq8, e);
    const double x00 = MorseBasis(p).x_matrix().mat(0, 0);
    const int i = vibronic_index(0, 0, 0, d);
    CHECK(h8.mat(i, i) == Approx(-kappa * p.hbar_omega * 2.0 * x00).epsilon(1e-12));

    CHECK_THROWS_AS(build_hjt(p, kappa, HjtForm::MorseEq9Series, e), MissingTruncation);
    const SeriesTruncation t = SeriesTruncation::for_params(p, 4, 2);
    const OperatorMatrix h9 = build_hjt(p, kappa, HjtForm::MorseEq9Series, e, t);
    CHECK(hermiticity_deviation(h9.mat) > 0.0);  // diagnostic form, reported not promised
    CHECK_THROWS_AS(build_hjt(p, -0.1, HjtForm::MorseEq8, e), NonPositiveInput);
}

static VibronicState basis_state(const MorseParams& p, int elec, int n1, int n2) {
    const int d = p.basis_size();
    VibronicState st{ComplexVector::Zero(2 * d * d), {BasisKind::Vibronic, d}, std::nullopt, 1.0};
    st.coeffs(vibronic_index(elec, n1, n2, d)) = 1.0;
    return st;
}

TEST_CASE("pt at kappa = 0 returns the input state", "[vibronic]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    const ElectronicDoublet e = ElectronicDoublet::standard();
    const VibronicState st = basis_state(p, 0, 0, 0);
    const PtResult r = pt_first_order(p, 0.0, HjtForm::MorseEq8, e, st);
    CHECK(r.block_unresolved);
    CHECK(r.block_dim == 2);
    for (const auto& m : r.members) CHECK(m.ejt == 0.0);
    CHECK((r.members.front().psi1 - st.coeffs).norm() < 1e-14);
}

TEST_CASE("degenerate ground doublet splits by the block eigenvalues", "[vibronic]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    const ElectronicDoublet e = ElectronicDoublet::standard();
    const double kappa = 0.05;
    const PtResult r = pt_first_order(p, kappa, HjtForm::MorseEq8, e, basis_state(p, 0, 0, 0));
    REQUIRE(r.members.size() == 2);
    CHECK(r.e0 == Approx(-6.25).epsilon(1e-13));
    const double x00 = MorseBasis(p).x_matrix().mat(0, 0);
    const double split = kappa * p.hbar_omega * 2.0 * x00;
    CHECK(r.members.front().ejt == Approx(-split).epsilon(1e-10));
    CHECK(r.members.back().ejt == Approx(+split).epsilon(1e-10));
    CHECK_FALSE(r.block_unresolved);

    // direct 2x2 diagonalization oracle: block is kappa hOm <x1+x2> Dtheta
    Eigen::Matrix2d blk = kappa * p.hbar_omega * 2.0 * x00 * e.Dtheta;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(blk);
    CHECK(r.members.front().ejt == Approx(es.eigenvalues()(0)).margin(1e-12));
    CHECK(r.members.back().ejt == Approx(es.eigenvalues()(1)).margin(1e-12));
}

TEST_CASE("first-order correction is orthogonal to the zeroth state", "[vibronic]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    const ElectronicDoublet e = ElectronicDoublet::standard();
    const PtResult r = pt_first_order(p, 0.08, HjtForm::MorseEq8, e, basis_state(p, 0, 1, 0));
    for (const auto& m : r.members) {
        CHECK(std::abs(m.zeroth.dot(m.psi1) - Complex(1.0, 0.0)) < 1e-12);
        CHECK(m.psi1.norm() >= 1.0);
    }
}

TEST_CASE("pt rejects non-eigenstates", "[vibronic]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    const ElectronicDoublet e = ElectronicDoublet::standard();
    const VibronicState coh = coherent_state(p, {Branch::Lower, 0, 0.5, 0.4, 64}).normalized();
    CHECK_THROWS_AS(pt_first_order(p, 0.05, HjtForm::MorseEq8, e, coh), NotAnEigenstate);
}

TEST_CASE("harmonic block is zero and reported unresolved", "[vibronic]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    const ElectronicDoublet e = ElectronicDoublet::standard();
    const PtResult r = pt_first_order(p, 0.05, HjtForm::HarmonicEq3, e, basis_state(p, 0, 0, 0));
    CHECK(r.block_unresolved);
    for (const auto& m : r.members) CHECK(m.ejt == 0.0);
    // corrections still flow from outside the block
    CHECK(r.members.front().psi1.norm() > 1.0);
}

TEST_CASE("ejt closed form", "[vibronic]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    const ElectronicDoublet e = ElectronicDoublet::standard();
    const SeriesTruncation t = SeriesTruncation::for_params(p, 6, 3);

    const EjtValue zero = ejt_closed_form(p, {Branch::Lower, 0, 0.5, 0.0, 64}, e, t);
    CHECK(zero.value == 0.0);
    CHECK_FALSE(zero.diverged);

    const EjtValue v = ejt_closed_form(p, {Branch::Lower, 0, 0.5, 0.2, 64}, e, t);
    CHECK(v.diverged);
    CHECK(std::isfinite(v.value));

    // electronic factor at phi = 0: <l|Dtheta|l> = -1
    const Eigen::Vector2d b = branch_vector(Branch::Lower, 0.0);
    CHECK(b.dot(e.Dtheta * b) == Approx(-1.0).epsilon(1e-15));

    // determinism
    const EjtValue v2 = ejt_closed_form(p, {Branch::Lower, 0, 0.5, 0.2, 64}, e, t);
    CHECK(v.value == v2.value);
}

TEST_CASE("last term vanishes between equal occupations", "[vibronic]") {
    for (double nu : {6.0, 11.3}) {
        const MorseParams p = params_from_reduced(nu, 0.5);
        for (int m : {0, 2, 8}) {
            const SeriesTruncation t = SeriesTruncation::for_params(p, m, 1);
            const CheckResult c = last_term_equal_occupation(p, t);
            INFO(c.name << " nu=" << nu);
            CHECK(c.passed);
            CHECK(c.max_deviation < 1e-10);
        }
        // the second power of the development does touch the diagonal; this is
        // the measured finding accompanying the vanishing claim
        CHECK(last_term_power2_diagonal(p, SeriesTruncation::for_params(p, 2, 1)) > 1.0);
    }
}
