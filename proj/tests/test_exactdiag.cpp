#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "morsejt/exactdiag.hpp"

using namespace morsejt;
using Catch::Approx;

TEST_CASE("diagonalize basics", "[exactdiag]") {
    const int n = 6;
    OperatorMatrix zero{Matrix::Zero(n, n), {BasisKind::SingleMode, n}};
    const SpectrumResult sz = diagonalize(zero);
    for (double v : sz.eigenvalues) CHECK(v == 0.0);
    CHECK(sz.degeneracy_groups.size() == 1);

    OperatorMatrix bad{Matrix::Zero(2, 2), {BasisKind::SingleMode, 2}};
    bad.mat(0, 1) = 1.0;  // not symmetric
    CHECK_THROWS_AS(diagonalize(bad), NotHermitian);
}

TEST_CASE("kappa = 0 spectrum is doubly degenerate level sums", "[exactdiag]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    const OperatorMatrix h0 = build_h0(p, HjtForm::MorseEq8);
    const SpectrumResult sp = diagonalize(h0, 1e-8 * p.hbar_omega);
    CHECK(sp.eigenvalues.front() == Approx(-6.25).margin(1e-10));
    for (const auto& g : sp.degeneracy_groups) CHECK(g.size() >= 2);

    // eigenpair residuals
    for (int k = 0; k < h0.dim(); ++k) {
        const Vector v = sp.eigenvector(k);
        CHECK((h0.mat * v - sp.eigenvalues[k] * v).norm() < 1e-8);
    }

    // I (x) H_v spectrum equals level sums with multiplicity two
    std::vector<double> sums;
    for (int n1 = 0; n1 <= p.n_eff; ++n1)
        for (int n2 = 0; n2 <= p.n_eff; ++n2)
            sums.push_back(energy_level(p, n1) + energy_level(p, n2));
    std::sort(sums.begin(), sums.end());
    for (size_t i = 0; i < sums.size(); ++i) {
        CHECK(sp.eigenvalues[2 * i] == Approx(sums[i]).margin(1e-10));
        CHECK(sp.eigenvalues[2 * i + 1] == Approx(sums[i]).margin(1e-10));
    }
}

TEST_CASE("weyl bound under a small coupling step", "[exactdiag]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    const ElectronicDoublet e = ElectronicDoublet::standard();
    const double kappa = 0.03, delta = 1e-3;
    const OperatorMatrix h0 = build_h0(p, HjtForm::MorseEq8);
    const OperatorMatrix va = build_hjt(p, kappa, HjtForm::MorseEq8, e);
    const OperatorMatrix vb = build_hjt(p, kappa + delta, HjtForm::MorseEq8, e);
    OperatorMatrix ha{h0.mat + va.mat, h0.basis};
    OperatorMatrix hb{h0.mat + vb.mat, h0.basis};
    const SpectrumResult sa = diagonalize(ha);
    const SpectrumResult sb = diagonalize(hb);
    OperatorMatrix dv{vb.mat - va.mat, h0.basis};
    const SpectrumResult sd = diagonalize(dv);
    const double two_norm = std::max(std::abs(sd.eigenvalues.front()),
                                     std::abs(sd.eigenvalues.back()));
    for (size_t i = 0; i < sa.eigenvalues.size(); ++i)
        CHECK(std::abs(sa.eigenvalues[i] - sb.eigenvalues[i]) <= two_norm + 1e-12);
}

TEST_CASE("harmonic reference: commutator and glauber eigenstate", "[exactdiag]") {
    const HarmonicReference h = HarmonicReference::make(3.0, 0.2, 1.0, 40);
    CHECK(h.e_jt == Approx(0.2 * 0.2 / 3.0).epsilon(1e-14));
    CHECK(h.coupling_k() == Approx(0.2).epsilon(1e-14));

    const Matrix comm = h.lowering * h.lowering.transpose()
                      - h.lowering.transpose() * h.lowering;
    const Matrix dev = comm - Matrix::Identity(h.nfock, h.nfock);
    CHECK(dev.topLeftCorner(h.nfock - 1, h.nfock - 1).cwiseAbs().maxCoeff() < 1e-12);

    for (Complex rho : {Complex(0.5, 0.0), Complex(0.0, 1.3), Complex(1.4, -1.4)})
        CHECK(h.glauber_residual(rho) < 1e-6);
}

TEST_CASE("pt-vs-exact deviation scales quadratically", "[exactdiag]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    const ElectronicDoublet e = ElectronicDoublet::standard();
    const std::vector<double> ks = {0.01, 0.02, 0.04};
    for (auto form : {HjtForm::MorseEq8, HjtForm::HarmonicEq3}) {
        const PtScalingReport rep = compare_pt_vs_exact(p, form, e, ks);
        REQUIRE(rep.rows.size() == 3);
        CHECK(rep.rows[0].deviation < rep.rows[2].deviation);
        CHECK(rep.rows[0].deviation < 1e-4);
        CHECK(rep.slope == Approx(2.0).margin(0.3));
    }
    CHECK_THROWS_AS(compare_pt_vs_exact(p, HjtForm::MorseEq8, e, {}), EmptyInput);
}

TEST_CASE("exact splitting matches the degenerate-pt prediction", "[exactdiag]") {
    const MorseParams p = derive_params(1.0, 4.5, 1.0, 1.0);
    const ElectronicDoublet e = ElectronicDoublet::standard();
    const double kappa = 0.01;
    const OperatorMatrix h0 = build_h0(p, HjtForm::MorseEq8);
    const OperatorMatrix v = build_hjt(p, kappa, HjtForm::MorseEq8, e);
    OperatorMatrix h{h0.mat + v.mat, h0.basis};
    const SpectrumResult sp = diagonalize(h);
    const double gap = sp.eigenvalues[1] - sp.eigenvalues[0];
    const double x00 = MorseBasis(p).x_matrix().mat(0, 0);
    // Melec = Dtheta has eigenvalue gap 2
    const double predicted = 2.0 * kappa * p.hbar_omega * 2.0 * x00 * (2.0 / 2.0);
    CHECK(std::abs(gap - predicted) < 30.0 * kappa * kappa * p.hbar_omega);
}

TEST_CASE("harmonic limit scans", "[exactdiag]") {
    const std::vector<double> nus = {50.0, 200.0, 800.0};

    SECTION("level gap deviates by exactly 2/nu") {
        const LimitReport rep = harmonic_limit_scan(nus, LimitObservable::LevelGap);
        for (const auto& r : rep.rows)
            CHECK(r.deviation == Approx(2.0 / r.nu).epsilon(1e-12));
        CHECK(rep.decay_order == Approx(1.0).epsilon(1e-9));
    }
    SECTION("x01 converges to the oscillator element at order one") {
        const LimitReport rep = harmonic_limit_scan(nus, LimitObservable::X01Element);
        CHECK(rep.decay_order == Approx(1.0).margin(0.2));
        for (const auto& r : rep.rows) CHECK(r.deviation < 2.0 / r.nu);
    }
    SECTION("jt ground shift approaches the harmonic one") {
        const LimitReport rep = harmonic_limit_scan({50.0, 200.0}, LimitObservable::JtGroundShift);
        REQUIRE(rep.rows.size() == 2);
        CHECK(rep.rows[1].deviation < rep.rows[0].deviation);
    }
    CHECK_THROWS_AS(harmonic_limit_scan({}, LimitObservable::LevelGap), EmptyInput);
    CHECK_THROWS_AS(harmonic_limit_scan({0.9}, LimitObservable::LevelGap), NoBoundStates);
}

TEST_CASE("morse coherent build approaches the glauber state", "[exactdiag]") {
    const double overlap = morse_glauber_overlap(scan_params(800.0), 0.1, 12);
    CHECK(overlap > 0.999);
}
