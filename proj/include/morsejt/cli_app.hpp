#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "morsejt/config.hpp"
#include "morsejt/exactdiag.hpp"
#include "morsejt/ladder.hpp"
#include "morsejt/morse.hpp"
#include "morsejt/report.hpp"
#include "morsejt/series.hpp"
#include "morsejt/vibronic.hpp"

namespace morsejt::cli {

inline constexpr const char* kToolVersion = "morsejt 1.0.0";

struct SubcommandOutput {
    std::string csv;
    json results;
    std::vector<CheckResult> checks;
};

namespace detail {

inline std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    out += '\n';
    return out;
}

inline std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

inline std::string elec_label(int e) { return e == 0 ? "theta" : "eps"; }

} // namespace detail

// ---------------------------------------------------------------------------
// subcommand handlers
// ---------------------------------------------------------------------------

inline SubcommandOutput run_levels(const RunConfig& cfg, bool reduced) {
    const MorseParams p = cfg.morse_params();
    const double scale = reduced ? 1.0 / p.hbar_omega : 1.0;
    SubcommandOutput out;
    out.csv = detail::csv_row({"n", "energy"});
    json rows = json::array();
    for (int n = 0; n <= p.n_eff; ++n) {
        const double e = energy_level(p, n) * scale;
        out.csv += detail::csv_row({std::to_string(n), format_double(e)});
        rows.push_back({{"n", n}, {"energy", e}});
    }
    out.results = {{"levels", rows},
                   {"nu", p.nu},
                   {"hbar_omega", p.hbar_omega},
                   {"N_nominal", p.n_nominal},
                   {"N_eff", p.n_eff}};
    return out;
}

inline SubcommandOutput run_verify(const RunConfig& cfg, bool) {
    const MorseParams p = cfg.morse_params();
    const ElectronicDoublet e = cfg.electronic();
    const MorseBasis basis(p);
    const int d = p.basis_size();
    SubcommandOutput out;
    auto& checks = out.checks;

    {
        const Matrix g = basis.gram().mat;
        checks.push_back(CheckResult::make(
            "gram_identity", (g - Matrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-8));
    }
    {
        double worst = 0.0;
        for (int n = 0; n <= p.n_eff; ++n) {
            const double lhs = energy_level(p, n) - energy_level(p, 0);
            const double rhs = p.hbar_omega * n * (p.nu - 1.0 - n);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
        }
        checks.push_back(CheckResult::make("energy_identity", worst, 1e-12));
    }
    if (p.n_eff >= 2) {
        for (auto& c : check_commutators(p)) checks.push_back(c);
    }
    {
        const LadderSet L = ladder_matrices(p);
        const PhasedLadderSet A = phased_ladder(p);
        const double dev = (L.Bplus.mat - A.Aplus.mat).cwiseAbs().maxCoeff()
                         + (L.Bminus.mat - A.Aminus.mat).cwiseAbs().maxCoeff()
                         + (L.B0.mat - A.A0.mat).cwiseAbs().maxCoeff();
        checks.push_back(CheckResult::make("a_coincides_with_b", dev, 1e-15));
    }
    checks.push_back(CheckResult::make("hv_operator_identity", hv_identity_deviation(p), 1e-12));
    checks.push_back(xi_phase_bookkeeping(p));
    {
        double worst = 0.0;
        json residuals = json::array();
        for (int n = 0; n <= std::min(2, p.n_eff); ++n)
            for (const auto& r : differential_consistency(p, n)) {
                worst = std::max(worst, r.residual);
                residuals.push_back({{"n", n},
                                     {"op", r.op},
                                     {"residual", r.residual},
                                     {"projected_value", r.projected_value}});
            }
        checks.push_back(CheckResult::make("differential_forms", worst, 1e-6));
        out.results["differential_residuals"] = residuals;
    }
    {
        const OperatorMatrix h8 = build_hjt(p, cfg.kappa, HjtForm::MorseEq8, e);
        const OperatorMatrix h3 = build_hjt(p, cfg.kappa, HjtForm::HarmonicEq3, e);
        checks.push_back(CheckResult::make("hjt_hermitian_morse_eq8",
                                           hermiticity_deviation(h8.mat), 1e-12));
        checks.push_back(CheckResult::make("hjt_hermitian_harmonic_eq3",
                                           hermiticity_deviation(h3.mat), 1e-12));
        const OperatorMatrix h8b = build_hjt(p, 2.0 * cfg.kappa, HjtForm::MorseEq8, e);
        checks.push_back(CheckResult::make(
            "hjt_linearity", (h8b.mat - 2.0 * h8.mat).cwiseAbs().maxCoeff(), 1e-15));
        const SeriesTruncation t = cfg.truncation(p);
        const OperatorMatrix h9 = build_hjt(p, cfg.kappa, HjtForm::MorseEq9Series, e, t);
        out.results["series_form_hermiticity_deviation"] = hermiticity_deviation(h9.mat);
    }
    for (auto& c : electronic_invariants(e)) checks.push_back(c);
    {
        double worst = 0.0;
        for (double phi : {0.0, 0.7, M_PI, 4.4}) {
            auto [l, u] = branch_states(phi);
            Eigen::Matrix2d g;
            g << l.coeffs.dot(l.coeffs), l.coeffs.dot(u.coeffs), u.coeffs.dot(l.coeffs),
                u.coeffs.dot(u.coeffs);
            worst = std::max(worst, (g - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff());
        }
        checks.push_back(CheckResult::make("branch_orthonormality", worst, 1e-15));
    }
    {
        CoherentSpec spec = cfg.coherent_spec();
        spec.kappa = 0.0;
        const VibronicState c0 = coherent_state(p, spec).normalized();
        const VibronicState ref = beta_p_z0(p, spec.n, spec.z, spec.beta, spec.nphi).normalized();
        const double ov = std::abs(c0.coeffs.dot(ref.coeffs));
        checks.push_back(CheckResult::make("coherent_kappa0_reduction", 1.0 - ov, 1e-10));
    }
    {
        const SeriesTruncation t = cfg.truncation(p);
        checks.push_back(last_term_equal_occupation(p, t));
        out.results["last_term_power2_diagonal_finding"] = last_term_power2_diagonal(p, t);
    }
    {
        json ratios = json::array();
        for (int n = 0; n <= p.n_eff; ++n) {
            const MorseState& st = basis.state(n);
            ratios.push_back({{"n", n},
                              {"c_closedform_over_numeric",
                               std::exp(st.log_c_closed_form - st.log_c_numeric)}});
        }
        out.results["normalization_ratio"] = ratios;
    }

    out.csv = detail::csv_row({"check", "max_deviation", "tolerance", "pass"});
    for (const auto& c : checks)
        out.csv += detail::csv_row({c.name, format_double(c.max_deviation),
                                    format_double(c.tolerance), c.passed ? "1" : "0"});
    out.results["all_passed"] = all_passed(checks);
    return out;
}

inline SubcommandOutput run_series(const RunConfig& cfg, bool) {
    const MorseParams p = cfg.morse_params();
    std::vector<SeriesTruncation> ts;
    for (int m = 0; m <= cfg.m_inner; ++m)
        ts.push_back(SeriesTruncation::for_params(p, m, cfg.l_outer));
    const ConvergenceReport rep = convergence_report(p, ts);

    SubcommandOutput out;
    out.csv = detail::csv_row({"M_inner", "L_outer", "frobenius_error", "classification"});
    json rows = json::array();
    for (const auto& r : rep.rows) {
        out.csv += detail::csv_row({std::to_string(r.m_inner), std::to_string(r.l_outer),
                                    format_double(r.frobenius_error), r.classification});
        rows.push_back({{"M_inner", r.m_inner},
                        {"L_outer", r.l_outer},
                        {"frobenius_error", r.frobenius_error},
                        {"classification", r.classification}});
    }
    const SeriesTruncation t0 = ts.back();
    out.results = {{"rows", rows},
                   {"classification", rep.classification},
                   {"radius_ok", t0.radius_ok}};
    return out;
}

inline SubcommandOutput run_coherent(const RunConfig& cfg, bool) {
    const MorseParams p = cfg.morse_params();
    const CoherentSpec spec = cfg.coherent_spec();
    const VibronicState raw = coherent_state(p, spec);
    const VibronicState st = raw.normalized();
    const int d = p.basis_size();

    SubcommandOutput out;
    out.csv = detail::csv_row({"elec", "n1", "n2", "re", "im", "norm"});
    json coeffs = json::array();
    for (int e = 0; e < 2; ++e)
        for (int n1 = 0; n1 < d; ++n1)
            for (int n2 = 0; n2 < d; ++n2) {
                const Complex c = st.coeffs(vibronic_index(e, n1, n2, d));
                out.csv += detail::csv_row({detail::elec_label(e), std::to_string(n1),
                                            std::to_string(n2), format_double(c.real()),
                                            format_double(c.imag()),
                                            format_double(st.norm_factor)});
                coeffs.push_back({{"elec", detail::elec_label(e)},
                                  {"n1", n1},
                                  {"n2", n2},
                                  {"re", c.real()},
                                  {"im", c.imag()}});
            }
    out.results = {{"coefficients", coeffs},
                   {"norm_factor", st.norm_factor},
                   {"n", spec.n},
                   {"z", spec.z},
                   {"kappa", spec.kappa},
                   {"Nphi", spec.nphi}};
    return out;
}

inline SubcommandOutput run_pt(const RunConfig& cfg, bool reduced) {
    const MorseParams p = cfg.morse_params();
    const ElectronicDoublet e = cfg.electronic();
    const HjtForm form = cfg.hjt_form();
    const int d = p.basis_size();
    if (cfg.pt_n1 > p.n_eff || cfg.pt_n2 > p.n_eff)
        throw ConfigInvalid("pt level indices exceed the bound basis");

    VibronicState st{ComplexVector::Zero(2 * d * d), {BasisKind::Vibronic, d}, std::nullopt, 1.0};
    st.coeffs(vibronic_index(0, cfg.pt_n1, cfg.pt_n2, d)) = 1.0;

    std::optional<SeriesTruncation> t;
    if (form == HjtForm::MorseEq9Series) t = cfg.truncation(p);
    const PtResult r = pt_first_order(p, cfg.kappa, form, e, st, t);
    const double scale = reduced ? 1.0 / p.hbar_omega : 1.0;

    SubcommandOutput out;
    out.csv = detail::csv_row({"member", "E0", "EJT", "E", "psi1_norm"});
    json rows = json::array();
    for (size_t k = 0; k < r.members.size(); ++k) {
        const PtMember& m = r.members[k];
        out.csv += detail::csv_row({std::to_string(k), format_double(r.e0 * scale),
                                    format_double(m.ejt * scale), format_double(m.energy * scale),
                                    format_double(m.psi1.norm())});
        rows.push_back({{"member", k},
                        {"E0", r.e0 * scale},
                        {"EJT", m.ejt * scale},
                        {"E", m.energy * scale},
                        {"psi1_norm", m.psi1.norm()}});
    }
    out.results = {{"members", rows},
                   {"block_dim", r.block_dim},
                   {"block_unresolved", r.block_unresolved}};
    return out;
}

inline SubcommandOutput run_ejt_formula(const RunConfig& cfg, bool reduced) {
    const MorseParams p = cfg.morse_params();
    const CoherentSpec spec = cfg.coherent_spec();
    const EjtValue v = ejt_closed_form(p, spec, cfg.electronic(), cfg.truncation(p));
    const double scale = reduced ? 1.0 / p.hbar_omega : 1.0;

    SubcommandOutput out;
    out.csv = detail::csv_row({"kappa", "n", "z", "value", "diverged"});
    out.csv += detail::csv_row({format_double(spec.kappa), std::to_string(spec.n),
                                format_double(spec.z), format_double(v.value * scale),
                                v.diverged ? "1" : "0"});
    out.results = {{"kappa", spec.kappa},
                   {"n", spec.n},
                   {"z", spec.z},
                   {"value", v.value * scale},
                   {"diverged", v.diverged}};
    return out;
}

inline SubcommandOutput run_diag(const RunConfig& cfg, bool reduced) {
    const MorseParams p = cfg.morse_params();
    const HjtForm form = cfg.hjt_form();
    std::optional<SeriesTruncation> t;
    if (form == HjtForm::MorseEq9Series) t = cfg.truncation(p);
    const OperatorMatrix h0 = build_h0(p, form);
    const OperatorMatrix v = build_hjt(p, cfg.kappa, form, cfg.electronic(), t);
    OperatorMatrix h{h0.mat + v.mat, h0.basis};
    const SpectrumResult sp = diagonalize(h, 1e-8 * p.hbar_omega);
    const double scale = reduced ? 1.0 / p.hbar_omega : 1.0;

    SubcommandOutput out;
    out.csv = detail::csv_row({"kappa_or_nu", "level_index", "energy", "degeneracy"});
    json rows = json::array();
    for (size_t i = 0; i < sp.eigenvalues.size(); ++i) {
        out.csv += detail::csv_row({format_double(cfg.kappa), std::to_string(i),
                                    format_double(sp.eigenvalues[i] * scale),
                                    std::to_string(sp.degeneracy_of(static_cast<int>(i)))});
        rows.push_back({{"level", i},
                        {"energy", sp.eigenvalues[i] * scale},
                        {"degeneracy", sp.degeneracy_of(static_cast<int>(i))}});
    }
    out.results = {{"kappa", cfg.kappa}, {"levels", rows}};
    return out;
}

inline SubcommandOutput run_limit(const RunConfig& cfg, bool) {
    std::vector<double> nus = cfg.sweep_nu;
    if (nus.empty()) nus = {50.0, 200.0, 800.0};

    SubcommandOutput out;
    out.csv = detail::csv_row({"nu", "observable", "value", "reference", "deviation"});
    json obs_json = json::object();
    const std::vector<std::pair<LimitObservable, std::string>> observables = {
        {LimitObservable::LevelGap, "level_gap"},
        {LimitObservable::X01Element, "x01_element"},
        {LimitObservable::JtGroundShift, "jt_ground_shift"}};
    for (const auto& [obs, name] : observables) {
        const LimitReport rep = harmonic_limit_scan(nus, obs);
        json rows = json::array();
        for (const auto& r : rep.rows) {
            out.csv += detail::csv_row({format_double(r.nu), name, format_double(r.value),
                                        format_double(r.reference), format_double(r.deviation)});
            rows.push_back({{"nu", r.nu},
                            {"value", r.value},
                            {"reference", r.reference},
                            {"deviation", r.deviation}});
        }
        obs_json[name] = {{"rows", rows}, {"fitted_decay_order", rep.decay_order}};
    }
    out.results = obs_json;
    return out;
}

inline SubcommandOutput run_sweep(const RunConfig& cfg, bool reduced) {
    const ElectronicDoublet e = cfg.electronic();
    const HjtForm form = cfg.hjt_form();
    SubcommandOutput out;
    out.csv = detail::csv_row(
        {"kappa_or_nu", "E0", "EJT_low", "EJT_high", "E_pt", "E_exact", "abs_deviation"});
    json rows = json::array();

    auto emit = [&](double key, const MorseParams& p, double kappa) {
        const double scale = reduced ? 1.0 / p.hbar_omega : 1.0;
        const int d = p.basis_size();
        VibronicState st{ComplexVector::Zero(2 * d * d), {BasisKind::Vibronic, d}, std::nullopt,
                         1.0};
        st.coeffs(vibronic_index(0, 0, 0, d)) = 1.0;
        std::optional<SeriesTruncation> t;
        if (form == HjtForm::MorseEq9Series) t = cfg.truncation(p);
        const PtResult pt = pt_first_order(p, kappa, form, e, st, t);
        const OperatorMatrix h0 = build_h0(p, form);
        const OperatorMatrix v = build_hjt(p, kappa, form, e, t);
        OperatorMatrix h{h0.mat + v.mat, h0.basis};
        const SpectrumResult sp = diagonalize(h, 1e-8 * p.hbar_omega);
        const double e_pt = pt.e0 + pt.members.front().ejt;
        const double e_exact = sp.eigenvalues.front();
        out.csv += detail::csv_row(
            {format_double(key), format_double(pt.e0 * scale),
             format_double(pt.members.front().ejt * scale),
             format_double(pt.members.back().ejt * scale), format_double(e_pt * scale),
             format_double(e_exact * scale), format_double(std::abs(e_pt - e_exact) * scale)});
        rows.push_back({{"key", key},
                        {"E0", pt.e0 * scale},
                        {"EJT_low", pt.members.front().ejt * scale},
                        {"EJT_high", pt.members.back().ejt * scale},
                        {"E_pt", e_pt * scale},
                        {"E_exact", e_exact * scale},
                        {"abs_deviation", std::abs(e_pt - e_exact) * scale}});
    };

    if (!cfg.sweep_nu.empty()) {
        for (double nu : cfg.sweep_nu) {
            // vary nu inside the config's unit system: the reduced group keeps
            // its hbar_Omega, the physical group varies V0 at fixed m, alpha, hbar
            MorseParams p = cfg.reduced_group()
                                ? params_from_reduced(nu, *cfg.hbar_Omega)
                                : derive_params(*cfg.m,
                                                nu * nu * (*cfg.alpha) * (*cfg.alpha)
                                                    * (*cfg.hbar) * (*cfg.hbar) / (8.0 * (*cfg.m)),
                                                *cfg.alpha, *cfg.hbar);
            emit(nu, p, cfg.kappa);
        }
    } else {
        std::vector<double> ks = cfg.sweep_kappa;
        if (ks.empty()) ks = {0.01, 0.02, 0.04};
        const MorseParams p = cfg.morse_params();
        for (double k : ks) emit(k, p, k);
    }
    out.results = {{"rows", rows}};
    return out;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

inline json make_envelope(const RunConfig& cfg, const SubcommandOutput& out) {
    json env;
    env["tool_version"] = kToolVersion;
    env["timestamp"] = detail::iso_timestamp();
    env["config"] = config_to_json(cfg);
    env["results"] = out.results;
    env["checks"] = out.checks;
    return env;
}

inline void write_outputs(const RunConfig& cfg, const std::string& subcommand,
                          const SubcommandOutput& out) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    for (const auto& f : cfg.formats) {
        const fs::path path = fs::path(cfg.out_dir) / (subcommand + "." + f);
        std::ofstream os(path, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + path.string());
        if (f == "csv") os << out.csv;
        else os << make_envelope(cfg, out).dump(2) << '\n';
    }
}

/// Full CLI entry point. Returns the process exit code:
/// 0 success, 1 invalid configuration or input contract, 2 failed verify checks.
inline int run(const std::vector<std::string>& args) {
    CLI::App app{"Morse-basis E x eps Jahn-Teller toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_override;
    bool reduced = false;

    const std::vector<std::pair<std::string, std::string>> subs = {
        {"levels", "Morse bound-level table (CSV: n,energy)"},
        {"verify", "full invariant suite (CSV: check,max_deviation,tolerance,pass); exit 2 on failure"},
        {"series", "x-series convergence report (CSV: M_inner,L_outer,frobenius_error,classification)"},
        {"coherent", "coherent-state coefficients (CSV: elec,n1,n2,re,im,norm)"},
        {"pt", "first-order perturbation energies (CSV: member,E0,EJT,E,psi1_norm)"},
        {"ejt-formula", "closed-form E_JT (CSV: kappa,n,z,value,diverged)"},
        {"diag", "full vibronic spectrum (CSV: kappa_or_nu,level_index,energy,degeneracy)"},
        {"limit", "harmonic-limit scan (CSV: nu,observable,value,reference,deviation)"},
        {"sweep", "kappa or nu sweep with PT-vs-exact columns"}};
    for (const auto& [name, desc] : subs) app.add_subcommand(name, desc)->fallthrough();

    app.add_option("-c,--config", config_path, "JSON config file")->required();
    app.add_option("--set", overrides, "dotted-path override, e.g. --set coupling.kappa=0.05");
    app.add_option("-o,--out", out_override, "override output.dir");
    app.add_flag("--reduced", reduced, "energies in units of hbar*Omega");

    std::vector<std::string> argv_like = args;
    std::vector<char*> argv;
    argv.reserve(argv_like.size());
    for (auto& s : argv_like) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& ex) {
        return app.exit(ex);
    }

    try {
        json tree = load_config_file(config_path);
        for (const auto& o : overrides) apply_override(tree, o);
        RunConfig cfg = parse_config(tree);
        if (!out_override.empty()) cfg.out_dir = out_override;

        const std::string sub = app.get_subcommands().front()->get_name();
        SubcommandOutput out;
        if (sub == "levels") out = run_levels(cfg, reduced);
        else if (sub == "verify") out = run_verify(cfg, reduced);
        else if (sub == "series") out = run_series(cfg, reduced);
        else if (sub == "coherent") out = run_coherent(cfg, reduced);
        else if (sub == "pt") out = run_pt(cfg, reduced);
        else if (sub == "ejt-formula") out = run_ejt_formula(cfg, reduced);
        else if (sub == "diag") out = run_diag(cfg, reduced);
        else if (sub == "limit") out = run_limit(cfg, reduced);
        else out = run_sweep(cfg, reduced);

        write_outputs(cfg, sub, out);
        if (sub == "verify" && !all_passed(out.checks)) {
            std::cerr << "verify: check failures\n";
            for (const auto& c : out.checks)
                if (!c.passed)
                    std::cerr << "  FAIL " << c.name << " deviation " << c.max_deviation
                              << " tolerance " << c.tolerance << "\n";
            return 2;
        }
        return 0;
    } catch (const ConfigInvalid& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}

} // namespace morsejt::cli
