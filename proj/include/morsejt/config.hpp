#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "morsejt/errors.hpp"
#include "morsejt/morse.hpp"
#include "morsejt/vibronic.hpp"

namespace morsejt {

using nlohmann::json;

/// One experiment: Morse parameterization, coupling, coherent-state spec,
/// series truncation, optional sweep lists, output routing.
struct RunConfig {
    // exactly one of the two Morse groups
    std::optional<double> m, V0, alpha, hbar;
    std::optional<double> nu, hbar_Omega;

    double kappa = 0.05;
    std::string form = "morse_eq8";
    std::string melec = "dtheta";

    std::string beta = "l";
    int coherent_n = 0;
    double z = 0.5;
    int nphi = 64;

    int m_inner = 8;
    int l_outer = 4;

    int pt_n1 = 0;
    int pt_n2 = 0;

    std::vector<double> sweep_kappa;
    std::vector<double> sweep_nu;

    std::string out_dir = "out";
    std::vector<std::string> formats = {"csv", "json"};

    bool operator==(const RunConfig&) const = default;

    bool reduced_group() const { return nu.has_value() || hbar_Omega.has_value(); }

    MorseParams morse_params() const {
        if (reduced_group()) return params_from_reduced(*nu, *hbar_Omega);
        return derive_params(*m, *V0, *alpha, *hbar);
    }

    HjtForm hjt_form() const {
        if (form == "harmonic_eq3") return HjtForm::HarmonicEq3;
        if (form == "morse_eq8") return HjtForm::MorseEq8;
        if (form == "morse_eq9_series") return HjtForm::MorseEq9Series;
        if (form == "morse_two_operator") return HjtForm::MorseTwoOperator;
        throw ConfigInvalid("coupling.form: unknown value '" + form + "'");
    }

    ElectronicDoublet electronic() const {
        ElectronicDoublet e = ElectronicDoublet::standard();
        if (melec == "dtheta") e.Melec = e.Dtheta;
        else if (melec == "deps") e.Melec = e.Deps;
        else if (melec == "identity") e.Melec = Eigen::Matrix2d::Identity();
        else throw ConfigInvalid("coupling.melec: unknown value '" + melec + "'");
        return e;
    }

    CoherentSpec coherent_spec() const {
        return {beta == "l" ? Branch::Lower : Branch::Upper, coherent_n, z, kappa, nphi};
    }

    SeriesTruncation truncation(const MorseParams& p) const {
        return SeriesTruncation::for_params(p, m_inner, l_outer);
    }
};

namespace detail {

inline void require(bool ok, const std::string& key, const std::string& why) {
    if (!ok) throw ConfigInvalid("config key '" + key + "': " + why);
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigInvalid("config key '" + key + "': wrong type");
    }
}

} // namespace detail

inline RunConfig parse_config(const json& j) {
    using detail::get_or;
    using detail::require;
    RunConfig c;

    require(j.contains("morse"), "morse", "missing");
    const json& m = j.at("morse");
    const bool physical = m.contains("m") || m.contains("V0") || m.contains("alpha") || m.contains("hbar");
    const bool reduced = m.contains("nu") || m.contains("hbar_Omega");
    require(physical != reduced, "morse",
            "exactly one parameterization group: {m, V0, alpha, hbar} or {nu, hbar_Omega}");
    if (physical) {
        require(m.contains("m") && m.contains("V0") && m.contains("alpha") && m.contains("hbar"),
                "morse", "physical group needs all of m, V0, alpha, hbar");
        c.m = m.at("m").get<double>();
        c.V0 = m.at("V0").get<double>();
        c.alpha = m.at("alpha").get<double>();
        c.hbar = m.at("hbar").get<double>();
        require(*c.m > 0 && *c.V0 > 0 && *c.alpha > 0 && *c.hbar > 0, "morse",
                "all physical values must be positive");
    } else {
        require(m.contains("nu") && m.contains("hbar_Omega"), "morse",
                "reduced group needs both nu and hbar_Omega");
        c.nu = m.at("nu").get<double>();
        c.hbar_Omega = m.at("hbar_Omega").get<double>();
        require(*c.nu > 0 && *c.hbar_Omega > 0, "morse", "all physical values must be positive");
    }

    if (j.contains("coupling")) {
        const json& cp = j.at("coupling");
        c.kappa = get_or(cp, "kappa", c.kappa);
        c.form = get_or(cp, "form", c.form);
        c.melec = get_or(cp, "melec", c.melec);
        require(c.kappa >= 0.0, "coupling.kappa", "must be >= 0");
        require(c.form == "harmonic_eq3" || c.form == "morse_eq8" || c.form == "morse_eq9_series"
                    || c.form == "morse_two_operator",
                "coupling.form", "must be one of harmonic_eq3, morse_eq8, morse_eq9_series, morse_two_operator");
        require(c.melec == "dtheta" || c.melec == "deps" || c.melec == "identity",
                "coupling.melec", "must be one of dtheta, deps, identity");
    }
    if (j.contains("coherent")) {
        const json& ch = j.at("coherent");
        c.beta = get_or(ch, "beta", c.beta);
        c.coherent_n = get_or(ch, "n", c.coherent_n);
        c.z = get_or(ch, "z", c.z);
        c.nphi = get_or(ch, "Nphi", c.nphi);
        require(c.beta == "l" || c.beta == "u", "coherent.beta", "must be 'l' or 'u'");
        require(c.coherent_n >= 0, "coherent.n", "must be >= 0");
        require(c.z == 0.0 || c.z == 0.5, "coherent.z", "must be 0 or 0.5");
        require(c.nphi >= 8 && c.nphi % 2 == 0, "coherent.Nphi", "must be even and >= 8");
    }
    if (j.contains("truncation")) {
        const json& t = j.at("truncation");
        c.m_inner = get_or(t, "M_inner", c.m_inner);
        c.l_outer = get_or(t, "L_outer", c.l_outer);
        require(c.m_inner >= 0, "truncation.M_inner", "must be >= 0");
        require(c.l_outer >= 1, "truncation.L_outer", "must be >= 1");
    }
    if (j.contains("pt")) {
        c.pt_n1 = get_or(j.at("pt"), "n1", 0);
        c.pt_n2 = get_or(j.at("pt"), "n2", 0);
        require(c.pt_n1 >= 0 && c.pt_n2 >= 0, "pt", "level indices must be >= 0");
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        c.sweep_kappa = get_or(s, "kappa", std::vector<double>{});
        c.sweep_nu = get_or(s, "nu", std::vector<double>{});
        require(c.sweep_kappa.empty() || c.sweep_nu.empty(), "sweep",
                "at most one of kappa and nu lists");
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        c.out_dir = get_or(o, "dir", c.out_dir);
        c.formats = get_or(o, "formats", c.formats);
        for (const auto& f : c.formats)
            require(f == "csv" || f == "json", "output.formats", "entries must be csv or json");
    }
    return c;
}

inline json config_to_json(const RunConfig& c) {
    json j;
    if (c.reduced_group())
        j["morse"] = {{"nu", *c.nu}, {"hbar_Omega", *c.hbar_Omega}};
    else
        j["morse"] = {{"m", *c.m}, {"V0", *c.V0}, {"alpha", *c.alpha}, {"hbar", *c.hbar}};
    j["coupling"] = {{"kappa", c.kappa}, {"form", c.form}, {"melec", c.melec}};
    j["coherent"] = {{"beta", c.beta}, {"n", c.coherent_n}, {"z", c.z}, {"Nphi", c.nphi}};
    j["truncation"] = {{"M_inner", c.m_inner}, {"L_outer", c.l_outer}};
    j["pt"] = {{"n1", c.pt_n1}, {"n2", c.pt_n2}};
    json sweep = json::object();
    if (!c.sweep_kappa.empty()) sweep["kappa"] = c.sweep_kappa;
    if (!c.sweep_nu.empty()) sweep["nu"] = c.sweep_nu;
    if (!sweep.empty()) j["sweep"] = sweep;
    j["output"] = {{"dir", c.out_dir}, {"formats", c.formats}};
    return j;
}

/// Apply a dotted-path override like "coupling.kappa=0.1" onto a raw config
/// tree. Values parse as JSON when possible, else as strings.
inline void apply_override(json& tree, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigInvalid("override '" + assignment + "' is not of the form key.path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::exception&) {
        value = raw;
    }

    json* node = &tree;
    size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty()) throw ConfigInvalid("override path '" + path + "' has an empty segment");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &((*node)[key]);
        start = dot + 1;
    }
}

inline json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw ConfigInvalid("config file '" + path + "' is not valid JSON: " + ex.what());
    }
    return j;
}

} // namespace morsejt
