#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "morsejt/matrix.hpp"
#include "morsejt/quadrature.hpp"

namespace morsejt {

/// One verification line: a named deviation against a pinned tolerance.
struct CheckResult {
    std::string name;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool passed = false;

    static CheckResult make(std::string name, double dev, double tol) {
        return {std::move(name), dev, tol, dev < tol};
    }
};

inline bool all_passed(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

/// 17 significant digits: enough for exact double round-trip.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void to_json(nlohmann::json& j, const CheckResult& c) {
    j = nlohmann::json{{"name", c.name},
                       {"max_deviation", c.max_deviation},
                       {"tolerance", c.tolerance},
                       {"pass", c.passed}};
}

inline void to_json(nlohmann::json& j, const BasisSpec& b) {
    j = nlohmann::json{{"basis", b.label()}, {"dim", b.total_dim()}};
}

inline void to_json(nlohmann::json& j, const OperatorMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.mat.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index k = 0; k < m.mat.cols(); ++k) row.push_back(m.mat(i, k));
        rows.push_back(row);
    }
    j = nlohmann::json{{"basis", m.basis.label()}, {"data", rows}};
}

inline void to_json(nlohmann::json& j, const QuadratureGrid& g) {
    j = nlohmann::json{{"order", g.order},
                       {"alpha_power", g.alpha_power},
                       {"log_mass", g.log_mass},
                       {"nodes", g.nodes},
                       {"weights", g.weights}};
}

} // namespace morsejt
