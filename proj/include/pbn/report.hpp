#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace pbn {

// One verified identity. `lhs`/`rhs` are the two evaluated sides (for
// pointwise identities, lhs is the worst pointwise gap and rhs is 0).
// `ref` names the identity family so report rows are traceable.
struct CheckRow {
    std::string property;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    bool pass = false;
    std::string ref;
    std::optional<double> stderr_est;  // statistical checks only
    std::optional<double> sigmas;      // threshold multiple used
};

struct CheckReport {
    std::vector<CheckRow> rows;

    bool all_pass() const {
        return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
    }

    double max_residual() const {
        double worst = 0.0;
        for (const auto& r : rows) worst = std::max(worst, r.residual);
        return worst;
    }

    void add(CheckRow row) { rows.push_back(std::move(row)); }

    void append(const CheckReport& other) {
        rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    }
};

// Row whose two sides must agree within `sigmas` standard errors.
inline CheckRow stat_row(std::string property, std::string ref, double lhs, double rhs,
                         double stderr_est, double sigmas) {
    CheckRow row;
    row.property = std::move(property);
    row.ref = std::move(ref);
    row.lhs = lhs;
    row.rhs = rhs;
    row.residual = std::abs(lhs - rhs);
    row.stderr_est = stderr_est;
    row.sigmas = sigmas;
    row.pass = stderr_est > 0.0 ? row.residual <= sigmas * stderr_est : row.residual == 0.0;
    return row;
}

// Row whose two sides must agree within `tol`.
inline CheckRow exact_row(std::string property, std::string ref, double lhs, double rhs,
                          double tol) {
    CheckRow row;
    row.property = std::move(property);
    row.ref = std::move(ref);
    row.lhs = lhs;
    row.rhs = rhs;
    row.residual = std::abs(lhs - rhs);
    row.pass = row.residual <= tol;
    return row;
}

}  // namespace pbn
