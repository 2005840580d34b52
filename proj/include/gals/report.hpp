#pragma once

#include "gals/design_matrix.hpp"
#include "gals/estimators.hpp"
#include "gals/simulation.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace gals::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

/// Report document for `fit`: one block per estimator with coefficients,
/// confidence bounds, row-major covariance and diagnostics.
Json fit_report(const Dataset& d, const std::vector<FitResult>& fits, double ci_level);

Json simulation_report(const SimulationReport& report);

/// Serializes with every floating-point value printed to 17 significant
/// digits; non-finite values become null.
std::string dump_json(const Json& j, int indent = 2);

/// Human-readable tables, values rounded to 6 significant digits.
std::string fit_table(const Dataset& d, const std::vector<FitResult>& fits, double ci_level);
std::string simulation_table(const SimulationReport& report);

}  // namespace gals::io
