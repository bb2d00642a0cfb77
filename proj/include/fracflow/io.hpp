#pragma once

// CSV and JSON output. Every double is printed with 17 significant digits and
// '.' as decimal separator, so identical runs produce identical bytes.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracflow/diagnostics.hpp"
#include "fracflow/flow.hpp"
#include "fracflow/monitors.hpp"

namespace fracflow {

using Json = nlohmann::ordered_json;

/// "%.17g"; NaN and infinities print as nan, inf, -inf.
std::string format_double(double x);

/// Column names of the trajectory CSV, in order.
const std::vector<std::string>& trajectory_columns();

/// Header plus one row per snapshot; diagnostics absent for the flow kind are
/// empty cells.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// s,sup_residual,lambda_fit.
void write_residual_csv(std::ostream& os, const std::vector<ResidualSample>& history);

/// Serializes with two-space indentation, keys in insertion order, doubles
/// through format_double (non-finite doubles become null) and a final '\n'.
std::string dump_json(const Json& j);

Json to_json(const SphereParams& p);
Json to_json(const ConstantSet& c);
Json to_json(const SolverConfig& c);
Json to_json(const DeficitReport& r);
Json to_json(const ExtinctionReport& r);
Json to_json(const BubbleFit& f);

/// Writes content to path, creating parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace fracflow
