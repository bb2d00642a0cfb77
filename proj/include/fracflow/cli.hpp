#pragma once

// Run configuration, config-file parsing and experiment execution behind the
// fracflow command-line tool.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fracflow/flow.hpp"

namespace fracflow {

enum class Experiment { Constants, OperatorCheck, FlowNormalized, FlowRescaled, FlowExtinction, Inequality, Sweep };

/// Subcommand spelling: constants, operator-check, flow-normalized, ...
const char* to_string(Experiment e);
/// Throws ConfigError for an unknown name.
Experiment experiment_from_string(std::string_view name);

enum class InitialKind { Default, Constant, Bubble, Random, Coefficients };

struct InitialSpec {
  InitialKind kind = InitialKind::Default;
  double value = 1.0;      ///< constant
  double lambda = 1.0;     ///< bubble
  double amplitude = 1.0;  ///< bubble and random
  double rho = 0.7;        ///< random coefficient decay
  int degree = 0;          ///< random: highest degree, 0 for K
  std::vector<double> coefficients;
};

struct RunConfig {
  int n = 3;
  double sigma = 0.5;
  int degree_max = 32;
  int node_count = 0;
  SolverConfig solver;
  Experiment experiment = Experiment::Constants;
  double tol = 1e-3;   ///< operator-check tolerance
  int trials = 100;    ///< inequality: number of seeded trial fields
  bool shoot = true;   ///< flow-rescaled: derive v from an extinction orbit
  Experiment sweep_experiment = Experiment::FlowRescaled;
  int sweep_runs = 4;
  InitialSpec initial;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the violated invariant.
  void validate() const;
};

struct ConfigKey {
  std::string name;         ///< dotted: section.key, or a bare root key
  std::string description;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

/// Every key accepted in config files and as --section.key overrides.
const std::vector<ConfigKey>& config_keys();

/// Sets one dotted key from its textual value. Throws ConfigError for an
/// unknown key or an unparsable value.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

/// INI document with sections [params], [grid], [solver], [experiment],
/// [initial], [sweep] and root keys seed, output_dir. Full-line comments start
/// with ';' or '#'. Throws ConfigError; the result is validated.
RunConfig parse_config(const std::string& text);

enum ExitStatus : int { kPass = 0, kRuntimeError = 1, kViolation = 2 };

/// Runs the configured experiment and writes its artifacts under output_dir,
/// starting with manifest.json. Returns kPass or kViolation; runtime failures
/// propagate as exceptions.
int execute(const RunConfig& cfg);

/// execute() with exceptions reported on stderr and mapped to kRuntimeError.
int execute_guarded(const RunConfig& cfg);

}  // namespace fracflow
