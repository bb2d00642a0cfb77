#include <charconv>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "fracflow/cli.hpp"
#include "fracflow/errors.hpp"

namespace fracflow {

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::Constants: return "constants";
    case Experiment::OperatorCheck: return "operator-check";
    case Experiment::FlowNormalized: return "flow-normalized";
    case Experiment::FlowRescaled: return "flow-rescaled";
    case Experiment::FlowExtinction: return "flow-extinction";
    case Experiment::Inequality: return "inequality";
    case Experiment::Sweep: return "sweep";
  }
  return "?";
}

Experiment experiment_from_string(std::string_view name) {
  for (Experiment e : {Experiment::Constants, Experiment::OperatorCheck, Experiment::FlowNormalized,
                       Experiment::FlowRescaled, Experiment::FlowExtinction, Experiment::Inequality,
                       Experiment::Sweep}) {
    if (name == to_string(e)) return e;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

namespace {

const char* initial_name(InitialKind k) {
  switch (k) {
    case InitialKind::Default: return "default";
    case InitialKind::Constant: return "constant";
    case InitialKind::Bubble: return "bubble";
    case InitialKind::Random: return "random";
    case InitialKind::Coefficients: return "coefficients";
  }
  return "?";
}

InitialKind initial_from_string(const std::string& s) {
  for (InitialKind k : {InitialKind::Default, InitialKind::Constant, InitialKind::Bubble, InitialKind::Random,
                        InitialKind::Coefficients}) {
    if (s == initial_name(k)) return k;
  }
  throw ConfigError("unknown initial.type '" + s + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_as(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  T out{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if constexpr (std::is_floating_point_v<T>) {
    if (s == "inf") return std::numeric_limits<T>::infinity();
  }
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (s.empty() || ec != std::errc() || ptr != last) {
    throw ConfigError("cannot parse value '" + raw + "' for key '" + key + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("cannot parse value '" + raw + "' for key '" + key + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_as<double>(key, item));
  }
  return out;
}

// member maps a config to the field it names; the getter only reads through it.
template <class T, class Member>
ConfigKey numeric(std::string name, std::string desc, Member member) {
  auto get = [member](const RunConfig& c) -> std::string {
    const T value = member(const_cast<RunConfig&>(c));
    if constexpr (std::is_floating_point_v<T>) {
      return fmt::format("{}", value);
    } else {
      return std::to_string(value);
    }
  };
  auto set = [name, member](RunConfig& c, const std::string& v) { member(c) = parse_as<T>(name, v); };
  return ConfigKey{std::move(name), std::move(desc), set, get};
}

std::vector<ConfigKey> make_keys() {
  std::vector<ConfigKey> k;
  k.push_back(numeric<int>("params.n", "sphere dimension n >= 2", [](RunConfig& c) -> int& { return c.n; }));
  k.push_back(numeric<double>("params.sigma", "fractional order in (0,1)",
                              [](RunConfig& c) -> double& { return c.sigma; }));
  k.push_back(numeric<int>("grid.degree_max", "highest zonal degree K >= 8",
                           [](RunConfig& c) -> int& { return c.degree_max; }));
  k.push_back(numeric<int>("grid.node_count", "quadrature nodes, 0 for (3(K+1)+1)/2",
                           [](RunConfig& c) -> int& { return c.node_count; }));
  k.push_back(numeric<double>("solver.dt_init", "largest allowed step",
                              [](RunConfig& c) -> double& { return c.solver.dt_init; }));
  k.push_back(numeric<double>("solver.safety", "fraction of the stiffness step bound, in (0,1]",
                              [](RunConfig& c) -> double& { return c.solver.safety; }));
  k.push_back(numeric<double>("solver.positivity_floor", "stage minimum relative to the pre-step minimum",
                              [](RunConfig& c) -> double& { return c.solver.positivity_floor; }));
  k.push_back(numeric<long>("solver.max_steps", "step budget", [](RunConfig& c) -> long& { return c.solver.max_steps; }));
  k.push_back(numeric<double>("solver.stop_residual", "sup|rhs|/sup|field| for convergence",
                              [](RunConfig& c) -> double& { return c.solver.stop_residual; }));
  k.push_back(numeric<long>("solver.record_every", "snapshot stride in steps",
                            [](RunConfig& c) -> long& { return c.solver.record_every; }));
  k.push_back(numeric<double>("solver.max_clock", "stop when the clock reaches this value",
                              [](RunConfig& c) -> double& { return c.solver.max_clock; }));
  k.push_back(numeric<double>("solver.extinction_tol", "remaining time relative to clock declaring extinction",
                              [](RunConfig& c) -> double& { return c.solver.extinction_tol; }));
  k.push_back(ConfigKey{"experiment.kind", "experiment name (the subcommand takes precedence)",
                        [](RunConfig& c, const std::string& v) { c.experiment = experiment_from_string(trim(v)); },
                        [](const RunConfig& c) { return std::string(to_string(c.experiment)); }});
  k.push_back(numeric<double>("experiment.tol", "operator-check tolerance",
                              [](RunConfig& c) -> double& { return c.tol; }));
  k.push_back(numeric<int>("experiment.trials", "inequality: number of seeded trial fields",
                           [](RunConfig& c) -> int& { return c.trials; }));
  k.push_back(ConfigKey{"experiment.shoot", "flow-rescaled: start on the extinction orbit of the initial field",
                        [](RunConfig& c, const std::string& v) { c.shoot = parse_bool("experiment.shoot", v); },
                        [](const RunConfig& c) { return std::string(c.shoot ? "true" : "false"); }});
  k.push_back(ConfigKey{"initial.type", "default, constant, bubble, random or coefficients",
                        [](RunConfig& c, const std::string& v) { c.initial.kind = initial_from_string(trim(v)); },
                        [](const RunConfig& c) { return std::string(initial_name(c.initial.kind)); }});
  k.push_back(numeric<double>("initial.value", "constant value",
                              [](RunConfig& c) -> double& { return c.initial.value; }));
  k.push_back(numeric<double>("initial.lambda", "bubble concentration",
                              [](RunConfig& c) -> double& { return c.initial.lambda; }));
  k.push_back(numeric<double>("initial.amplitude", "bubble or random amplitude",
                              [](RunConfig& c) -> double& { return c.initial.amplitude; }));
  k.push_back(numeric<double>("initial.rho", "random coefficient decay in (0,1)",
                              [](RunConfig& c) -> double& { return c.initial.rho; }));
  k.push_back(numeric<int>("initial.degree", "random: highest degree, 0 for K",
                           [](RunConfig& c) -> int& { return c.initial.degree; }));
  k.push_back(ConfigKey{"initial.coefficients", "comma-separated coefficients c_0, c_1, ...",
                        [](RunConfig& c, const std::string& v) {
                          c.initial.coefficients = parse_list("initial.coefficients", v);
                        },
                        [](const RunConfig& c) {
                          std::string s;
                          for (std::size_t i = 0; i < c.initial.coefficients.size(); ++i) {
                            if (i) s += ",";
                            s += fmt::format("{}", c.initial.coefficients[i]);
                          }
                          return s;
                        }});
  k.push_back(ConfigKey{"sweep.experiment", "experiment run by each sweep member",
                        [](RunConfig& c, const std::string& v) { c.sweep_experiment = experiment_from_string(trim(v)); },
                        [](const RunConfig& c) { return std::string(to_string(c.sweep_experiment)); }});
  k.push_back(numeric<int>("sweep.runs", "number of sweep members; member i uses seed + i",
                           [](RunConfig& c) -> int& { return c.sweep_runs; }));
  k.push_back(ConfigKey{"output_dir", "artifact directory",
                        [](RunConfig& c, const std::string& v) { c.output_dir = trim(v); },
                        [](const RunConfig& c) { return c.output_dir.string(); }});
  k.push_back(numeric<std::uint64_t>("seed", "base seed for random initial data",
                                     [](RunConfig& c) -> std::uint64_t& { return c.seed; }));
  return k;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = make_keys();
  return keys;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& k : config_keys()) {
    if (k.name == key) {
      k.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown key '" + key + "'");
}

void RunConfig::validate() const {
  try {
    SphereParams p(n, sigma);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (degree_max < 8) throw ConfigError("grid.degree_max must be at least 8");
  if (node_count != 0 && node_count < degree_max + 1) throw ConfigError("grid.node_count must be 0 or at least K+1");
  solver.validate();
  if (!(tol > 0.0)) throw ConfigError("experiment.tol must be positive");
  if (trials < 1) throw ConfigError("experiment.trials must be at least 1");
  if (!(initial.rho > 0.0 && initial.rho < 1.0)) throw ConfigError("initial.rho must lie in (0,1)");
  if (!(initial.amplitude > 0.0)) throw ConfigError("initial.amplitude must be positive");
  if (!(initial.lambda > 0.0)) throw ConfigError("initial.lambda must be positive");
  if (initial.degree < 0) throw ConfigError("initial.degree must be nonnegative");
  if (initial.kind == InitialKind::Constant && !(initial.value > 0.0)) {
    throw ConfigError("initial.value must be positive");
  }
  if (initial.kind == InitialKind::Coefficients) {
    if (initial.coefficients.empty()) throw ConfigError("initial.coefficients must not be empty");
    if (static_cast<int>(initial.coefficients.size()) > degree_max + 1) {
      throw ConfigError("initial.coefficients has more than K+1 entries");
    }
  }
  if (sweep_runs < 1) throw ConfigError("sweep.runs must be at least 1");
  if (sweep_experiment == Experiment::Sweep) throw ConfigError("sweep.experiment cannot be sweep");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  RunConfig cfg;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      apply_override(cfg, name, node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) {
      if (!leaf.empty()) throw ConfigError("nested key '" + name + "." + key + "'");
      apply_override(cfg, name + "." + key, leaf.data());
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace fracflow
