#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "fracflow/cli.hpp"
#include "fracflow/errors.hpp"

using namespace fracflow;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> overrides;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral lab for fractional conformal flows on zonal spheres"};
  app.require_subcommand(1);
  const RunConfig defaults;

  std::map<CLI::App*, Experiment> experiments;
  std::map<CLI::App*, Flags> flags;
  const std::vector<std::pair<Experiment, std::string>> commands{
      {Experiment::Constants, "derived constants of (n, sigma)"},
      {Experiment::OperatorCheck, "principal-value quadrature against the spectral operator"},
      {Experiment::FlowNormalized, "normalized fractional Yamabe flow"},
      {Experiment::FlowRescaled, "rescaled fast-diffusion flow"},
      {Experiment::FlowExtinction, "unnormalized flow to extinction"},
      {Experiment::Inequality, "Sobolev, HLS and remainder deficits on trial fields"},
      {Experiment::Sweep, "seeded runs of one experiment over a worker pool"}};

  for (const auto& [exp, desc] : commands) {
    CLI::App* sub = app.add_subcommand(to_string(exp), desc);
    experiments[sub] = exp;
    Flags& f = flags[sub];
    sub->add_option("--config", f.config, "INI config file");
    sub->add_option("--out", f.out, "output directory (default: " + defaults.output_dir.string() + ")");
    sub->add_option_function<std::uint64_t>("--seed", [&f](std::uint64_t s) { f.seed = s; },
                                            "base seed (default: " + std::to_string(defaults.seed) + ")");
    for (const auto& key : config_keys()) {
      if (key.name == "output_dir" || key.name == "seed" || key.name == "experiment.kind") continue;
      const std::string name = key.name;
      sub->add_option_function<std::string>(
          "--" + name, [&f, name](const std::string& v) { f.overrides[name] = v; },
          key.description + " (default: " + key.get(defaults) + ")");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kRuntimeError;
  }

  for (const auto& [sub, exp] : experiments) {
    if (!sub->parsed()) continue;
    const Flags& f = flags[sub];
    RunConfig cfg;
    try {
      if (!f.config.empty()) cfg = parse_config(read_file(f.config));
      cfg.experiment = exp;
      for (const auto& [key, value] : f.overrides) apply_override(cfg, key, value);
      if (!f.out.empty()) cfg.output_dir = f.out;
      if (f.seed) cfg.seed = *f.seed;
      cfg.validate();
    } catch (const std::exception& e) {
      std::cerr << "fracflow: " << e.what() << '\n';
      return kRuntimeError;
    }
    const int status = execute_guarded(cfg);
    std::cout << to_string(exp) << ": " << (status == kPass ? "pass" : status == kViolation ? "violation" : "error")
              << " (" << cfg.output_dir.string() << ")\n";
    return status;
  }
  return kRuntimeError;
}
