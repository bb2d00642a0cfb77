#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <fmt/format.h>

#include "fracflow/cli.hpp"
#include "fracflow/conformal.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/io.hpp"
#include "fracflow/pv.hpp"

namespace fracflow {

namespace {

constexpr const char* kVersion = "1.0.0";

struct Check {
  std::string name;
  bool pass;
  double value;
  double limit;
};

Json checks_json(const std::vector<Check>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks) arr.push_back(Json{{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"limit", c.limit}});
  return arr;
}

bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Json config_json(const RunConfig& cfg) {
  Json j = Json::object();
  for (const auto& k : config_keys()) j[k.name] = k.get(cfg);
  return j;
}

Json manifest(const RunConfig& cfg) {
  return Json{{"program", "fracflow"},
              {"version", kVersion},
              {"experiment", to_string(cfg.experiment)},
              {"seed", cfg.seed},
              {"config", config_json(cfg)},
              {"versions",
               Json{{"compiler", __VERSION__},
                    {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
                    {"boost", BOOST_LIB_VERSION},
                    {"fmt", FMT_VERSION}}}};
}

ZonalField unit_harmonic(const GridPtr& g, int k) {
  return std::sqrt(sphere_area(g->params().n())) * basis_field(g, k);
}

ZonalField initial_field(const RunConfig& cfg, const GridPtr& g, Experiment e, std::uint64_t seed) {
  const SphereParams& p = g->params();
  const InitialSpec& in = cfg.initial;
  switch (in.kind) {
    case InitialKind::Constant: return ZonalField::constant(g, in.value);
    case InitialKind::Bubble: return bubble_zonal(p, {in.lambda, in.amplitude}, g);
    case InitialKind::Random: return random_trial_field(g, seed, in.amplitude, in.rho, in.degree);
    case InitialKind::Coefficients: {
      std::vector<double> c(g->degree_max() + 1, 0.0);
      std::copy(in.coefficients.begin(), in.coefficients.end(), c.begin());
      return synthesize(g, c);
    }
    case InitialKind::Default: break;
  }
  switch (e) {
    case Experiment::OperatorCheck:
      return ZonalField::constant(g, 1.0) + 0.3 * unit_harmonic(g, 1) + 0.2 * unit_harmonic(g, 2);
    case Experiment::FlowNormalized:
      return constants(p).c_steady * (ZonalField::constant(g, 1.0) + 0.3 * unit_harmonic(g, 1));
    default: return random_trial_field(g, seed, in.amplitude, in.rho, in.degree);
  }
}

void write_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  write_text(path, os.str());
}

// max/min ratio along the run against 1.05 times its supremum over clock <= 1.
Check harnack_check(const Trajectory& traj) {
  double early = 0.0, worst = 0.0;
  for (const auto& s : traj.snapshots) {
    if (s.clock <= 1.0) early = std::max(early, s.diag.harnack_ratio);
  }
  for (const auto& s : traj.snapshots) worst = std::max(worst, s.diag.harnack_ratio / early);
  return {"harnack_bounded", worst <= 1.05, worst, 1.05};
}

Json trajectory_summary(const Trajectory& traj) {
  return Json{{"kind", to_string(traj.kind)},
              {"termination", to_string(traj.termination)},
              {"failure", traj.failure},
              {"steps", traj.final_state.step_index},
              {"final_clock", traj.final_state.clock},
              {"snapshots", traj.snapshots.size()}};
}

int finish(const RunConfig& cfg, Json summary, const std::vector<Check>& checks) {
  const bool pass = all_pass(checks);
  summary["checks"] = checks_json(checks);
  summary["pass"] = pass;
  write_text(cfg.output_dir / "summary.json", dump_json(summary));
  return pass ? kPass : kViolation;
}

int run_constants(const RunConfig& cfg, const SphereParams& p) {
  Json mult = Json::array();
  for (int k = 0; k <= 8; ++k) mult.push_back(multiplier(p, k));
  Json j{{"params", to_json(p)}, {"constants", to_json(constants(p))}, {"multipliers", mult}};
  write_text(cfg.output_dir / "constants.json", dump_json(j));
  return kPass;
}

int run_operator_check(const RunConfig& cfg, const GridPtr& g) {
  const SphereParams& p = g->params();
  const ZonalField f = initial_field(cfg, g, Experiment::OperatorCheck, cfg.seed);
  const ZonalField spectral = apply_psigma(f);
  double err_est = 0.0;
  std::optional<ZonalField> pv;
  std::string note;
  try {
    PvResult r = apply_psigma_pv_detailed(f, cfg.tol);
    err_est = r.error_estimate;
    pv = std::move(r.value);
  } catch (const AccuracyError& e) {
    err_est = e.achieved();
    note = e.what();
  }
  double max_rel = std::numeric_limits<double>::infinity();
  if (pv) {
    double diff = 0.0, scale = 0.0;
    for (int j = 0; j < f.size(); ++j) {
      diff = std::max(diff, std::abs((*pv)[j] - spectral[j]));
      scale = std::max(scale, std::abs(spectral[j]));
    }
    max_rel = diff / scale;
  }
  const bool pass = max_rel <= cfg.tol;
  Json j{{"n", p.n()},
         {"sigma", p.sigma()},
         {"K", g->degree_max()},
         {"max_rel_err", max_rel},
         {"tol", cfg.tol},
         {"pass", pass},
         {"pv_error_estimate", err_est}};
  if (!note.empty()) j["note"] = note;
  write_text(cfg.output_dir / "operator_check.json", dump_json(j));
  return pass ? kPass : kViolation;
}

int run_normalized(const RunConfig& cfg, const GridPtr& g) {
  const ZonalField v0 = initial_field(cfg, g, Experiment::FlowNormalized, cfg.seed);
  const Trajectory traj = run(v0, FlowKind::NormalizedYamabe, cfg.solver);
  write_csv(cfg.output_dir / "trajectory.csv", traj);

  std::vector<double> S;
  for (const auto& s : traj.snapshots) S.push_back(s.diag.S_func);
  const MonotoneCheck s_mono = check_monotone(S, Direction::NonIncreasing, 1e-8);
  const double drift = std::abs(volume(traj.final_state.field) / volume(v0) - 1.0);
  const BubbleFit fit = fit_bubble(traj.final_state.field, FitMode::FreeAmplitude);

  std::vector<Check> checks{
      {"converged", traj.termination == Termination::Converged, residual(traj.final_state), cfg.solver.stop_residual},
      {"volume_drift", drift <= 1e-6, drift, 1e-6},
      {"S_non_increasing", s_mono.ok, s_mono.worst, 1e-8},
      {"bubble_fit_residual", fit.residual_sup <= 1e-4, fit.residual_sup, 1e-4},
      harnack_check(traj)};
  Json summary{{"params", to_json(g->params())}, {"trajectory", trajectory_summary(traj)}, {"fit", to_json(fit)}};
  return finish(cfg, std::move(summary), checks);
}

int run_rescaled(const RunConfig& cfg, const GridPtr& g) {
  const SphereParams& p = g->params();
  const ZonalField initial = initial_field(cfg, g, Experiment::FlowRescaled, cfg.seed);
  Json summary{{"params", to_json(p)}};
  std::optional<Trajectory> traj;
  if (cfg.shoot) {
    ExtinctionOrbit orbit = shoot_extinction_orbit(initial, cfg.solver);
    summary["orbit"] = Json{{"extinction_time", orbit.extinction_time},
                            {"amplitude", orbit.amplitude},
                            {"T_lower_bracket", orbit.T_lower_bracket},
                            {"T_upper_bracket", orbit.T_upper_bracket},
                            {"iterations", orbit.iterations}};
    traj = std::move(orbit.trajectory);
  } else {
    traj = run(initial, FlowKind::RescaledFastDiffusion, cfg.solver);
  }
  write_csv(cfg.output_dir / "trajectory.csv", *traj);
  summary["trajectory"] = trajectory_summary(*traj);

  std::vector<double> J;
  double J_min = std::numeric_limits<double>::infinity(), min_v_max = 0.0;
  for (const auto& s : traj->snapshots) {
    J.push_back(*s.diag.J);
    J_min = std::min(J_min, *s.diag.J);
    min_v_max = std::max(min_v_max, s.field.min());
  }
  const MonotoneCheck j_mono = check_monotone(J, Direction::NonIncreasing, 1e-8);
  std::vector<Check> checks{{"J_non_increasing", j_mono.ok, j_mono.worst, 1e-8},
                            {"no_step_failure", traj->termination != Termination::StepFailure, 0.0, 0.0}};
  if (cfg.shoot) {
    const BubbleFit fit = fit_bubble(traj->final_state.field, FitMode::FixedSteady);
    summary["fit"] = to_json(fit);
    const double kappa2 = constants(p).kappa2;
    checks.push_back({"J_nonnegative", J_min >= 0.0, J_min, 0.0});
    checks.push_back({"bubble_fit_residual", fit.residual_sup <= 1e-4, fit.residual_sup, 1e-4});
    checks.push_back({"kappa2_barrier", min_v_max <= kappa2 * (1.0 + 1e-6), min_v_max, kappa2 * (1.0 + 1e-6)});
    checks.push_back(harnack_check(*traj));
  }
  return finish(cfg, std::move(summary), checks);
}

int run_extinction(const RunConfig& cfg, const GridPtr& g) {
  const SphereParams& p = g->params();
  const ZonalField w0 = initial_field(cfg, g, Experiment::FlowExtinction, cfg.seed);
  const Trajectory traj = run(w0, FlowKind::Unnormalized, cfg.solver);
  write_csv(cfg.output_dir / "trajectory.csv", traj);
  const ExtinctionReport report = extinction_report(traj);
  write_text(cfg.output_dir / "extinction.json", dump_json(Json{{"params", to_json(p)}, {"report", to_json(report)}}));
  std::ostringstream hist;
  write_residual_csv(hist, report.residual_history);
  write_text(cfg.output_dir / "residual_history.csv", hist.str());

  std::vector<double> F, H, H_scale;
  double H_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : traj.snapshots) {
    F.push_back(*s.diag.F);
    H.push_back(*s.diag.H);
    H_scale.push_back(*s.diag.H_scale);
    H_max = std::max(H_max, *s.diag.H);
  }
  const MonotoneCheck f_mono = check_monotone(F, Direction::NonIncreasing, 1e-8);
  const MonotoneCheck h_mono = check_monotone_scaled(H, H_scale, Direction::NonDecreasing, 1e-8);
  std::vector<Check> checks{{"extinct", traj.termination == Termination::Extinct, traj.final_state.clock, report.T_hat},
                            {"sandwich", report.sandwich_ok, report.T_hat, report.T_upper},
                            {"F_non_increasing", f_mono.ok, f_mono.worst, 1e-8},
                            {"H_non_decreasing", h_mono.ok, h_mono.worst, 1e-8},
                            {"H_nonpositive", H_max <= 1e-9, H_max, 1e-9}};
  if (p.n() > 4.0 * p.sigma()) {
    const MonotoneCheck convex = check_convex(volume_series(traj), 1e-8);
    checks.push_back({"F_convex", convex.ok, convex.worst, 1e-8});
  }
  Json summary{{"params", to_json(p)}, {"trajectory", trajectory_summary(traj)}, {"T_hat", report.T_hat}};
  return finish(cfg, std::move(summary), checks);
}

int run_inequality(const RunConfig& cfg, const GridPtr& g) {
  const SphereParams& p = g->params();
  Json reports = Json::array();
  double worst_sob = std::numeric_limits<double>::infinity(), worst_hls = worst_sob;
  bool remainder_ok = true;
  for (int i = 0; i < cfg.trials; ++i) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
    const DeficitReport r = deficits(initial_field(cfg, g, Experiment::Inequality, seed));
    worst_sob = std::min(worst_sob, r.sobolev_deficit);
    worst_hls = std::min(worst_hls, r.hls_deficit);
    if (r.remainder_ok) remainder_ok = remainder_ok && *r.remainder_ok;
    Json j = to_json(r);
    j["seed"] = seed;
    reports.push_back(std::move(j));
  }
  std::vector<Check> checks{{"sobolev_deficit_nonnegative", worst_sob >= -1e-9, worst_sob, -1e-9},
                            {"hls_deficit_nonnegative", worst_hls >= -1e-9, worst_hls, -1e-9}};
  if (p.n() > 4.0 * p.sigma()) checks.push_back({"remainder_inequality", remainder_ok, 0.0, 0.0});
  const bool pass = all_pass(checks);
  Json j{{"params", to_json(p)}, {"trials", cfg.trials}, {"seed", cfg.seed}, {"checks", checks_json(checks)},
         {"pass", pass}, {"reports", reports}};
  write_text(cfg.output_dir / "deficit.json", dump_json(j));
  return pass ? kPass : kViolation;
}

int thread_cap() {
  int cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("FRACFLOW_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) cap = v;
  }
  return cap;
}

int run_sweep(const RunConfig& cfg) {
  const int runs = cfg.sweep_runs;
  std::vector<int> status(runs, kPass);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < runs; i = next++) {
      RunConfig sub = cfg;
      sub.experiment = cfg.sweep_experiment;
      sub.seed = cfg.seed + static_cast<std::uint64_t>(i);
      sub.output_dir = cfg.output_dir / fmt::format("run_{:03d}", i);
      status[i] = execute_guarded(sub);
    }
  };
  const int threads = std::min(thread_cap(), runs);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  Json members = Json::array();
  int overall = kPass;
  for (int i = 0; i < runs; ++i) {
    members.push_back(Json{{"run", fmt::format("run_{:03d}", i)}, {"seed", cfg.seed + i}, {"exit_status", status[i]}});
    if (status[i] == kRuntimeError) overall = kRuntimeError;
    if (status[i] == kViolation && overall == kPass) overall = kViolation;
  }
  write_text(cfg.output_dir / "sweep.json",
             dump_json(Json{{"experiment", to_string(cfg.sweep_experiment)}, {"runs", members}, {"exit_status", overall}}));
  if (overall == kRuntimeError) throw StateError("at least one sweep member failed");
  return overall;
}

}  // namespace

int execute(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  Json man = manifest(cfg);
  man["wall_time_s"] = nullptr;
  write_text(cfg.output_dir / "manifest.json", dump_json(man));

  const SphereParams params(cfg.n, cfg.sigma);
  int status = kPass;
  if (cfg.experiment == Experiment::Constants) {
    status = run_constants(cfg, params);
  } else if (cfg.experiment == Experiment::Sweep) {
    status = run_sweep(cfg);
  } else {
    const GridPtr g = build_grid(params, cfg.degree_max, cfg.node_count);
    switch (cfg.experiment) {
      case Experiment::OperatorCheck: status = run_operator_check(cfg, g); break;
      case Experiment::FlowNormalized: status = run_normalized(cfg, g); break;
      case Experiment::FlowRescaled: status = run_rescaled(cfg, g); break;
      case Experiment::FlowExtinction: status = run_extinction(cfg, g); break;
      case Experiment::Inequality: status = run_inequality(cfg, g); break;
      default: break;
    }
  }

  man["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  man["exit_status"] = status;
  write_text(cfg.output_dir / "manifest.json", dump_json(man));
  return status;
}

int execute_guarded(const RunConfig& cfg) {
  try {
    return execute(cfg);
  } catch (const std::exception& e) {
    std::cerr << "fracflow: " << to_string(cfg.experiment) << ": " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace fracflow
