#include "fracflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracflow/errors.hpp"

namespace fracflow {

const char* to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::NormalizedYamabe: return "NormalizedYamabe";
    case FlowKind::Unnormalized: return "Unnormalized";
    case FlowKind::RescaledFastDiffusion: return "RescaledFastDiffusion";
  }
  return "?";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "Converged";
    case Termination::Extinct: return "Extinct";
    case Termination::MaxSteps: return "MaxSteps";
    case Termination::StepFailure: return "StepFailure";
    case Termination::Horizon: return "Horizon";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(dt_init > 0.0)) throw ConfigError("solver.dt_init must be positive");
  if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError("solver.safety must lie in (0,1]");
  if (!(positivity_floor > 0.0 && positivity_floor < 1.0)) throw ConfigError("solver.positivity_floor must lie in (0,1)");
  if (max_steps <= 0) throw ConfigError("solver.max_steps must be positive");
  if (!(stop_residual > 0.0)) throw ConfigError("solver.stop_residual must be positive");
  if (record_every <= 0) throw ConfigError("solver.record_every must be positive");
  if (!(max_clock > 0.0)) throw ConfigError("solver.max_clock must be positive");
  if (!(extinction_tol > 0.0 && extinction_tol < 1.0)) throw ConfigError("solver.extinction_tol must lie in (0,1)");
}

double sigma_curvature_avg(const ZonalField& v) {
  if (!(v.min() > 0.0)) throw DomainError("sigma-curvature average needs a strictly positive field");
  return psigma_form(v) / volume(v);
}

double reaction_coefficient(const ZonalField& field, FlowKind kind) {
  switch (kind) {
    case FlowKind::NormalizedYamabe: return sigma_curvature_avg(field);
    case FlowKind::Unnormalized: return 0.0;
    case FlowKind::RescaledFastDiffusion: return 1.0 / (1.0 - field.params().m());
  }
  return 0.0;
}

namespace {

ZonalField evaluate_rhs(const ZonalField& f, FlowKind kind) {
  if (!(f.min() > 0.0)) throw StateError("flow field has a non-positive node");
  const double N = f.params().big_n();
  const double c = reaction_coefficient(f, kind);
  const ZonalField Pf = apply_psigma(f);
  std::vector<double> g(f.size());
  for (int j = 0; j < f.size(); ++j) {
    const double fn1 = std::pow(f[j], N - 1.0);
    g[j] = (-Pf[j] + c * fn1 * f[j]) / (N * fn1);
  }
  return project(ZonalField(f.grid_ptr(), std::move(g)));
}

double sup_abs(const ZonalField& f) {
  double s = 0.0;
  for (double x : f.nodal()) s = std::max(s, std::abs(x));
  return s;
}

ZonalField axpy(const ZonalField& x, double a, const ZonalField& y) {
  std::vector<double> out(x.nodal());
  for (int j = 0; j < x.size(); ++j) out[j] += a * y[j];
  return ZonalField(x.grid_ptr(), std::move(out));
}

constexpr int kMaxHalvings = 20;

}  // namespace

ZonalField rhs(const FlowState& state) { return evaluate_rhs(state.field, state.kind); }

double residual(const FlowState& state) { return sup_abs(rhs(state)) / sup_abs(state.field); }

double stable_dt(const FlowState& state, const SolverConfig& config) {
  const ZonalGrid& g = state.field.grid();
  const double N = g.params().big_n();
  const double lam_max = g.multipliers().back();
  const double bound = config.safety * N * std::pow(state.field.min(), N - 1.0) / lam_max;
  return std::min(bound, config.dt_init);
}

FlowState step(const FlowState& state, const SolverConfig& config, std::optional<double> dt_limit) {
  const ZonalField& f = state.field;
  const double floor = config.positivity_floor * f.min();
  double dt = stable_dt(state, config);
  if (dt_limit) dt = std::min(dt, *dt_limit);
  if (!(dt > 0.0)) throw StateError("non-positive step size");

  const ZonalField k1 = evaluate_rhs(f, state.kind);
  for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, dt *= 0.5) {
    try {
      const ZonalField s2 = axpy(f, 0.5 * dt, k1);
      if (!(s2.min() > floor)) continue;
      const ZonalField k2 = evaluate_rhs(s2, state.kind);
      const ZonalField s3 = axpy(f, 0.5 * dt, k2);
      if (!(s3.min() > floor)) continue;
      const ZonalField k3 = evaluate_rhs(s3, state.kind);
      const ZonalField s4 = axpy(f, dt, k3);
      if (!(s4.min() > floor)) continue;
      const ZonalField k4 = evaluate_rhs(s4, state.kind);
      std::vector<double> out(f.nodal());
      for (int j = 0; j < f.size(); ++j) out[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      ZonalField next(f.grid_ptr(), std::move(out));
      if (!(next.min() > floor)) continue;
      return FlowState{std::move(next), state.clock + dt, state.kind, state.step_index + 1, dt};
    } catch (const StateError&) {
      continue;
    }
  }
  throw StateError("step rejected " + std::to_string(kMaxHalvings) + " consecutive times at clock " +
                   std::to_string(state.clock));
}

double remaining_extinction_time(const ZonalField& w) {
  const double m = w.params().m();
  return volume(w) / ((1.0 - m) * psigma_form(w));
}

DiagSelection selection_for(FlowKind kind) {
  DiagSelection s;
  switch (kind) {
    case FlowKind::NormalizedYamabe:
      s.bubble_fit = true;
      s.fit_mode = FitMode::FreeAmplitude;
      break;
    case FlowKind::Unnormalized:
      s.extinction_FH = true;
      break;
    case FlowKind::RescaledFastDiffusion:
      s.energy_J = true;
      s.bubble_fit = true;
      s.fit_mode = FitMode::FixedSteady;
      break;
  }
  return s;
}

Trajectory run(const ZonalField& initial, FlowKind kind, const SolverConfig& config, const SnapshotObserver& observer) {
  config.validate();
  if (!(initial.min() > 0.0)) throw StateError("initial field must be strictly positive");

  Trajectory traj{initial.params(), config, kind, {}, Termination::MaxSteps, {}, FlowState{initial, 0.0, kind, 0, 0.0}};
  const DiagSelection sel = selection_for(kind);
  FlowState state{initial, 0.0, kind, 0, 0.0};

  auto record = [&](const FlowState& s) {
    if (!traj.snapshots.empty() && traj.snapshots.back().step == s.step_index) return;
    traj.snapshots.push_back(Snapshot{s.step_index, s.clock, s.last_dt, s.field, diagnose(s.field, sel)});
    if (observer) observer(traj.snapshots.back());
  };
  record(state);

  while (true) {
    if (kind == FlowKind::Unnormalized) {
      const double remaining = remaining_extinction_time(state.field);
      const double next_dt = stable_dt(state, config);
      if (remaining <= next_dt || remaining <= config.extinction_tol * (state.clock + remaining)) {
        traj.termination = Termination::Extinct;
        break;
      }
    } else if (residual(state) <= config.stop_residual) {
      traj.termination = Termination::Converged;
      break;
    }
    if (state.clock >= config.max_clock) {
      traj.termination = Termination::Horizon;
      break;
    }
    if (state.step_index >= config.max_steps) {
      traj.termination = Termination::MaxSteps;
      break;
    }
    try {
      std::optional<double> limit;
      if (std::isfinite(config.max_clock)) limit = config.max_clock - state.clock;
      state = step(state, config, limit);
      if (std::isfinite(config.max_clock) && config.max_clock - state.clock <= 1e-14 * config.max_clock) {
        state.clock = config.max_clock;
      }
    } catch (const StateError& e) {
      traj.termination = Termination::StepFailure;
      traj.failure = e.what();
      break;
    }
    if (state.step_index % config.record_every == 0) record(state);
  }
  record(state);
  traj.final_state = state;
  return traj;
}

}  // namespace fracflow
