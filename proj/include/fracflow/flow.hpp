#pragma once

// Explicit RK4 integration of the three zonal flows
//   normalized:    d(v^N)/dt = -P v + r_sigma v^N
//   unnormalized:  d(w^N)/dt = -P w
//   rescaled:      d(v^N)/ds = -P v + v^N / (1 - m)
// written as d(field)/d(clock) = (-P f + c f^N) / (N f^{N-1}).

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fracflow/diagnostics.hpp"
#include "fracflow/zonal.hpp"

namespace fracflow {

enum class FlowKind { NormalizedYamabe, Unnormalized, RescaledFastDiffusion };

const char* to_string(FlowKind kind);

struct SolverConfig {
  double dt_init = 0.1;            ///< upper bound on any step
  double safety = 0.5;             ///< fraction of the stiffness bound N min(f)^{N-1}/lambda_K
  double positivity_floor = 1e-10; ///< stage minimum relative to the pre-step minimum
  long max_steps = 200000;
  double stop_residual = 1e-9;     ///< sup|rhs| / sup|f| for convergence
  long record_every = 1;
  double max_clock = std::numeric_limits<double>::infinity();
  double extinction_tol = 1e-6;    ///< remaining time relative to the clock

  /// Throws ConfigError naming the violated invariant.
  void validate() const;
};

struct FlowState {
  ZonalField field;
  double clock = 0.0;
  FlowKind kind = FlowKind::NormalizedYamabe;
  long step_index = 0;
  double last_dt = 0.0;
};

enum class Termination { Converged, Extinct, MaxSteps, StepFailure, Horizon };

const char* to_string(Termination t);

struct Snapshot {
  long step;
  double clock;
  double dt;
  ZonalField field;
  DiagRecord diag;
};

struct Trajectory {
  SphereParams params;
  SolverConfig config;
  FlowKind kind;
  std::vector<Snapshot> snapshots;
  Termination termination = Termination::MaxSteps;
  std::string failure;  ///< message when termination is StepFailure
  FlowState final_state;
};

/// r_sigma = int v P v / int v^{N+1}. Throws DomainError for non-positive v.
double sigma_curvature_avg(const ZonalField& v);

/// The coefficient c of the v^N term for the kind (r_sigma is recomputed).
double reaction_coefficient(const ZonalField& field, FlowKind kind);

/// Time derivative of the field, projected to degree K. Throws StateError on
/// a non-positive node.
ZonalField rhs(const FlowState& state);

/// sup|rhs| / sup|field|.
double residual(const FlowState& state);

/// Step size from the spectral stiffness bound, clamped by dt_init.
double stable_dt(const FlowState& state, const SolverConfig& config);

/// One RK4 step of at most dt_limit (defaults to stable_dt); halves the step
/// on a positivity violation, throwing StateError after 20 halvings.
FlowState step(const FlowState& state, const SolverConfig& config,
               std::optional<double> dt_limit = std::nullopt);

/// Remaining time to extinction predicted from F and F' of an unnormalized
/// state: F / ((1 - m) int w P w).
double remaining_extinction_time(const ZonalField& w);

/// The diagnostics recorded for each kind.
DiagSelection selection_for(FlowKind kind);

using SnapshotObserver = std::function<void(const Snapshot&)>;

/// Integrates until Converged (normalized/rescaled), Extinct (unnormalized),
/// Horizon (clock reaches max_clock), MaxSteps or StepFailure.
Trajectory run(const ZonalField& initial, FlowKind kind, const SolverConfig& config,
               const SnapshotObserver& observer = {});

struct ShootingConfig {
  double horizon = 16.0;           ///< rescaled time used to classify a trial amplitude
  double final_horizon = 14.0;     ///< rescaled time of the returned orbit
  double bracket_tol = 1e-13;      ///< width of the ln(amplitude) bracket
  int max_iterations = 80;
  double blowup_factor = 1e8;
  double collapse_factor = 1e-8;
};

struct ExtinctionOrbit {
  double extinction_time;  ///< T with v(0) = T^{-m/(1-m)} w0
  double amplitude;        ///< T^{-m/(1-m)}
  double T_lower_bracket;  ///< extinction times bracketing T after bisection
  double T_upper_bracket;
  int iterations;
  Trajectory trajectory;   ///< rescaled-flow orbit of v
};

/// Finds the rescaled orbit v(s) generated by the extinction of w0. The
/// constant mode of the rescaled flow is unstable, so the unknown extinction
/// time is fixed by shooting on the initial amplitude: amplitudes above the
/// true one blow up, amplitudes below collapse.
ExtinctionOrbit shoot_extinction_orbit(const ZonalField& w0, const SolverConfig& config,
                                       const ShootingConfig& shooting = {});

}  // namespace fracflow
