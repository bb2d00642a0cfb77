#pragma once

// Post-hoc checks over recorded trajectories: monotonicity and convexity of
// scalar series, extinction-time extrapolation, and the extinction report.

#include <optional>
#include <utility>
#include <vector>

#include "fracflow/flow.hpp"

namespace fracflow {

using Series = std::vector<std::pair<double, double>>;

/// Least-squares line through F^{(1-m)/(m+1)} against t over the trailing
/// window_fraction of the samples; returns the zero crossing. Widens the
/// window to twice its size once if R^2 < 0.999. Throws EstimationError for
/// fewer than 5 samples, a tail where F increases, or a poor fit.
double estimate_extinction_time(const Series& F_series, double m, double window_fraction = 0.25);

enum class Direction { NonIncreasing, NonDecreasing };

struct MonotoneCheck {
  bool ok = true;
  double worst = 0.0;  ///< largest violation relative to max(|a_i|, |a_{i+1}|)
  long index = -1;     ///< position of the worst violation
};

MonotoneCheck check_monotone(const std::vector<double>& values, Direction dir, double rel_tol);

/// As check_monotone, with violations measured against max(scales_i,
/// scales_{i+1}); for quantities formed as a difference of larger terms.
MonotoneCheck check_monotone_scaled(const std::vector<double>& values, const std::vector<double>& scales,
                                    Direction dir, double rel_tol);

/// Second differences on a non-uniform grid, scaled to the uniform-grid form
/// F_{i+1} - 2 F_i + F_{i-1}; ok when each is >= -rel_tol |F_i|.
MonotoneCheck check_convex(const Series& series, double rel_tol);

/// exp((m+1) int_{t1}^{t2} E) by the trapezoid rule on the samples, with
/// linear interpolation at the ends. accumulate_G(s, m, t, t) = 1.
double accumulate_G(const Series& E_series, double m, double t1, double t2);

/// E(t) sampled along an unnormalized trajectory.
Series energy_ratio_series(const Trajectory& traj);
/// F(t) sampled along an unnormalized trajectory.
Series volume_series(const Trajectory& traj);

struct ResidualSample {
  double s;
  double sup_residual;
  double lambda_fit;
};

struct ExtinctionReport {
  double T_hat = 0.0;
  double T_upper = 0.0;
  std::optional<double> T_lower;
  double F0 = 0.0;
  bool sandwich_ok = false;
  double lambda_limit = 0.0;
  double amplitude_limit = 0.0;  ///< fitted amplitude of the limiting v
  double k_measured = 0.0;       ///< amplitude_limit^N, the R^n profile constant
  double k_derived = 0.0;
  double k_printed = 0.0;
  std::vector<ResidualSample> residual_history;
};

/// Extrapolates T from an unnormalized trajectory, checks it against the
/// a-priori bounds (relative slack 1e-6), and follows the rescaled field
/// v = (T - t)^{-m/(1-m)} w toward the bubble family.
ExtinctionReport extinction_report(const Trajectory& traj);

/// Relative mismatch between the centered difference of J over recorded
/// rescaled snapshots and the dissipation -N int v^{N-1} v_s^2 at the middle
/// snapshot; only points where the dissipation exceeds floor * |J| count.
std::vector<double> dissipation_mismatch(const Trajectory& traj, double floor = 1e-6);

}  // namespace fracflow
