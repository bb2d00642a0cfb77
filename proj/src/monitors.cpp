#include "fracflow/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracflow/conformal.hpp"
#include "fracflow/errors.hpp"

namespace fracflow {

namespace {

struct LineFit {
  double slope;
  double intercept;
  double r2;
};

LineFit fit_line(const Series& pts) {
  const double n = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  LineFit f{};
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

}  // namespace

double estimate_extinction_time(const Series& F_series, double m, double window_fraction) {
  const std::size_t total = F_series.size();
  if (total < 5) throw EstimationError("extinction-time fit needs at least 5 samples");
  const double p = (1.0 - m) / (m + 1.0);

  auto attempt = [&](double fraction) -> std::optional<double> {
    std::size_t count = std::max<std::size_t>(5, static_cast<std::size_t>(std::ceil(fraction * total)));
    count = std::min(count, total);
    const std::size_t first = total - count;
    Series pts;
    pts.reserve(count);
    for (std::size_t i = first; i < total; ++i) {
      if (i > first && F_series[i].second > F_series[i - 1].second) {
        throw EstimationError("F increases in the fitted tail");
      }
      if (!(F_series[i].second > 0.0)) throw EstimationError("non-positive F sample");
      pts.emplace_back(F_series[i].first, std::pow(F_series[i].second, p));
    }
    const LineFit f = fit_line(pts);
    if (!(f.slope < 0.0)) throw EstimationError("fitted tail does not decrease");
    if (f.r2 < 0.999) return std::nullopt;
    return -f.intercept / f.slope;
  };

  if (auto t = attempt(window_fraction)) return *t;
  if (auto t = attempt(std::min(1.0, 2.0 * window_fraction))) return *t;
  throw EstimationError("extinction-time fit has R^2 below 0.999 after widening the window");
}

MonotoneCheck check_monotone(const std::vector<double>& values, Direction dir, double rel_tol) {
  return check_monotone_scaled(values, values, dir, rel_tol);
}

MonotoneCheck check_monotone_scaled(const std::vector<double>& values, const std::vector<double>& scales,
                                    Direction dir, double rel_tol) {
  if (scales.size() != values.size()) throw ShapeError("monotonicity check needs one scale per value");
  MonotoneCheck c;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double inc = dir == Direction::NonIncreasing ? values[i + 1] - values[i] : values[i] - values[i + 1];
    const double scale = std::max(std::abs(scales[i]), std::abs(scales[i + 1]));
    const double rel = scale > 0.0 ? inc / scale : inc;
    if (rel > c.worst) {
      c.worst = rel;
      c.index = static_cast<long>(i);
    }
  }
  c.ok = c.worst <= rel_tol;
  return c;
}

MonotoneCheck check_convex(const Series& series, double rel_tol) {
  MonotoneCheck c;
  for (std::size_t i = 1; i + 1 < series.size(); ++i) {
    const double h0 = series[i].first - series[i - 1].first;
    const double h1 = series[i + 1].first - series[i].first;
    const double slope0 = (series[i].second - series[i - 1].second) / h0;
    const double slope1 = (series[i + 1].second - series[i].second) / h1;
    const double d2 = (slope1 - slope0) * 0.5 * (h0 + h1);
    const double scale = std::abs(series[i].second);
    const double rel = scale > 0.0 ? -d2 / scale : -d2;
    if (rel > c.worst) {
      c.worst = rel;
      c.index = static_cast<long>(i);
    }
  }
  c.ok = c.worst <= rel_tol;
  return c;
}

double accumulate_G(const Series& E, double m, double t1, double t2) {
  if (t1 == t2) return 1.0;
  if (E.size() < 2) throw DomainError("accumulate_G needs at least two samples");
  const double sign = t2 >= t1 ? 1.0 : -1.0;
  const double a = std::min(t1, t2), b = std::max(t1, t2);
  if (a < E.front().first || b > E.back().first) throw DomainError("accumulate_G interval outside the samples");

  auto interp = [&](double t) {
    auto it = std::lower_bound(E.begin(), E.end(), t, [](const auto& p, double x) { return p.first < x; });
    if (it == E.begin()) return it->second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    return lo.second + (hi.second - lo.second) * (t - lo.first) / (hi.first - lo.first);
  };

  double integral = 0.0;
  double prev_t = a, prev_e = interp(a);
  for (const auto& [t, e] : E) {
    if (t <= a) continue;
    if (t >= b) break;
    integral += 0.5 * (prev_e + e) * (t - prev_t);
    prev_t = t;
    prev_e = e;
  }
  integral += 0.5 * (prev_e + interp(b)) * (b - prev_t);
  return std::exp(sign * (m + 1.0) * integral);
}

Series energy_ratio_series(const Trajectory& traj) {
  Series out;
  for (const auto& s : traj.snapshots) out.emplace_back(s.clock, psigma_form(s.field) / volume(s.field));
  return out;
}

Series volume_series(const Trajectory& traj) {
  Series out;
  for (const auto& s : traj.snapshots) out.emplace_back(s.clock, volume(s.field));
  return out;
}

ExtinctionReport extinction_report(const Trajectory& traj) {
  if (traj.kind != FlowKind::Unnormalized) throw DomainError("extinction report needs an unnormalized trajectory");
  if (traj.snapshots.empty()) throw EstimationError("empty trajectory");
  const SphereParams& params = traj.params;
  const ConstantSet cs = constants(params);
  const double m = cs.m;

  ExtinctionReport r;
  const ZonalField& w0 = traj.snapshots.front().field;
  r.F0 = volume(w0);
  const ExtinctionBounds b = extinction_bounds(w0);
  r.T_upper = b.T_upper;
  r.T_lower = b.T_lower;
  r.T_hat = estimate_extinction_time(volume_series(traj), m);
  constexpr double kSlack = 1e-6;
  r.sandwich_ok = r.T_hat <= r.T_upper * (1.0 + kSlack) && (!r.T_lower || *r.T_lower * (1.0 - kSlack) <= r.T_hat);
  r.k_derived = cs.k_profile;
  r.k_printed = cs.k_profile_printed;

  const TimeMap tm(r.T_hat);
  double best = std::numeric_limits<double>::infinity();
  const Snapshot* best_snap = nullptr;
  for (const auto& snap : traj.snapshots) {
    if (!(snap.clock < r.T_hat)) break;
    const ZonalField v = v_from_w(snap.field, tm, snap.clock);
    const BubbleFit fit = fit_bubble(v, FitMode::FixedSteady);
    r.residual_history.push_back({tm.inverse(snap.clock), fit.residual_sup, fit.lambda_hat});
    if (fit.residual_sup < best) {
      best = fit.residual_sup;
      best_snap = &snap;
    }
  }
  if (best_snap) {
    const ZonalField v = v_from_w(best_snap->field, tm, best_snap->clock);
    const BubbleFit free = fit_bubble(v, FitMode::FreeAmplitude);
    r.lambda_limit = free.lambda_hat;
    r.amplitude_limit = free.amplitude;
    r.k_measured = std::pow(free.amplitude, cs.bigN);
  }
  return r;
}

std::vector<double> dissipation_mismatch(const Trajectory& traj, double floor) {
  std::vector<double> out;
  const auto& snaps = traj.snapshots;
  for (std::size_t i = 1; i + 1 < snaps.size(); ++i) {
    const double J0 = functional_J(snaps[i - 1].field);
    const double J2 = functional_J(snaps[i + 1].field);
    const double fd = (J2 - J0) / (snaps[i + 1].clock - snaps[i - 1].clock);
    const ZonalField& v = snaps[i].field;
    const ZonalField vs = rhs(FlowState{v, snaps[i].clock, traj.kind, snaps[i].step, 0.0});
    const double N = v.params().big_n();
    const auto& w = v.grid().weights();
    double diss = 0.0;
    for (int j = 0; j < v.size(); ++j) diss += w[j] * std::pow(v[j], N - 1.0) * vs[j] * vs[j];
    diss *= -N;
    if (std::abs(diss) <= floor * std::abs(functional_J(v))) continue;
    out.push_back(std::abs(fd - diss) / std::abs(diss));
  }
  return out;
}

}  // namespace fracflow
