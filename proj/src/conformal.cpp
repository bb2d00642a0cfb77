#include "fracflow/conformal.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fracflow/errors.hpp"

namespace fracflow {

double latitude_of_radius(double r) {
  if (!(r >= 0.0)) throw DomainError("radius must be nonnegative");
  if (std::isinf(r)) return 1.0;
  const double r2 = r * r;
  if (std::isinf(r2)) return 1.0;
  return (r2 - 1.0) / (r2 + 1.0);
}

double radius_of_latitude(double t) {
  if (!(t >= -1.0 && t <= 1.0)) throw DomainError("latitude cosine must lie in [-1, 1]");
  if (t == 1.0) return std::numeric_limits<double>::infinity();
  return std::sqrt((1.0 + t) / (1.0 - t));
}

namespace {

// A sequence g(r_0), g(r_1), g(r_2) sampled geometrically toward a pole has a
// finite limit when it is finite and its increments contract.
bool has_finite_limit(double g0, double g1, double g2) {
  if (!std::isfinite(g0) || !std::isfinite(g1) || !std::isfinite(g2)) return false;
  const double d1 = std::abs(g1 - g0);
  const double d2 = std::abs(g2 - g1);
  return d2 <= 0.5 * d1 + 1e-8 * (1.0 + std::abs(g0));
}

}  // namespace

ZonalField pushforward_radial(const std::function<double(double)>& profile, double p, const GridPtr& grid) {
  auto transfer = [&](double r) { return std::pow(0.5 * (1.0 + r * r), p) * profile(r); };

  if (!has_finite_limit(transfer(1e4), transfer(1e8), transfer(1e12))) {
    throw DecayError("transferred density has no finite limit at the north pole (r -> infinity)");
  }
  if (!has_finite_limit(transfer(1e-4), transfer(1e-8), transfer(1e-12))) {
    throw DecayError("transferred density has no finite limit at the south pole (r -> 0)");
  }

  std::vector<double> nodal(grid->node_count());
  for (int j = 0; j < grid->node_count(); ++j) {
    nodal[j] = transfer(radius_of_latitude(grid->nodes()[j]));
    if (!std::isfinite(nodal[j])) {
      throw DecayError("transferred density is not finite at node " + std::to_string(j));
    }
  }
  return ZonalField(grid, std::move(nodal));
}

void validate(const BubbleParams& bp) {
  if (!(bp.lambda > 0.0) || !std::isfinite(bp.lambda)) throw DomainError("bubble lambda must be positive");
  if (!(bp.amplitude > 0.0) || !std::isfinite(bp.amplitude)) throw DomainError("bubble amplitude must be positive");
}

double bubble_value(const SphereParams& params, const BubbleParams& bp, double t) {
  const double l2 = bp.lambda * bp.lambda;
  const double bracket = bp.lambda / ((1.0 + l2) + (1.0 - l2) * t);
  return bp.amplitude * std::pow(bracket, 0.5 * (params.n() - 2.0 * params.sigma()));
}

ZonalField bubble_zonal(const SphereParams& params, const BubbleParams& bp, const GridPtr& grid) {
  validate(bp);
  std::vector<double> nodal(grid->node_count());
  for (int j = 0; j < grid->node_count(); ++j) nodal[j] = bubble_value(params, bp, grid->nodes()[j]);
  return ZonalField(grid, std::move(nodal));
}

double steady_amplitude(const SphereParams& params) {
  const ConstantSet c = constants(params);
  return std::pow(c.k_profile, c.m);
}

TimeMap::TimeMap(double extinction_time) : T_(extinction_time) {
  if (!(extinction_time > 0.0) || !std::isfinite(extinction_time)) {
    throw DomainError("extinction time must be positive");
  }
}

double TimeMap::forward(double s) const {
  if (!(s >= 0.0)) throw DomainError("rescaled time must be nonnegative");
  return -T_ * std::expm1(-s);
}

double TimeMap::inverse(double t) const {
  if (!(t >= 0.0 && t < T_)) throw DomainError("time must lie in [0, T)");
  return -std::log1p(-t / T_);
}

ZonalField v_from_w(const ZonalField& w, const TimeMap& tm, double t) {
  if (!(t >= 0.0 && t < tm.extinction_time())) throw DomainError("time must lie in [0, T)");
  if (!(w.min() > 0.0)) throw DomainError("w must be strictly positive");
  const double m = w.params().m();
  const double factor = std::pow(tm.extinction_time() - t, -m / (1.0 - m));
  return factor * w;
}

}  // namespace fracflow
