#pragma once

// Stereographic transfer between radial densities on R^n and zonal fields on
// S^n, the dilation family of steady states, and the time substitution
// t = T (1 - e^{-s}) relating the extinction flow to the rescaled flow.

#include <functional>

#include "fracflow/zonal.hpp"

namespace fracflow {

/// t = (r^2 - 1)/(r^2 + 1); r = infinity maps to 1. Throws DomainError for r < 0.
double latitude_of_radius(double r);
/// r = sqrt((1 + t)/(1 - t)); t = 1 maps to infinity. Throws DomainError outside [-1, 1].
double radius_of_latitude(double t);

/// Samples ((1 + r^2)/2)^p * profile(r) at every node. Throws DecayError when
/// that product has no finite limit at either pole.
ZonalField pushforward_radial(const std::function<double(double)>& profile, double p, const GridPtr& grid);

struct BubbleParams {
  double lambda = 1.0;
  double amplitude = 1.0;
};

/// Throws DomainError unless lambda > 0 and amplitude > 0.
void validate(const BubbleParams& bp);

/// amplitude * [((1 + r^2)/2) * lambda/(lambda^2 + r^2)]^{(n - 2 sigma)/2}
/// written in the latitude cosine t.
double bubble_value(const SphereParams& params, const BubbleParams& bp, double t);
ZonalField bubble_zonal(const SphereParams& params, const BubbleParams& bp, const GridPtr& grid);

/// Amplitude k^m for which the bubble family solves -P v + v^N/(1-m) = 0.
double steady_amplitude(const SphereParams& params);

class TimeMap {
 public:
  explicit TimeMap(double extinction_time);
  double extinction_time() const noexcept { return T_; }
  /// t = T (1 - e^{-s}) for s >= 0.
  double forward(double s) const;
  /// s = -ln(1 - t/T) for t in [0, T).
  double inverse(double t) const;

 private:
  double T_;
};

/// (T - t)^{-m/(1-m)} w. Throws DomainError for t outside [0, T) or a
/// non-positive node of w.
ZonalField v_from_w(const ZonalField& w, const TimeMap& tm, double t);

}  // namespace fracflow
