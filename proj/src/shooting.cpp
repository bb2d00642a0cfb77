#include <cmath>

#include "fracflow/errors.hpp"
#include "fracflow/flow.hpp"

namespace fracflow {

namespace {

// +1 when the rescaled orbit from `initial` leaves the steady family upward
// (volume growing), -1 when it collapses toward zero.
int classify(const ZonalField& initial, const SolverConfig& config, const ShootingConfig& sh) {
  FlowState state{initial, 0.0, FlowKind::RescaledFastDiffusion, 0, 0.0};
  const double F0 = volume(initial);
  while (state.clock < sh.horizon) {
    try {
      state = step(state, config, sh.horizon - state.clock);
    } catch (const StateError&) {
      return -1;
    }
    const double F = volume(state.field);
    if (F > sh.blowup_factor * F0) return 1;
    if (F < sh.collapse_factor * F0) return -1;
    if (state.step_index >= config.max_steps) break;
  }
  const ZonalField vs = rhs(state);
  const double N = state.field.params().big_n();
  const auto& w = state.field.grid().weights();
  double dF = 0.0;
  for (int j = 0; j < state.field.size(); ++j) dF += w[j] * std::pow(state.field[j], N) * vs[j];
  return dF > 0.0 ? 1 : -1;
}

}  // namespace

ExtinctionOrbit shoot_extinction_orbit(const ZonalField& w0, const SolverConfig& config, const ShootingConfig& sh) {
  config.validate();
  if (!(w0.min() > 0.0)) throw StateError("initial field must be strictly positive");
  const double m = w0.params().m();
  const double e = -m / (1.0 - m);

  const ExtinctionBounds bounds = extinction_bounds(w0);
  // A larger amplitude means a shorter extinction time and an orbit that
  // blows up; the Sobolev-side bound on T therefore gives the low end.
  double lo = e * std::log(bounds.T_upper) - 0.05;
  double hi = bounds.T_lower ? e * std::log(*bounds.T_lower) + 0.05 : lo + 1.0;

  auto cls = [&](double x) { return classify(std::exp(x) * w0, config, sh); };
  for (int i = 0; i < 40 && cls(lo) > 0; ++i) lo -= 1.0;
  for (int i = 0; i < 40 && cls(hi) < 0; ++i) hi += 1.0;

  int it = 0;
  while (hi - lo > sh.bracket_tol && it < sh.max_iterations) {
    const double mid = 0.5 * (lo + hi);
    if (cls(mid) > 0) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++it;
  }

  const double x = 0.5 * (lo + hi);
  SolverConfig final_cfg = config;
  final_cfg.max_clock = sh.final_horizon;
  ExtinctionOrbit orbit{std::exp(x * (1.0 / e)),
                        std::exp(x),
                        std::exp(hi / e),
                        std::exp(lo / e),
                        it,
                        run(std::exp(x) * w0, FlowKind::RescaledFastDiffusion, final_cfg)};
  return orbit;
}

}  // namespace fracflow
