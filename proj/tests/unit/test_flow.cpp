#include <gtest/gtest.h>

#include <cmath>

#include "fracflow/conformal.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/flow.hpp"
#include "fracflow/monitors.hpp"

using namespace fracflow;

namespace {

double sup_abs(const ZonalField& a) {
  double d = 0.0;
  for (double x : a.nodal()) d = std::max(d, std::abs(x));
  return d;
}

double sup_diff(const ZonalField& a, const ZonalField& b) { return sup_abs(a - b); }

ZonalField one_plus(const GridPtr& g, int k, double eps) {
  return ZonalField::constant(g, 1.0) + eps * (std::sqrt(sphere_area(g->params().n())) * basis_field(g, k));
}

FlowState state_of(const ZonalField& f, FlowKind kind) { return FlowState{f, 0.0, kind, 0, 0.0}; }

}  // namespace

TEST(SigmaCurvature, Constants) {
  const SphereParams p(4, 0.3);
  const auto g = build_grid(p, 12);
  const auto cs = constants(p);
  EXPECT_NEAR(sigma_curvature_avg(ZonalField::constant(g, 1.0)), cs.psigma1, 1e-13);
  EXPECT_NEAR(sigma_curvature_avg(ZonalField::constant(g, 0.7)), cs.psigma1 * std::pow(0.7, 1.0 - cs.bigN), 1e-13);
  EXPECT_THROW(sigma_curvature_avg(ZonalField::constant(g, 0.0)), DomainError);
}

TEST(SigmaCurvature, ConformalInvarianceOnBubbles) {
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 96);
  auto unit_volume = [&](double lam) {
    const ZonalField b = bubble_zonal(p, {lam, 1.0}, g);
    return std::pow(volume(b), -1.0 / (p.big_n() + 1.0)) * b;
  };
  const double r1 = sigma_curvature_avg(unit_volume(1.0));
  EXPECT_NEAR(sigma_curvature_avg(unit_volume(2.0)), r1, 1e-8);
}

TEST(Rhs, FixedPointsAndDecay) {
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 16);
  const auto cs = constants(p);
  EXPECT_LE(sup_abs(rhs(state_of(ZonalField::constant(g, cs.c_steady), FlowKind::RescaledFastDiffusion))), 1e-12);
  EXPECT_LE(sup_abs(rhs(state_of(ZonalField::constant(g, 1.7), FlowKind::NormalizedYamabe))), 1e-12);

  for (const auto& [n, s] : std::vector<std::pair<int, double>>{{3, 0.5}, {5, 0.75}}) {
    const SphereParams q(n, s);
    const auto gq = build_grid(q, 12);
    const double N = q.big_n(), c = 0.6;
    const ZonalField d = rhs(state_of(ZonalField::constant(gq, c), FlowKind::Unnormalized));
    const double expected = -constants(q).psigma1 * std::pow(c, 2.0 - N) / N;
    EXPECT_LT(expected, 0.0);
    for (double x : d.nodal()) EXPECT_NEAR(x, expected, 1e-13);
  }
  std::vector<double> bad(g->node_count(), 1.0);
  bad[3] = -0.1;
  EXPECT_THROW(rhs(state_of(ZonalField(g, bad), FlowKind::Unnormalized)), StateError);
}

TEST(Step, SteadyStateIsFixed) {
  const SphereParams p(4, 0.5);
  const auto g = build_grid(p, 16);
  const ZonalField v = ZonalField::constant(g, constants(p).c_steady);
  const FlowState next = step(state_of(v, FlowKind::RescaledFastDiffusion), SolverConfig{});
  EXPECT_LE(sup_diff(next.field, v), 1e-12);
  EXPECT_GT(next.clock, 0.0);
  EXPECT_EQ(next.step_index, 1);
}

TEST(Step, StiffnessBound) {
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 32);
  SolverConfig cfg;
  cfg.dt_init = 10.0;
  const ZonalField v = ZonalField::constant(g, 0.8);
  const double bound = cfg.safety * p.big_n() * std::pow(0.8, p.big_n() - 1.0) / multiplier(p, 32);
  EXPECT_NEAR(stable_dt(state_of(v, FlowKind::Unnormalized), cfg), bound, 1e-15);
  cfg.dt_init = 1e-3;
  EXPECT_EQ(stable_dt(state_of(v, FlowKind::Unnormalized), cfg), 1e-3);
}

TEST(Step, NormalizedStepPreservesVolume) {
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 32);
  FlowState st = state_of(0.5 * one_plus(g, 1, 0.3), FlowKind::NormalizedYamabe);
  for (int i = 0; i < 50; ++i) {
    const double before = volume(st.field);
    st = step(st, SolverConfig{});
    EXPECT_LE(std::abs(volume(st.field) - before) / before, 1e-10);
  }
}

TEST(Step, UnnormalizedSeparableOrbit) {
  // 2 w w' = -w on S^3 with sigma = 1/2, so w = 1 - t/2 and w^N = (1 - t/2)^2.
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 16);
  SolverConfig cfg;
  cfg.max_clock = 0.5;
  const Trajectory tr = run(ZonalField::constant(g, 1.0), FlowKind::Unnormalized, cfg);
  EXPECT_EQ(tr.termination, Termination::Horizon);
  EXPECT_EQ(tr.final_state.clock, 0.5);
  for (double x : tr.final_state.field.nodal()) {
    EXPECT_NEAR(x, 0.75, 1e-8);
    EXPECT_NEAR(x * x, 0.5625, 1e-8);
  }
}

TEST(Step, RejectsAfterRepeatedHalving) {
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 16);
  SolverConfig cfg;
  cfg.positivity_floor = 1.0 - 1e-12;
  cfg.dt_init = 1.0;
  EXPECT_THROW(step(state_of(ZonalField::constant(g, 1.0), FlowKind::Unnormalized), cfg), StateError);
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.safety = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = SolverConfig{};
  cfg.max_steps = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = SolverConfig{};
  cfg.dt_init = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Run, RescaledConstantFollowsOde) {
  // v' = v - 1/2 on S^3 with sigma = 1/2; from 1.2 c_steady = 0.6, v = 1/2 + e^s/10.
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 16);
  SolverConfig cfg;
  cfg.dt_init = 0.01;
  cfg.max_clock = 2.0;
  const Trajectory tr = run(ZonalField::constant(g, 0.6), FlowKind::RescaledFastDiffusion, cfg);
  EXPECT_EQ(tr.termination, Termination::Horizon);
  for (const Snapshot& s : tr.snapshots) {
    EXPECT_NEAR(s.field[0], 0.5 + 0.1 * std::exp(s.clock), 1e-9);
  }
  const Trajectory at_rest = run(ZonalField::constant(g, 0.5), FlowKind::RescaledFastDiffusion, cfg);
  EXPECT_EQ(at_rest.termination, Termination::Converged);
  EXPECT_EQ(at_rest.snapshots.size(), 1u);
}

TEST(Run, NormalizedConvergesToBubble) {
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 24);
  const ZonalField v0 = 0.5 * one_plus(g, 1, 0.3);
  SolverConfig cfg;
  cfg.record_every = 25;
  const Trajectory tr = run(v0, FlowKind::NormalizedYamabe, cfg);
  ASSERT_EQ(tr.termination, Termination::Converged) << tr.failure;
  const BubbleFit fit = fit_bubble(tr.final_state.field, FitMode::FreeAmplitude);
  EXPECT_LE(fit.residual_sup, 1e-4);
  EXPECT_LE(std::abs(volume(tr.final_state.field) / volume(v0) - 1.0), 1e-6);
  for (std::size_t i = 1; i < tr.snapshots.size(); ++i) EXPECT_GT(tr.snapshots[i].clock, tr.snapshots[i - 1].clock);
}

TEST(Run, UnnormalizedExtinctionOfExactOrbit) {
  for (const auto& [n, s] : std::vector<std::pair<int, double>>{{3, 0.5}, {4, 0.75}}) {
    const SphereParams p(n, s);
    const auto g = build_grid(p, 16);
    const double m = p.m(), T = 1.3;
    const ZonalField w0 = ZonalField::constant(g, constants(p).c_steady * std::pow(T, m / (1.0 - m)));
    const Trajectory tr = run(w0, FlowKind::Unnormalized, SolverConfig{});
    ASSERT_EQ(tr.termination, Termination::Extinct);
    EXPECT_NEAR(estimate_extinction_time(volume_series(tr), m) / T, 1.0, 1e-2);
    EXPECT_LT(tr.final_state.clock, T);
    // Exact orbit: w(t) = c_steady (T - t)^{m/(1-m)}.
    const Snapshot& mid = tr.snapshots[tr.snapshots.size() / 2];
    EXPECT_NEAR(mid.field[0] / (constants(p).c_steady * std::pow(T - mid.clock, m / (1.0 - m))), 1.0, 1e-6);
  }
}

TEST(Run, ComparisonPrinciple) {
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 24);
  const ZonalField w2 = random_trial_field(g, 11);
  const ZonalField w1 = w2 + 0.05 * random_trial_field(g, 12);
  SolverConfig cfg;
  cfg.max_clock = 0.5;
  const Trajectory a = run(w1, FlowKind::Unnormalized, cfg);
  const Trajectory b = run(w2, FlowKind::Unnormalized, cfg);
  // Step sizes differ between the runs, so compare at the shared final clock.
  ASSERT_EQ(a.termination, Termination::Horizon);
  ASSERT_EQ(b.termination, Termination::Horizon);
  const ZonalField& f1 = a.final_state.field;
  const ZonalField& f2 = b.final_state.field;
  for (int j = 0; j < f1.size(); ++j) EXPECT_GE(f1[j], f2[j] - 1e-8 * f1.max());
}

TEST(Run, StepFailureIsRecorded) {
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 16);
  SolverConfig cfg;
  cfg.positivity_floor = 1.0 - 1e-12;
  cfg.dt_init = 1.0;
  const Trajectory tr = run(ZonalField::constant(g, 1.0), FlowKind::Unnormalized, cfg);
  EXPECT_EQ(tr.termination, Termination::StepFailure);
  EXPECT_FALSE(tr.failure.empty());
  EXPECT_THROW(run(ZonalField::constant(g, 0.0), FlowKind::Unnormalized, SolverConfig{}), StateError);
}

TEST(Run, MaxStepsAndRecording) {
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 16);
  SolverConfig cfg;
  cfg.max_steps = 7;
  cfg.record_every = 3;
  const Trajectory tr = run(one_plus(g, 2, 0.2), FlowKind::RescaledFastDiffusion, cfg);
  EXPECT_EQ(tr.termination, Termination::MaxSteps);
  std::vector<long> steps;
  for (const auto& s : tr.snapshots) steps.push_back(s.step);
  EXPECT_EQ(steps, (std::vector<long>{0, 3, 6, 7}));
  EXPECT_TRUE(tr.snapshots[1].diag.J.has_value());
  EXPECT_FALSE(tr.snapshots[1].diag.H.has_value());
}

TEST(Shooting, ConstantDataHasExactTime) {
  // w = 1 - t/2 vanishes at T = 2.
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 16);
  const ExtinctionOrbit orbit = shoot_extinction_orbit(ZonalField::constant(g, 1.0), SolverConfig{});
  EXPECT_NEAR(orbit.extinction_time, 2.0, 1e-9);
  EXPECT_LE(orbit.T_lower_bracket, orbit.extinction_time);
  EXPECT_GE(orbit.T_upper_bracket, orbit.extinction_time);
  // The exact amplitude gives the steady constant, which is at rest.
  EXPECT_EQ(orbit.trajectory.termination, Termination::Converged);
  EXPECT_NEAR(orbit.trajectory.final_state.field[0], constants(p).c_steady, 1e-9);
}

TEST(Shooting, RandomDataReachesBubble) {
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 32);
  const ZonalField w0 = random_trial_field(g, 3);
  SolverConfig cfg;
  cfg.record_every = 10;
  const ExtinctionOrbit orbit = shoot_extinction_orbit(w0, cfg);
  const ExtinctionBounds b = extinction_bounds(w0);
  EXPECT_LE(orbit.extinction_time, b.T_upper);
  EXPECT_GE(orbit.extinction_time, *b.T_lower);
  const auto& snaps = orbit.trajectory.snapshots;
  std::vector<double> J;
  for (const auto& s : snaps) {
    ASSERT_TRUE(s.diag.J.has_value());
    EXPECT_GE(*s.diag.J, 0.0);
    J.push_back(*s.diag.J);
  }
  EXPECT_TRUE(check_monotone(J, Direction::NonIncreasing, 1e-8).ok);
  EXPECT_LE(*snaps.back().diag.fit_residual, 1e-4);
}
