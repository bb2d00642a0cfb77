#include <gtest/gtest.h>

#include <cmath>

#include "fracflow/conformal.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/monitors.hpp"

using namespace fracflow;

namespace {

ZonalField one_plus(const GridPtr& g, int k, double eps) {
  return ZonalField::constant(g, 1.0) + eps * (std::sqrt(sphere_area(g->params().n())) * basis_field(g, k));
}

}  // namespace

TEST(ExtinctionEstimate, ExactPowerLaw) {
  for (double m : {0.5, 0.2, 0.8}) {
    Series F;
    for (int i = 0; i < 200; ++i) {
      const double t = 0.99 * i / 199.0;
      F.emplace_back(t, std::pow(1.0 - t, (m + 1.0) / (1.0 - m)));
    }
    EXPECT_NEAR(estimate_extinction_time(F, m), 1.0, 1e-6);
  }
}

TEST(ExtinctionEstimate, Errors) {
  Series few{{0, 3}, {1, 2}, {2, 1}};
  EXPECT_THROW(estimate_extinction_time(few, 0.5), EstimationError);
  Series rising;
  for (int i = 0; i < 20; ++i) rising.emplace_back(i, 1.0 + i);
  EXPECT_THROW(estimate_extinction_time(rising, 0.5), EstimationError);
  Series wiggle;
  for (int i = 0; i < 20; ++i) wiggle.emplace_back(i, 20.0 - i + (i == 18 ? 1.5 : 0.0));
  EXPECT_THROW(estimate_extinction_time(wiggle, 0.5), EstimationError);
}

TEST(ExtinctionEstimate, WidensWindowOnce) {
  // An alternating perturbation of size 0.003 on a line of slope -1 sampled
  // every 0.02: R^2 is about 0.997 over the last 10 samples and 0.9993 over
  // the last 20.
  const double m = 0.5;
  Series F;
  for (int i = 0; i < 40; ++i) {
    const double t = i * 0.02;
    const double y = 1.0 - t + (i % 2 ? 0.003 : -0.003);
    F.emplace_back(t, std::pow(y, (m + 1.0) / (1.0 - m)));
  }
  EXPECT_NEAR(estimate_extinction_time(F, m), 1.0, 1e-2);
  // A window too short to widen into a good fit is rejected.
  Series short_F(F.end() - 12, F.end());
  EXPECT_THROW(estimate_extinction_time(short_F, m, 0.5), EstimationError);
}

TEST(Monotone, Checks) {
  EXPECT_TRUE(check_monotone({3, 2, 2, 1}, Direction::NonIncreasing, 0.0).ok);
  const MonotoneCheck bad = check_monotone({3, 2, 2.5, 1}, Direction::NonIncreasing, 1e-8);
  EXPECT_FALSE(bad.ok);
  EXPECT_EQ(bad.index, 1);
  EXPECT_NEAR(bad.worst, 0.2, 1e-15);
  EXPECT_TRUE(check_monotone({1, 2, 3}, Direction::NonDecreasing, 0.0).ok);
  EXPECT_TRUE(check_monotone({1.0, 1.0 - 1e-10}, Direction::NonDecreasing, 1e-9).ok);
}

TEST(Monotone, ConvexityOnNonUniformGrid) {
  Series convex, concave;
  for (double t : {0.0, 0.1, 0.15, 0.4, 0.41, 0.9}) {
    convex.emplace_back(t, std::exp(-t));
    concave.emplace_back(t, 1.0 - t * t);
  }
  EXPECT_TRUE(check_convex(convex, 1e-12).ok);
  EXPECT_FALSE(check_convex(concave, 1e-8).ok);
  // On a uniform grid the measure is the plain second difference.
  Series uniform{{0.0, 1.0}, {1.0, 0.0}, {2.0, 0.5}};
  EXPECT_TRUE(check_convex(uniform, 0.0).ok);
  Series kink{{0.0, 1.0}, {1.0, 1.0}, {2.0, 0.5}};
  const MonotoneCheck c = check_convex(kink, 0.0);
  EXPECT_FALSE(c.ok);
  EXPECT_NEAR(c.worst, 0.5, 1e-15);
}

TEST(AccumulateG, Basics) {
  Series E{{0.0, 2.0}, {0.5, 2.0}, {1.0, 2.0}};
  EXPECT_EQ(accumulate_G(E, 0.5, 0.3, 0.3), 1.0);
  EXPECT_NEAR(accumulate_G(E, 0.5, 0.2, 0.7), std::exp(1.5 * 2.0 * 0.5), 1e-14);
  EXPECT_NEAR(accumulate_G(E, 0.5, 0.7, 0.2), std::exp(-1.5 * 2.0 * 0.5), 1e-14);
  Series linear{{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}};
  EXPECT_NEAR(accumulate_G(linear, 1.0, 0.25, 1.75), std::exp(2.0 * 0.5 * (1.75 * 1.75 - 0.25 * 0.25)), 1e-13);
  EXPECT_THROW(accumulate_G(E, 0.5, 0.0, 2.0), DomainError);
}

TEST(ExtinctionReport, ExactOrbit) {
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 16);
  const double m = p.m(), T = 1.5;
  const ZonalField w0 = ZonalField::constant(g, constants(p).c_steady * std::pow(T, m / (1.0 - m)));
  const Trajectory tr = run(w0, FlowKind::Unnormalized, SolverConfig{});
  const ExtinctionReport r = extinction_report(tr);
  EXPECT_NEAR(r.T_hat / T, 1.0, 1e-2);
  EXPECT_TRUE(r.sandwich_ok);
  ASSERT_TRUE(r.T_lower.has_value());
  EXPECT_LE(*r.T_lower, r.T_hat);
  EXPECT_LE(r.T_hat, r.T_upper * (1 + 1e-6));
  EXPECT_NEAR(r.F0, volume(w0), 1e-14);
  EXPECT_NEAR(r.lambda_limit, 1.0, 1e-6);
  EXPECT_NEAR(r.k_measured / r.k_derived, 1.0, 1e-2);
  EXPECT_FALSE(r.residual_history.empty());
  for (std::size_t i = 1; i < r.residual_history.size(); ++i) {
    EXPECT_GT(r.residual_history[i].s, r.residual_history[i - 1].s);
  }
  const MonotoneCheck convex = check_convex(volume_series(tr), 1e-8);
  EXPECT_TRUE(convex.ok) << convex.worst;
}

TEST(ExtinctionReport, RequiresUnnormalizedRun) {
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 16);
  SolverConfig cfg;
  cfg.max_steps = 3;
  const Trajectory tr = run(ZonalField::constant(g, 0.7), FlowKind::RescaledFastDiffusion, cfg);
  EXPECT_THROW(extinction_report(tr), DomainError);
}

TEST(EnergyRatio, MatchesQek) {
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 16);
  SolverConfig cfg;
  cfg.max_steps = 5;
  const Trajectory tr = run(random_trial_field(g, 2), FlowKind::Unnormalized, cfg);
  const Series E = energy_ratio_series(tr);
  ASSERT_EQ(E.size(), tr.snapshots.size());
  for (std::size_t i = 0; i < E.size(); ++i) EXPECT_NEAR(E[i].second, qek(tr.snapshots[i].field).E, 1e-13);
}

TEST(Dissipation, RescaledEnergyIdentity) {
  const SphereParams p(3, 0.5);
  const auto g = build_grid(p, 16);
  SolverConfig cfg;
  cfg.max_steps = 300;
  cfg.dt_init = 0.02;
  const Trajectory tr = run(one_plus(g, 2, 0.3), FlowKind::RescaledFastDiffusion, cfg);
  const auto mismatch = dissipation_mismatch(tr);
  ASSERT_FALSE(mismatch.empty());
  for (double x : mismatch) EXPECT_LE(x, 1e-2);
}

TEST(Monotone, ScaledViolations) {
  const std::vector<double> H{-2e-36, -2.05e-36, -1e-36};
  EXPECT_FALSE(check_monotone(H, Direction::NonDecreasing, 1e-8).ok);
  const MonotoneCheck c = check_monotone_scaled(H, {1e-20, 1e-20, 1e-20}, Direction::NonDecreasing, 1e-8);
  EXPECT_TRUE(c.ok);
  EXPECT_NEAR(c.worst, 5e-18, 1e-30);
  EXPECT_THROW(check_monotone_scaled(H, {1.0}, Direction::NonDecreasing, 1e-8), ShapeError);
}
