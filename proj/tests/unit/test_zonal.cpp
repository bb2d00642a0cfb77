#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fracflow/errors.hpp"
#include "fracflow/zonal.hpp"

using namespace fracflow;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_coeffs(int K, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(K + 1);
  for (auto& x : c) x = u(gen);
  return c;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double sup_abs(const std::vector<double>& a) {
  double d = 0.0;
  for (double x : a) d = std::max(d, std::abs(x));
  return d;
}

}  // namespace

TEST(Grid, WeightsSumToSphereArea) {
  {
    auto g = build_grid(SphereParams(2, 0.5), 32, 48);
    double sum = 0.0;
    for (double w : g->weights()) sum += w;
    EXPECT_NEAR(sum, 4.0 * kPi, 1e-12 * 4.0 * kPi);
  }
  {
    auto g = build_grid(SphereParams(3, 0.5), 32, 48);
    double sum = 0.0;
    for (double w : g->weights()) sum += w;
    EXPECT_NEAR(sum, 2.0 * kPi * kPi, 1e-12 * 2.0 * kPi * kPi);
  }
}

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(build_grid(SphereParams(2, 0.5), 4, 3), GridError);
  EXPECT_THROW(build_grid(SphereParams(2, 0.5), 16, 16), GridError);
  EXPECT_THROW(build_grid(SphereParams(2, 0.5), 6, 20), GridError);
  EXPECT_NO_THROW(build_grid(SphereParams(2, 0.5), 16, 17));
}

TEST(Grid, DefaultNodeCount) {
  EXPECT_EQ(default_node_count(32), 50);
  EXPECT_EQ(default_node_count(9), 15);
  EXPECT_EQ(build_grid(SphereParams(3, 0.5), 32)->node_count(), 50);
}

TEST(Grid, NodesInteriorSortedSymmetric) {
  auto g = build_grid(SphereParams(4, 0.3), 40);
  const auto& t = g->nodes();
  for (int j = 0; j < g->node_count(); ++j) {
    EXPECT_GT(t[j], -1.0);
    EXPECT_LT(t[j], 1.0);
    if (j > 0) EXPECT_LT(t[j - 1], t[j]);
    EXPECT_EQ(t[j], -t[g->node_count() - 1 - j]);
    EXPECT_GT(g->weights()[j], 0.0);
  }
}

TEST(Grid, DiscreteOrthonormality) {
  for (int n : {2, 3, 4, 7}) {
    for (int M : {33, 48}) {
      auto g = build_grid(SphereParams(n, 0.5), 32, M);
      for (int k = 0; k <= 32; ++k) {
        for (int l = 0; l <= 32; ++l) {
          double s = 0.0;
          for (int j = 0; j < M; ++j) s += g->weights()[j] * g->basis(k, j) * g->basis(l, j);
          EXPECT_NEAR(s, k == l ? 1.0 : 0.0, 1e-10) << "n=" << n << " k=" << k << " l=" << l;
        }
      }
    }
  }
}

// Integral of t^d over S^n against the closed-form Beta moment.
TEST(Grid, PolynomialExactness) {
  for (int n : {2, 3, 5}) {
    auto g = build_grid(SphereParams(n, 0.5), 16, 20);
    const double a = 0.5 * (n - 2);
    const double equator = 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
    for (int d = 0; d <= 2 * 20 - 1; ++d) {
      double s = 0.0;
      for (int j = 0; j < g->node_count(); ++j) s += g->weights()[j] * std::pow(g->nodes()[j], d);
      const double exact = d % 2 == 1 ? 0.0 : equator * std::beta(0.5 * (d + 1), a + 1.0);
      EXPECT_NEAR(s, exact, 1e-12 * std::max(1.0, exact)) << "n=" << n << " d=" << d;
    }
  }
}

TEST(Transform, ConstantAndBasisFunctions) {
  auto g = build_grid(SphereParams(3, 0.5), 24);
  const auto c = analyze(ZonalField::constant(g, 1.0));
  EXPECT_NEAR(c[0], std::sqrt(2.0 * kPi * kPi), 1e-12);
  for (int k = 1; k <= 24; ++k) EXPECT_NEAR(c[k], 0.0, 1e-12);

  const auto c3 = analyze(basis_field(g, 3));
  for (int k = 0; k <= 24; ++k) EXPECT_NEAR(c3[k], k == 3 ? 1.0 : 0.0, 1e-10);
}

TEST(Transform, RoundTrip) {
  for (int n : {2, 3, 5}) {
    auto g = build_grid(SphereParams(n, 0.25), 48);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto coeffs = random_coeffs(48, seed);
      const auto back = analyze(synthesize(g, coeffs));
      EXPECT_LE(sup_diff(back, coeffs), 1e-12);
    }
  }
}

TEST(Transform, ShapeErrors) {
  auto g = build_grid(SphereParams(3, 0.5), 16);
  EXPECT_THROW(synthesize(g, std::vector<double>(5, 0.0)), ShapeError);
  EXPECT_THROW(ZonalField(g, std::vector<double>(3, 1.0)), ShapeError);
  auto g2 = build_grid(SphereParams(3, 0.5), 16);
  EXPECT_THROW(ZonalField::constant(g, 1.0) + ZonalField::constant(g2, 1.0), ShapeError);
}

TEST(Transform, CacheInvalidatedOnMutation) {
  auto g = build_grid(SphereParams(3, 0.5), 16);
  ZonalField f = ZonalField::constant(g, 1.0);
  EXPECT_NEAR(f.spectral()[0], std::sqrt(2.0 * kPi * kPi), 1e-12);
  for (double& x : f.mutable_nodal()) x = 2.0;
  EXPECT_NEAR(f.spectral()[0], 2.0 * std::sqrt(2.0 * kPi * kPi), 1e-12);
}

TEST(Transform, ValueAtMatchesNodes) {
  auto g = build_grid(SphereParams(3, 0.5), 20);
  const auto f = synthesize(g, random_coeffs(20, 5));
  for (int j = 0; j < g->node_count(); ++j) EXPECT_NEAR(f.value_at(g->nodes()[j]), f[j], 1e-12);
}

TEST(Operators, ConstantsAndDegreeOne) {
  auto g = build_grid(SphereParams(3, 0.5), 16);
  const auto pc = apply_psigma(ZonalField::constant(g, 3.0));
  for (double x : pc.nodal()) EXPECT_NEAR(x, 3.0, 1e-12);

  const auto g1 = basis_field(g, 1);
  const auto pg1 = apply_psigma(g1);
  for (int j = 0; j < g->node_count(); ++j) EXPECT_NEAR(pg1[j], 2.0 * g1[j], 1e-12);

  auto g2 = build_grid(SphereParams(2, 0.5), 16);
  const auto half = apply_psigma(ZonalField::constant(g2, 1.0));
  for (double x : half.nodal()) EXPECT_NEAR(x, 0.5, 1e-13);
}

TEST(Operators, InversePair) {
  for (auto [n, s] : std::vector<std::pair<int, double>>{{2, 0.25}, {3, 0.5}, {4, 0.75}}) {
    auto g = build_grid(SphereParams(n, s), 64);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto f = synthesize(g, random_coeffs(64, seed));
      const auto back = apply_ksigma(apply_psigma(f));
      EXPECT_LE(sup_diff(back.nodal(), f.nodal()), 1e-12 * std::max(1.0, sup_abs(f.nodal())));
      const auto back2 = apply_psigma(apply_ksigma(f));
      EXPECT_LE(sup_diff(back2.nodal(), f.nodal()), 1e-12 * std::max(1.0, sup_abs(f.nodal())));
    }
  }
}

TEST(Operators, SelfAdjointAndPositive) {
  auto g = build_grid(SphereParams(3, 0.25), 32);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = synthesize(g, random_coeffs(32, 100 + seed));
    const auto h = synthesize(g, random_coeffs(32, 200 + seed));
    const double a = integrate(f * apply_psigma(h));
    const double b = integrate(h * apply_psigma(f));
    EXPECT_LE(std::abs(a - b), 1e-10 * std::max(std::abs(a), 1.0));
    const double lam0 = g->multipliers()[0];
    EXPECT_GT(psigma_form(f), lam0 * integrate(f * f));
    EXPECT_NEAR(psigma_form(f), integrate(f * apply_psigma(f)), 1e-10 * psigma_form(f));
  }
  const auto c = ZonalField::constant(g, 2.0);
  EXPECT_NEAR(psigma_form(c), g->multipliers()[0] * integrate(c * c), 1e-11);
}

TEST(Integration, Basics) {
  auto g2 = build_grid(SphereParams(2, 0.5), 16);
  EXPECT_NEAR(integrate(ZonalField::constant(g2, 1.0)), 4.0 * kPi, 1e-12);
  EXPECT_NEAR(integrate(basis_field(g2, 1)), 0.0, 1e-12);
  auto g3 = build_grid(SphereParams(3, 0.5), 16);
  for (double p : {1.0, 2.0, 3.5}) {
    EXPECT_NEAR(lp_norm(ZonalField::constant(g3, 1.0), p), std::pow(2.0 * kPi * kPi, 1.0 / p), 1e-12);
  }
  EXPECT_THROW(lp_norm(ZonalField::constant(g3, 1.0), 0.5), DomainError);
}

TEST(Integration, ParsevalOnBandLimited) {
  auto g = build_grid(SphereParams(5, 0.5), 24);
  const auto coeffs = random_coeffs(24, 77);
  const auto f = synthesize(g, coeffs);
  double parseval = 0.0;
  for (double c : coeffs) parseval += c * c;
  EXPECT_NEAR(integrate(f * f), parseval, 1e-11 * parseval);
}
