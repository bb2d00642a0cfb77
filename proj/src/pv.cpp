#include "fracflow/pv.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "fracflow/errors.hpp"

namespace fracflow {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;

// The outer integrand carries the noise of the inner kernel quadrature, so
// it gets a looser tolerance and a shallow recursion.
constexpr unsigned kInnerDepth = 8;
constexpr double kInnerTol = 1e-13;
constexpr unsigned kOuterDepth = 6;
constexpr double kOuterTol = 1e-10;
constexpr int kWindows = 5;
constexpr double kGrading = 1.6;
constexpr int kOneSidedPanels = 8;

template <typename F>
double panel(F&& f, double a, double b, unsigned depth, double tol) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  return Rule::integrate(f, a, b, depth, tol, &err);
}

template <typename F>
double inner_panel(F&& f, double a, double b) {
  return panel(f, a, b, kInnerDepth, kInnerTol);
}

template <typename F>
double outer_panel(F&& f, double a, double b) {
  return panel(f, a, b, kOuterDepth, kOuterTol);
}

// Richardson step: the constant term of I(eps) = I0 + sum_i a_i phi_i(eps)
// interpolated through the first `count` samples.
double extrapolate(const std::vector<double>& eps, const std::vector<double>& values, double sigma, int count) {
  const double exps[] = {2.0 - 2.0 * sigma, 3.0, 4.0 - 2.0 * sigma, 5.0};
  Eigen::MatrixXd A(count, count);
  Eigen::VectorXd rhs(count);
  for (int r = 0; r < count; ++r) {
    const double e = eps[r];
    A(r, 0) = 1.0;
    std::vector<double> used;
    for (int c = 1; c < count; ++c) {
      const double p = exps[c - 1];
      const bool repeated = std::any_of(used.begin(), used.end(), [p](double u) { return std::abs(u - p) < 1e-9; });
      A(r, c) = repeated ? std::pow(e, p) * std::log(e) : std::pow(e, p);
      used.push_back(p);
    }
    rhs(r) = values[r];
  }
  // Column scaling keeps the tiny high-order columns from degrading the solve.
  Eigen::VectorXd scale(count);
  for (int c = 0; c < count; ++c) {
    scale(c) = A.col(c).cwiseAbs().maxCoeff();
    if (scale(c) > 0.0) A.col(c) /= scale(c);
  }
  const Eigen::VectorXd sol = A.fullPivLu().solve(rhs);
  return sol(0) / scale(0);
}

}  // namespace

double azimuthal_kernel(const SphereParams& params, double theta, double theta_prime) {
  const int n = params.n();
  const double p = 0.5 * (n + 2.0 * params.sigma());
  const double c = 2.0 - 2.0 * std::cos(theta - theta_prime);
  const double b = 2.0 * std::sin(theta) * std::sin(theta_prime);
  const double half_pi = 0.5 * std::numbers::pi;

  // With phi = 2 psi the distance reads c + 2 b sin^2 psi.
  auto f = [&](double psi) {
    const double s = std::sin(psi);
    const double base = c + 2.0 * b * s * s;
    const double jac = n == 2 ? 2.0 : 2.0 * std::pow(std::sin(2.0 * psi), n - 2);
    return std::pow(base, -p) * jac;
  };

  double total = 0.0;
  if (b <= 0.0) {
    total = inner_panel(f, 0.0, half_pi);
  } else {
    // Geometric panels resolve the near-diagonal peak of width sqrt(c / 2b).
    double x = c > 0.0 ? std::sqrt(c / (2.0 * b)) : 1e-300;
    double lo = 0.0;
    while (x < half_pi) {
      total += inner_panel(f, lo, x);
      lo = x;
      x *= 2.0;
    }
    total += inner_panel(f, lo, half_pi);
  }
  return sphere_area(n - 2) * total;
}

PvResult apply_psigma_pv_detailed(const ZonalField& field, double tol) {
  const SphereParams& params = field.params();
  const int n = params.n();
  const double sigma = params.sigma();
  const ConstantSet cs = constants(params);
  const double pi = std::numbers::pi;
  const auto& nodes = field.grid().nodes();
  const int M = field.size();
  // Force the coefficient cache before the evaluation loops.
  (void)field.spectral();

  std::vector<double> out(M);
  std::vector<double> err(M);
  for (int j = 0; j < M; ++j) {
    const double theta = std::acos(nodes[j]);
    const double v_here = field.value_at(nodes[j]);
    auto g = [&](double tp) {
      const double s = std::sin(tp);
      const double weight = std::pow(s, n - 1);
      return (v_here - field.value_at(std::cos(tp))) * azimuthal_kernel(params, theta, tp) * weight;
    };
    auto pair = [&](double d) { return g(theta + d) + g(theta - d); };

    const double d1 = std::min(theta, pi - theta);
    double one_sided = 0.0;
    {
      const double lo = theta < 0.5 * pi ? 2.0 * theta : 0.0;
      const double hi = theta < 0.5 * pi ? pi : 2.0 * theta - pi;
      const double h = (hi - lo) / kOneSidedPanels;
      for (int i = 0; i < kOneSidedPanels && hi > lo; ++i) one_sided += outer_panel(g, lo + i * h, lo + (i + 1) * h);
    }

    std::vector<double> eps(kWindows);
    eps[0] = 0.25 * d1;
    for (int i = 1; i < kWindows; ++i) eps[i] = 0.5 * eps[i - 1];

    double outer = 0.0;
    for (double x = eps[0]; x < d1;) {
      const double next = std::min(x * kGrading, d1);
      outer += outer_panel(pair, x, next);
      x = next;
    }
    std::vector<double> values(kWindows);
    values[0] = outer + one_sided;
    for (int i = 1; i < kWindows; ++i) values[i] = values[i - 1] + outer_panel(pair, eps[i], eps[i - 1]);

    const double fine = extrapolate(eps, values, sigma, kWindows);
    const double coarse = extrapolate(eps, values, sigma, kWindows - 1);
    out[j] = cs.psigma1 * field[j] + cs.c_neg * fine;
    err[j] = cs.c_neg * std::abs(fine - coarse);
  }

  double sup = 0.0;
  for (double x : out) sup = std::max(sup, std::abs(x));
  double worst = 0.0;
  for (double e : err) worst = std::max(worst, e);
  const double rel = sup > 0.0 ? worst / sup : worst;
  if (!(rel <= tol)) {
    throw AccuracyError("principal-value evaluation reached relative error " + std::to_string(rel) +
                            " above the requested " + std::to_string(tol),
                        rel);
  }
  return {ZonalField(field.grid_ptr(), std::move(out)), rel};
}

ZonalField apply_psigma_pv(const ZonalField& field, double tol) {
  return apply_psigma_pv_detailed(field, tol).value;
}

}  // namespace fracflow
