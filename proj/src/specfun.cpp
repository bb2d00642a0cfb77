#include "fracflow/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "fracflow/errors.hpp"

namespace fracflow {

SphereParams::SphereParams(int n, double sigma) : n_(n), sigma_(sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw DomainError("sigma must lie in (0,1)");
  }
  if (n < 2) {
    throw DomainError("n must be at least 2");
  }
  if (!(n > 2.0 * sigma)) {
    throw DomainError("n must exceed 2*sigma");
  }
}

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

// zeta(k) for k = 2..33
constexpr std::array<double, 32> kZeta = {
    1.6449340668482264365, 1.2020569031595942854, 1.0823232337111381915,
    1.0369277551433699263, 1.0173430619844491397, 1.0083492773819228268,
    1.0040773561979443394, 1.0020083928260822144, 1.0009945751278180853,
    1.0004941886041194646, 1.0002460865533080483, 1.0001227133475784891,
    1.0000612481350587048, 1.0000305882363070205, 1.0000152822594086519,
    1.0000076371976378998, 1.0000038172932649998, 1.0000019082127165539,
    1.0000009539620338728, 1.0000004769329867878, 1.0000002384505027277,
    1.0000001192199259653, 1.0000000596081890513, 1.0000000298035035147,
    1.0000000149015548284, 1.0000000074507117898, 1.0000000037253340248,
    1.0000000018626597235, 1.0000000009313274324, 1.0000000004656629065,
    1.0000000002328311834, 1.0000000001164155017};

// ln Gamma(1 + eps) = -gamma*eps + sum_{k>=2} (-1)^k zeta(k) eps^k / k.
// Keeps full relative accuracy around the zero of ln Gamma at x = 1.
double log_gamma_one_plus(double eps) {
  double sum = 0.0;
  double power = eps;
  for (std::size_t i = 0; i < kZeta.size(); ++i) {
    power *= -eps;
    const double k = static_cast<double>(i + 2);
    sum += kZeta[i] * power / k;
  }
  return -kEulerGamma * eps - sum;
}

// Stirling series, accurate to double precision for x >= 15.
double log_gamma_stirling(double x) {
  static constexpr std::array<double, 8> kCoeff = {
      1.0 / 12.0,          -1.0 / 360.0,        1.0 / 1260.0,
      -1.0 / 1680.0,       1.0 / 1188.0,        -691.0 / 360360.0,
      1.0 / 156.0,         -3617.0 / 122400.0};
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv;
  for (double c : kCoeff) {
    series += c * power;
    power *= inv2;
  }
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

constexpr double kStirlingThreshold = 15.0;
constexpr double kSeriesRadius = 0.25;

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma requires a positive finite argument, got " + std::to_string(x));
  }
  if (std::abs(x - 1.0) <= kSeriesRadius) return log_gamma_one_plus(x - 1.0);
  if (std::abs(x - 2.0) <= kSeriesRadius) {
    return log_gamma_one_plus(x - 2.0) + std::log1p(x - 2.0);
  }
  if (x >= kStirlingThreshold) return log_gamma_stirling(x);

  // Shift upward: Gamma(x) = Gamma(x + k) / (x (x+1) ... (x+k-1)).
  double shifted = x;
  double product = 1.0;
  while (shifted < kStirlingThreshold) {
    product *= shifted;
    shifted += 1.0;
  }
  return log_gamma_stirling(shifted) - std::log(product);
}

double sphere_area(int d) {
  const double half = 0.5 * (d + 1);
  return 2.0 * std::exp(half * std::log(std::numbers::pi) - log_gamma(half));
}

double multiplier(const SphereParams& params, int k) {
  if (k < 0) throw DomainError("multiplier degree must be nonnegative");
  const double base = k + 0.5 * params.n();
  return std::exp(log_gamma(base + params.sigma()) - log_gamma(base - params.sigma()));
}

ConstantSet constants(const SphereParams& params) {
  const double n = params.n();
  const double s = params.sigma();
  const double pi = std::numbers::pi;

  ConstantSet c{};
  c.m = params.m();
  c.bigN = params.big_n();
  c.psigma1 = multiplier(params, 0);
  c.c_pos = std::exp(log_gamma(0.5 * (n - 2.0 * s)) - log_gamma(s)) /
            (std::pow(2.0, 2.0 * s) * std::pow(pi, 0.5 * n));
  c.c_neg = std::pow(2.0, 2.0 * s) * s *
            std::exp(log_gamma(0.5 * (n + 2.0 * s)) - log_gamma(1.0 - s)) / std::pow(pi, 0.5 * n);
  c.vol_sn = sphere_area(params.n());
  c.sobolev_s = 1.0 / (c.psigma1 * std::pow(c.vol_sn, 2.0 * s / n));

  const double base = (1.0 - c.m) * c.psigma1;
  c.c_steady = std::pow(base, (n - 2.0 * s) / (4.0 * s));
  c.k_profile = std::pow(std::pow(2.0, 2.0 * s) * base, (n + 2.0 * s) / (4.0 * s));
  c.k_profile_printed = std::pow(2.0, 0.5 * (n - 2.0)) * std::pow(base, (n - 2.0 * s) / (4.0 * s));
  c.kappa2 = std::pow(1.0 + base, c.m / (1.0 - c.m));
  c.inv_one_minus_m = (n + 2.0 * s) / (4.0 * s);
  return c;
}

}  // namespace fracflow
