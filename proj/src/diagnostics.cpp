#include "fracflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracflow/conformal.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/flow.hpp"

namespace fracflow {

double volume(const ZonalField& v) { return power_integral(v, v.params().big_n() + 1.0); }

double functional_J(const ZonalField& v) {
  const SphereParams& p = v.params();
  const double m = p.m(), N = p.big_n();
  return 0.5 * psigma_form(v) - volume(v) / ((1.0 - m) * (N + 1.0));
}

double functional_S(const ZonalField& v) {
  const double vol = volume(v);
  if (!(vol > 0.0)) throw DomainError("Sobolev quotient of the zero field");
  return psigma_form(v) / std::pow(vol, 2.0 / (v.params().big_n() + 1.0));
}

double functional_F(const ZonalField& w) { return volume(w); }

double functional_H(const ZonalField& psi) {
  const SphereParams& p = psi.params();
  const double n = p.n(), s = p.sigma();
  const double S = constants(p).sobolev_s;
  const double dual = power_integral(psi, 2.0 * n / (n + 2.0 * s));
  return ksigma_form(psi) - S * std::pow(dual, (n + 2.0 * s) / n);
}

double harnack_ratio(const ZonalField& v) {
  const double lo = v.min();
  if (!(lo > 0.0)) throw DomainError("Harnack ratio needs a strictly positive field");
  return v.max() / lo;
}

QekRecord qek(const ZonalField& w) {
  const SphereParams& p = w.params();
  const double n = p.n(), s = p.sigma(), m = p.m(), N = p.big_n();
  QekRecord r{};
  r.F = volume(w);
  const double form = psigma_form(w);
  r.dF = -(m + 1.0) * form;
  if (!(r.dF < 0.0)) throw DiagnosticError("F' must be negative along the unnormalized flow");
  r.Q = form * std::pow(r.F, -(n - 2.0 * s) / n);
  r.E = form / r.F;

  const ZonalField Pw = apply_psigma(w);
  const auto& wg = w.grid().weights();
  double k = 0.0;
  for (int j = 0; j < w.size(); ++j) {
    const double wj = w[j];
    const double inner = -Pw[j] + r.E * std::pow(wj, N);
    k += wg[j] * std::pow(wj, 1.0 - N) * inner * inner;
  }
  r.K_val = k;
  return r;
}

ExtinctionBounds extinction_bounds(const ZonalField& w0) {
  const SphereParams& p = w0.params();
  const double n = p.n(), s = p.sigma();
  const double S = constants(p).sobolev_s;
  const double F0 = volume(w0);
  ExtinctionBounds b;
  b.T_upper = (n + 2.0 * s) * S / (4.0 * s) * std::pow(F0, 2.0 * s / n);
  if (n > 4.0 * s) b.T_lower = (n + 2.0 * s) / (2.0 * n) * F0 / psigma_form(w0);
  return b;
}

namespace {

struct FitEval {
  double l2;
  double amplitude;
};

double l2_inner(const ZonalField& a, const std::vector<double>& b) {
  const auto& w = a.grid().weights();
  double sum = 0.0;
  for (int j = 0; j < a.size(); ++j) sum += w[j] * a[j] * b[j];
  return sum;
}

}  // namespace

BubbleFit fit_bubble(const ZonalField& v, FitMode mode) {
  const SphereParams& params = v.params();
  const GridPtr& grid = v.grid_ptr();
  const auto& w = grid->weights();
  const double fixed_amp = steady_amplitude(params);
  const int M = v.size();
  std::vector<double> shape(M);

  auto profile = [&](double x) {
    const BubbleParams bp{std::exp(x), 1.0};
    for (int j = 0; j < M; ++j) shape[j] = bubble_value(params, bp, grid->nodes()[j]);
  };
  auto evaluate = [&](double x) {
    profile(x);
    double amp = fixed_amp;
    if (mode == FitMode::FreeAmplitude) amp = l2_inner(v, shape) / l2_inner(ZonalField(grid, shape), shape);
    double sum = 0.0;
    for (int j = 0; j < M; ++j) {
      const double d = v[j] - amp * shape[j];
      sum += w[j] * d * d;
    }
    return FitEval{std::sqrt(sum), amp};
  };

  const double lo = std::log(1e-3), hi = std::log(1e3);
  constexpr int kScan = 240;
  const double h = (hi - lo) / kScan;
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double val = evaluate(lo + i * h).l2;
    if (val < best_val) {
      best_val = val;
      best = i;
    }
  }

  double a = lo + std::max(best - 1, 0) * h;
  double b = lo + std::min(best + 1, kScan) * h;
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = evaluate(c).l2, fd = evaluate(d).l2;
  while (b - a > 1e-12) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = evaluate(c).l2;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = evaluate(d).l2;
    }
  }
  const double x = 0.5 * (a + b);
  const FitEval at = evaluate(x);

  BubbleFit fit{};
  fit.lambda_hat = std::exp(x);
  fit.amplitude = at.amplitude;
  fit.residual_l2 = at.l2;
  double sup = 0.0;
  for (int j = 0; j < M; ++j) sup = std::max(sup, std::abs(v[j] - at.amplitude * shape[j]));
  fit.residual_sup = sup;
  fit.at_boundary = (x - lo) < 1e-6 || (hi - x) < 1e-6;
  return fit;
}

DeficitReport deficits(const ZonalField& v, double tol) {
  const SphereParams& p = v.params();
  const double n = p.n(), s = p.sigma(), N = p.big_n();
  const double S = constants(p).sobolev_s;
  const double vol = volume(v);

  DeficitReport r{};
  r.sobolev_deficit = S * psigma_form(v) - std::pow(vol, (n - 2.0 * s) / n);
  const ZonalField psi = nodal_pow(v, N);
  const double dual = power_integral(psi, 2.0 * n / (n + 2.0 * s));
  r.hls_deficit = S * std::pow(dual, (n + 2.0 * s) / n) - ksigma_form(psi);
  r.remainder_constant = (n + 2.0 * s) / n * (1.0 - std::exp(-n / (2.0 * s))) * S;
  if (n > 4.0 * s) {
    // ||u||_{2*}^{8 sigma/(n - 2 sigma)} = (int v^{N+1})^{4 sigma/n}.
    r.remainder_lhs = r.hls_deficit;
    r.remainder_rhs_bound = r.remainder_constant * std::pow(vol, 4.0 * s / n) * r.sobolev_deficit;
    r.remainder_ok = *r.remainder_lhs <= *r.remainder_rhs_bound + tol;
  }
  return r;
}

DiagRecord diagnose(const ZonalField& field, const DiagSelection& selection) {
  DiagRecord r;
  r.volume = volume(field);
  r.S_func = functional_S(field);
  r.harnack_ratio = harnack_ratio(field);
  r.r_sigma = sigma_curvature_avg(field);
  if (selection.energy_J) r.J = functional_J(field);
  if (selection.extinction_FH) {
    r.F = r.volume;
    const ZonalField psi = nodal_pow(field, field.params().big_n());
    r.H = functional_H(psi);
    r.H_scale = ksigma_form(psi);
  }
  if (selection.bubble_fit) {
    const BubbleFit fit = fit_bubble(field, selection.fit_mode);
    r.lambda_fit = fit.lambda_hat;
    r.fit_residual = fit.residual_sup;
    r.fit_amplitude = fit.amplitude;
  }
  return r;
}

UniformStream::UniformStream(std::uint64_t seed) : engine_(seed) {}

double UniformStream::next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

ZonalField random_trial_field(const GridPtr& grid, std::uint64_t seed, double amplitude, double rho, int degree) {
  if (!(amplitude > 0.0)) throw DomainError("trial amplitude must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("coefficient decay rate must lie in (0,1)");
  const int K = grid->degree_max();
  if (degree <= 0 || degree > K) degree = K;
  UniformStream u(seed);
  std::vector<double> c(K + 1, 0.0);
  double decay = 1.0;
  for (int k = 1; k <= degree; ++k) {
    decay *= rho;
    c[k] = (2.0 * u.next() - 1.0) * decay;
  }
  ZonalField f = synthesize(grid, c);
  const double shift = (0.1 * f.max() - f.min()) / 0.9;
  const double c0 = std::sqrt(sphere_area(grid->params().n()));
  c[0] = shift * c0;
  for (double& x : c) x *= amplitude;
  return synthesize(grid, c);
}

}  // namespace fracflow
