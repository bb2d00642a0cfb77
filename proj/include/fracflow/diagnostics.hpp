#pragma once

// Functionals, bounds, bubble fits and inequality deficits evaluated on single
// fields. Trajectory-level checks live in monitors.hpp.

#include <cstdint>
#include <optional>
#include <random>

#include "fracflow/zonal.hpp"

namespace fracflow {

/// J(v) = 1/2 int v P v - int v^{N+1} / ((1-m)(N+1)).
double functional_J(const ZonalField& v);
/// Sobolev quotient int v P v / (int v^{N+1})^{2/(N+1)}. Throws DomainError
/// for the zero field.
double functional_S(const ZonalField& v);
/// F = int w^{N+1}.
double functional_F(const ZonalField& w);
/// H = int psi K psi - S_{n,sigma} (int psi^{2n/(n+2 sigma)})^{(n+2 sigma)/n}.
double functional_H(const ZonalField& psi);
/// max/min over the nodes. Throws DomainError when min <= 0.
double harnack_ratio(const ZonalField& v);
/// int v^{N+1}.
double volume(const ZonalField& v);

struct QekRecord {
  double F;
  double dF;     ///< -(m+1) int w P w
  double Q;
  double E;
  double K_val;  ///< int w^{1-N} (-P w + E w^N)^2
};

/// Q, E and K of the extinction analysis at one state w of the unnormalized
/// flow. Throws DiagnosticError when dF >= 0.
QekRecord qek(const ZonalField& w);

struct ExtinctionBounds {
  std::optional<double> T_lower;  ///< present only when n > 4 sigma
  double T_upper;
};

ExtinctionBounds extinction_bounds(const ZonalField& w0);

enum class FitMode {
  FixedSteady,    ///< amplitude pinned to the steady value k^m
  FreeAmplitude,  ///< amplitude chosen by least squares for each lambda
};

struct BubbleFit {
  double lambda_hat;
  double amplitude;
  double residual_sup;
  double residual_l2;
  bool at_boundary;  ///< minimizer sits on the edge of [1e-3, 1e3]
};

/// Minimizes the L2 distance from v to the bubble family over lambda in
/// [1e-3, 1e3] (scan in ln lambda, then golden section).
BubbleFit fit_bubble(const ZonalField& v, FitMode mode = FitMode::FixedSteady);

struct DeficitReport {
  double sobolev_deficit;
  double hls_deficit;
  std::optional<double> remainder_lhs;
  std::optional<double> remainder_rhs_bound;
  std::optional<bool> remainder_ok;
  double remainder_constant;  ///< (n+2s)/n (1 - e^{-n/(2s)}) S_{n,sigma}
};

/// Sobolev and HLS deficits of v and the remainder inequality between them
/// (the latter only when n > 4 sigma). remainder_ok allows an absolute slack tol.
DeficitReport deficits(const ZonalField& v, double tol = 1e-9);

struct DiagRecord {
  std::optional<double> J;
  double S_func = 0.0;
  std::optional<double> F;
  std::optional<double> H;
  std::optional<double> H_scale;  ///< int psi K psi: the size of the terms whose difference is H
  double harnack_ratio = 1.0;
  double volume = 0.0;
  double r_sigma = 0.0;
  std::optional<double> lambda_fit;
  std::optional<double> fit_residual;
  std::optional<double> fit_amplitude;
};

struct DiagSelection {
  bool energy_J = false;
  bool extinction_FH = false;
  bool bubble_fit = false;
  FitMode fit_mode = FitMode::FixedSteady;
};

DiagRecord diagnose(const ZonalField& field, const DiagSelection& selection);

/// Deterministic uniform draw in [0, 1) from 53 bits of a 64-bit Mersenne
/// Twister stream; independent of the standard library's distributions.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed);
  double next();

 private:
  std::mt19937_64 engine_;
};

/// Positive zonal trial field: c_k = u_k rho^k (u_k uniform in [-1, 1]) for
/// 1 <= k <= degree, plus the constant making min = 0.1 max, times amplitude.
/// degree <= 0 selects the grid's K.
ZonalField random_trial_field(const GridPtr& grid, std::uint64_t seed, double amplitude = 1.0, double rho = 0.7,
                              int degree = 0);

}  // namespace fracflow
