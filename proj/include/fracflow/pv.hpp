#pragma once

// Independent realization of P_sigma as P_sigma(1) v + c_{n,-sigma} times the
// principal-value integral of (v(xi) - v(zeta)) / |xi - zeta|^{n + 2 sigma}.
// Slow; used only to cross-check the spectral operator.

#include "fracflow/zonal.hpp"

namespace fracflow {

struct PvResult {
  ZonalField value;
  /// Largest per-node extrapolation error estimate, relative to sup |value|.
  double error_estimate;
};

/// Evaluates the singular-integral form at every node. Throws AccuracyError
/// when the estimated relative error exceeds tol.
PvResult apply_psigma_pv_detailed(const ZonalField& field, double tol);

ZonalField apply_psigma_pv(const ZonalField& field, double tol);

/// The kernel |xi - zeta|^{-(n+2 sigma)} integrated over the (n-1)-sphere of
/// points zeta at polar angle theta_prime, with xi at polar angle theta.
double azimuthal_kernel(const SphereParams& params, double theta, double theta_prime);

}  // namespace fracflow
