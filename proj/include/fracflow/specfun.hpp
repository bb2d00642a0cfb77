#pragma once

// Gamma-function machinery and the closed-form constants attached to a
// choice of sphere dimension n and operator order sigma.

namespace fracflow {

/// The pair (n, sigma) describing the round sphere S^n and the order 2*sigma
/// of the conformal operator. Construction enforces 0 < sigma < 1, n >= 2
/// and n > 2*sigma.
class SphereParams {
 public:
  SphereParams(int n, double sigma);

  int n() const noexcept { return n_; }
  double sigma() const noexcept { return sigma_; }

  /// Fast-diffusion exponent m = (n - 2 sigma) / (n + 2 sigma).
  double m() const noexcept { return (n_ - 2.0 * sigma_) / (n_ + 2.0 * sigma_); }
  /// Critical power N = 1/m.
  double big_n() const noexcept { return (n_ + 2.0 * sigma_) / (n_ - 2.0 * sigma_); }

  friend bool operator==(const SphereParams&, const SphereParams&) = default;

 private:
  int n_;
  double sigma_;
};

struct ConstantSet {
  double m;
  double bigN;
  double psigma1;          ///< P_sigma(1) = Gamma(n/2+sigma)/Gamma(n/2-sigma)
  double c_pos;            ///< Riesz-potential kernel constant c_{n,sigma}
  double c_neg;            ///< singular-integral kernel constant c_{n,-sigma}
  double vol_sn;           ///< |S^n|
  double sobolev_s;        ///< sharp Sobolev / HLS constant S_{n,sigma}
  double c_steady;         ///< constant steady state of the rescaled flow
  double k_profile;        ///< extinction-profile constant (self-consistent value)
  double k_profile_printed;///< the constant in the form 2^{(n-2)/2}((1-m)P(1))^{(n-2s)/(4s)}
  double kappa2;           ///< upper barrier for min v along extinction orbits
  double inv_one_minus_m;  ///< (n + 2 sigma) / (4 sigma)
};

/// ln Gamma(x) for x > 0. Throws DomainError otherwise.
double log_gamma(double x);

/// Area of the unit sphere S^d embedded in R^{d+1}; d = 0 gives 2.
double sphere_area(int d);

/// Eigenvalue of P_sigma on spherical harmonics of degree k,
/// Gamma(k + n/2 + sigma) / Gamma(k + n/2 - sigma).
double multiplier(const SphereParams& params, int k);

ConstantSet constants(const SphereParams& params);

}  // namespace fracflow
