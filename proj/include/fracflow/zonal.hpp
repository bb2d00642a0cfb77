#pragma once

// Zonal fields on S^n: Gauss-Jacobi quadrature, the orthonormal Gegenbauer
// transform, and the diagonal operators P_sigma and K^sigma.

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fracflow/specfun.hpp"

namespace fracflow {

class ZonalGrid;
using GridPtr = std::shared_ptr<const ZonalGrid>;

/// Quadrature nodes t_j (latitude cosines), weights for the full S^n
/// measure, and the orthonormal zonal basis G_0..G_K tabulated at the nodes.
/// Immutable once built.
class ZonalGrid {
 public:
  const SphereParams& params() const noexcept { return params_; }
  int degree_max() const noexcept { return degree_max_; }
  int node_count() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  /// Eigenvalues of P_sigma for degrees 0..K.
  const std::vector<double>& multipliers() const noexcept { return multipliers_; }
  /// G_k(t_j) for k <= K.
  double basis(int k, int j) const noexcept { return table_[static_cast<std::size_t>(k) * nodes_.size() + j]; }
  std::span<const double> basis_row(int k) const noexcept {
    return {table_.data() + static_cast<std::size_t>(k) * nodes_.size(), nodes_.size()};
  }

  /// Values G_0(t)..G_degree(t) by the normalized three-term recurrence.
  std::vector<double> basis_at(double t, int degree) const;
  /// Sum_k coeffs[k] G_k(t).
  double evaluate(std::span<const double> coeffs, double t) const;

 private:
  friend GridPtr build_grid(const SphereParams&, int, int);
  ZonalGrid(const SphereParams& params, int degree_max) : params_(params), degree_max_(degree_max) {}

  SphereParams params_;
  int degree_max_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> multipliers_;
  std::vector<double> table_;
  std::vector<double> recurrence_;  // b_k, k = 0..
};

/// Default node count ceil(3(K+1)/2), leaving room for the nodal powers of
/// the flow nonlinearities.
int default_node_count(int degree_max);

/// Builds a grid with K = degree_max and M = node_count Gauss-Jacobi nodes.
/// node_count <= 0 selects default_node_count. Throws GridError when
/// degree_max < 8, node_count < degree_max + 1, or the node solve fails.
GridPtr build_grid(const SphereParams& params, int degree_max, int node_count = 0);

/// A zonal field held by its nodal values; spectral coefficients are computed
/// on first request and cached until the nodal values are mutated.
/// A single instance is not safe for concurrent first access to spectral().
class ZonalField {
 public:
  ZonalField(GridPtr grid, std::vector<double> nodal);

  static ZonalField constant(GridPtr grid, double value);

  const ZonalGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const SphereParams& params() const noexcept { return grid_->params(); }
  int size() const noexcept { return static_cast<int>(nodal_.size()); }

  const std::vector<double>& nodal() const noexcept { return nodal_; }
  double operator[](int j) const noexcept { return nodal_[j]; }
  /// Mutable access; drops the cached coefficients.
  std::vector<double>& mutable_nodal() {
    spectral_.reset();
    return nodal_;
  }

  const std::vector<double>& spectral() const;

  double min() const;
  double max() const;
  /// Evaluates the band-limited expansion at an arbitrary latitude cosine.
  double value_at(double t) const;

 private:
  GridPtr grid_;
  std::vector<double> nodal_;
  mutable std::optional<std::vector<double>> spectral_;
};

std::vector<double> analyze(const ZonalField& field);
ZonalField synthesize(const GridPtr& grid, std::span<const double> coeffs);
/// The basis function G_k sampled on the grid.
ZonalField basis_field(const GridPtr& grid, int k);
/// Truncation to degree K (synthesize o analyze).
ZonalField project(const ZonalField& field);

ZonalField apply_psigma(const ZonalField& field);
ZonalField apply_ksigma(const ZonalField& field);

double integrate(const ZonalField& field);
/// Throws DomainError for p < 1.
double lp_norm(const ZonalField& field, double p);
/// Integral of |field|^p without the 1/p root.
double power_integral(const ZonalField& field, double p);
/// Integral of f P_sigma(f), i.e. sum_k lambda_k c_k^2.
double psigma_form(const ZonalField& field);
/// Integral of f K^sigma(f), i.e. sum_k c_k^2 / lambda_k.
double ksigma_form(const ZonalField& field);

/// Nodal power f^p; meant for positive fields.
ZonalField nodal_pow(const ZonalField& field, double p);
ZonalField operator+(const ZonalField& a, const ZonalField& b);
ZonalField operator-(const ZonalField& a, const ZonalField& b);
ZonalField operator*(double s, const ZonalField& a);
ZonalField operator*(const ZonalField& a, const ZonalField& b);

/// Throws ShapeError unless both fields live on the same grid.
void require_same_grid(const ZonalField& a, const ZonalField& b);

}  // namespace fracflow
