#include "fracflow/zonal.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

#include "fracflow/errors.hpp"

namespace fracflow {

namespace {

// Off-diagonal of the Jacobi matrix for the weight (1 - t^2)^a, a = (n-2)/2.
double recurrence_coeff(double a, int k) {
  const double kk = k;
  return std::sqrt(kk * (kk + 2.0 * a) / ((2.0 * kk + 2.0 * a - 1.0) * (2.0 * kk + 2.0 * a + 1.0)));
}

struct PolyValue {
  double value;
  double derivative;
  double christoffel;  // sum of squares of the lower-degree values
};

// Orthonormal polynomial of degree `degree` and its derivative at t.
PolyValue orthonormal_at(const std::vector<double>& b, double p0, int degree, double t) {
  double prev = 0.0, cur = p0;
  double dprev = 0.0, dcur = 0.0;
  double sum = 0.0;
  for (int k = 0; k < degree; ++k) {
    sum += cur * cur;
    const double next = (t * cur - b[k] * prev) / b[k + 1];
    const double dnext = (cur + t * dcur - b[k] * dprev) / b[k + 1];
    prev = cur;
    cur = next;
    dprev = dcur;
    dcur = dnext;
  }
  return {cur, dcur, sum};
}

}  // namespace

int default_node_count(int degree_max) { return (3 * (degree_max + 1) + 1) / 2; }

GridPtr build_grid(const SphereParams& params, int degree_max, int node_count) {
  if (node_count <= 0) node_count = default_node_count(degree_max);
  if (degree_max < 8) {
    throw GridError("degree_max must be at least 8, got " + std::to_string(degree_max));
  }
  if (node_count < degree_max + 1) {
    throw GridError("node_count must be at least degree_max + 1 (got M=" + std::to_string(node_count) +
                    ", K=" + std::to_string(degree_max) + ")");
  }

  std::shared_ptr<ZonalGrid> grid(new ZonalGrid(params, degree_max));
  const int M = node_count;
  const double a = 0.5 * (params.n() - 2);
  const double vol = sphere_area(params.n());
  const double p0 = 1.0 / std::sqrt(vol);

  const int rec_len = std::max(M, degree_max) + 2;
  grid->recurrence_.assign(rec_len, 0.0);
  for (int k = 1; k < rec_len; ++k) grid->recurrence_[k] = recurrence_coeff(a, k);
  const auto& b = grid->recurrence_;

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(M);
  Eigen::VectorXd sub(std::max(M - 1, 0));
  for (int k = 1; k < M; ++k) sub(k - 1) = b[k];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw GridError("tridiagonal eigenvalue solve did not converge");

  std::vector<double> nodes(solver.eigenvalues().data(), solver.eigenvalues().data() + M);
  std::sort(nodes.begin(), nodes.end());

  // Newton polish on the degree-M orthonormal polynomial.
  for (double& t : nodes) {
    double step = 0.0;
    for (int it = 0; it < 8; ++it) {
      const PolyValue pv = orthonormal_at(b, p0, M, t);
      step = pv.value / pv.derivative;
      t -= step;
      if (std::abs(step) <= 1e-16) break;
    }
    if (!std::isfinite(t) || std::abs(step) > 1e-10 || std::abs(t) >= 1.0) {
      throw GridError("Gauss-Jacobi node refinement did not converge");
    }
  }
  for (int j = 0; j < M / 2; ++j) {
    const double sym = 0.5 * (nodes[M - 1 - j] - nodes[j]);
    nodes[j] = -sym;
    nodes[M - 1 - j] = sym;
  }
  if (M % 2 == 1) nodes[M / 2] = 0.0;

  std::vector<double> weights(M);
  for (int j = 0; j < M; ++j) {
    weights[j] = 1.0 / orthonormal_at(b, p0, M, nodes[j]).christoffel;
  }
  for (int j = 0; j < M / 2; ++j) {
    const double sym = 0.5 * (weights[j] + weights[M - 1 - j]);
    weights[j] = sym;
    weights[M - 1 - j] = sym;
  }

  grid->nodes_ = std::move(nodes);
  grid->weights_ = std::move(weights);

  grid->multipliers_.resize(degree_max + 1);
  for (int k = 0; k <= degree_max; ++k) grid->multipliers_[k] = multiplier(params, k);

  grid->table_.assign(static_cast<std::size_t>(degree_max + 1) * M, 0.0);
  for (int j = 0; j < M; ++j) {
    const auto row = grid->basis_at(grid->nodes_[j], degree_max);
    for (int k = 0; k <= degree_max; ++k) grid->table_[static_cast<std::size_t>(k) * M + j] = row[k];
  }
  return grid;
}

std::vector<double> ZonalGrid::basis_at(double t, int degree) const {
  const double a = 0.5 * (params_.n() - 2);
  std::vector<double> out(degree + 1);
  out[0] = 1.0 / std::sqrt(sphere_area(params_.n()));
  double b_prev = 0.0;
  for (int k = 0; k < degree; ++k) {
    const double b_next = k + 1 < static_cast<int>(recurrence_.size()) ? recurrence_[k + 1]
                                                                         : recurrence_coeff(a, k + 1);
    const double lower = k > 0 ? out[k - 1] : 0.0;
    out[k + 1] = (t * out[k] - b_prev * lower) / b_next;
    b_prev = b_next;
  }
  return out;
}

double ZonalGrid::evaluate(std::span<const double> coeffs, double t) const {
  if (coeffs.empty()) return 0.0;
  const auto g = basis_at(t, static_cast<int>(coeffs.size()) - 1);
  double sum = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) sum += coeffs[k] * g[k];
  return sum;
}

ZonalField::ZonalField(GridPtr grid, std::vector<double> nodal) : grid_(std::move(grid)), nodal_(std::move(nodal)) {
  if (!grid_) throw ShapeError("field requires a grid");
  if (static_cast<int>(nodal_.size()) != grid_->node_count()) {
    throw ShapeError("nodal length " + std::to_string(nodal_.size()) + " does not match node count " +
                     std::to_string(grid_->node_count()));
  }
}

ZonalField ZonalField::constant(GridPtr grid, double value) {
  const int M = grid->node_count();
  return ZonalField(std::move(grid), std::vector<double>(M, value));
}

const std::vector<double>& ZonalField::spectral() const {
  if (!spectral_) spectral_ = analyze(*this);
  return *spectral_;
}

double ZonalField::min() const { return *std::min_element(nodal_.begin(), nodal_.end()); }
double ZonalField::max() const { return *std::max_element(nodal_.begin(), nodal_.end()); }

double ZonalField::value_at(double t) const { return grid_->evaluate(spectral(), t); }

std::vector<double> analyze(const ZonalField& field) {
  const ZonalGrid& g = field.grid();
  const int M = g.node_count();
  const int K = g.degree_max();
  std::vector<double> weighted(M);
  for (int j = 0; j < M; ++j) weighted[j] = g.weights()[j] * field[j];
  std::vector<double> coeffs(K + 1);
  for (int k = 0; k <= K; ++k) {
    const auto row = g.basis_row(k);
    double sum = 0.0;
    for (int j = 0; j < M; ++j) sum += row[j] * weighted[j];
    coeffs[k] = sum;
  }
  return coeffs;
}

ZonalField synthesize(const GridPtr& grid, std::span<const double> coeffs) {
  const int K = grid->degree_max();
  if (static_cast<int>(coeffs.size()) != K + 1) {
    throw ShapeError("coefficient length " + std::to_string(coeffs.size()) + " does not match K+1 = " +
                     std::to_string(K + 1));
  }
  const int M = grid->node_count();
  std::vector<double> nodal(M, 0.0);
  for (int k = 0; k <= K; ++k) {
    const auto row = grid->basis_row(k);
    const double c = coeffs[k];
    if (c == 0.0) continue;
    for (int j = 0; j < M; ++j) nodal[j] += c * row[j];
  }
  return ZonalField(grid, std::move(nodal));
}

ZonalField basis_field(const GridPtr& grid, int k) {
  if (k < 0 || k > grid->degree_max()) throw ShapeError("basis degree outside 0..K");
  const auto row = grid->basis_row(k);
  return ZonalField(grid, std::vector<double>(row.begin(), row.end()));
}

ZonalField project(const ZonalField& field) { return synthesize(field.grid_ptr(), field.spectral()); }

namespace {

ZonalField scale_spectrum(const ZonalField& field, bool inverse) {
  const auto& lam = field.grid().multipliers();
  std::vector<double> c = field.spectral();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = inverse ? c[k] / lam[k] : c[k] * lam[k];
  return synthesize(field.grid_ptr(), c);
}

}  // namespace

ZonalField apply_psigma(const ZonalField& field) { return scale_spectrum(field, false); }
ZonalField apply_ksigma(const ZonalField& field) { return scale_spectrum(field, true); }

double integrate(const ZonalField& field) {
  const auto& w = field.grid().weights();
  double sum = 0.0;
  for (int j = 0; j < field.size(); ++j) sum += w[j] * field[j];
  return sum;
}

double power_integral(const ZonalField& field, double p) {
  const auto& w = field.grid().weights();
  double sum = 0.0;
  for (int j = 0; j < field.size(); ++j) sum += w[j] * std::pow(std::abs(field[j]), p);
  return sum;
}

double lp_norm(const ZonalField& field, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_norm requires p >= 1");
  return std::pow(power_integral(field, p), 1.0 / p);
}

double psigma_form(const ZonalField& field) {
  const auto& c = field.spectral();
  const auto& lam = field.grid().multipliers();
  double sum = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) sum += lam[k] * c[k] * c[k];
  return sum;
}

double ksigma_form(const ZonalField& field) {
  const auto& c = field.spectral();
  const auto& lam = field.grid().multipliers();
  double sum = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) sum += c[k] * c[k] / lam[k];
  return sum;
}

void require_same_grid(const ZonalField& a, const ZonalField& b) {
  if (a.grid_ptr() != b.grid_ptr()) throw ShapeError("fields live on different grids");
}

ZonalField nodal_pow(const ZonalField& field, double p) {
  std::vector<double> out(field.nodal());
  for (double& x : out) x = std::pow(x, p);
  return ZonalField(field.grid_ptr(), std::move(out));
}

namespace {

template <typename Op>
ZonalField combine(const ZonalField& a, const ZonalField& b, Op op) {
  require_same_grid(a, b);
  std::vector<double> out(a.nodal());
  for (int j = 0; j < a.size(); ++j) out[j] = op(out[j], b[j]);
  return ZonalField(a.grid_ptr(), std::move(out));
}

}  // namespace

ZonalField operator+(const ZonalField& a, const ZonalField& b) {
  return combine(a, b, [](double x, double y) { return x + y; });
}
ZonalField operator-(const ZonalField& a, const ZonalField& b) {
  return combine(a, b, [](double x, double y) { return x - y; });
}
ZonalField operator*(const ZonalField& a, const ZonalField& b) {
  return combine(a, b, [](double x, double y) { return x * y; });
}
ZonalField operator*(double s, const ZonalField& a) {
  std::vector<double> out(a.nodal());
  for (double& x : out) x *= s;
  return ZonalField(a.grid_ptr(), std::move(out));
}

}  // namespace fracflow
