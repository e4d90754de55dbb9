#include "cbsforge/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include "cbsforge/cbs_functional.hpp"
#include "cbsforge/rng.hpp"
#include "cbsforge/search.hpp"

namespace cbsforge {

DenseOperator::DenseOperator(Eigen::MatrixXcd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) fail(ErrorCode::shape_mismatch, "operator must be square");
}

bool DenseOperator::is_hermitian(double tol) const {
  return (m_ - m_.adjoint()).norm() <= tol;
}

ProductBasisLayout::ProductBasisLayout(DimVector dims, std::size_t budget)
    : dims_(std::move(dims)), pair_strides_(dims_.rank()) {
  for (std::size_t k = dims_.rank(); k-- > 0;) {
    pair_strides_[k] = dim_;
    const std::size_t d2 = dims_[k] * dims_[k];
    if (dim_ > budget / d2)
      fail(ErrorCode::resource_exceeded, "dense operator dimension for " + dims_.to_string() +
                                             " exceeds budget " + std::to_string(budget));
    dim_ *= d2;
  }
}

std::size_t ProductBasisLayout::offset(std::size_t i_offset, std::size_t j_offset) const {
  std::size_t out = 0;
  for (std::size_t k = dims_.rank(); k-- > 0;) {
    const std::size_t d = dims_[k];
    out += ((i_offset % d) * d + (j_offset % d)) * pair_strides_[k];
    i_offset /= d;
    j_offset /= d;
  }
  return out;
}

DenseOperator flip_operator(std::size_t d) {
  if (d == 0) fail(ErrorCode::domain_error, "flip operator requires d >= 1");
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) f(i * d + j, j * d + i) = 1.0;
  return DenseOperator(std::move(f));
}

DenseOperator werner_state(std::size_t d, double t, DomainPolicy policy) {
  if (!(t >= -1.0 && t <= 1.0)) {
    const std::string msg = "Werner parameter t = " + std::to_string(t) + " outside [-1, 1]";
    if (policy == DomainPolicy::strict) fail(ErrorCode::domain_error, msg);
    std::cerr << "warning: " << msg << '\n';
  }
  const auto id = Eigen::MatrixXcd::Identity(d * d, d * d);
  return DenseOperator(id - t * flip_operator(d).matrix());
}

DenseOperator max_entangled_projector(std::size_t d) {
  if (d == 0) fail(ErrorCode::domain_error, "projector requires d >= 1");
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d * d, d * d);
  const double w = 1.0 / static_cast<double>(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) p(i * d + i, j * d + j) = w;
  return DenseOperator(std::move(p));
}

DenseOperator isotropic_operator(std::size_t d, double t) {
  const auto id = Eigen::MatrixXcd::Identity(d * d, d * d);
  return DenseOperator(id - (t * static_cast<double>(d)) * max_entangled_projector(d).matrix());
}

DenseOperator sigma_crit(const DimVector& dims, std::size_t budget) {
  const ProductBasisLayout layout(dims, budget);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(1, 1);
  for (std::size_t k = 0; k < dims.rank(); ++k) {
    // 1 - d P / 2 = 1 - t d P at t = 1/2.
    const Eigen::MatrixXcd factor = isotropic_operator(dims[k], 0.5).matrix();
    acc = Eigen::kroneckerProduct(acc, factor).eval();
  }
  return DenseOperator(std::move(acc));
}

Eigen::VectorXcd rank2_vector(const SchmidtRank2Spec& spec, std::size_t budget) {
  const DimVector& dims = spec.x.shape();
  require_same_shape(spec.y.shape(), dims, "rank2_vector");
  require_same_shape(spec.u.shape(), dims, "rank2_vector");
  require_same_shape(spec.v.shape(), dims, "rank2_vector");
  const ProductBasisLayout layout(dims, budget);
  const std::size_t total = dims.total();
  Eigen::VectorXcd psi(layout.dim());
  for (std::size_t a = 0; a < total; ++a)
    for (std::size_t b = 0; b < total; ++b)
      psi(layout.offset(a, b)) = spec.x[a] * spec.u[b] + spec.y[a] * spec.v[b];
  return psi;
}

Eigen::MatrixXcd coefficient_matrix(const Eigen::VectorXcd& psi, const DimVector& dims) {
  const ProductBasisLayout layout(dims, static_cast<std::size_t>(psi.size()));
  if (static_cast<std::size_t>(psi.size()) != layout.dim())
    fail(ErrorCode::shape_mismatch, "vector length does not match prod d_k^2");
  const std::size_t total = dims.total();
  Eigen::MatrixXcd c(total, total);
  for (std::size_t a = 0; a < total; ++a)
    for (std::size_t b = 0; b < total; ++b) c(a, b) = psi(layout.offset(a, b));
  return c;
}

std::size_t schmidt_rank(const Eigen::VectorXcd& psi, const DimVector& dims,
                         double threshold) {
  const Eigen::MatrixXcd c = coefficient_matrix(psi, dims);
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(c);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0)
    fail(ErrorCode::domain_error, "Schmidt rank of the zero vector is undefined");
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > threshold * sv(0)) ++rank;
  return rank;
}

double expectation(const DenseOperator& op, const Eigen::VectorXcd& psi) {
  if (op.dim() != static_cast<std::size_t>(psi.size()))
    fail(ErrorCode::shape_mismatch, "operator dimension " + std::to_string(op.dim()) +
                                        " vs vector length " + std::to_string(psi.size()));
  const Complex value = psi.dot(op.matrix() * psi);  // dot conjugates the left side
  const double bound = 1e-12 * op.matrix().norm() * psi.squaredNorm();
  if (std::fabs(value.imag()) > bound)
    fail(ErrorCode::numerical_integrity,
         "imaginary residue " + std::to_string(value.imag()) + " in <psi|op|psi>");
  return value.real();
}

OracleReport phi_oracle_check(const SchmidtRank2Spec& spec, double tol) {
  OracleReport r;
  const DimVector& dims = spec.x.shape();
  r.expectation = expectation(sigma_crit(dims), rank2_vector(spec));
  const PhiBreakdown b = phi(CbsInput({spec.x, spec.y}, {spec.u, spec.v}));
  r.phi = b.total;
  r.cancellation_mass = b.cancellation_mass;
  r.deviation = relative_deviation(r.expectation, r.phi,
                                   std::max(r.cancellation_mass, std::fabs(r.expectation)));
  r.pass = r.deviation <= tol;
  return r;
}

SchmidtRank2Spec random_rank2_spec(const DimVector& dims, std::uint64_t seed) {
  return {random_hypermatrix(dims, derive_seed(seed, 0), Distribution::complex_gaussian),
          random_hypermatrix(dims, derive_seed(seed, 1), Distribution::complex_gaussian),
          random_hypermatrix(dims, derive_seed(seed, 2), Distribution::complex_gaussian),
          random_hypermatrix(dims, derive_seed(seed, 3), Distribution::complex_gaussian)};
}

SweepRecord werner_threshold_sweep(std::size_t d, const std::vector<double>& t_grid,
                                   std::size_t restarts, std::uint64_t seed,
                                   std::size_t max_iters) {
  if (d < 2) fail(ErrorCode::domain_error, "Werner sweep requires d >= 2");
  SweepRecord rec;
  rec.d = d;
  const DimVector dims{d};
  bool have_nonneg = false;
  bool have_neg = false;
  for (std::size_t g = 0; g < t_grid.size(); ++g) {
    SearchConfig cfg;
    cfg.dims = dims;
    cfg.restarts = restarts;
    cfg.max_iters = max_iters;
    cfg.seed = derive_seed(seed, g);
    const double t = t_grid[g];
    const auto res = minimize_expectation(isotropic_operator(d, t), dims, cfg);
    rec.points.push_back({t, res.best_value});
  }
  std::vector<SweepPoint> sorted = rec.points;
  std::sort(sorted.begin(), sorted.end(),
            [](const SweepPoint& a, const SweepPoint& b) { return a.t < b.t; });
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (k > 0 && sorted[k].minimum > sorted[k - 1].minimum + 1e-8)
      rec.monotone_non_increasing = false;
    if (sorted[k].minimum >= -1e-8) {
      rec.last_nonnegative_t = sorted[k].t;
      have_nonneg = true;
    } else if (!have_neg) {
      rec.first_negative_t = sorted[k].t;
      have_neg = true;
    }
  }
  rec.bracketed = have_nonneg && have_neg && rec.last_nonnegative_t < rec.first_negative_t;
  return rec;
}

}  // namespace cbsforge
