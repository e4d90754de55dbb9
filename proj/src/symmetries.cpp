#include "cbsforge/symmetries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "cbsforge/rng.hpp"

namespace cbsforge {

AxisPermutation::AxisPermutation(std::vector<std::size_t> pi) : pi_(std::move(pi)) {
  std::vector<bool> seen(pi_.size(), false);
  for (std::size_t v : pi_) {
    if (v < 1 || v > pi_.size() || seen[v - 1])
      fail(ErrorCode::domain_error, "axis permutation is not a bijection of I_m");
    seen[v - 1] = true;
  }
}

AxisPermutation AxisPermutation::identity(std::size_t m) {
  std::vector<std::size_t> pi(m);
  for (std::size_t k = 0; k < m; ++k) pi[k] = k + 1;
  return AxisPermutation(std::move(pi));
}

AxisPermutation AxisPermutation::random(std::size_t m, std::uint64_t seed) {
  std::vector<std::size_t> pi = identity(m).values();
  Rng rng(seed);
  for (std::size_t k = m; k > 1; --k) {
    const auto r = static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(k - 1)));
    std::swap(pi[k - 1], pi[r]);
  }
  return AxisPermutation(std::move(pi));
}

AxisPermutation AxisPermutation::inverse() const {
  std::vector<std::size_t> inv(pi_.size());
  for (std::size_t k = 0; k < pi_.size(); ++k) inv[pi_[k] - 1] = k + 1;
  return AxisPermutation(std::move(inv));
}

UnitaryMatrix::UnitaryMatrix(Eigen::MatrixXcd u, double tol) : u_(std::move(u)) {
  if (u_.rows() != u_.cols() || u_.rows() == 0)
    fail(ErrorCode::domain_error, "unitary matrix must be square and non-empty");
  const auto id = Eigen::MatrixXcd::Identity(u_.rows(), u_.cols());
  const double err = (u_ * u_.adjoint() - id).norm();
  if (!(err <= tol))
    fail(ErrorCode::domain_error, "matrix is not unitary: ||UU^+ - I|| = " + std::to_string(err));
}

UnitaryMatrix UnitaryMatrix::conjugate() const { return UnitaryMatrix(u_.conjugate()); }

MixingMatrix::MixingMatrix(Eigen::MatrixXcd lambda) : lambda_(std::move(lambda)) {
  if (lambda_.rows() != lambda_.cols() || lambda_.rows() == 0)
    fail(ErrorCode::domain_error, "mixing matrix must be square and non-empty");
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(lambda_);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  cond_ = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  if (!(cond_ <= max_condition))
    fail(ErrorCode::domain_error,
         "mixing matrix condition number " + std::to_string(cond_) + " exceeds 1e6");
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lambda_.transpose());
  beta_ = lu.solve(Eigen::MatrixXcd::Identity(lambda_.rows(), lambda_.cols()));
}

MixingMatrix MixingMatrix::random(std::size_t n, std::uint64_t seed, double max_cond) {
  for (std::uint64_t attempt = 0; attempt < 10000; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    Eigen::MatrixXcd lambda(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) lambda(r, c) = rng.complex_normal();
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(lambda);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) > 0.0 && sv(0) / sv(sv.size() - 1) <= max_cond)
      return MixingMatrix(std::move(lambda));
  }
  fail(ErrorCode::domain_error, "no mixing matrix within the condition bound");
}

Hypermatrix permute_axes(const Hypermatrix& x, const AxisPermutation& pi) {
  const DimVector& shape = x.shape();
  const std::size_t m = shape.rank();
  if (pi.size() != m)
    fail(ErrorCode::shape_mismatch, "permutation length differs from hypermatrix rank");
  const AxisPermutation inv = pi.inverse();
  std::vector<std::size_t> dims(m);
  for (std::size_t k = 1; k <= m; ++k) dims[k - 1] = shape[inv(k) - 1];
  const DimVector out_shape(std::move(dims));
  Hypermatrix out(out_shape);
  MultiIndex src{std::vector<std::size_t>(m)};
  for (std::size_t a = 0; a < out.size(); ++a) {
    const MultiIndex dst = multi_index(out_shape, a);
    for (std::size_t k = 1; k <= m; ++k) src[k - 1] = dst[pi(k) - 1];
    out[a] = x.at(src);
  }
  return out;
}

CbsInput permute_axes(const CbsInput& input, const AxisPermutation& pi) {
  std::vector<Hypermatrix> xs, us;
  for (const auto& x : input.xs()) xs.push_back(permute_axes(x, pi));
  for (const auto& u : input.us()) us.push_back(permute_axes(u, pi));
  return CbsInput(std::move(xs), std::move(us));
}

Hypermatrix drop_unit_axis(const Hypermatrix& x, std::size_t s) {
  const DimVector& shape = x.shape();
  if (s < 1 || s > shape.rank())
    fail(ErrorCode::index_error, "axis " + std::to_string(s) + " outside I_m");
  if (shape[s - 1] != 1)
    fail(ErrorCode::precondition_failed,
         "drop_unit_axis requires d_s = 1, got " + std::to_string(shape[s - 1]));
  if (shape.rank() == 1)
    fail(ErrorCode::precondition_failed, "cannot drop the only axis (m = 0 unsupported)");
  std::vector<std::size_t> dims = shape.dims();
  dims.erase(dims.begin() + static_cast<std::ptrdiff_t>(s - 1));
  // Row-major storage is unchanged by removing an axis of extent 1.
  return Hypermatrix(DimVector(std::move(dims)),
                     std::vector<Complex>(x.entries().begin(), x.entries().end()));
}

CbsInput drop_unit_axis(const CbsInput& input, std::size_t s) {
  std::vector<Hypermatrix> xs, us;
  for (const auto& x : input.xs()) xs.push_back(drop_unit_axis(x, s));
  for (const auto& u : input.us()) us.push_back(drop_unit_axis(u, s));
  return CbsInput(std::move(xs), std::move(us));
}

Hypermatrix apply_unitary(const Hypermatrix& x, const UnitaryMatrix& u, std::size_t s) {
  const DimVector& shape = x.shape();
  if (s < 1 || s > shape.rank())
    fail(ErrorCode::index_error, "axis " + std::to_string(s) + " outside I_m");
  const std::size_t d = shape[s - 1];
  if (u.dim() != d)
    fail(ErrorCode::shape_mismatch, "unitary of size " + std::to_string(u.dim()) +
                                        " acting on axis of extent " + std::to_string(d));
  const std::size_t stride = shape.strides()[s - 1];
  const std::size_t outer = shape.total() / (d * stride);
  const auto& mat = u.matrix();
  Hypermatrix out(shape);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t inner = 0; inner < stride; ++inner) {
      const std::size_t base = o * d * stride + inner;
      for (std::size_t r = 0; r < d; ++r) {
        Complex acc{};
        for (std::size_t c = 0; c < d; ++c) acc += mat(r, c) * x[base + c * stride];
        out[base + r * stride] = acc;
      }
    }
  }
  return out;
}

CbsInput apply_unitary(const CbsInput& input, const UnitaryMatrix& u, std::size_t s) {
  const UnitaryMatrix uc = u.conjugate();
  std::vector<Hypermatrix> xs, us;
  for (const auto& x : input.xs()) xs.push_back(apply_unitary(x, u, s));
  for (const auto& v : input.us()) us.push_back(apply_unitary(v, uc, s));
  return CbsInput(std::move(xs), std::move(us));
}

UnitaryMatrix random_unitary(std::size_t d, std::uint64_t seed) {
  if (d == 0) fail(ErrorCode::domain_error, "random_unitary requires d >= 1");
  Rng rng(seed);
  Eigen::MatrixXcd g(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) g(r, c) = rng.complex_normal();
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (std::size_t k = 0; k < d; ++k) {
    const Complex rkk = r(k, k);
    const double mag = std::abs(rkk);
    q.col(k) *= mag > 0.0 ? rkk / mag : Complex(1.0, 0.0);
  }
  return UnitaryMatrix(std::move(q));
}

CbsInput apply_mixing(const CbsInput& input, const MixingMatrix& mix) {
  const std::size_t n = input.n();
  if (mix.n() != n)
    fail(ErrorCode::shape_mismatch, "mixing matrix is " + std::to_string(mix.n()) +
                                        "x" + std::to_string(mix.n()) + " but n = " +
                                        std::to_string(n));
  std::vector<Hypermatrix> xs(n, Hypermatrix(input.shape()));
  std::vector<Hypermatrix> us(n, Hypermatrix(input.shape()));
  const std::size_t size = input.shape().total();
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex a = mix.lambda()(p, k);
      const Complex b = mix.beta()(p, k);
      for (std::size_t e = 0; e < size; ++e) {
        xs[p][e] += a * input.x(k)[e];
        us[p][e] += b * input.u(k)[e];
      }
    }
  }
  return CbsInput(std::move(xs), std::move(us));
}

}  // namespace cbsforge
