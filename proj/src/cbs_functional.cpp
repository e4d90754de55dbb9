#include "cbsforge/cbs_functional.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "cbsforge/summation.hpp"

namespace cbsforge {

CbsInput::CbsInput(std::vector<Hypermatrix> xs, std::vector<Hypermatrix> us)
    : xs_(std::move(xs)), us_(std::move(us)) {
  if (xs_.empty()) fail(ErrorCode::domain_error, "CbsInput requires n >= 1");
  if (xs_.size() != us_.size())
    fail(ErrorCode::shape_mismatch, "CbsInput: " + std::to_string(xs_.size()) +
                                        " x-blocks but " + std::to_string(us_.size()) +
                                        " u-blocks");
  for (std::size_t k = 0; k < xs_.size(); ++k) {
    require_same_shape(xs_[k].shape(), xs_[0].shape(), "CbsInput");
    require_same_shape(us_[k].shape(), xs_[0].shape(), "CbsInput");
  }
}

double phi_work_estimate(const DimVector& shape, std::size_t n) {
  const double total = static_cast<double>(shape.total());
  return static_cast<double>(n) * std::ldexp(1.0, static_cast<int>(shape.rank())) * total *
         total;
}

double relative_deviation(double a, double b, double scale) {
  return std::fabs(a - b) / std::max(std::fabs(scale), std::numeric_limits<double>::min());
}

PhiEvaluator::PhiEvaluator(DimVector shape, std::size_t n, double budget)
    : shape_(std::move(shape)), n_(n) {
  if (n_ == 0) fail(ErrorCode::domain_error, "Phi requires n >= 1");
  const double work = phi_work_estimate(shape_, n_);
  if (work > budget)
    fail(ErrorCode::resource_exceeded,
         "Phi work estimate " + std::to_string(work) + " exceeds budget " +
             std::to_string(budget) + " for shape " + shape_.to_string());

  const std::size_t m = shape_.rank();
  const std::size_t total = shape_.total();
  const auto strides = shape_.strides();

  std::vector<std::size_t> digits(m);
  for (const IndexSubset& q : subsets_by_cardinality(m)) {
    Plan plan;
    plan.subset = q;
    plan.weight = std::pow(-1.0 / static_cast<double>(n_), static_cast<double>(q.size()));

    std::vector<std::size_t> free_axes;
    for (std::size_t k = 0; k < m; ++k)
      if (!q.contains(k + 1)) free_axes.push_back(k);
    for (std::size_t k : free_axes) plan.free_count *= shape_[k];

    plan.i_contracted.resize(total);
    plan.i_free_rank.resize(total);
    for (std::size_t a = 0; a < total; ++a) {
      std::size_t rest = a;
      for (std::size_t k = m; k-- > 0;) {
        digits[k] = rest % shape_[k];
        rest /= shape_[k];
      }
      std::size_t contracted = 0;
      std::size_t rank = 0;
      for (std::size_t k = 0; k < m; ++k) {
        if (q.contains(k + 1))
          contracted += digits[k] * strides[k];
        else
          rank = rank * shape_[k] + digits[k];
      }
      plan.i_contracted[a] = contracted;
      plan.i_free_rank[a] = rank;
    }

    plan.j_free.resize(plan.free_count);
    for (std::size_t r = 0; r < plan.free_count; ++r) {
      std::size_t rest = r;
      std::size_t off = 0;
      for (std::size_t f = free_axes.size(); f-- > 0;) {
        const std::size_t k = free_axes[f];
        off += (rest % shape_[k]) * strides[k];
        rest /= shape_[k];
      }
      plan.j_free[r] = off;
    }
    plans_.push_back(std::move(plan));
  }
}

void PhiEvaluator::check(std::span<const Hypermatrix> xs,
                         std::span<const Hypermatrix> us) const {
  if (xs.size() != n_ || us.size() != n_)
    fail(ErrorCode::shape_mismatch, "Phi evaluator bound to n = " + std::to_string(n_));
  for (std::size_t k = 0; k < n_; ++k) {
    require_same_shape(xs[k].shape(), shape_, "Phi");
    require_same_shape(us[k].shape(), shape_, "Phi");
  }
}

// t[(rank of i_free) * F + (rank of j_free)] =
//   sum over i_Q (with j_Q = i_Q) of sum_k x^(k)_i u^(k)_j
void PhiEvaluator::contract(const Plan& plan, std::span<const Hypermatrix> xs,
                            std::span<const Hypermatrix> us,
                            std::vector<Complex>& t) const {
  const std::size_t f = plan.free_count;
  t.assign(f * f, Complex{});
  const std::size_t total = shape_.total();
  for (std::size_t i = 0; i < total; ++i) {
    Complex* row = t.data() + plan.i_free_rank[i] * f;
    const std::size_t base = plan.i_contracted[i];
    for (std::size_t k = 0; k < n_; ++k) {
      const Complex xi = xs[k][i];
      if (xi == Complex{}) continue;
      const Complex* u = us[k].entries().data();
      for (std::size_t jf = 0; jf < f; ++jf) row[jf] += xi * u[base + plan.j_free[jf]];
    }
  }
}

PhiBreakdown PhiEvaluator::evaluate(std::span<const Hypermatrix> xs,
                                    std::span<const Hypermatrix> us) const {
  check(xs, us);
  PhiBreakdown out;
  out.per_subset.reserve(plans_.size());
  CompensatedSum total;
  CompensatedSum mass;
  std::vector<Complex> t;
  for (const Plan& plan : plans_) {
    contract(plan, xs, us, t);
    CompensatedSum value;
    for (const Complex& z : t) value.add(std::norm(z));
    const double v = value.value();
    out.per_subset.push_back({plan.subset, plan.weight, v});
    total.add(plan.weight * v);
    mass.add(std::fabs(plan.weight * v));
  }
  out.total = total.value();
  out.cancellation_mass = mass.value();
  return out;
}

double PhiEvaluator::total(std::span<const Hypermatrix> xs,
                           std::span<const Hypermatrix> us) const {
  return evaluate(xs, us).total;
}

double PhiEvaluator::subset_value(const IndexSubset& q, std::span<const Hypermatrix> xs,
                                  std::span<const Hypermatrix> us) const {
  check(xs, us);
  if (q.rank() != shape_.rank())
    fail(ErrorCode::shape_mismatch, "subset is not over I_m of the input shape");
  std::vector<Complex> t;
  for (const Plan& plan : plans_) {
    if (!(plan.subset == q)) continue;
    contract(plan, xs, us, t);
    CompensatedSum value;
    for (const Complex& z : t) value.add(std::norm(z));
    return value.value();
  }
  fail(ErrorCode::index_error, "subset not found");
}

double PhiEvaluator::gradient(std::span<const Hypermatrix> xs,
                              std::span<const Hypermatrix> us,
                              std::vector<Hypermatrix>& grad_x,
                              std::vector<Hypermatrix>& grad_u) const {
  check(xs, us);
  grad_x.assign(n_, Hypermatrix(shape_));
  grad_u.assign(n_, Hypermatrix(shape_));
  CompensatedSum total;
  std::vector<Complex> t;
  const std::size_t size = shape_.total();
  for (const Plan& plan : plans_) {
    contract(plan, xs, us, t);
    CompensatedSum value;
    for (const Complex& z : t) value.add(std::norm(z));
    total.add(plan.weight * value.value());

    const std::size_t f = plan.free_count;
    for (std::size_t i = 0; i < size; ++i) {
      const Complex* row = t.data() + plan.i_free_rank[i] * f;
      const std::size_t base = plan.i_contracted[i];
      for (std::size_t k = 0; k < n_; ++k) {
        const Complex xi_conj = std::conj(xs[k][i]);
        Complex gx{};
        for (std::size_t jf = 0; jf < f; ++jf) {
          const std::size_t j = base + plan.j_free[jf];
          const Complex wt = plan.weight * row[jf];
          gx += wt * std::conj(us[k][j]);
          grad_u[k][j] += wt * xi_conj;
        }
        grad_x[k][i] += gx;
      }
    }
  }
  return total.value();
}

double phi_subset(const IndexSubset& q, const CbsInput& input, double budget) {
  PhiEvaluator eval(input.shape(), input.n(), budget);
  return eval.subset_value(q, input.xs(), input.us());
}

PhiBreakdown phi(const CbsInput& input, double budget) {
  PhiEvaluator eval(input.shape(), input.n(), budget);
  return eval.evaluate(input.xs(), input.us());
}

namespace {

using Matrix = Eigen::MatrixXcd;

Matrix as_matrix(const Hypermatrix& h) {
  const auto& s = h.shape();
  Matrix out(s[0], s[1]);
  for (std::size_t r = 0; r < s[0]; ++r)
    for (std::size_t c = 0; c < s[1]; ++c) out(r, c) = h[r * s[1] + c];
  return out;
}

}  // namespace

double phi_m1_closed(const CbsInput& input) {
  if (input.shape().rank() != 1)
    fail(ErrorCode::precondition_failed, "phi_m1_closed requires m = 1");
  const std::size_t d = input.shape()[0];
  Matrix x_mat = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < input.n(); ++k) {
    Eigen::VectorXcd x(d), u(d);
    for (std::size_t a = 0; a < d; ++a) {
      x(a) = input.x(k)[a];
      u(a) = input.u(k)[a];
    }
    x_mat += x * u.transpose();
  }
  return x_mat.squaredNorm() -
         std::norm(x_mat.trace()) / static_cast<double>(input.n());
}

double phi_m2_compact(const CbsInput& input) {
  if (input.shape().rank() != 2 || input.n() != 2)
    fail(ErrorCode::precondition_failed, "phi_m2_compact requires m = 2 and n = 2");
  const Matrix x = as_matrix(input.x(0));
  const Matrix y = as_matrix(input.x(1));
  const Matrix u = as_matrix(input.u(0));
  const Matrix v = as_matrix(input.u(1));
  const Matrix kron = Eigen::kroneckerProduct(x, u).eval() + Eigen::kroneckerProduct(y, v).eval();
  const Matrix left = x.transpose() * u + y.transpose() * v;
  const Matrix right = u * x.transpose() + v * y.transpose();
  return kron.squaredNorm() - 0.5 * left.squaredNorm() - 0.5 * right.squaredNorm() +
         0.25 * std::norm(left.trace());
}

}  // namespace cbsforge
