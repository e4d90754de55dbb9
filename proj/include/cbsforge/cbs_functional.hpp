#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cbsforge/hypermatrix.hpp"

namespace cbsforge {

/// The 2n hypermatrices (x^(1..n), u^(1..n)) of a single shape.
class CbsInput {
 public:
  CbsInput() = default;
  CbsInput(std::vector<Hypermatrix> xs, std::vector<Hypermatrix> us);

  std::size_t n() const { return xs_.size(); }
  const DimVector& shape() const { return xs_.front().shape(); }
  const std::vector<Hypermatrix>& xs() const { return xs_; }
  const std::vector<Hypermatrix>& us() const { return us_; }
  const Hypermatrix& x(std::size_t k) const { return xs_[k]; }
  const Hypermatrix& u(std::size_t k) const { return us_[k]; }

 private:
  std::vector<Hypermatrix> xs_;
  std::vector<Hypermatrix> us_;
};

struct SubsetTerm {
  IndexSubset subset;
  double weight = 0.0;  // (-1/n)^{|Q|}
  double value = 0.0;   // Phi_Q >= 0
};

struct PhiBreakdown {
  double total = 0.0;
  /// sum over Q of |weight * Phi_Q|; the scale for relative tolerances.
  double cancellation_mass = 0.0;
  std::vector<SubsetTerm> per_subset;  // increasing |Q|
};

inline constexpr double default_work_budget = 1e9;

/// Naive multiply-add estimate n * 2^m * (prod d_k)^2 used for the budget gate.
double phi_work_estimate(const DimVector& shape, std::size_t n);

/// Relative deviation |a - b| / scale with scale floored at the smallest
/// normal double, so that identical zeros compare as 0.
double relative_deviation(double a, double b, double scale);

/// Reusable evaluator bound to (shape, n). Index tables for every subset are
/// built once; evaluation is single-threaded with a fixed reduction order so
/// results are bit-identical regardless of how callers schedule it.
class PhiEvaluator {
 public:
  PhiEvaluator(DimVector shape, std::size_t n, double budget = default_work_budget);

  const DimVector& shape() const { return shape_; }
  std::size_t n() const { return n_; }

  PhiBreakdown evaluate(std::span<const Hypermatrix> xs,
                        std::span<const Hypermatrix> us) const;
  double total(std::span<const Hypermatrix> xs, std::span<const Hypermatrix> us) const;
  double subset_value(const IndexSubset& q, std::span<const Hypermatrix> xs,
                      std::span<const Hypermatrix> us) const;

  /// Returns Phi and fills the Wirtinger derivatives dPhi/d conj(x^(k)) and
  /// dPhi/d conj(u^(k)). For a real parameterization z = a + ib the real
  /// gradient is (2 Re g, 2 Im g).
  double gradient(std::span<const Hypermatrix> xs, std::span<const Hypermatrix> us,
                  std::vector<Hypermatrix>& grad_x,
                  std::vector<Hypermatrix>& grad_u) const;

 private:
  struct Plan {
    IndexSubset subset;
    double weight = 0.0;
    std::size_t free_count = 1;            // prod_{p not in Q} d_p
    std::vector<std::size_t> i_contracted; // per flat i: sum_{q in Q} (i_q-1) stride_q
    std::vector<std::size_t> i_free_rank;  // per flat i: rank of (i_p)_{p not in Q}
    std::vector<std::size_t> j_free;       // per free rank: sum_{p not in Q} (j_p-1) stride_p
  };

  void check(std::span<const Hypermatrix> xs, std::span<const Hypermatrix> us) const;
  void contract(const Plan& plan, std::span<const Hypermatrix> xs,
                std::span<const Hypermatrix> us, std::vector<Complex>& t) const;

  DimVector shape_;
  std::size_t n_;
  std::vector<Plan> plans_;
};

double phi_subset(const IndexSubset& q, const CbsInput& input,
                  double budget = default_work_budget);
PhiBreakdown phi(const CbsInput& input, double budget = default_work_budget);

/// m = 1: ||X||^2 - (1/n)|tr X|^2 with X = sum_k (x^(k))^T u^(k).
double phi_m1_closed(const CbsInput& input);

/// m = 2, n = 2 compact matrix form with (x, y, u, v) = (x1, x2, u1, u2).
double phi_m2_compact(const CbsInput& input);

}  // namespace cbsforge
