#pragma once

// Transforms under which Phi^(n) is invariant (or scales by a fixed factor):
// axis permutation, removal of a unit axis, single-axis unitary action with
// the conjugate action on the u-block, and GL_n mixing of the n pairs.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cbsforge/cbs_functional.hpp"
#include "cbsforge/hypermatrix.hpp"

namespace cbsforge {

/// Permutation pi of I_m, stored 1-based: pi[k-1] = pi(k).
class AxisPermutation {
 public:
  explicit AxisPermutation(std::vector<std::size_t> pi);
  static AxisPermutation identity(std::size_t m);
  static AxisPermutation random(std::size_t m, std::uint64_t seed);

  std::size_t size() const { return pi_.size(); }
  std::size_t operator()(std::size_t k) const { return pi_[k - 1]; }
  AxisPermutation inverse() const;
  const std::vector<std::size_t>& values() const { return pi_; }

 private:
  std::vector<std::size_t> pi_;
};

class UnitaryMatrix {
 public:
  /// Rejects matrices with ||U U^dagger - I||_F > tol.
  explicit UnitaryMatrix(Eigen::MatrixXcd u, double tol = 1e-12);
  std::size_t dim() const { return static_cast<std::size_t>(u_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return u_; }
  UnitaryMatrix conjugate() const;

 private:
  Eigen::MatrixXcd u_;
};

/// Lambda in GL_n(C) together with beta = (Lambda^T)^{-1}.
class MixingMatrix {
 public:
  static constexpr double max_condition = 1e6;

  /// Inverts through a pivoted LU solve; cond(Lambda) > 1e6 is a domain error.
  explicit MixingMatrix(Eigen::MatrixXcd lambda);
  /// Gaussian Lambda, redrawn until cond(Lambda) <= max_cond.
  static MixingMatrix random(std::size_t n, std::uint64_t seed, double max_cond = 1e3);

  std::size_t n() const { return static_cast<std::size_t>(lambda_.rows()); }
  const Eigen::MatrixXcd& lambda() const { return lambda_; }
  const Eigen::MatrixXcd& beta() const { return beta_; }
  double condition_number() const { return cond_; }
  /// Invariance tolerance 1e-10 * cond(Lambda)^2.
  double invariance_tolerance() const { return 1e-10 * cond_ * cond_; }

 private:
  Eigen::MatrixXcd lambda_;
  Eigen::MatrixXcd beta_;
  double cond_ = 1.0;
};

/// Output shape d'_k = d_{pi^{-1} k}; x'_{i'} = x_{i'_{pi 1}, ..., i'_{pi m}}.
Hypermatrix permute_axes(const Hypermatrix& x, const AxisPermutation& pi);
CbsInput permute_axes(const CbsInput& input, const AxisPermutation& pi);

/// Requires d_s = 1; removes axis s (1-based).
Hypermatrix drop_unit_axis(const Hypermatrix& x, std::size_t s);
CbsInput drop_unit_axis(const CbsInput& input, std::size_t s);

/// (U^(s) x)_{..., i_s, ...} = sum_{i'_s} U_{i_s, i'_s} x_{..., i'_s, ...}
Hypermatrix apply_unitary(const Hypermatrix& x, const UnitaryMatrix& u, std::size_t s);
/// U^(s) on every x^(k), conj(U)^(s) on every u^(k).
CbsInput apply_unitary(const CbsInput& input, const UnitaryMatrix& u, std::size_t s);

/// Haar-distributed: QR of a complex Gaussian matrix with phase-fixed R diagonal.
UnitaryMatrix random_unitary(std::size_t d, std::uint64_t seed);

/// x'^(p) = sum_k alpha_{p,k} x^(k), u'^(p) = sum_k beta_{p,k} u^(k).
CbsInput apply_mixing(const CbsInput& input, const MixingMatrix& mix);

}  // namespace cbsforge
