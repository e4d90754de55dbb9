#pragma once

// The signed kernel
//   sigma_{i;j}(x,u) = sum_{Q subset I_m} (-1)^{|Q|} x_{i^{Q,j}} u_{j^{Q,i}}
// and both right-hand sides of the hypermatrix Lagrange identity for
// Phi^(1)(x,u), in floating point and over the integers.

#include "cbsforge/hypermatrix.hpp"

namespace cbsforge {

Complex sigma(const MultiIndex& i, const MultiIndex& j, const Hypermatrix& x,
              const Hypermatrix& u);
BigInt sigma(const MultiIndex& i, const MultiIndex& j, const IntHypermatrix& x,
             const IntHypermatrix& u);

/// sigma at (i^{Q,j}, j^{Q,i}) equals (-1)^{|Q|} sigma(i, j); within 1e-13
/// absolute for complex inputs.
bool sigma_sign_check(const MultiIndex& i, const MultiIndex& j, const IndexSubset& q,
                      const Hypermatrix& x, const Hypermatrix& u);
/// Exact variant.
bool sigma_sign_check(const MultiIndex& i, const MultiIndex& j, const IndexSubset& q,
                      const IntHypermatrix& x, const IntHypermatrix& u);

/// 2^-m * sum over all (i, j) of |sigma_{i;j}(x, conj u)|^2.
double lagrange_rhs_full(const Hypermatrix& x, const Hypermatrix& u);
/// sum over i < j (componentwise strict) of |sigma_{i;j}(x, conj u)|^2.
double lagrange_rhs_restricted(const Hypermatrix& x, const Hypermatrix& u);

inline constexpr double default_lagrange_tol = 1e-10;

struct LagrangeReport {
  double phi = 0.0;
  double rhs_full = 0.0;
  double rhs_restricted = 0.0;
  double cancellation_mass = 0.0;
  double max_deviation = 0.0;  // max pairwise, relative to cancellation mass
  bool pass = false;
};

LagrangeReport verify_lagrange(const Hypermatrix& x, const Hypermatrix& u,
                               double tol = default_lagrange_tol);

struct ExactLagrange {
  BigInt lhs;
  BigInt rhs;
  bool equal = false;
};

/// Integer identity: the alternating subset sum of squared partial
/// contractions on the left, sum_{i<j} sigma_{i;j}(x,u)^2 on the right.
ExactLagrange lagrange_exact(const IntHypermatrix& x, const IntHypermatrix& u);

}  // namespace cbsforge
