#pragma once

// Grid quadrature of the functional for square-integrable functions, and the
// two closed-form parametric families obtained with d = (2, infinity), n = 2.
//
// Midpoint rule on uniform grids. Samples are scaled by sqrt(delta) per axis,
// so the discrete functional approximates the integral one directly.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cbsforge/cbs_functional.hpp"
#include "cbsforge/hypermatrix.hpp"

namespace cbsforge {

struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t points = 1;

  GridSpec() = default;
  /// Requires points >= 1 and hi > lo.
  GridSpec(double lo, double hi, std::size_t points);

  double delta() const { return (hi - lo) / static_cast<double>(points); }
  double node(std::size_t k) const { return lo + (static_cast<double>(k) + 0.5) * delta(); }
};

inline constexpr std::size_t default_sample_budget = std::size_t{1} << 24;

using Function1 = std::function<Complex(double)>;
using FunctionN = std::function<Complex(std::span<const double>)>;

/// Entry at the node (s_1, ..., s_m) is f(s) * prod_k sqrt(delta_k).
Hypermatrix discretize(const FunctionN& f, const std::vector<GridSpec>& grids,
                       std::size_t budget = default_sample_budget);

/// Shape (fs.size(), N): row i samples fs[i] on the grid, scaled by sqrt(delta).
/// The first axis is a finite index and is not scaled.
Hypermatrix discretize_indexed(const std::vector<Function1>& fs, const GridSpec& grid,
                               std::size_t budget = default_sample_budget);

/// a[i][k] and b[i][k] for i, k in {0, 1}; all entries positive.
struct ParamBlock {
  std::array<std::array<double, 2>, 2> a{};
  std::array<std::array<double, 2>, 2> b{};

  void validate() const;
  static ParamBlock uniform(double value);
};

/// Closed form for xi_i^(k)(t) = t^((a_ik - 1)/2), eta_j^(k)(t) = t^((b_jk - 1)/2)
/// on (0, 1). Equals the integral functional exactly.
double power_inequality(const ParamBlock& p);

/// Closed form for xi_i^(k)(t) = exp(-a_ik t^2), eta_j^(k)(t) = exp(-b_jk t^2)
/// on the real line. Equals 4/pi times the integral functional.
double gaussian_inequality(const ParamBlock& p);

inline constexpr double gaussian_closed_form_scale = 1.2732395447351628;  // 4/pi

struct QuadratureValue {
  double phi = 0.0;
  double cancellation_mass = 0.0;
};

/// Discrete functional of the power family, midpoint rule with N nodes in s
/// on (0, 1) after the substitution t = s^2.
QuadratureValue power_quadrature(const ParamBlock& p, std::size_t points);

/// Discrete functional of the Gaussian family on [-8, 8] with N midpoint nodes.
QuadratureValue gaussian_quadrature(const ParamBlock& p, std::size_t points);

/// m = 1: discretizes xi^(k), eta^(k) on `grid` and evaluates Phi^(n), n = xis.size().
PhiBreakdown integral_phi_m1(const std::vector<Function1>& xis,
                             const std::vector<Function1>& etas, const GridSpec& grid);

struct DualPathReport {
  double closed = 0.0;
  double coarse = 0.0;  // scaled quadrature at N
  double fine = 0.0;    // scaled quadrature at 2N
  double envelope = 0.0;
  double error = 0.0;   // |fine - closed|
  bool pass = false;
};

enum class Family { power, gaussian };

/// Agreement of the closed form with quadrature at N and 2N:
/// |fine - closed| <= 2 |coarse - fine| + 1e-10 * mass.
DualPathReport dual_path(Family family, const ParamBlock& p, std::size_t points);

}  // namespace cbsforge
