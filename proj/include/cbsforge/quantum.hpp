#pragma once

// Dense-operator side of the bridge between Phi^(2) and the partial
// transpose of a tensor product of critical Werner states.
//
// Kets of an m-pair system are ordered |i1,j1,i2,j2,...,im,jm>, row-major
// with i1 slowest; the A|B cut groups (i1..im | j1..jm).

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cbsforge/hypermatrix.hpp"

namespace cbsforge {

inline constexpr std::size_t default_operator_budget = 4096;

class DenseOperator {
 public:
  DenseOperator() = default;
  explicit DenseOperator(Eigen::MatrixXcd m);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  bool is_hermitian(double tol = 1e-12) const;

 private:
  Eigen::MatrixXcd m_;
};

class ProductBasisLayout {
 public:
  explicit ProductBasisLayout(DimVector dims, std::size_t budget = default_operator_budget);

  const DimVector& dims() const { return dims_; }
  std::size_t dim() const { return dim_; }
  /// Position of |i1,j1,...,im,jm> given the flat hypermatrix offsets of i and j.
  std::size_t offset(std::size_t i_offset, std::size_t j_offset) const;

 private:
  DimVector dims_;
  std::size_t dim_ = 1;
  std::vector<std::size_t> pair_strides_;
};

struct SchmidtRank2Spec {
  Hypermatrix x, y, u, v;
};

/// F = sum_{i,j} |i,j><j,i| on C^d (x) C^d.
DenseOperator flip_operator(std::size_t d);

enum class DomainPolicy { strict, warn };

/// Non-normalized Werner state 1 - tF, t in [-1, 1].
DenseOperator werner_state(std::size_t d, double t, DomainPolicy policy = DomainPolicy::strict);

/// P = (1/d) sum_{i,j} |i,i><j,j|.
DenseOperator max_entangled_projector(std::size_t d);

/// 1 - t d P, the partial transpose of the Werner state 1 - tF.
DenseOperator isotropic_operator(std::size_t d, double t);

/// (x)_k (1 - d_k P_k / 2) on the interleaved layout.
DenseOperator sigma_crit(const DimVector& dims, std::size_t budget = default_operator_budget);

/// psi = x (x) u + y (x) v on the interleaved layout.
Eigen::VectorXcd rank2_vector(const SchmidtRank2Spec& spec,
                              std::size_t budget = default_operator_budget);

/// prod d_k x prod d_k coefficient matrix of psi across the A|B cut.
Eigen::MatrixXcd coefficient_matrix(const Eigen::VectorXcd& psi, const DimVector& dims);

/// Number of singular values above threshold * sigma_max.
std::size_t schmidt_rank(const Eigen::VectorXcd& psi, const DimVector& dims,
                         double threshold = 1e-10);

/// <psi|op|psi> for Hermitian op; a relative imaginary residue above 1e-12
/// raises numerical_integrity.
double expectation(const DenseOperator& op, const Eigen::VectorXcd& psi);

struct OracleReport {
  double expectation = 0.0;
  double phi = 0.0;
  double cancellation_mass = 0.0;
  double deviation = 0.0;  // relative to max(mass, |expectation|)
  bool pass = false;
};

/// Compares <psi|sigma_crit|psi> with Phi^(2)(x, y, u, v).
OracleReport phi_oracle_check(const SchmidtRank2Spec& spec, double tol = 1e-10);

SchmidtRank2Spec random_rank2_spec(const DimVector& dims, std::uint64_t seed);

struct SweepPoint {
  double t = 0.0;
  double minimum = 0.0;
};

struct SweepRecord {
  std::size_t d = 0;
  std::vector<SweepPoint> points;
  bool monotone_non_increasing = true;  // observation only
  /// Largest grid t with minimum >= -1e-8 and smallest with minimum < -1e-8.
  double last_nonnegative_t = 0.0;
  double first_negative_t = 0.0;
  bool bracketed = false;
};

/// For each t, minimizes <psi|1 - t d P|psi> over normalized Schmidt-rank-2 psi.
SweepRecord werner_threshold_sweep(std::size_t d, const std::vector<double>& t_grid,
                                   std::size_t restarts, std::uint64_t seed,
                                   std::size_t max_iters = 2000);

}  // namespace cbsforge
