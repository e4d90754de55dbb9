#pragma once

// Multi-restart projected descent for counterexample searches. Every block
// (each x^(k), u^(k), or x, y, u, v of a rank-2 vector) lives on its own unit
// Frobenius sphere. Results are infima found, never certified minima.

#include <cstdint>
#include <string>
#include <vector>

#include "cbsforge/cbs_functional.hpp"
#include "cbsforge/quantum.hpp"

namespace cbsforge {

enum class GradientMode { finite_difference, analytic };
enum class Normalization { per_block_unit_sphere };

struct SearchConfig {
  DimVector dims{2};
  std::size_t n = 2;
  std::size_t restarts = 100;
  std::size_t max_iters = 2000;
  double step_init = 0.1;
  double grad_eps = 1e-6;
  std::uint64_t seed = 0;
  Normalization normalization = Normalization::per_block_unit_sphere;
  GradientMode gradient = GradientMode::finite_difference;
  double budget = default_work_budget;
  std::size_t threads = 1;

  /// restarts >= 1, max_iters >= 1, step_init > 0, grad_eps in [1e-8, 1e-4].
  void validate() const;
};

struct RestartRecord {
  double final_value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool aborted = false;  // NaN objective
};

struct SearchResult {
  double best_value = 0.0;
  std::size_t best_restart = 0;
  CbsInput best_input;
  std::vector<RestartRecord> per_restart;
  double wall_time = 0.0;
};

struct ExpectationSearchResult {
  double best_value = 0.0;
  std::size_t best_restart = 0;
  SchmidtRank2Spec best_spec;
  std::vector<RestartRecord> per_restart;
  double wall_time = 0.0;
};

/// Minimizes Phi^(n) over inputs whose 2n blocks each have unit norm.
SearchResult minimize_phi(const SearchConfig& config);

/// Minimizes <psi|op|psi> / ||psi||^2 over psi = x (x) u + y (x) v.
/// `config.n` is ignored.
ExpectationSearchResult minimize_expectation(const DenseOperator& op,
                                             const DimVector& dims,
                                             const SearchConfig& config);

inline constexpr double candidate_threshold = -1e-6;

struct CampaignCell {
  DimVector dims;
  std::size_t n = 2;
};

struct CellReport {
  CampaignCell cell;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  SearchResult result;
  bool candidate = false;
  /// best_input re-read from its JSON serialization and re-evaluated.
  double reverified_value = 0.0;
  bool reverified = false;
};

struct CampaignReport {
  std::vector<CellReport> cells;
  double min_value = 0.0;
  std::size_t candidates = 0;
};

/// Runs minimize_phi for every cell with seed derive_seed(tmpl.seed, cell).
/// Per-cell errors are recorded, not thrown.
CampaignReport campaign(const std::vector<CampaignCell>& grid, const SearchConfig& tmpl,
                        double flag_threshold = candidate_threshold);

}  // namespace cbsforge
