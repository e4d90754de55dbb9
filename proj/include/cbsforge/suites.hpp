#pragma once

// Verification batteries shared by the command-line tool and the acceptance
// runner. Each battery returns labeled trials; none of them throws on a
// failed check, only on invalid configuration.

#include <cstdint>
#include <string>
#include <vector>

#include "cbsforge/report.hpp"
#include "cbsforge/search.hpp"

namespace cbsforge {

/// Exact integer Lagrange identity on random shapes m <= 3, d_k <= 4, entries in [-5, 5].
std::vector<Trial> battery_lagrange_exact(std::uint64_t seed, std::size_t trials = 500);

/// Phi^(1) = full RHS = restricted RHS on random complex pairs of the same shapes.
std::vector<Trial> battery_lagrange_complex(std::uint64_t seed, std::size_t trials = 500,
                                            double tol = 1e-10);

/// Exhaustive sign lemma over all (i, j, Q) for d = (2,2) and (2,3), integer inputs.
std::vector<Trial> battery_sign_lemma(std::uint64_t seed, std::size_t inputs_per_shape = 4);

/// <psi|sigma_crit|psi> against Phi^(2) for random rank-2 specs.
std::vector<Trial> battery_oracle(std::uint64_t seed, const std::vector<DimVector>& dims,
                                  std::size_t per_dims = 100, double tol = 1e-10);

/// Both closed-form witness values over a uniform t grid on [-1, 1].
std::vector<Trial> battery_witnesses(const std::vector<std::size_t>& ds, std::size_t points = 21,
                                     double tol = 1e-12);

/// Threshold sweep of min <psi|1 - t d P|psi>; report-only.
std::vector<Trial> battery_werner_sweep(std::uint64_t seed, std::size_t d,
                                        const std::vector<double>& t_grid, std::size_t restarts);

enum class InvarianceKind { permute, unit_axis, unitary, mixing };

std::vector<Trial> battery_invariance(InvarianceKind kind, std::uint64_t seed,
                                      std::size_t trials = 200);

/// phi vs phi_m1_closed (1e-12 relative) and phi >= -1e-12 for d <= 6, n <= 4.
std::vector<Trial> battery_m1(std::uint64_t seed, std::size_t trials = 500);

/// True on the cells where nonnegativity is a theorem: m = 1, n = 1, or n = 2
/// with at most one axis of extent above 2.
bool proven_nonnegative(const DimVector& dims, std::size_t n);

/// Campaign over `grid`; proven cells assert best_value >= -1e-8, open cells
/// are report-only. Candidates carry their serialized input.
std::vector<Trial> battery_campaign(const std::vector<CampaignCell>& grid,
                                    const SearchConfig& tmpl);

/// The grid of proven cells searched by the acceptance battery.
std::vector<CampaignCell> proven_campaign_grid();

/// Closed forms >= -1e-9 on random blocks in [0.1, 10], plus dual-path
/// quadrature agreement on a smaller sample.
std::vector<Trial> battery_integral_closed_forms(std::uint64_t seed, std::size_t draws = 10000,
                                                 std::size_t dual_blocks = 20,
                                                 std::size_t points = 256);

/// Report-only m = n = 2 integral functional of random Gaussian bumps on a
/// square grid over [-4, 4]^2.
std::vector<Trial> battery_integral_conjectural(std::uint64_t seed, std::size_t samples = 5,
                                                std::size_t points = 16);

/// Midpoint-rule convergence of the xi = 1, eta = s family to 1/12.
std::vector<Trial> battery_quadrature_convergence(const std::vector<std::size_t>& grid_sizes = {
                                                      32, 64, 128, 256});

/// Runs one command ("verify-lagrange", "verify-invariance", "eval-phi",
/// "oracle-check", "werner-check", "search", "integral", "suite") with a
/// JSON configuration and returns its report.
RunReport run_command(const std::string& command, const Json& config);

}  // namespace cbsforge
