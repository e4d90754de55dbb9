#include "cbsforge/search.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <thread>

#include "cbsforge/json_io.hpp"
#include "cbsforge/rng.hpp"

namespace cbsforge {

void SearchConfig::validate() const {
  if (restarts < 1) fail(ErrorCode::domain_error, "restarts must be >= 1");
  if (max_iters < 1) fail(ErrorCode::domain_error, "max_iters must be >= 1");
  if (n < 1) fail(ErrorCode::domain_error, "n must be >= 1");
  if (!(step_init > 0.0)) fail(ErrorCode::domain_error, "step_init must be > 0");
  if (!(grad_eps >= 1e-8 && grad_eps <= 1e-4))
    fail(ErrorCode::domain_error, "grad_eps must lie in [1e-8, 1e-4]");
}

namespace {

using Blocks = std::vector<Hypermatrix>;
using ValueFn = std::function<double(const Blocks&)>;
// Fills the Wirtinger derivative dF/d conj(block) for each block.
using WirtingerFn = std::function<void(const Blocks&, Blocks&)>;

constexpr double min_step = 1e-20;
constexpr std::size_t stall_window = 10;
constexpr double stall_tolerance = 1e-12;

void normalize_blocks(Blocks& blocks) {
  for (auto& b : blocks) b = normalized(b);
}

Blocks random_blocks(const DimVector& dims, std::size_t count, std::uint64_t seed) {
  Blocks out;
  out.reserve(count);
  for (std::size_t b = 0; b < count; ++b)
    out.push_back(random_hypermatrix(dims, derive_seed(seed, b), Distribution::unit_sphere));
  return out;
}

// Real gradient packed as complex: Re = dF/d(re z), Im = dF/d(im z).
Blocks finite_difference_gradient(const ValueFn& f, Blocks blocks, double eps) {
  Blocks grad;
  for (const auto& b : blocks) grad.emplace_back(b.shape());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t e = 0; e < blocks[b].size(); ++e) {
      const Complex z = blocks[b][e];
      blocks[b][e] = z + Complex(eps, 0.0);
      const double fr_plus = f(blocks);
      blocks[b][e] = z - Complex(eps, 0.0);
      const double fr_minus = f(blocks);
      blocks[b][e] = z + Complex(0.0, eps);
      const double fi_plus = f(blocks);
      blocks[b][e] = z - Complex(0.0, eps);
      const double fi_minus = f(blocks);
      blocks[b][e] = z;
      grad[b][e] = Complex((fr_plus - fr_minus) / (2.0 * eps), (fi_plus - fi_minus) / (2.0 * eps));
    }
  }
  return grad;
}

// Removes the radial component Re<z, g> z of each block.
double project_tangent(const Blocks& blocks, Blocks& grad) {
  double norm_sq = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    double radial = 0.0;
    for (std::size_t e = 0; e < blocks[b].size(); ++e)
      radial += (std::conj(blocks[b][e]) * grad[b][e]).real();
    for (std::size_t e = 0; e < blocks[b].size(); ++e) {
      grad[b][e] -= radial * blocks[b][e];
      norm_sq += std::norm(grad[b][e]);
    }
  }
  return std::sqrt(norm_sq);
}

struct Descent {
  RestartRecord record;
  Blocks blocks;
};

Descent descend(Blocks blocks, const ValueFn& f, const WirtingerFn& wirtinger,
                const SearchConfig& cfg) {
  Descent out;
  normalize_blocks(blocks);
  double value = f(blocks);
  if (std::isnan(value)) {
    out.record = {value, 0, false, true};
    out.blocks = std::move(blocks);
    return out;
  }
  double step = cfg.step_init;
  std::deque<double> history{value};
  std::size_t it = 0;
  bool converged = false;
  bool aborted = false;
  for (; it < cfg.max_iters; ++it) {
    Blocks grad;
    if (cfg.gradient == GradientMode::analytic && wirtinger) {
      wirtinger(blocks, grad);
      for (auto& g : grad)
        for (auto& z : g.entries()) z *= 2.0;
    } else {
      grad = finite_difference_gradient(f, blocks, cfg.grad_eps);
    }
    if (project_tangent(blocks, grad) < 1e-15) {
      converged = true;
      break;
    }
    bool accepted = false;
    while (step >= min_step) {
      Blocks trial = blocks;
      for (std::size_t b = 0; b < trial.size(); ++b)
        for (std::size_t e = 0; e < trial[b].size(); ++e) trial[b][e] -= step * grad[b][e];
      normalize_blocks(trial);
      const double tv = f(trial);
      if (std::isnan(tv)) {
        aborted = true;
        break;
      }
      if (tv < value) {
        blocks = std::move(trial);
        value = tv;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (aborted) break;
    if (!accepted) {
      converged = true;
      break;
    }
    step = std::min(2.0 * step, 1e3 * cfg.step_init);
    history.push_back(value);
    if (history.size() > stall_window + 1) history.pop_front();
    if (history.size() == stall_window + 1) {
      const double before = history.front();
      const double scale = std::max(std::fabs(before), std::numeric_limits<double>::min());
      if ((before - value) / scale < stall_tolerance) {
        converged = true;
        ++it;
        break;
      }
    }
  }
  out.record = {aborted ? std::numeric_limits<double>::quiet_NaN() : value, it, converged,
                aborted};
  out.blocks = std::move(blocks);
  return out;
}

// Runs `task(r)` for r in [0, count) on up to `threads` workers; results are
// written by index so the outcome does not depend on scheduling.
template <class Task>
void run_indexed(std::size_t count, std::size_t threads, Task&& task) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t r = 0; r < count; ++r) task(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t r = next++; r < count; r = next++) {
        try {
          task(r);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

template <class Result>
void pick_best(Result& res) {
  res.best_value = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < res.per_restart.size(); ++r) {
    const auto& rec = res.per_restart[r];
    if (!rec.aborted && rec.final_value < res.best_value) {
      res.best_value = rec.final_value;
      res.best_restart = r;
    }
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

SearchResult minimize_phi(const SearchConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = config.n;
  const PhiEvaluator eval(config.dims, n, config.budget);

  const ValueFn f = [&](const Blocks& b) {
    return eval.total(std::span(b).first(n), std::span(b).subspan(n, n));
  };
  const WirtingerFn g = [&](const Blocks& b, Blocks& grad) {
    Blocks gx, gu;
    eval.gradient(std::span(b).first(n), std::span(b).subspan(n, n), gx, gu);
    grad = std::move(gx);
    for (auto& h : gu) grad.push_back(std::move(h));
  };

  std::vector<Descent> runs(config.restarts);
  run_indexed(config.restarts, config.threads, [&](std::size_t r) {
    runs[r] = descend(random_blocks(config.dims, 2 * n, derive_seed(config.seed, r)), f, g,
                      config);
  });

  SearchResult res;
  for (const auto& run : runs) res.per_restart.push_back(run.record);
  pick_best(res);
  if (std::isinf(res.best_value))
    fail(ErrorCode::numerical_integrity, "every restart produced a NaN objective");
  const Blocks& best = runs[res.best_restart].blocks;
  res.best_input = CbsInput(Blocks(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(n)),
                            Blocks(best.begin() + static_cast<std::ptrdiff_t>(n), best.end()));
  res.wall_time = seconds_since(start);
  return res;
}

ExpectationSearchResult minimize_expectation(const DenseOperator& op, const DimVector& dims,
                                             const SearchConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const ProductBasisLayout layout(dims, std::max(op.dim(), default_operator_budget));
  if (layout.dim() != op.dim())
    fail(ErrorCode::shape_mismatch, "operator dimension does not match prod d_k^2");
  if (!op.is_hermitian(1e-12 * std::max(1.0, op.matrix().norm())))
    fail(ErrorCode::domain_error, "minimize_expectation requires a Hermitian operator");

  const auto spec_of = [](const Blocks& b) { return SchmidtRank2Spec{b[0], b[1], b[2], b[3]}; };
  const ValueFn f = [&](const Blocks& b) {
    const Eigen::VectorXcd psi = rank2_vector(spec_of(b), op.dim());
    const double norm_sq = psi.squaredNorm();
    if (!(norm_sq > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return expectation(op, psi) / norm_sq;
  };
  const WirtingerFn g = [&](const Blocks& b, Blocks& grad) {
    const Eigen::VectorXcd psi = rank2_vector(spec_of(b), op.dim());
    const double norm_sq = psi.squaredNorm();
    const Eigen::VectorXcd a_psi = op.matrix() * psi;
    const double value = psi.dot(a_psi).real() / norm_sq;
    const Eigen::MatrixXcd r = coefficient_matrix((a_psi - value * psi) / norm_sq, dims);
    const std::size_t total = dims.total();
    const auto column = [&](const Hypermatrix& h) {
      Eigen::VectorXcd c(total);
      for (std::size_t a = 0; a < total; ++a) c(a) = std::conj(h[a]);
      return c;
    };
    const Eigen::VectorXcd gx = r * column(b[2]);
    const Eigen::VectorXcd gy = r * column(b[3]);
    const Eigen::VectorXcd gu = r.transpose() * column(b[0]);
    const Eigen::VectorXcd gv = r.transpose() * column(b[1]);
    grad.assign(4, Hypermatrix(dims));
    for (std::size_t a = 0; a < total; ++a) {
      grad[0][a] = gx(a);
      grad[1][a] = gy(a);
      grad[2][a] = gu(a);
      grad[3][a] = gv(a);
    }
  };

  std::vector<Descent> runs(config.restarts);
  run_indexed(config.restarts, config.threads, [&](std::size_t r) {
    runs[r] = descend(random_blocks(dims, 4, derive_seed(config.seed, r)), f, g, config);
  });

  ExpectationSearchResult res;
  for (const auto& run : runs) res.per_restart.push_back(run.record);
  pick_best(res);
  if (std::isinf(res.best_value))
    fail(ErrorCode::numerical_integrity, "every restart produced a NaN objective");
  res.best_spec = spec_of(runs[res.best_restart].blocks);
  res.wall_time = seconds_since(start);
  return res;
}

CampaignReport campaign(const std::vector<CampaignCell>& grid, const SearchConfig& tmpl,
                        double flag_threshold) {
  CampaignReport rep;
  rep.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < grid.size(); ++c) {
    CellReport cell;
    cell.cell = grid[c];
    cell.seed = derive_seed(tmpl.seed, c);
    SearchConfig cfg = tmpl;
    cfg.dims = grid[c].dims;
    cfg.n = grid[c].n;
    cfg.seed = cell.seed;
    try {
      cell.result = minimize_phi(cfg);
      cell.ok = true;
      const CbsInput reread = cbs_input_from_json(Json::parse(to_json(cell.result.best_input).dump()));
      cell.reverified_value = phi(reread, cfg.budget).total;
      cell.reverified = true;
      cell.candidate = cell.result.best_value < flag_threshold;
      if (cell.candidate) ++rep.candidates;
      rep.min_value = std::min(rep.min_value, cell.result.best_value);
    } catch (const Error& e) {
      cell.error = e.what();
    }
    rep.cells.push_back(std::move(cell));
  }
  return rep;
}

}  // namespace cbsforge
