#include "cbsforge/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "cbsforge/integral.hpp"
#include "cbsforge/lagrange.hpp"
#include "cbsforge/quantum.hpp"
#include "cbsforge/rng.hpp"
#include "cbsforge/symmetries.hpp"

namespace cbsforge {

namespace {

DimVector random_shape(Rng& rng, std::size_t max_m, std::size_t max_d, std::size_t min_d = 1) {
  const auto m = static_cast<std::size_t>(rng.uniform_int(1, static_cast<long long>(max_m)));
  std::vector<std::size_t> dims(m);
  for (auto& d : dims)
    d = static_cast<std::size_t>(
        rng.uniform_int(static_cast<long long>(min_d), static_cast<long long>(max_d)));
  return DimVector(std::move(dims));
}

CbsInput random_input(const DimVector& shape, std::size_t n, std::uint64_t seed,
                      Distribution dist = Distribution::complex_gaussian) {
  std::vector<Hypermatrix> xs, us;
  for (std::size_t k = 0; k < n; ++k) {
    xs.push_back(random_hypermatrix(shape, derive_seed(seed, 2 * k), dist));
    us.push_back(random_hypermatrix(shape, derive_seed(seed, 2 * k + 1), dist));
  }
  return CbsInput(std::move(xs), std::move(us));
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return static_cast<std::size_t>(
      rng.uniform_int(static_cast<long long>(lo), static_cast<long long>(hi)));
}

std::vector<MultiIndex> all_indices(const DimVector& shape) {
  std::vector<MultiIndex> out;
  for (std::size_t a = 0; a < shape.total(); ++a) out.push_back(multi_index(shape, a));
  return out;
}

}  // namespace

std::vector<Trial> battery_lagrange_exact(std::uint64_t seed, std::size_t trials) {
  Trial t{"lagrange-exact"};
  Json records = Json::array();
  Json failures = Json::array();
  for (std::size_t r = 0; r < trials; ++r) {
    const std::uint64_t s = derive_seed(seed, r);
    Rng rng(s);
    const DimVector shape = random_shape(rng, 3, 4);
    const IntHypermatrix x = random_int_hypermatrix(shape, derive_seed(s, 0), -5, 5);
    const IntHypermatrix u = random_int_hypermatrix(shape, derive_seed(s, 1), -5, 5);
    const ExactLagrange ex = lagrange_exact(x, u);
    records.push_back({{"shape", shape.dims()}, {"lhs", ex.lhs.str()}, {"rhs", ex.rhs.str()}});
    if (!ex.equal) failures.push_back({{"trial", r}, {"x", to_json(x)}, {"u", to_json(u)}});
  }
  t.pass = failures.empty();
  t.data = {{"trials", trials}, {"failures", failures}, {"records", records}};
  return {t};
}

std::vector<Trial> battery_lagrange_complex(std::uint64_t seed, std::size_t trials, double tol) {
  Trial t{"lagrange-complex"};
  Json records = Json::array();
  Json failures = Json::array();
  double worst = 0.0;
  for (std::size_t r = 0; r < trials; ++r) {
    const std::uint64_t s = derive_seed(seed, r);
    Rng rng(s);
    const DimVector shape = random_shape(rng, 3, 4);
    const Hypermatrix x = random_hypermatrix(shape, derive_seed(s, 0), Distribution::complex_gaussian);
    const Hypermatrix u = random_hypermatrix(shape, derive_seed(s, 1), Distribution::complex_gaussian);
    const LagrangeReport rep = verify_lagrange(x, u, tol);
    worst = std::max(worst, rep.max_deviation);
    records.push_back({{"shape", shape.dims()},
                       {"phi", rep.phi},
                       {"rhs_full", rep.rhs_full},
                       {"rhs_restricted", rep.rhs_restricted},
                       {"max_deviation", rep.max_deviation}});
    if (!rep.pass) failures.push_back({{"trial", r}, {"x", to_json(x)}, {"u", to_json(u)}});
  }
  t.pass = failures.empty();
  t.data = {{"trials", trials}, {"tolerance", tol},         {"max_deviation", worst},
            {"failures", failures}, {"records", records}};
  return {t};
}

std::vector<Trial> battery_sign_lemma(std::uint64_t seed, std::size_t inputs_per_shape) {
  Trial t{"sign-lemma"};
  std::size_t checks = 0;
  Json failures = Json::array();
  const std::vector<DimVector> shapes{DimVector{2, 2}, DimVector{2, 3}};
  for (std::size_t si = 0; si < shapes.size(); ++si) {
    const DimVector& shape = shapes[si];
    const auto indices = all_indices(shape);
    const auto subsets = subsets_by_cardinality(shape.rank());
    for (std::size_t r = 0; r < inputs_per_shape; ++r) {
      const std::uint64_t s = derive_seed(derive_seed(seed, si), r);
      const IntHypermatrix x = random_int_hypermatrix(shape, derive_seed(s, 0), -5, 5);
      const IntHypermatrix u = random_int_hypermatrix(shape, derive_seed(s, 1), -5, 5);
      for (const auto& i : indices)
        for (const auto& j : indices)
          for (const auto& q : subsets) {
            ++checks;
            if (!sigma_sign_check(i, j, q, x, u))
              failures.push_back({{"shape", shape.dims()},
                                  {"i", i.idx},
                                  {"j", j.idx},
                                  {"Q", q.to_string()},
                                  {"x", to_json(x)},
                                  {"u", to_json(u)}});
          }
    }
  }
  t.pass = failures.empty();
  t.data = {{"checks", checks}, {"failures", failures}};
  return {t};
}

std::vector<Trial> battery_oracle(std::uint64_t seed, const std::vector<DimVector>& dims,
                                  std::size_t per_dims, double tol) {
  std::vector<Trial> out;
  for (std::size_t di = 0; di < dims.size(); ++di) {
    Trial t{"oracle " + dims[di].to_string()};
    double worst = 0.0;
    Json failures = Json::array();
    for (std::size_t r = 0; r < per_dims; ++r) {
      const std::uint64_t s = derive_seed(derive_seed(seed, di), r);
      const SchmidtRank2Spec spec = random_rank2_spec(dims[di], s);
      const OracleReport rep = phi_oracle_check(spec, tol);
      worst = std::max(worst, rep.deviation);
      if (!rep.pass)
        failures.push_back({{"trial", r},
                            {"expectation", rep.expectation},
                            {"phi", rep.phi},
                            {"deviation", rep.deviation},
                            {"input", to_json(CbsInput({spec.x, spec.y}, {spec.u, spec.v}))}});
    }
    t.pass = failures.empty();
    t.data = {{"dims", dims[di].dims()},
              {"trials", per_dims},
              {"tolerance", tol},
              {"max_deviation", worst},
              {"failures", failures}};
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Trial> battery_witnesses(const std::vector<std::size_t>& ds, std::size_t points,
                                     double tol) {
  if (points < 2) fail(ErrorCode::domain_error, "witness grid needs at least 2 points");
  std::vector<Trial> out;
  for (std::size_t d : ds) {
    if (d < 2) fail(ErrorCode::domain_error, "witness states need d >= 2");
    Trial t{"werner-witness d=" + std::to_string(d)};
    Eigen::VectorXcd diag = Eigen::VectorXcd::Zero(d * d);
    diag(0) = 1.0;
    diag(d + 1) = 1.0;
    Eigen::VectorXcd singlet = Eigen::VectorXcd::Zero(d * d);
    singlet(1) = 1.0;
    singlet(d) = -1.0;
    double worst = 0.0;
    Json records = Json::array();
    for (std::size_t g = 0; g < points; ++g) {
      const double tv = -1.0 + 2.0 * static_cast<double>(g) / static_cast<double>(points - 1);
      const double iso = expectation(isotropic_operator(d, tv), diag);
      const double wer = expectation(werner_state(d, tv), singlet);
      const double e1 = std::fabs(iso - 2.0 * (1.0 - 2.0 * tv));
      const double e2 = std::fabs(wer - 2.0 * (1.0 + tv));
      worst = std::max({worst, e1, e2});
      records.push_back({{"t", tv}, {"isotropic", iso}, {"werner", wer}, {"deviation", std::max(e1, e2)}});
    }
    t.pass = worst <= tol;
    t.data = {{"d", d}, {"tolerance", tol}, {"max_deviation", worst}, {"records", records}};
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Trial> battery_werner_sweep(std::uint64_t seed, std::size_t d,
                                        const std::vector<double>& t_grid, std::size_t restarts) {
  const SweepRecord rec = werner_threshold_sweep(d, t_grid, restarts, seed);
  Trial t{"werner-sweep d=" + std::to_string(d)};
  t.asserted = false;
  Json points = Json::array();
  for (const auto& p : rec.points) points.push_back({{"t", p.t}, {"minimum", p.minimum}});
  t.pass = rec.bracketed;
  t.data = {{"d", d},
            {"restarts", restarts},
            {"points", points},
            {"monotone_non_increasing", rec.monotone_non_increasing},
            {"last_nonnegative_t", rec.last_nonnegative_t},
            {"first_negative_t", rec.first_negative_t},
            {"bracketed", rec.bracketed}};
  return {t};
}

std::vector<Trial> battery_invariance(InvarianceKind kind, std::uint64_t seed, std::size_t trials) {
  const char* names[] = {"invariance-permute", "invariance-unit-axis", "invariance-unitary",
                         "invariance-mixing"};
  Trial t{names[static_cast<int>(kind)]};
  double worst = 0.0;
  double worst_ratio = 0.0;  // deviation / tolerance
  Json failures = Json::array();
  for (std::size_t r = 0; r < trials; ++r) {
    const std::uint64_t s = derive_seed(seed, r);
    Rng rng(s);
    double lhs = 0.0, rhs = 0.0, scale = 0.0, tol = 0.0;
    CbsInput input;
    Json detail;
    switch (kind) {
      case InvarianceKind::permute: {
        const DimVector shape = random_shape(rng, 3, 4);
        input = random_input(shape, pick(rng, 1, 3), derive_seed(s, 100));
        const auto pi = AxisPermutation::random(shape.rank(), derive_seed(s, 200));
        const PhiBreakdown a = phi(input);
        const PhiBreakdown b = phi(permute_axes(input, pi));
        lhs = b.total;
        rhs = a.total;
        scale = std::max(a.cancellation_mass, b.cancellation_mass);
        tol = 1e-12;
        detail = {{"pi", pi.values()}};
        break;
      }
      case InvarianceKind::unit_axis: {
        const DimVector base = random_shape(rng, 3, 4);
        std::vector<std::size_t> dims = base.dims();
        const std::size_t pos = pick(rng, 1, dims.size() + 1);
        dims.insert(dims.begin() + static_cast<std::ptrdiff_t>(pos - 1), 1);
        const std::size_t n = pick(rng, 1, 4);
        input = random_input(DimVector(dims), n, derive_seed(s, 100));
        const PhiBreakdown a = phi(input);
        const PhiBreakdown b = phi(drop_unit_axis(input, pos));
        lhs = a.total;
        rhs = (static_cast<double>(n) - 1.0) / static_cast<double>(n) * b.total;
        scale = std::max(a.cancellation_mass, b.cancellation_mass);
        tol = 1e-12;
        detail = {{"axis", pos}};
        break;
      }
      case InvarianceKind::unitary: {
        const DimVector shape = random_shape(rng, 3, 4);
        input = random_input(shape, pick(rng, 1, 3), derive_seed(s, 100));
        const std::size_t axis = pick(rng, 1, shape.rank());
        const UnitaryMatrix u = random_unitary(shape[axis - 1], derive_seed(s, 200));
        const PhiBreakdown a = phi(input);
        const PhiBreakdown b = phi(apply_unitary(input, u, axis));
        // Product action over every axis.
        CbsInput all = input;
        for (std::size_t k = 1; k <= shape.rank(); ++k)
          all = apply_unitary(all, random_unitary(shape[k - 1], derive_seed(s, 300 + k)), k);
        const PhiBreakdown c = phi(all);
        scale = std::max({a.cancellation_mass, b.cancellation_mass, c.cancellation_mass});
        lhs = b.total;
        rhs = a.total;
        if (std::fabs(c.total - a.total) > std::fabs(lhs - rhs)) lhs = c.total;
        tol = 1e-10;
        detail = {{"axis", axis}};
        break;
      }
      case InvarianceKind::mixing: {
        const DimVector shape = random_shape(rng, 3, 4);
        const std::size_t n = pick(rng, 1, 4);
        input = random_input(shape, n, derive_seed(s, 100));
        const MixingMatrix mix = MixingMatrix::random(n, derive_seed(s, 200));
        const PhiBreakdown a = phi(input);
        const PhiBreakdown b = phi(apply_mixing(input, mix));
        lhs = b.total;
        rhs = a.total;
        scale = std::max(a.cancellation_mass, b.cancellation_mass);
        tol = std::min(1e-8, mix.invariance_tolerance());
        detail = {{"condition_number", mix.condition_number()}};
        break;
      }
    }
    const double dev = relative_deviation(lhs, rhs, scale);
    worst = std::max(worst, dev);
    worst_ratio = std::max(worst_ratio, dev / tol);
    if (!(dev <= tol)) {
      detail["trial"] = r;
      detail["deviation"] = dev;
      detail["tolerance"] = tol;
      detail["input"] = to_json(input);
      failures.push_back(std::move(detail));
    }
  }
  t.pass = failures.empty();
  t.data = {{"trials", trials},
            {"max_deviation", worst},
            {"max_deviation_over_tolerance", worst_ratio},
            {"failures", failures}};
  return {t};
}

std::vector<Trial> battery_m1(std::uint64_t seed, std::size_t trials) {
  Trial t{"m1-closed-form"};
  double worst = 0.0;
  double min_phi = std::numeric_limits<double>::infinity();
  Json failures = Json::array();
  for (std::size_t r = 0; r < trials; ++r) {
    const std::uint64_t s = derive_seed(seed, r);
    Rng rng(s);
    const DimVector shape{pick(rng, 1, 6)};
    const CbsInput input = random_input(shape, pick(rng, 1, 4), derive_seed(s, 100));
    const PhiBreakdown b = phi(input);
    const double closed = phi_m1_closed(input);
    const double dev = relative_deviation(b.total, closed, b.cancellation_mass);
    worst = std::max(worst, dev);
    min_phi = std::min(min_phi, b.total);
    if (!(dev <= 1e-12) || !(b.total >= -1e-12))
      failures.push_back({{"trial", r},
                          {"phi", b.total},
                          {"closed", closed},
                          {"deviation", dev},
                          {"input", to_json(input)}});
  }
  t.pass = failures.empty();
  t.data = {{"trials", trials},
            {"max_deviation", worst},
            {"min_phi", min_phi},
            {"failures", failures}};
  return {t};
}

bool proven_nonnegative(const DimVector& dims, std::size_t n) {
  if (dims.rank() == 1 || n == 1) return true;
  if (n != 2) return false;
  const auto big = std::count_if(dims.dims().begin(), dims.dims().end(),
                                 [](std::size_t d) { return d > 2; });
  return big <= 1;
}

std::vector<Trial> battery_campaign(const std::vector<CampaignCell>& grid,
                                    const SearchConfig& tmpl) {
  const CampaignReport rep = campaign(grid, tmpl);
  std::vector<Trial> out;
  for (const auto& cell : rep.cells) {
    Trial t{"search " + cell.cell.dims.to_string() + " n=" + std::to_string(cell.cell.n)};
    const bool proven = proven_nonnegative(cell.cell.dims, cell.cell.n);
    t.asserted = proven;
    Json data = {{"dims", cell.cell.dims.dims()},
                 {"n", cell.cell.n},
                 {"seed", cell.seed},
                 {"proven_nonnegative", proven}};
    if (!cell.ok) {
      t.pass = false;
      data["error"] = cell.error;
      t.data = std::move(data);
      out.push_back(std::move(t));
      continue;
    }
    const SearchResult& res = cell.result;
    std::size_t converged = 0, aborted = 0, iterations = 0;
    Json finals = Json::array();
    for (const auto& rec : res.per_restart) {
      converged += rec.converged ? 1 : 0;
      aborted += rec.aborted ? 1 : 0;
      iterations += rec.iterations;
      finals.push_back(rec.final_value);
    }
    const PhiBreakdown check = phi(res.best_input, tmpl.budget);
    const double reverify_dev =
        relative_deviation(cell.reverified_value, res.best_value, check.cancellation_mass);
    const bool reverified = cell.reverified && reverify_dev <= 1e-12;
    const double floor = proven ? -1e-8 : candidate_threshold;
    t.pass = reverified && res.best_value >= floor;
    data["best_value"] = res.best_value;
    data["best_restart"] = res.best_restart;
    data["reverified_value"] = cell.reverified_value;
    data["reverify_deviation"] = reverify_dev;
    data["restarts"] = res.per_restart.size();
    data["converged_restarts"] = converged;
    data["aborted_restarts"] = aborted;
    data["total_iterations"] = iterations;
    data["final_values"] = std::move(finals);
    data["candidate"] = cell.candidate;
    data["best_input"] = to_json(res.best_input);
    t.data = std::move(data);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<CampaignCell> proven_campaign_grid() {
  std::vector<CampaignCell> grid;
  for (std::size_t d = 2; d <= 4; ++d)
    for (std::size_t n = 1; n <= 3; ++n) grid.push_back({DimVector{d}, n});
  for (std::size_t d = 2; d <= 4; ++d) grid.push_back({DimVector{2, d}, 2});
  for (const DimVector& dims : {DimVector{2, 2}, DimVector{2, 3}, DimVector{3, 3},
                                DimVector{2, 2, 2}, DimVector{2, 3, 3}, DimVector{3, 3, 3}})
    grid.push_back({dims, 1});
  return grid;
}

namespace {

ParamBlock random_block(Rng& rng, double lo, double hi) {
  ParamBlock p;
  for (auto* m : {&p.a, &p.b})
    for (auto& row : *m)
      for (double& v : row) v = rng.uniform(lo, hi);
  return p;
}

Json block_json(const ParamBlock& p) {
  return {{"a", {p.a[0][0], p.a[0][1], p.a[1][0], p.a[1][1]}},
          {"b", {p.b[0][0], p.b[0][1], p.b[1][0], p.b[1][1]}}};
}

ParamBlock swap_k(const ParamBlock& p) {
  ParamBlock q = p;
  for (int i = 0; i < 2; ++i) {
    std::swap(q.a[i][0], q.a[i][1]);
    std::swap(q.b[i][0], q.b[i][1]);
  }
  return q;
}

ParamBlock swap_ab(const ParamBlock& p) {
  ParamBlock q = p;
  std::swap(q.a, q.b);
  return q;
}

Trial dual_path_trial(Family family, std::uint64_t seed, std::size_t blocks, std::size_t points) {
  const bool power = family == Family::power;
  Trial t{power ? "integral-power-dual-path" : "integral-gauss-dual-path"};
  // The power quadrature needs a >= 1 for a bounded integrand; the Gaussian
  // draws keep every exponent sum >= 1 so the truncated tail stays negligible.
  const double lo = power ? 1.0 : 0.5;
  Rng rng(seed);
  Json records = Json::array();
  bool pass = true;
  for (std::size_t r = 0; r < blocks; ++r) {
    const ParamBlock p = r == 0 ? ParamBlock::uniform(1.0) : random_block(rng, lo, 10.0);
    const DualPathReport rep = dual_path(family, p, points);
    pass = pass && rep.pass;
    records.push_back({{"params", block_json(p)},
                       {"closed", rep.closed},
                       {"quadrature_n", rep.coarse},
                       {"quadrature_2n", rep.fine},
                       {"error", rep.error},
                       {"envelope", rep.envelope},
                       {"pass", rep.pass}});
  }
  t.pass = pass;
  t.data = {{"blocks", blocks}, {"points", points}, {"range", {lo, 10.0}}, {"records", records}};
  return t;
}

}  // namespace

std::vector<Trial> battery_integral_closed_forms(std::uint64_t seed, std::size_t draws,
                                                 std::size_t dual_blocks, std::size_t points) {
  std::vector<Trial> out;
  for (Family family : {Family::power, Family::gaussian}) {
    const bool power = family == Family::power;
    const auto value = [&](const ParamBlock& p) {
      return power ? power_inequality(p) : gaussian_inequality(p);
    };
    Trial nonneg{power ? "integral-power-nonnegative" : "integral-gauss-nonnegative"};
    Trial sym{power ? "integral-power-symmetry" : "integral-gauss-symmetry"};
    Rng rng(derive_seed(seed, power ? 0 : 1));
    double min_value = std::numeric_limits<double>::infinity();
    ParamBlock argmin;
    std::size_t asymmetric = 0;
    for (std::size_t r = 0; r < draws; ++r) {
      const ParamBlock p = random_block(rng, 0.1, 10.0);
      const double v = value(p);
      if (v < min_value) {
        min_value = v;
        argmin = p;
      }
      if (value(swap_k(p)) != v || value(swap_ab(p)) != v) ++asymmetric;
    }
    nonneg.pass = min_value >= -1e-9;
    nonneg.data = {{"draws", draws}, {"range", {0.1, 10.0}}, {"min_value", min_value},
                   {"argmin", block_json(argmin)}};
    sym.pass = asymmetric == 0;
    sym.data = {{"draws", draws}, {"asymmetric", asymmetric}};
    out.push_back(std::move(nonneg));
    out.push_back(std::move(sym));
    out.push_back(dual_path_trial(family, derive_seed(seed, power ? 2 : 3), dual_blocks, points));
  }
  return out;
}

std::vector<Trial> battery_integral_conjectural(std::uint64_t seed, std::size_t samples,
                                                std::size_t points) {
  Trial t{"integral-m2-n2-conjectural"};
  t.asserted = false;
  const GridSpec g(-4.0, 4.0, points);
  Json records = Json::array();
  double min_value = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < samples; ++r) {
    Rng rng(derive_seed(seed, r));
    std::vector<Hypermatrix> xs, us;
    for (int b = 0; b < 4; ++b) {
      const double a1 = rng.uniform(0.3, 3.0), a2 = rng.uniform(0.3, 3.0);
      const double c1 = rng.uniform(-1.0, 1.0), c2 = rng.uniform(-1.0, 1.0);
      const Complex phase = std::polar(1.0, rng.uniform(0.0, 6.283185307179586));
      const FunctionN f = [=](std::span<const double> s) {
        return phase * std::exp(-a1 * (s[0] - c1) * (s[0] - c1) - a2 * (s[1] - c2) * (s[1] - c2));
      };
      (b < 2 ? xs : us).push_back(discretize(f, {g, g}));
    }
    const PhiBreakdown br = phi(CbsInput(std::move(xs), std::move(us)));
    min_value = std::min(min_value, br.total);
    records.push_back({{"phi", br.total}, {"cancellation_mass", br.cancellation_mass}});
  }
  t.pass = min_value >= candidate_threshold;
  t.data = {{"samples", samples}, {"points", points}, {"min_value", min_value}, {"records", records}};
  return {t};
}

std::vector<Trial> battery_quadrature_convergence(const std::vector<std::size_t>& grid_sizes) {
  Trial t{"quadrature-convergence"};
  const double exact = 1.0 / 12.0;
  Json records = Json::array();
  bool pass = !grid_sizes.empty();
  double prev_error = std::numeric_limits<double>::infinity();
  double prev_value = std::numeric_limits<double>::quiet_NaN();
  double prev_cauchy = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid_sizes.size(); ++k) {
    const std::size_t n = grid_sizes[k];
    const double v = integral_phi_m1({[](double) { return Complex(1.0); }},
                                     {[](double s) { return Complex(s); }},
                                     GridSpec(0.0, 1.0, n))
                         .total;
    const double err = std::fabs(v - exact);
    pass = pass && err < prev_error && err <= 2e-2 * exact;
    Json rec = {{"points", n}, {"phi", v}, {"error", err}};
    if (k > 0) {
      const double cauchy = std::fabs(v - prev_value);
      pass = pass && cauchy < prev_cauchy;
      prev_cauchy = cauchy;
      rec["cauchy_difference"] = cauchy;
    }
    records.push_back(std::move(rec));
    prev_error = err;
    prev_value = v;
  }
  t.pass = pass;
  t.data = {{"exact", exact}, {"records", records}};
  return {t};
}

namespace {

// Reads keys with defaults and echoes the effective configuration.
class ConfigReader {
 public:
  explicit ConfigReader(const Json& in) : in_(in.is_null() ? Json::object() : in) {
    if (!in_.is_object()) fail(ErrorCode::parse_error, "configuration must be a JSON object");
  }

  template <class T>
  T get(const std::string& key, T def) {
    T v = in_.contains(key) ? in_.at(key).get<T>() : def;
    out_[key] = v;
    return v;
  }
  bool has(const std::string& key) const { return in_.contains(key); }

  /// Rejects keys that no reader consumed.
  void finish() const {
    for (auto it = in_.begin(); it != in_.end(); ++it)
      if (!out_.contains(it.key()))
        fail(ErrorCode::parse_error, "unknown configuration key \"" + it.key() + "\"");
  }
  const Json& effective() const { return out_; }

 private:
  Json in_;
  Json out_ = Json::object();
};

std::string read_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ParamBlock block_from(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != 4 || b.size() != 4)
    fail(ErrorCode::parse_error, "parameter blocks need 4 values each for a and b");
  ParamBlock p;
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      p.a[i][k] = a[2 * i + k];
      p.b[i][k] = b[2 * i + k];
    }
  return p;
}

std::vector<DimVector> default_oracle_dims() {
  return {DimVector{2}, DimVector{3}, DimVector{2, 2}, DimVector{2, 3}, DimVector{3, 3}};
}

std::vector<Trial> prefix(std::string tag, std::vector<Trial> trials) {
  for (auto& t : trials) t.name = tag + " " + t.name;
  return trials;
}

GradientMode gradient_mode(const std::string& name) {
  if (name == "fd" || name == "finite-difference") return GradientMode::finite_difference;
  if (name == "analytic") return GradientMode::analytic;
  fail(ErrorCode::parse_error, "gradient must be \"fd\" or \"analytic\"");
}

RunReport run_suite(ConfigReader& cfg, RunReport report) {
  const auto seed = cfg.get<std::uint64_t>("seed", 42);
  const auto threads = cfg.get<std::size_t>("threads", 1);
  const auto gradient = gradient_mode(cfg.get<std::string>("gradient", "fd"));
  cfg.finish();
  report.add_seed(seed);
  report.add(prefix("criterion-1", battery_lagrange_exact(derive_seed(seed, 1))));
  report.add(prefix("criterion-2", battery_lagrange_complex(derive_seed(seed, 2))));
  report.add(prefix("criterion-3", battery_sign_lemma(derive_seed(seed, 3))));
  report.add(prefix("criterion-4", battery_oracle(derive_seed(seed, 4), default_oracle_dims())));
  report.add(prefix("criterion-5", battery_witnesses({2, 3, 4})));
  for (auto kind : {InvarianceKind::permute, InvarianceKind::unit_axis, InvarianceKind::unitary,
                    InvarianceKind::mixing})
    report.add(prefix("criterion-6",
                      battery_invariance(kind, derive_seed(seed, 60 + static_cast<int>(kind)))));
  report.add(prefix("criterion-7", battery_m1(derive_seed(seed, 7))));
  SearchConfig tmpl;
  tmpl.restarts = 50;
  tmpl.seed = derive_seed(seed, 8);
  tmpl.threads = threads;
  tmpl.gradient = gradient;
  report.add(prefix("criterion-8", battery_campaign(proven_campaign_grid(), tmpl)));
  SearchConfig probe = tmpl;
  probe.restarts = 100;
  probe.seed = derive_seed(seed, 9);
  auto open = battery_campaign({{DimVector{3, 3}, 2}}, probe);
  for (auto& t : open) t.asserted = false;
  report.add(prefix("criterion-9", std::move(open)));
  report.add(prefix("criterion-10", battery_integral_closed_forms(derive_seed(seed, 10))));
  report.add(prefix("criterion-11", battery_quadrature_convergence()));
  return report;
}

RunReport dispatch(const std::string& command, ConfigReader& cfg, RunReport report) {
  if (command == "suite") return run_suite(cfg, std::move(report));

  if (command == "verify-lagrange") {
    const auto seed = cfg.get<std::uint64_t>("seed", 42);
    const auto trials = cfg.get<std::size_t>("trials", 500);
    const auto tol = cfg.get<double>("tol", default_lagrange_tol);
    const auto mode = cfg.get<std::string>("mode", "all");
    const auto input = cfg.get<std::string>("input", "");
    cfg.finish();
    report.add_seed(seed);
    if (!input.empty()) {
      const std::string bytes = read_bytes(input);
      report.add_input(input, sha256_hex(bytes));
      const CbsInput in = cbs_input_from_json(Json::parse(bytes));
      if (in.n() != 1) fail(ErrorCode::precondition_failed, "Lagrange identity needs n = 1");
      const LagrangeReport rep = verify_lagrange(in.x(0), in.u(0), tol);
      report.add(Trial{"lagrange-input", true, rep.pass,
                       {{"phi", rep.phi},
                        {"rhs_full", rep.rhs_full},
                        {"rhs_restricted", rep.rhs_restricted},
                        {"cancellation_mass", rep.cancellation_mass},
                        {"max_deviation", rep.max_deviation}}});
      return report;
    }
    if (mode != "all" && mode != "exact" && mode != "complex" && mode != "sign")
      fail(ErrorCode::parse_error, "mode must be all, exact, complex or sign");
    if (mode == "all" || mode == "exact")
      report.add(battery_lagrange_exact(derive_seed(seed, 1), trials));
    if (mode == "all" || mode == "complex")
      report.add(battery_lagrange_complex(derive_seed(seed, 2), trials, tol));
    if (mode == "all" || mode == "sign") report.add(battery_sign_lemma(derive_seed(seed, 3)));
    return report;
  }

  if (command == "verify-invariance") {
    const auto seed = cfg.get<std::uint64_t>("seed", 42);
    const auto trials = cfg.get<std::size_t>("trials", 200);
    const auto kind = cfg.get<std::string>("kind", "all");
    cfg.finish();
    report.add_seed(seed);
    const std::vector<std::pair<std::string, InvarianceKind>> kinds{
        {"permute", InvarianceKind::permute},
        {"unit-axis", InvarianceKind::unit_axis},
        {"unitary", InvarianceKind::unitary},
        {"mixing", InvarianceKind::mixing}};
    bool matched = false;
    for (const auto& [name, k] : kinds)
      if (kind == "all" || kind == name) {
        matched = true;
        report.add(battery_invariance(k, derive_seed(seed, 60 + static_cast<int>(k)), trials));
      }
    if (!matched) fail(ErrorCode::parse_error, "kind must be permute, unit-axis, unitary, mixing or all");
    return report;
  }

  if (command == "eval-phi") {
    const auto input = cfg.get<std::string>("input", "");
    const auto budget = cfg.get<double>("budget", default_work_budget);
    cfg.finish();
    if (input.empty()) fail(ErrorCode::parse_error, "eval-phi needs an input file");
    const std::string bytes = read_bytes(input);
    report.add_input(input, sha256_hex(bytes));
    const CbsInput in = cbs_input_from_json(Json::parse(bytes));
    Trial t{"eval-phi", false, true, to_json(phi(in, budget))};
    t.data["shape"] = in.shape().dims();
    t.data["n"] = in.n();
    report.add(std::move(t));
    return report;
  }

  if (command == "oracle-check") {
    const auto seed = cfg.get<std::uint64_t>("seed", 42);
    const auto trials = cfg.get<std::size_t>("trials", 100);
    const auto tol = cfg.get<double>("tol", 1e-10);
    std::vector<DimVector> dims = default_oracle_dims();
    if (cfg.has("dims")) {
      dims.clear();
      for (const auto& d : cfg.get<std::vector<std::vector<std::size_t>>>("dims", {}))
        dims.emplace_back(d);
    }
    cfg.finish();
    report.add_seed(seed);
    report.add(battery_oracle(derive_seed(seed, 4), dims, trials, tol));
    return report;
  }

  if (command == "werner-check") {
    const auto seed = cfg.get<std::uint64_t>("seed", 42);
    const auto ds = cfg.get<std::vector<std::size_t>>("d", {2, 3, 4});
    const auto points = cfg.get<std::size_t>("points", 21);
    const auto tol = cfg.get<double>("tol", 1e-12);
    const auto sweep_restarts = cfg.get<std::size_t>("sweep_restarts", 0);
    cfg.finish();
    report.add_seed(seed);
    report.add(battery_witnesses(ds, points, tol));
    if (sweep_restarts > 0) {
      std::vector<double> grid;
      for (std::size_t g = 0; g <= 20; ++g) grid.push_back(static_cast<double>(g) / 20.0);
      for (std::size_t k = 0; k < ds.size(); ++k)
        report.add(battery_werner_sweep(derive_seed(seed, 5 + k), ds[k], grid, sweep_restarts));
    }
    return report;
  }

  if (command == "search") {
    SearchConfig sc;
    sc.dims = DimVector(cfg.get<std::vector<std::size_t>>("dims", {2}));
    sc.n = cfg.get<std::size_t>("n", 2);
    sc.restarts = cfg.get<std::size_t>("restarts", 100);
    sc.max_iters = cfg.get<std::size_t>("iters", 2000);
    sc.seed = cfg.get<std::uint64_t>("seed", 0);
    sc.threads = cfg.get<std::size_t>("threads", 1);
    sc.budget = cfg.get<double>("budget", default_work_budget);
    sc.step_init = cfg.get<double>("step", 0.1);
    sc.grad_eps = cfg.get<double>("grad_eps", 1e-6);
    sc.gradient = gradient_mode(cfg.get<std::string>("gradient", "fd"));
    const auto candidates_dir = cfg.get<std::string>("candidates_dir", "");
    cfg.finish();
    report.add_seed(sc.seed);
    {
      const SearchResult res = minimize_phi(sc);
      const bool proven = proven_nonnegative(sc.dims, sc.n);
      Trial t{"search " + sc.dims.to_string() + " n=" + std::to_string(sc.n)};
      t.asserted = proven;
      const Json best = to_json(res.best_input);
      const PhiBreakdown check = phi(cbs_input_from_json(Json::parse(best.dump())), sc.budget);
      const double dev = relative_deviation(check.total, res.best_value, check.cancellation_mass);
      std::size_t converged = 0, aborted = 0;
      Json finals = Json::array();
      for (const auto& rec : res.per_restart) {
        converged += rec.converged ? 1 : 0;
        aborted += rec.aborted ? 1 : 0;
        finals.push_back(rec.final_value);
      }
      const bool candidate = res.best_value < candidate_threshold;
      t.pass = dev <= 1e-12 && res.best_value >= (proven ? -1e-8 : candidate_threshold);
      t.data = {{"dims", sc.dims.dims()},
                {"n", sc.n},
                {"seed", sc.seed},
                {"proven_nonnegative", proven},
                {"best_value", res.best_value},
                {"best_restart", res.best_restart},
                {"reverified_value", check.total},
                {"reverify_deviation", dev},
                {"restarts", res.per_restart.size()},
                {"converged_restarts", converged},
                {"aborted_restarts", aborted},
                {"final_values", finals},
                {"candidate", candidate},
                {"search_wall_time_s", res.wall_time},
                {"best_input", best}};
      if (candidate && !candidates_dir.empty()) {
        std::filesystem::create_directories(candidates_dir);
        std::string tag = sc.dims.to_string();
        std::replace_if(tag.begin(), tag.end(), [](char c) { return !std::isalnum(c); }, '_');
        const std::string path = (std::filesystem::path(candidates_dir) /
                                  ("candidate" + tag + "n" + std::to_string(sc.n) + "_seed" +
                                   std::to_string(sc.seed) + ".json"))
                                     .string();
        write_json_file(path, best);
        t.data["candidate_file"] = path;
      }
      report.add(std::move(t));
    }
    return report;
  }

  if (command == "integral") {
    const auto family = cfg.get<std::string>("family", "quadrature");
    const auto seed = cfg.get<std::uint64_t>("seed", 42);
    const auto points = cfg.get<std::size_t>("points", 256);
    report.add_seed(seed);
    if (family == "power" || family == "gauss") {
      const Family fam = family == "power" ? Family::power : Family::gaussian;
      if (cfg.has("a") || cfg.has("b")) {
        const ParamBlock p = block_from(cfg.get<std::vector<double>>("a", {}),
                                        cfg.get<std::vector<double>>("b", {}));
        const bool dual = cfg.get<bool>("dual_path", false);
        cfg.finish();
        const double v = fam == Family::power ? power_inequality(p) : gaussian_inequality(p);
        report.add(Trial{"integral-" + family, true, v >= -1e-9,
                         {{"params", block_json(p)}, {"value", v}}});
        if (dual) {
          const DualPathReport rep = dual_path(fam, p, points);
          report.add(Trial{"integral-" + family + "-dual-path", false, rep.pass,
                           {{"closed", rep.closed},
                            {"quadrature_n", rep.coarse},
                            {"quadrature_2n", rep.fine},
                            {"error", rep.error},
                            {"envelope", rep.envelope}}});
        }
        return report;
      }
      const auto draws = cfg.get<std::size_t>("draws", 10000);
      const auto blocks = cfg.get<std::size_t>("dual_blocks", 20);
      cfg.finish();
      auto trials = battery_integral_closed_forms(derive_seed(seed, 10), draws, blocks, points);
      const std::string tag = fam == Family::power ? "power" : "gauss";
      for (auto& t : trials)
        if (t.name.find(tag) != std::string::npos) report.add(std::move(t));
      return report;
    }
    if (family == "quadrature") {
      const auto sizes = cfg.get<std::vector<std::size_t>>("grid_sizes", {32, 64, 128, 256});
      cfg.finish();
      report.add(battery_quadrature_convergence(sizes));
      report.add(battery_integral_conjectural(derive_seed(seed, 11)));
      return report;
    }
    fail(ErrorCode::parse_error, "integral family must be power, gauss or quadrature");
  }

  fail(ErrorCode::parse_error, "unknown command \"" + command + "\"");
}

}  // namespace

RunReport run_command(const std::string& command, const Json& config) {
  const auto start = std::chrono::steady_clock::now();
  ConfigReader cfg(config);
  RunReport report = [&] {
    try {
      return dispatch(command, cfg, RunReport(command, Json::object()));
    } catch (const Json::exception& e) {
      fail(ErrorCode::parse_error, std::string("configuration: ") + e.what());
    }
  }();
  report.set_config(cfg.effective());
  report.set_wall_time(
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  return report;
}

}  // namespace cbsforge
