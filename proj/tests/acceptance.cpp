// Acceptance battery: one PASS/FAIL line per criterion, each bounded by its
// wall-clock limit. Exit status is nonzero iff an asserted criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cbsforge/rng.hpp"
#include "cbsforge/suites.hpp"

using namespace cbsforge;

namespace {

constexpr std::uint64_t base_seed = 42;

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool all_pass(const std::vector<Trial>& trials) {
  for (const auto& t : trials)
    if (t.asserted && !t.pass) return false;
  return !trials.empty();
}

std::string first_failure(const std::vector<Trial>& trials) {
  for (const auto& t : trials)
    if (t.asserted && !t.pass) return "failed: " + t.name;
  return "";
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("error: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > limit_s) {
    out.pass = false;
    out.detail += " runtime " + fmt("%.1f", secs) + " s exceeds " + fmt("%.0f", limit_s) + " s";
  }
  if (!out.pass) ++failures;
  std::printf("criterion %2d %-44s %s (%.2f s) %s\n", id, title, out.pass ? "PASS" : "FAIL", secs,
              out.detail.c_str());
  std::fflush(stdout);
}

double max_field(const std::vector<Trial>& trials, const char* key) {
  double worst = 0.0;
  for (const auto& t : trials) worst = std::max(worst, t.data.at(key).get<double>());
  return worst;
}

}  // namespace

int main() {
  criterion(1, "exact Lagrange identity", 30, [] {
    const auto trials = battery_lagrange_exact(derive_seed(base_seed, 1), 500);
    bool equal = trials.front().data.at("records").size() == 500;
    for (const auto& r : trials.front().data.at("records")) equal = equal && r.at("lhs") == r.at("rhs");
    return Outcome{all_pass(trials) && equal, "500 integer pairs, zero tolerance"};
  });

  criterion(2, "complex Lagrange three-way equality", 60, [] {
    const auto trials = battery_lagrange_complex(derive_seed(base_seed, 2), 500, 1e-10);
    const double worst = max_field(trials, "max_deviation");
    return Outcome{all_pass(trials) && worst <= 1e-10, "max deviation " + fmt("%.2e", worst)};
  });

  criterion(3, "sign lemma, exhaustive", 10, [] {
    const auto trials = battery_sign_lemma(derive_seed(base_seed, 3));
    const auto checks = trials.front().data.at("checks").get<std::size_t>();
    // (2,2): 4*4*4 triples, (2,3): 6*6*4 triples, 4 inputs each.
    return Outcome{all_pass(trials) && checks == 4 * (64 + 144),
                   std::to_string(checks) + " exact checks"};
  });

  criterion(4, "dual-path operator oracle", 60, [] {
    const std::vector<DimVector> dims{DimVector{2}, DimVector{3}, DimVector{2, 2}, DimVector{2, 3},
                                      DimVector{3, 3}};
    const auto trials = battery_oracle(derive_seed(base_seed, 4), dims, 100, 1e-10);
    const double worst = max_field(trials, "max_deviation");
    return Outcome{all_pass(trials) && trials.size() == 5 && worst <= 1e-10,
                   "max deviation " + fmt("%.2e", worst)};
  });

  criterion(5, "closed-form witnesses", 5, [] {
    const auto trials = battery_witnesses({2, 3, 4}, 21, 1e-12);
    const double worst = max_field(trials, "max_deviation");
    return Outcome{all_pass(trials) && worst <= 1e-12, "max |error| " + fmt("%.2e", worst)};
  });

  criterion(6, "invariance battery", 120, [] {
    std::vector<Trial> all;
    std::string detail;
    for (auto kind : {InvarianceKind::permute, InvarianceKind::unit_axis, InvarianceKind::unitary,
                      InvarianceKind::mixing}) {
      auto t = battery_invariance(kind, derive_seed(base_seed, 60 + static_cast<int>(kind)), 200);
      detail += t.front().name.substr(11) + " " +
                fmt("%.1e", t.front().data.at("max_deviation").get<double>()) + "; ";
      all.insert(all.end(), t.begin(), t.end());
    }
    return Outcome{all_pass(all) && all.size() == 4, detail + first_failure(all)};
  });

  criterion(7, "m=1 closed form and nonnegativity", 20, [] {
    const auto trials = battery_m1(derive_seed(base_seed, 7), 500);
    const auto& d = trials.front().data;
    return Outcome{all_pass(trials) && d.at("max_deviation").get<double>() <= 1e-12 &&
                       d.at("min_phi").get<double>() >= -1e-12,
                   "max deviation " + fmt("%.2e", d.at("max_deviation").get<double>()) +
                       ", min phi " + fmt("%.2e", d.at("min_phi").get<double>())};
  });

  criterion(8, "proven-region search safety", 900, [] {
    SearchConfig tmpl;
    tmpl.restarts = 50;
    tmpl.seed = derive_seed(base_seed, 8);
    const auto grid = proven_campaign_grid();
    const auto trials = battery_campaign(grid, tmpl);
    double min_value = INFINITY;
    bool ok = trials.size() == grid.size();
    for (const auto& t : trials) {
      ok = ok && t.asserted && t.data.contains("best_value");
      if (!t.data.contains("best_value")) continue;
      const double v = t.data.at("best_value").get<double>();
      min_value = std::min(min_value, v);
      ok = ok && v >= -1e-8 && t.data.at("reverify_deviation").get<double>() <= 1e-12;
    }
    return Outcome{ok && all_pass(trials), std::to_string(trials.size()) +
                                               " cells, min best_value " +
                                               fmt("%.2e", min_value) + " " +
                                               first_failure(trials)};
  });

  criterion(9, "open-conjecture probe (report-only)", 1e9, [] {
    SearchConfig probe;
    probe.restarts = 100;
    probe.seed = derive_seed(base_seed, 9);
    const auto trials = battery_campaign({{DimVector{3, 3}, 2}}, probe);
    const double v = trials.front().data.value("best_value", NAN);
    return Outcome{true, "best_value " + fmt("%.3e", v) +
                             (v >= -1e-6 ? " (>= -1e-6)" : " (below -1e-6: candidate)")};
  });

  criterion(10, "integral closed forms and dual path", 60, [] {
    const auto trials = battery_integral_closed_forms(derive_seed(base_seed, 10), 10000, 20, 256);
    std::string detail;
    for (const auto& t : trials)
      if (t.data.contains("min_value"))
        detail += t.name + " min " + fmt("%.3e", t.data.at("min_value").get<double>()) + "; ";
    return Outcome{all_pass(trials) && trials.size() == 6, detail + first_failure(trials)};
  });

  criterion(11, "quadrature convergence", 5, [] {
    const auto trials = battery_quadrature_convergence({32, 64, 128, 256});
    const auto& recs = trials.front().data.at("records");
    return Outcome{all_pass(trials),
                   "error at N=256 " + fmt("%.2e", recs.back().at("error").get<double>())};
  });

  std::printf("%s: %d criterion failure(s)\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
