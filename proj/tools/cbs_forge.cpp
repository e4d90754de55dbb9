// cbs-forge: command-line front end over the libcbsforge C interface.
//
// Exit codes: 0 all asserted checks passed, 1 an asserted check failed,
// 2 usage or input error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cbsforge/cbsforge.h"

namespace {

using nlohmann::json;

constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

struct Common {
  std::uint64_t seed = 42;
  std::string out;
  double budget = 1e9;
  double tol = 0.0;
  std::size_t threads = 1;
  std::string config;
};

std::size_t env_threads() {
  if (const char* v = std::getenv("CBS_FORGE_THREADS")) {
    try {
      const long long n = std::stoll(v);
      if (n >= 1) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring CBS_FORGE_THREADS=" << v << '\n';
  }
  return 1;
}

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(item, &pos);
    if (pos != item.size() || v == 0) throw CLI::ValidationError("--dims", "bad entry " + item);
    dims.push_back(static_cast<std::size_t>(v));
  }
  if (dims.empty()) throw CLI::ValidationError("--dims", "empty dimension vector");
  return dims;
}

json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  return json::parse(f);
}

int emit(cbs_report* report, const std::string& out) {
  char* text = nullptr;
  if (cbs_report_json(report, 2, &text) != CBS_OK) {
    std::cerr << "error: " << cbs_last_error() << '\n';
    return exit_usage;
  }
  if (out.empty() || out == "-") {
    std::cout << text << '\n';
  } else {
    std::ofstream f(out);
    if (!f) {
      cbs_string_free(text);
      std::cerr << "error: cannot write " << out << '\n';
      return exit_usage;
    }
    f << text << '\n';
  }
  const json parsed = json::parse(text);
  cbs_string_free(text);
  for (const auto& t : parsed.at("trials"))
    if (t.at("kind") == "asserted" && !t.at("pass").get<bool>())
      std::cerr << "FAILED: " << t.at("name").get<std::string>() << '\n';
  return cbs_report_passed(report) ? 0 : exit_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification and search engine for the generalized CBS functional"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cbs_version()));

  Common common;
  common.threads = env_threads();
  json cfg = json::object();

  const auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", common.out, "Report path (default stdout)");
    sub->add_option("--config", common.config, "JSON file with base configuration");
  };
  const auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "Base seed");
  };
  const auto add_tol = [&](CLI::App* sub) {
    sub->add_option("--tol", common.tol, "Relative tolerance")->check(CLI::PositiveNumber);
  };
  const auto add_budget = [&](CLI::App* sub) {
    sub->add_option("--budget", common.budget, "Work budget per evaluation")
        ->check(CLI::PositiveNumber);
  };
  const auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", common.threads, "Worker threads (env CBS_FORGE_THREADS)")
        ->check(CLI::PositiveNumber);
  };

  // verify-lagrange
  auto* lag = app.add_subcommand("verify-lagrange", "Lagrange identity: exact, complex, sign lemma");
  std::size_t lag_trials = 500;
  std::string lag_mode = "all", lag_input;
  lag->add_option("--trials", lag_trials, "Random pairs per battery");
  lag->add_option("--mode", lag_mode, "Battery selection")
      ->check(CLI::IsMember({"all", "exact", "complex", "sign"}));
  lag->add_option("--input", lag_input, "Check a single n = 1 input file instead")
      ->check(CLI::ExistingFile);
  add_seed(lag);
  add_tol(lag);
  add_out(lag);

  // verify-invariance
  auto* inv = app.add_subcommand("verify-invariance", "Symmetry laws of the functional");
  std::string inv_kind = "all";
  std::size_t inv_trials = 200;
  inv->add_option("kind", inv_kind, "permute | unit-axis | unitary | mixing | all")
      ->check(CLI::IsMember({"permute", "unit-axis", "unitary", "mixing", "all"}));
  inv->add_option("--trials", inv_trials, "Random trials per law");
  add_seed(inv);
  add_out(inv);

  // eval-phi
  auto* ev = app.add_subcommand("eval-phi", "Evaluate the functional on an input file");
  std::string ev_input;
  ev->add_option("--input", ev_input, "CbsInput JSON file")->required()->check(CLI::ExistingFile);
  add_budget(ev);
  add_out(ev);

  // oracle-check
  auto* orc = app.add_subcommand("oracle-check", "Dense-operator expectation against the functional");
  std::size_t orc_trials = 100;
  std::vector<std::string> orc_dims;
  orc->add_option("--trials", orc_trials, "Random specs per dimension vector");
  orc->add_option("--dims", orc_dims, "Dimension vector, e.g. 2,3 (repeatable)");
  add_seed(orc);
  add_tol(orc);
  add_out(orc);

  // werner-check
  auto* wer = app.add_subcommand("werner-check", "Closed-form witness values over a t grid");
  std::vector<std::size_t> wer_d;
  std::size_t wer_points = 21, wer_sweep = 0;
  wer->add_option("--d", wer_d, "Local dimensions")->delimiter(',');
  wer->add_option("--points", wer_points, "Grid points on [-1, 1]");
  wer->add_option("--sweep-restarts", wer_sweep, "Also run a report-only threshold sweep");
  add_seed(wer);
  add_tol(wer);
  add_out(wer);

  // search
  auto* srch = app.add_subcommand("search", "Multi-restart minimization of the functional");
  std::string srch_dims = "2";
  std::size_t srch_n = 2, srch_restarts = 100, srch_iters = 2000;
  std::string srch_gradient = "fd", srch_candidates;
  double srch_step = 0.1, srch_eps = 1e-6;
  srch->add_option("--dims", srch_dims, "Dimension vector, e.g. 3,3");
  srch->add_option("--n", srch_n, "Number of pairs")->check(CLI::PositiveNumber);
  srch->add_option("--restarts", srch_restarts, "Restarts")->check(CLI::PositiveNumber);
  srch->add_option("--iters", srch_iters, "Iterations per restart")->check(CLI::PositiveNumber);
  srch->add_option("--gradient", srch_gradient, "fd | analytic")
      ->check(CLI::IsMember({"fd", "analytic"}));
  srch->add_option("--step", srch_step, "Initial step");
  srch->add_option("--grad-eps", srch_eps, "Finite-difference step");
  srch->add_option("--candidates-dir", srch_candidates,
                   "Directory for candidate counterexample files");
  add_seed(srch);
  add_budget(srch);
  add_threads(srch);
  add_out(srch);

  // integral
  auto* itg = app.add_subcommand("integral", "Closed-form families and quadrature");
  std::string itg_family = "quadrature", itg_params;
  std::vector<double> itg_a, itg_b;
  std::vector<std::size_t> itg_sizes;
  std::size_t itg_draws = 10000, itg_blocks = 20, itg_points = 256;
  bool itg_dual = false;
  itg->add_option("family", itg_family, "power | gauss | quadrature")
      ->check(CLI::IsMember({"power", "gauss", "quadrature"}));
  itg->add_option("--a", itg_a, "a11,a12,a21,a22")->delimiter(',')->expected(4);
  itg->add_option("--b", itg_b, "b11,b12,b21,b22")->delimiter(',')->expected(4);
  itg->add_option("--params", itg_params, "JSON file {\"a\": [...], \"b\": [...]}")
      ->check(CLI::ExistingFile);
  itg->add_flag("--dual-path", itg_dual, "Compare a single block against quadrature");
  itg->add_option("--draws", itg_draws, "Random blocks for the nonnegativity battery");
  itg->add_option("--dual-blocks", itg_blocks, "Blocks for the dual-path battery");
  itg->add_option("--points", itg_points, "Quadrature nodes (coarse level)");
  itg->add_option("--grid-sizes", itg_sizes, "Refinement ladder for quadrature")->delimiter(',');
  add_seed(itg);
  add_out(itg);

  // suite
  auto* suite = app.add_subcommand("suite", "Full acceptance battery");
  std::string suite_gradient = "fd";
  suite->add_option("--gradient", suite_gradient, "fd | analytic")
      ->check(CLI::IsMember({"fd", "analytic"}));
  add_seed(suite);
  add_threads(suite);
  add_out(suite);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  const auto given = [&](const char* flag) {
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };

  try {
    if (!common.config.empty()) cfg = load_config(common.config);
    if (!cfg.is_object()) throw std::runtime_error("config file must hold a JSON object");
    if (given("--seed")) cfg["seed"] = common.seed;
    if (given("--tol")) cfg["tol"] = common.tol;
    if (given("--budget")) cfg["budget"] = common.budget;
    if (command == "search" || command == "suite")
      if (given("--threads") || !cfg.contains("threads")) cfg["threads"] = common.threads;

    if (command == "verify-lagrange") {
      if (given("--trials")) cfg["trials"] = lag_trials;
      if (given("--mode")) cfg["mode"] = lag_mode;
      if (given("--input")) cfg["input"] = lag_input;
    } else if (command == "verify-invariance") {
      if (given("kind")) cfg["kind"] = inv_kind;
      if (given("--trials")) cfg["trials"] = inv_trials;
    } else if (command == "eval-phi") {
      cfg["input"] = ev_input;
    } else if (command == "oracle-check") {
      if (given("--trials")) cfg["trials"] = orc_trials;
      if (given("--dims")) {
        json all = json::array();
        for (const auto& d : orc_dims) all.push_back(parse_dims(d));
        cfg["dims"] = all;
      }
    } else if (command == "werner-check") {
      if (given("--d")) cfg["d"] = wer_d;
      if (given("--points")) cfg["points"] = wer_points;
      if (given("--sweep-restarts")) cfg["sweep_restarts"] = wer_sweep;
    } else if (command == "search") {
      if (given("--dims") || !cfg.contains("dims")) cfg["dims"] = parse_dims(srch_dims);
      if (given("--n")) cfg["n"] = srch_n;
      if (given("--restarts")) cfg["restarts"] = srch_restarts;
      if (given("--iters")) cfg["iters"] = srch_iters;
      if (given("--gradient")) cfg["gradient"] = srch_gradient;
      if (given("--step")) cfg["step"] = srch_step;
      if (given("--grad-eps")) cfg["grad_eps"] = srch_eps;
      if (given("--candidates-dir")) cfg["candidates_dir"] = srch_candidates;
    } else if (command == "integral") {
      cfg["family"] = itg_family;
      if (!itg_params.empty()) {
        const json p = load_config(itg_params);
        cfg["a"] = p.at("a");
        cfg["b"] = p.at("b");
      }
      if (given("--a")) cfg["a"] = itg_a;
      if (given("--b")) cfg["b"] = itg_b;
      if (itg_dual) cfg["dual_path"] = true;
      if (given("--draws")) cfg["draws"] = itg_draws;
      if (given("--dual-blocks")) cfg["dual_blocks"] = itg_blocks;
      if (given("--points")) cfg["points"] = itg_points;
      if (given("--grid-sizes")) cfg["grid_sizes"] = itg_sizes;
    } else if (command == "suite") {
      if (given("--gradient")) cfg["gradient"] = suite_gradient;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }

  cbs_report* report = nullptr;
  const cbs_status status = cbs_run(command.c_str(), cfg.dump().c_str(), &report);
  if (status != CBS_OK) {
    std::cerr << "error (" << cbs_status_name(status) << "): " << cbs_last_error() << '\n';
    return exit_usage;
  }
  const int code = emit(report, common.out);
  cbs_report_free(report);
  return code;
}
