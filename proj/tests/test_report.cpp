#include "doctest.h"
#include "support.hpp"

#include "cbsforge/suites.hpp"

using namespace cbsforge;

TEST_CASE("report serialization") {
  RunReport rep("verify-lagrange", Json{{"seed", 3}});
  rep.add_seed(3);
  rep.add_input("in.json", sha256_hex("{}"));
  rep.add(Trial{"checked", true, true, Json{{"value", 1.5}}});
  rep.add(Trial{"observed", false, false, Json::object()});
  rep.set_wall_time(0.25);
  CHECK(rep.pass());

  const Json j = Json::parse(rep.to_json().dump());
  CHECK(j.at("schema_version") == report_schema_version);
  CHECK(j.at("tool_version") == tool_version);
  CHECK(j.at("command") == "verify-lagrange");
  CHECK(j.at("config").at("seed") == 3);
  CHECK(j.at("seeds") == Json::array({3}));
  CHECK(j.at("inputs").at(0).at("sha256") == sha256_hex("{}"));
  CHECK(j.at("trials").size() == 2);
  CHECK(j.at("trials").at(0).at("kind") == "asserted");
  CHECK(j.at("trials").at(1).at("kind") == "report-only");
  CHECK(j.at("trials").at(0).at("data").at("value") == 1.5);
  CHECK(j.at("asserted_trials") == 1);
  CHECK(j.at("failed_trials") == 0);
  CHECK(j.at("pass") == true);
  CHECK(j.at("wall_time_s") == 0.25);

  rep.add(Trial{"broken", true, false, Json::object()});
  CHECK_FALSE(rep.pass());
  CHECK(rep.to_json().at("failed_trials") == 1);
  CHECK(rep.to_json().at("pass") == false);
}

TEST_CASE("a report with no asserted trials passes") {
  RunReport rep("search", Json::object());
  rep.add(Trial{"probe", false, false, Json::object()});
  CHECK(rep.pass());
}

TEST_CASE("commands echo their effective configuration") {
  const RunReport rep = run_command("verify-lagrange", Json{{"trials", 5}, {"seed", 9}});
  CHECK(rep.pass());
  const Json cfg = rep.to_json().at("config");
  CHECK(cfg.at("trials") == 5);
  CHECK(cfg.at("seed") == 9);
  CHECK(cfg.contains("tol"));
  CHECK(cfg.contains("mode"));
}

TEST_CASE("command configuration errors") {
  CHECK_CODE(run_command("verify-lagrange", Json{{"bogus", 1}}), ErrorCode::parse_error);
  CHECK_CODE(run_command("verify-lagrange", Json{{"trials", "many"}}), ErrorCode::parse_error);
  CHECK_CODE(run_command("frobnicate", Json::object()), ErrorCode::parse_error);
  CHECK_CODE(run_command("verify-lagrange", Json::array()), ErrorCode::parse_error);
  CHECK_CODE(run_command("eval-phi", Json{{"input", "/nonexistent.json"}}), ErrorCode::io_error);
  CHECK_CODE(run_command("search", Json{{"gradient", "newton"}}), ErrorCode::parse_error);
}

TEST_CASE("a tolerance below roundoff fails an asserted trial") {
  const RunReport rep =
      run_command("verify-lagrange", Json{{"mode", "complex"}, {"trials", 20}, {"tol", 1e-300}});
  CHECK_FALSE(rep.pass());
}

TEST_CASE("search command reports are identical across thread counts") {
  Json cfg{{"dims", {2, 2}}, {"n", 2}, {"restarts", 3}, {"iters", 100}, {"seed", 5}};
  cfg["threads"] = 1;
  Json a = run_command("search", cfg).to_json();
  cfg["threads"] = 3;
  Json b = run_command("search", cfg).to_json();
  for (Json* j : {&a, &b}) {
    j->erase("wall_time_s");
    j->at("config").erase("threads");
    for (auto& t : j->at("trials")) t.at("data").erase("search_wall_time_s");
  }
  CHECK(a == b);
}

TEST_CASE("proven cells") {
  CHECK(proven_nonnegative(DimVector{5}, 7));
  CHECK(proven_nonnegative(DimVector{3, 3, 3}, 1));
  CHECK(proven_nonnegative(DimVector{2, 4}, 2));
  CHECK(proven_nonnegative(DimVector{2, 2, 5}, 2));
  CHECK_FALSE(proven_nonnegative(DimVector{3, 3}, 2));
  CHECK_FALSE(proven_nonnegative(DimVector{2, 2}, 3));
}
