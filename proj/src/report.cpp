#include "cbsforge/report.hpp"

#include <algorithm>

namespace cbsforge {

RunReport::RunReport(std::string command, Json config)
    : command_(std::move(command)), config_(std::move(config)) {}

void RunReport::add(std::vector<Trial> trials) {
  for (auto& t : trials) trials_.push_back(std::move(t));
}

void RunReport::add_input(const std::string& path, const std::string& sha256) {
  inputs_.push_back({{"path", path}, {"sha256", sha256}});
}

bool RunReport::pass() const {
  return std::all_of(trials_.begin(), trials_.end(),
                     [](const Trial& t) { return !t.asserted || t.pass; });
}

Json RunReport::to_json() const {
  Json trials = Json::array();
  std::size_t asserted = 0, failed = 0;
  for (const auto& t : trials_) {
    if (t.asserted) {
      ++asserted;
      if (!t.pass) ++failed;
    }
    trials.push_back({{"name", t.name},
                      {"kind", t.asserted ? "asserted" : "report-only"},
                      {"pass", t.pass},
                      {"data", t.data}});
  }
  return Json{{"schema_version", report_schema_version},
              {"tool", "cbs-forge"},
              {"tool_version", tool_version},
              {"command", command_},
              {"config", config_},
              {"seeds", seeds_},
              {"inputs", inputs_},
              {"trials", std::move(trials)},
              {"asserted_trials", asserted},
              {"failed_trials", failed},
              {"pass", pass()},
              {"wall_time_s", wall_time_}};
}

}  // namespace cbsforge
