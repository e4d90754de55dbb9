#pragma once

// JSON run reports. Every trial is labeled asserted or report-only; only
// asserted trials decide the aggregate verdict.

#include <cstdint>
#include <string>
#include <vector>

#include "cbsforge/json_io.hpp"

namespace cbsforge {

inline constexpr int report_schema_version = 1;
inline constexpr const char* tool_version = "0.1.0";

struct Trial {
  std::string name;
  bool asserted = true;
  bool pass = true;
  Json data = Json::object();
};

class RunReport {
 public:
  RunReport(std::string command, Json config);

  void add(Trial trial) { trials_.push_back(std::move(trial)); }
  void add(std::vector<Trial> trials);
  void add_seed(std::uint64_t seed) { seeds_.push_back(seed); }
  /// Cites an input file by its SHA-256 digest.
  void add_input(const std::string& path, const std::string& sha256);
  void set_wall_time(double seconds) { wall_time_ = seconds; }
  void set_config(Json config) { config_ = std::move(config); }

  const std::string& command() const { return command_; }
  const std::vector<Trial>& trials() const { return trials_; }
  /// True iff every asserted trial passed.
  bool pass() const;

  Json to_json() const;

 private:
  std::string command_;
  Json config_;
  std::vector<std::uint64_t> seeds_;
  Json inputs_ = Json::array();
  std::vector<Trial> trials_;
  double wall_time_ = 0.0;
};

}  // namespace cbsforge
