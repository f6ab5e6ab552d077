#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

namespace cftlab {

struct SuiteCase {
  nlohmann::json inputs;
  double residual = 0.0;
  double tolerance = 0.0;
  bool expect_large = false;  // negative control: passes when residual exceeds tolerance
  bool pass = false;
};

struct SuiteReport {
  std::string suite;
  std::vector<SuiteCase> cases;

  bool pass() const;
  double worst_residual() const;  // over ordinary cases
  nlohmann::json to_json() const;
};

struct SuiteOptions {
  std::uint64_t seed = 20240501;
  int configurations = 20;
};

std::vector<std::string> suite_names();
// Throws UnknownName for an unregistered suite.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opts = {});

}  // namespace cftlab
