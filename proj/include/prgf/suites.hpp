#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace prgf {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return !checks.empty();
  }
  nlohmann::json to_json() const;
};

/// Suites: theorem1, lambda, mu, beta, covariance, monotonic, sigma-sweep.
std::vector<std::string> suite_names();
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

SuiteReport suite_theorem1(std::uint64_t seed);
SuiteReport suite_lambda(std::uint64_t seed);
SuiteReport suite_mu(std::uint64_t seed);
SuiteReport suite_beta(std::uint64_t seed);
SuiteReport suite_covariance(std::uint64_t seed);
SuiteReport suite_monotonic(std::uint64_t seed);
SuiteReport suite_sigma_sweep(std::uint64_t seed);

}  // namespace prgf
