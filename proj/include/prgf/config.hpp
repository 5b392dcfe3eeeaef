#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "prgf/bench.hpp"

namespace prgf {

/// Fully describes an attack or benchmark run. Loaded from JSON with strict
/// validation: unknown keys are rejected everywhere, and nothing is computed
/// before the whole document checks out.
struct RunConfig {
  SyntheticModelSpec model;
  std::string oracle = "local";  // "local" or "remote://host:port"
  EstimatorConfig estimator;
  double prior_cosine = 0.4;
  PriorSource::Mode prior_mode = PriorSource::Mode::Rederive;
  std::optional<SubspaceConfig> subspace;
  AttackConfig attack;
  std::vector<std::uint64_t> seeds;
  std::int64_t label = 0;
  std::optional<RealVec> x0;  // default: origin
  std::string traces_path = "traces.jsonl";
  std::string summary_path = "summary.csv";
  std::string curve_path = "curve.csv";
  std::vector<BenchMethodSpec> bench_methods;

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::string& path);

  /// Emits the config with every runtime default resolved (sigma, epsilon,
  /// seeds), so a report embedding it reruns bit-identically.
  nlohmann::json to_json() const;

  /// Remote endpoint when oracle is "remote://...", nullopt for "local".
  std::optional<Endpoint> remote_endpoint() const;

  BenchConfig to_bench_config() const;

  void validate() const;
};

}  // namespace prgf
