#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prgf/attack.hpp"
#include "prgf/client.hpp"
#include "prgf/estimator.hpp"
#include "prgf/server.hpp"
#include "prgf/subspace.hpp"
#include "prgf/synthetic.hpp"

namespace prgf {

struct SubspaceConfig {
  Eigen::Index d = 0;
  SubspaceMode mode = SubspaceMode::BlockReplication;
  Eigen::Index channels = 3;  // image mode only
};

/// One labelled estimator variant in a benchmark sweep.
struct BenchMethodSpec {
  std::string label;
  EstimatorConfig est;
};

struct BenchConfig {
  SyntheticModelSpec model;
  std::optional<Endpoint> remote;  // query over the wire instead of in-process
  double prior_cosine = 0.4;
  PriorSource::Mode prior_mode = PriorSource::Mode::Rederive;
  std::optional<SubspaceConfig> subspace;
  AttackConfig attack;
  std::vector<BenchMethodSpec> methods;
  std::vector<std::uint64_t> seeds;
  std::int64_t label = 0;
  std::optional<RealVec> x0;  // default: origin
};

struct BenchMethodResult {
  std::string label;
  AttackSummary summary;
  std::vector<AttackTrace> traces;        // one per seed, in seed order
  std::optional<double> median_queries;   // failures count as max_queries
};

struct BenchResult {
  std::vector<BenchMethodResult> methods;
};

/// Runs every (method, seed) attack. Seeds share the model; each run gets a
/// fresh oracle (or connection) with budget attack.max_queries and rng streams
/// derived from its seed, so results are reproducible and order-independent.
BenchResult run_bench(const BenchConfig& cfg);

/// Runs one attack with the rng stream conventions used by the bench: the
/// prior source rotates on stream (seed, 1) and the estimator samples on
/// stream (seed, 2).
AttackTrace run_single_attack(LossOracle& oracle, const SyntheticModel& surrogate,
                              const RealVec& x0, std::int64_t label, double prior_cosine,
                              PriorSource::Mode prior_mode, const SubspaceBasis* basis,
                              const AttackConfig& attack_cfg, const EstimatorConfig& est_cfg,
                              std::uint64_t seed);

/// "method,norm,asr,avg_queries,seeds" summary rows.
std::string bench_summary_csv(const BenchResult& result, NormKind norm);

/// "method,success_rate,avg_queries" rows: for each attainable success rate,
/// the mean query count over the that-many fastest successful runs.
std::string bench_success_curve_csv(const BenchResult& result);

SubspaceBasis build_subspace(const SubspaceConfig& cfg, Eigen::Index D);

}  // namespace prgf
