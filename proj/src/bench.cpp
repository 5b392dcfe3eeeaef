#include "prgf/bench.hpp"

#include <algorithm>
#include <sstream>

namespace prgf {

SubspaceBasis build_subspace(const SubspaceConfig& cfg, Eigen::Index D) {
  return make_subspace(D, cfg.d, cfg.mode, cfg.channels);
}

AttackTrace run_single_attack(LossOracle& oracle, const SyntheticModel& surrogate,
                              const RealVec& x0, std::int64_t label, double prior_cosine,
                              PriorSource::Mode prior_mode, const SubspaceBasis* basis,
                              const AttackConfig& attack_cfg, const EstimatorConfig& est_cfg,
                              std::uint64_t seed) {
  PriorSource prior_source(surrogate, prior_cosine, prior_mode, RngStream(seed, 1));
  RngStream est_rng(seed, 2);
  PriorSource* prior = method_uses_prior(est_cfg.method) ? &prior_source : nullptr;
  return run_attack(oracle, x0, label, prior, basis, attack_cfg, est_cfg, est_rng);
}

BenchResult run_bench(const BenchConfig& cfg) {
  if (cfg.methods.empty()) throw ConfigError("bench: no methods configured");
  if (cfg.seeds.empty()) throw ConfigError("bench: no seeds configured");
  const auto model = std::make_shared<const SyntheticModel>(cfg.model);
  const Eigen::Index D = model->dim();
  const RealVec x0 = cfg.x0 ? *cfg.x0 : RealVec(RealVec::Zero(D));
  if (x0.size() != D) throw ConfigError("bench: x0 dimension mismatch");

  std::optional<SubspaceBasis> basis;
  if (cfg.subspace) basis = build_subspace(*cfg.subspace, D);

  BenchResult result;
  for (const auto& method : cfg.methods) {
    BenchMethodResult mr;
    mr.label = method.label;
    mr.traces.resize(cfg.seeds.size());
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
      const std::uint64_t seed = cfg.seeds[i];
      std::unique_ptr<LossOracle> oracle;
      if (cfg.remote) {
        oracle = connect(*cfg.remote, D);
      } else {
        oracle = std::make_unique<SyntheticOracle>(model, cfg.attack.max_queries);
      }
      mr.traces[i] = run_single_attack(*oracle, *model, x0, cfg.label, cfg.prior_cosine,
                                       cfg.prior_mode, basis ? &*basis : nullptr, cfg.attack,
                                       method.est, seed);
    }
    mr.summary = aggregate(mr.traces);

    // Median queries-to-success over all seeds, failures scored at the budget.
    std::vector<double> scores;
    scores.reserve(mr.traces.size());
    for (const auto& t : mr.traces)
      scores.push_back(t.outcome == AttackOutcome::Success
                           ? static_cast<double>(t.queries_to_success)
                           : static_cast<double>(cfg.attack.max_queries));
    std::sort(scores.begin(), scores.end());
    const std::size_t n = scores.size();
    mr.median_queries = n % 2 == 1 ? scores[n / 2] : 0.5 * (scores[n / 2 - 1] + scores[n / 2]);

    result.methods.push_back(std::move(mr));
  }
  return result;
}

std::string bench_summary_csv(const BenchResult& result, NormKind norm) {
  std::ostringstream out;
  out << "method,norm,asr,avg_queries,seeds\n";
  for (const auto& m : result.methods) {
    out << m.label << "," << norm_kind_name(norm) << "," << m.summary.success_rate << ",";
    if (m.summary.avg_queries)
      out << *m.summary.avg_queries;
    else
      out << "";
    out << "," << m.summary.total << "\n";
  }
  return out.str();
}

std::string bench_success_curve_csv(const BenchResult& result) {
  std::ostringstream out;
  out << "method,success_rate,avg_queries\n";
  for (const auto& m : result.methods) {
    std::vector<double> successes;
    for (const auto& t : m.traces)
      if (t.outcome == AttackOutcome::Success)
        successes.push_back(static_cast<double>(t.queries_to_success));
    std::sort(successes.begin(), successes.end());
    double running = 0.0;
    for (std::size_t k = 0; k < successes.size(); ++k) {
      running += successes[k];
      const double rate = static_cast<double>(k + 1) / static_cast<double>(m.traces.size());
      out << m.label << "," << rate << "," << running / static_cast<double>(k + 1) << "\n";
    }
  }
  return out.str();
}

}  // namespace prgf
