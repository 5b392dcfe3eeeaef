#include "prgf/attack.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace prgf {

using nlohmann::json;

NormKind parse_norm_kind(const std::string& name) {
  if (name == "l2") return NormKind::L2;
  if (name == "linf") return NormKind::Linf;
  throw ConfigError("unknown norm kind: " + name);
}

std::string norm_kind_name(NormKind k) { return k == NormKind::L2 ? "l2" : "linf"; }

std::string outcome_name(AttackOutcome o) {
  switch (o) {
    case AttackOutcome::Success: return "success";
    case AttackOutcome::BudgetExhausted: return "budget_exhausted";
    case AttackOutcome::TransportFailure: return "transport_failure";
  }
  throw ConfigError("unknown outcome enum value");
}

void AttackConfig::validate() const {
  if (epsilon < 0.0) throw ConfigError("attack: epsilon must be positive (or 0 for the default)");
  if (eta <= 0.0) throw ConfigError("attack: eta must be positive");
  if (max_queries < 1) throw ConfigError("attack: max_queries must be positive");
  if (box && box->first >= box->second) throw ConfigError("attack: box bounds must be ordered");
}

RealVec pgd_step(const RealVec& x_t, const RealVec& g_hat, const RealVec& x0,
                 const AttackConfig& cfg, bool* zero_gradient) {
  const double eps = cfg.resolved_epsilon(x0.size());
  if (zero_gradient) *zero_gradient = false;

  RealVec x = x_t;
  if (cfg.norm == NormKind::L2) {
    const double gnorm = g_hat.norm();
    if (gnorm == 0.0) {
      if (zero_gradient) *zero_gradient = true;
    } else {
      x += (cfg.eta / gnorm) * g_hat;
    }
    RealVec delta = x - x0;
    const double dnorm = delta.norm();
    if (dnorm > eps) x = x0 + (eps / dnorm) * delta;
  } else {
    if (g_hat.isZero(0.0)) {
      if (zero_gradient) *zero_gradient = true;
    } else {
      x += cfg.eta * g_hat.unaryExpr([](double g) { return g > 0.0 ? 1.0 : (g < 0.0 ? -1.0 : 0.0); });
    }
    x = x.cwiseMax((x0.array() - eps).matrix()).cwiseMin((x0.array() + eps).matrix());
  }
  if (cfg.box) x = x.cwiseMax(cfg.box->first).cwiseMin(cfg.box->second);
  return x;
}

namespace {

bool check_success(LossOracle& oracle, const RealVec& x, std::int64_t label,
                   const SuccessRule& rule, double baseline_loss) {
  if (rule.kind == SuccessRule::Kind::LossThreshold) return baseline_loss >= rule.loss_threshold;
  const auto predicted = oracle.classify(x);  // charges one query
  if (!predicted) throw ConfigError("attack: misclassify rule needs a classifier-shaped oracle");
  return *predicted != label;
}

}  // namespace

AttackTrace run_attack(LossOracle& oracle, const RealVec& x0, std::int64_t label,
                       PriorSource* prior_source, const SubspaceBasis* basis,
                       const AttackConfig& cfg, const EstimatorConfig& est_cfg, RngStream& rng) {
  cfg.validate();
  est_cfg.validate();
  if (oracle.dim() != x0.size()) throw ConfigError("attack: x0 dimension mismatch");
  if (method_uses_prior(est_cfg.method) && prior_source == nullptr)
    throw ConfigError("attack: method requires a prior source");

  AttackTrace trace;
  PriorStats stats;
  const std::uint64_t start = oracle.ledger().used();
  RealVec x = x0;
  double last_loss = 0.0;

  const auto used_so_far = [&] { return oracle.ledger().used() - start; };

  // Flushed by the exception paths so an interrupted iteration still leaves a
  // record in the trace.
  std::optional<AttackIterationRecord> pending;
  const auto flush_pending = [&] {
    if (!pending) return;
    pending->cumulative_queries = used_so_far();
    trace.iterations.push_back(*pending);
    pending.reset();
  };

  try {
    for (int iteration = 0;; ++iteration) {
      const std::uint64_t produced_at = used_so_far();
      if (produced_at >= cfg.max_queries) break;

      pending.emplace();
      pending->iteration = iteration;

      const double f0 = oracle.query(x, label);
      last_loss = f0;
      pending->loss = f0;
      if (check_success(oracle, x, label, cfg.success, f0)) {
        trace.outcome = AttackOutcome::Success;
        trace.queries_to_success = produced_at;
        trace.final_loss = f0;
        trace.total_queries = used_so_far();
        return trace;
      }

      const TransferPrior* prior = nullptr;
      if (method_uses_prior(est_cfg.method)) prior = &prior_source->at(x, label);

      GradientEstimate est =
          estimate_gradient(oracle, x, label, prior, basis, est_cfg, stats, rng, f0);

      pending->coefficient = est.lambda_used ? est.lambda_used : est.mu_used;
      pending->alpha_hat = est.alpha_hat;
      pending->shortcut = est.shortcut;

      x = pgd_step(x, est.g_hat, x0, cfg, &pending->zero_gradient);
      flush_pending();
    }
    trace.outcome = AttackOutcome::BudgetExhausted;
  } catch (const BudgetExhaustedError&) {
    flush_pending();
    trace.outcome = AttackOutcome::BudgetExhausted;
  } catch (const PartialEstimateError&) {
    // Deterministic accounting beats a marginal query saving: a partial
    // average is discarded and the run reports clean exhaustion.
    flush_pending();
    trace.outcome = AttackOutcome::BudgetExhausted;
  } catch (const TransportError& e) {
    flush_pending();
    trace.outcome = AttackOutcome::TransportFailure;
    trace.error = e.what();
  }
  trace.final_loss = last_loss;
  trace.total_queries = used_so_far();
  return trace;
}

AttackSummary aggregate(const std::vector<AttackTrace>& traces) {
  AttackSummary summary;
  summary.total = static_cast<int>(traces.size());
  double query_sum = 0.0;
  for (const auto& t : traces) {
    if (t.outcome != AttackOutcome::Success) continue;
    ++summary.successes;
    query_sum += static_cast<double>(t.queries_to_success);
  }
  summary.success_rate = summary.total > 0
                             ? static_cast<double>(summary.successes) / summary.total
                             : 0.0;
  if (summary.successes > 0) summary.avg_queries = query_sum / summary.successes;
  return summary;
}

std::string trace_to_jsonl(const AttackTrace& trace, const std::string& run_tag) {
  std::ostringstream out;
  for (const auto& rec : trace.iterations) {
    json j;
    j["type"] = "iter";
    j["run"] = run_tag;
    j["iteration"] = rec.iteration;
    j["cumulative_queries"] = rec.cumulative_queries;
    j["loss"] = rec.loss;
    if (rec.coefficient) j["coefficient"] = *rec.coefficient;
    if (rec.alpha_hat) j["alpha_hat"] = *rec.alpha_hat;
    j["shortcut"] = rec.shortcut;
    if (rec.zero_gradient) j["zero_gradient"] = true;
    out << j.dump() << "\n";
  }
  json j;
  j["type"] = "outcome";
  j["run"] = run_tag;
  j["outcome"] = outcome_name(trace.outcome);
  if (trace.outcome == AttackOutcome::Success) j["queries_to_success"] = trace.queries_to_success;
  j["total_queries"] = trace.total_queries;
  j["final_loss"] = trace.final_loss;
  if (!trace.error.empty()) j["error"] = trace.error;
  out << j.dump() << "\n";
  return out.str();
}

}  // namespace prgf
