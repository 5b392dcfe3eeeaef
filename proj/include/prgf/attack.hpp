#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prgf/estimator.hpp"
#include "prgf/oracle.hpp"
#include "prgf/prior.hpp"
#include "prgf/synthetic.hpp"
#include "prgf/types.hpp"

namespace prgf {

enum class NormKind { L2, Linf };

NormKind parse_norm_kind(const std::string& name);
std::string norm_kind_name(NormKind k);

/// Success detection. A loss threshold is checked against the baseline loss
/// the estimator needs anyway, so it costs nothing extra; the misclassify rule
/// asks the oracle for a predicted label and charges one query per check.
struct SuccessRule {
  enum class Kind { LossThreshold, Misclassify };
  Kind kind = Kind::LossThreshold;
  double loss_threshold = 0.0;
};

struct AttackConfig {
  NormKind norm = NormKind::L2;
  double epsilon = 0.0;  // <= 0: resolved to sqrt(0.001 * D)
  double eta = 2.0;
  std::uint64_t max_queries = 10000;
  SuccessRule success;
  std::optional<std::pair<double, double>> box;  // per-coordinate bounds, e.g. [0, 1]

  double resolved_epsilon(Eigen::Index dim) const {
    return epsilon > 0.0 ? epsilon : std::sqrt(0.001 * static_cast<double>(dim));
  }
  void validate() const;
};

struct AttackIterationRecord {
  int iteration = 0;
  std::uint64_t cumulative_queries = 0;  // after this iteration
  double loss = 0.0;                     // baseline loss at the iterate
  std::optional<double> coefficient;     // lambda* or mu* used this iteration
  std::optional<double> alpha_hat;
  bool shortcut = false;
  bool zero_gradient = false;
};

enum class AttackOutcome { Success, BudgetExhausted, TransportFailure };

std::string outcome_name(AttackOutcome o);

/// Per-run record. `queries_to_success` counts the queries spent producing the
/// successful iterate; the ledger additionally contains the query that
/// verified it (every oracle call is charged, success checks included).
struct AttackTrace {
  std::vector<AttackIterationRecord> iterations;
  AttackOutcome outcome = AttackOutcome::BudgetExhausted;
  std::uint64_t queries_to_success = 0;  // meaningful when outcome == Success
  std::uint64_t total_queries = 0;       // full ledger delta for the run
  double final_loss = 0.0;
  std::string error;  // transport failures
};

/// One projected step: move along the normalized gradient estimate (direction
/// for l2, sign for linf), then project back onto the epsilon-ball around x0
/// and clamp into the box. A zero estimate yields a no-op step with
/// zero_gradient set.
RealVec pgd_step(const RealVec& x_t, const RealVec& g_hat, const RealVec& x0,
                 const AttackConfig& cfg, bool* zero_gradient = nullptr);

/// Supplies the transfer prior along an attack trajectory. Rederive mode
/// rebuilds the prior at every iterate from the surrogate model's gradient,
/// holding the cosine-to-surrogate-gradient fixed while the direction rotates;
/// frozen mode keeps the prior built at the first iterate.
class PriorSource {
 public:
  enum class Mode { Rederive, Frozen };

  /// The surrogate model must outlive the source.
  PriorSource(const SyntheticModel& surrogate, double target_cosine, Mode mode, RngStream rng)
      : surrogate_(&surrogate), target_cosine_(target_cosine), mode_(mode),
        rng_(std::move(rng)) {}

  const TransferPrior& at(const RealVec& x, std::int64_t label) {
    if (mode_ == Mode::Frozen && cached_) return *cached_;
    cached_ = make_synthetic_prior(surrogate_->gradient(x, label), target_cosine_, rng_);
    return *cached_;
  }

  Mode mode() const { return mode_; }
  double target_cosine() const { return target_cosine_; }

 private:
  const SyntheticModel* surrogate_;
  double target_cosine_;
  Mode mode_;
  RngStream rng_;
  std::optional<TransferPrior> cached_;
};

/// PGD driver. Per iteration: one baseline query at the current iterate, a
/// success check against that loss (or a charged classify call), a gradient
/// estimate sharing the baseline, and one projected step. Stops on success,
/// budget exhaustion, or transport failure. Bit-reproducible for a fixed rng.
AttackTrace run_attack(LossOracle& oracle, const RealVec& x0, std::int64_t label,
                       PriorSource* prior_source, const SubspaceBasis* basis,
                       const AttackConfig& cfg, const EstimatorConfig& est_cfg, RngStream& rng);

struct AttackSummary {
  int total = 0;
  int successes = 0;
  double success_rate = 0.0;
  std::optional<double> avg_queries;  // over successful runs; absent when none succeeded
};

AttackSummary aggregate(const std::vector<AttackTrace>& traces);

// Line-delimited JSON serialization of traces (one line per iteration plus an
// outcome line), used by the CLI and the local/remote equivalence check.
std::string trace_to_jsonl(const AttackTrace& trace, const std::string& run_tag);

}  // namespace prgf
