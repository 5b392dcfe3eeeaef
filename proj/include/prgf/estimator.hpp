#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "prgf/coefficients.hpp"
#include "prgf/oracle.hpp"
#include "prgf/prior.hpp"
#include "prgf/rng.hpp"
#include "prgf/subspace.hpp"
#include "prgf/types.hpp"

namespace prgf {

enum class Method { Rgf, RgfSubspace, Prgf, PrgfSubspace, Averaging, AveragingSubspace };

Method parse_method(const std::string& name);
std::string method_name(Method m);
bool method_uses_subspace(Method m);
bool method_uses_prior(Method m);

struct EstimatorConfig {
  Method method = Method::Prgf;
  int q = 50;                // sampled directions per estimate
  double sigma = 0.0;        // <= 0: resolved to 1e-4 * sqrt(D)
  int norm_probes = 10;      // S: queries per gradient-norm refresh
  int norm_refresh = 10;     // R: iterations between norm refreshes
  std::optional<double> lambda_override;  // fixed bias coefficient (skips estimation)
  std::optional<double> mu_override;      // fixed averaging weight (skips estimation)
  double threshold_c = 1.0 / (1.0 + std::sqrt(2.0));

  double resolved_sigma(Eigen::Index dim) const {
    return sigma > 0.0 ? sigma : 1e-4 * std::sqrt(static_cast<double>(dim));
  }
  void validate() const;
};

struct GradientEstimate {
  RealVec g_hat;
  std::uint64_t queries_spent = 0;  // ledger delta attributable to this call
  double baseline_loss = 0.0;       // f(x, y) used for the finite differences
  std::optional<double> lambda_used;
  std::optional<double> mu_used;
  std::optional<double> alpha_hat;
  std::optional<double> align_hat;
  bool shortcut = false;  // transfer direction returned directly, no sampling
};

/// Budget died partway through an estimate. Carries the queries this estimate
/// had already spent and the partial average so the caller can decide whether
/// to use it.
class PartialEstimateError : public std::runtime_error {
 public:
  PartialEstimateError(std::uint64_t spent, GradientEstimate partial_)
      : std::runtime_error("budget exhausted mid-estimate after " + std::to_string(spent) +
                           " queries"),
        queries_spent(spent),
        partial(std::move(partial_)) {}
  std::uint64_t queries_spent;
  GradientEstimate partial;
};

/// Plain random gradient-free estimate: q uniform directions (in the full
/// space, or inside the subspace when a basis is given), forward differences
/// against a shared baseline. Costs q + 1 queries, or q when the caller
/// supplies the baseline loss.
GradientEstimate estimate_rgf(LossOracle& oracle, const RealVec& x, std::int64_t label, int q,
                              double sigma, const SubspaceBasis* basis, RngStream& rng,
                              std::optional<double> baseline = std::nullopt);

/// Prior-guided estimate. Refreshes the cached gradient norm (and the subspace
/// alignment when a basis is given) every cfg.norm_refresh invocations, probes
/// the prior cosine, computes the optimal bias coefficient, and either returns
/// the transfer direction outright (coefficient 1) or averages q biased
/// directions. A negative cosine estimate flips the prior direction instead of
/// discarding it. With cfg.lambda_override the estimation phase is skipped
/// entirely and the fixed coefficient is used.
GradientEstimate estimate_prgf(LossOracle& oracle, const RealVec& x, std::int64_t label,
                               const TransferPrior& prior, const SubspaceBasis* basis,
                               const EstimatorConfig& cfg, PriorStats& stats, RngStream& rng,
                               std::optional<double> baseline = std::nullopt);

/// Weighted-average estimate: a plain (subspace) RGF estimate is normalized
/// and blended with the transfer direction using the optimal weight mu*. When
/// mu* falls at or below cfg.threshold_c the transfer direction is returned
/// directly and the sampling queries are saved.
GradientEstimate estimate_averaging(LossOracle& oracle, const RealVec& x, std::int64_t label,
                                    const TransferPrior& prior, const SubspaceBasis* basis,
                                    const EstimatorConfig& cfg, PriorStats& stats, RngStream& rng,
                                    std::optional<double> baseline = std::nullopt);

/// Dispatch on cfg.method. `prior` may be null only for the plain RGF methods;
/// `basis` is required by the subspace methods and ignored otherwise.
GradientEstimate estimate_gradient(LossOracle& oracle, const RealVec& x, std::int64_t label,
                                   const TransferPrior* prior, const SubspaceBasis* basis,
                                   const EstimatorConfig& cfg, PriorStats& stats, RngStream& rng,
                                   std::optional<double> baseline = std::nullopt);

}  // namespace prgf
