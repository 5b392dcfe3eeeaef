#pragma once

#include <cstdint>
#include <optional>

#include "prgf/estimator.hpp"
#include "prgf/subspace.hpp"
#include "prgf/synthetic.hpp"
#include "prgf/types.hpp"

namespace prgf {

/// Monte Carlo estimate of the scale-invariant estimator loss
/// min_{b >= 0} E ||g - b ghat||^2. One scale b serves all trials (the
/// minimization sits outside the per-trial randomness), so the estimate is
/// ||g||^2 - mean(g^T ghat)^2 / mean(||ghat||^2) with the analytic
/// b* = max(0, mean(g^T ghat) / mean(||ghat||^2)); the standard error
/// propagates both sample means through the ratio. Linear oracles make the
/// finite differences exact, so disagreement with a closed form indicts the
/// formula or the sampler, not the step size.
struct MCLossReport {
  double mc_loss = 0.0;
  double std_error = 0.0;
  double closed_form = 0.0;
  int trials = 0;

  bool within(double k_std_errors) const {
    // The epsilon term absorbs pure floating-point error in the
    // zero-variance (deterministic estimator) cases.
    return std::abs(mc_loss - closed_form) <=
           k_std_errors * std_error + 1e-9 * (1.0 + std::abs(closed_form));
  }
};

enum class McEstimatorKind { Uniform, Biased, Averaging };

/// One estimator configuration to adjudicate. The prior direction is built
/// once with an exact cosine against the oracle gradient; trials then rerun
/// the production estimator with per-trial rng streams.
struct McRunSpec {
  McEstimatorKind kind = McEstimatorKind::Uniform;
  int q = 1;
  double lambda = 0.0;        // Biased
  double mu = 1.0;            // Averaging
  double prior_cosine = 0.0;  // exact cosine of v against the true gradient
  const SubspaceBasis* basis = nullptr;
  double sigma = 1e-6;
};

MCLossReport mc_loss(const SyntheticModel& model, std::int64_t label, const RealVec& x,
                     const McRunSpec& run, int trials, std::uint64_t seed,
                     std::optional<double> closed_form = std::nullopt);

/// Mean cosine between the plain (subspace) RGF estimate and the true gradient
/// on a linear oracle; the simulation route for E[beta].
struct MeanCosineReport {
  double mean = 0.0;
  double std_error = 0.0;
  int trials = 0;
};

MeanCosineReport simulate_expected_beta(const SyntheticModel& model, std::int64_t label,
                                        const RealVec& x, int q, const SubspaceBasis* basis,
                                        int trials, std::uint64_t seed);

/// Empirical second moment E[u u^T] of a sampler over n draws.
RealMat empirical_covariance(const SamplerSpec& spec, int n, std::uint64_t seed);

/// Frobenius distance between the empirical covariance of `spec` and a target.
double covariance_error(const SamplerSpec& spec, const RealMat& target, int n,
                        std::uint64_t seed);

}  // namespace prgf
