#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>

#include "prgf/oracle.hpp"
#include "prgf/sampling.hpp"
#include "prgf/subspace.hpp"
#include "prgf/types.hpp"

namespace prgf {

/// A normalized transfer gradient: the direction some external source (here, a
/// synthetic construction standing in for a surrogate model) believes the true
/// gradient points in.
struct TransferPrior {
  RealVec v;  // unit norm

  void validate() const {
    if (v.size() < 1 || std::abs(v.norm() - 1.0) > kUnitNormTol)
      throw ConfigError("transfer prior: v must be a unit vector");
  }
};

/// Build a prior whose cosine with normalize(true_grad) equals target_cosine
/// exactly, with the orthogonal component uniformly random. target_cosine must
/// lie in [0, 1]: a prior that points away can always be negated.
TransferPrior make_synthetic_prior(const RealVec& true_grad, double target_cosine,
                                   RngStream& rng);

/// Query-estimated quantities cached across attack iterations. The gradient
/// norm is refreshed every `norm_refresh` iterations; between refreshes `age`
/// grows and dependent estimates reuse the cached value.
struct PriorStats {
  double alpha_hat = 0.0;      // cosine(prior, gradient), clamped to [-1, 1]
  double align_hat = 0.0;      // ||subspace projection of normalized gradient||, in [0, 1]
  double grad_norm_hat = -1.0; // < 0 until first estimated
  int age = 0;                 // iterations since the norm was last refreshed

  bool has_norm() const { return grad_norm_hat >= 0.0; }
};

/// Directional derivative d^T grad f(x) by forward finite difference against a
/// shared baseline loss f(x, y). Costs exactly one query.
inline double estimate_inner_product(LossOracle& oracle, const RealVec& x, std::int64_t label,
                                     const RealVec& direction, double sigma,
                                     double baseline_loss) {
  if (sigma <= 0.0) throw ConfigError("estimate_inner_product: sigma must be positive");
  return (oracle.query(x + sigma * direction, label) - baseline_loss) / sigma;
}

/// Gradient norm estimate from S uniform probes w_s:
///
///   ||grad|| ~ sqrt((D / S) * sum_s ((f(x + sigma w_s, y) - f(x, y)) / sigma)^2)
///
/// The squared estimate is unbiased in the locally linear regime because
/// E[(w^T gbar)^2] = 1/D for w uniform on the unit sphere. Costs S queries.
inline double estimate_grad_norm(LossOracle& oracle, const RealVec& x, std::int64_t label, int S,
                                 double sigma, double baseline_loss, RngStream& rng) {
  if (S < 1) throw ConfigError("estimate_grad_norm: S must be >= 1");
  const Eigen::Index D = oracle.dim();
  double sum_sq = 0.0;
  for (int s = 0; s < S; ++s) {
    const RealVec w = sample_unit_sphere(D, rng);
    const double deriv = estimate_inner_product(oracle, x, label, w, sigma, baseline_loss);
    sum_sq += deriv * deriv;
  }
  return std::sqrt(static_cast<double>(D) / S * sum_sq);
}

/// Cosine between the prior direction and the gradient:
/// (v^T grad estimate) / cached norm, clamped to [-1, 1]. Costs one query.
/// A zero cached norm marks the gradient signal degenerate; the caller should
/// treat the prior as uninformative (0 is returned).
inline double estimate_alpha(LossOracle& oracle, const RealVec& x, std::int64_t label,
                             const TransferPrior& prior, PriorStats& stats, double sigma,
                             double baseline_loss) {
  if (!stats.has_norm()) throw ConfigError("estimate_alpha: gradient norm not yet estimated");
  const double inner =
      estimate_inner_product(oracle, x, label, prior.v, sigma, baseline_loss);
  stats.alpha_hat = stats.grad_norm_hat == 0.0
                        ? 0.0
                        : std::clamp(inner / stats.grad_norm_hat, -1.0, 1.0);
  return stats.alpha_hat;
}

/// Norm of the gradient's subspace projection, estimated with S probes drawn
/// inside the subspace (w_s = V xi_s), divided by the cached gradient norm and
/// clamped to [0, 1]. With the full space as subspace this reduces to
/// estimate_grad_norm. Costs S queries.
inline double estimate_subspace_alignment(LossOracle& oracle, const RealVec& x,
                                          std::int64_t label, const SubspaceBasis& basis,
                                          PriorStats& stats, int S, double sigma,
                                          double baseline_loss, RngStream& rng) {
  if (S < 1) throw ConfigError("estimate_subspace_alignment: S must be >= 1");
  if (!stats.has_norm())
    throw ConfigError("estimate_subspace_alignment: gradient norm not yet estimated");
  const Eigen::Index d = basis.input_dim();
  double sum_sq = 0.0;
  for (int s = 0; s < S; ++s) {
    const RealVec w = basis.apply(sample_unit_sphere(d, rng));
    const double deriv = estimate_inner_product(oracle, x, label, w, sigma, baseline_loss);
    sum_sq += deriv * deriv;
  }
  const double proj_norm = std::sqrt(static_cast<double>(d) / S * sum_sq);
  stats.align_hat =
      stats.grad_norm_hat == 0.0 ? 0.0 : std::clamp(proj_norm / stats.grad_norm_hat, 0.0, 1.0);
  return stats.align_hat;
}

}  // namespace prgf
