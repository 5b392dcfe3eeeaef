#include "prgf/estimator.hpp"

#include <algorithm>

namespace prgf {

Method parse_method(const std::string& name) {
  if (name == "rgf") return Method::Rgf;
  if (name == "rgf_d") return Method::RgfSubspace;
  if (name == "prgf") return Method::Prgf;
  if (name == "prgf_d") return Method::PrgfSubspace;
  if (name == "avg") return Method::Averaging;
  if (name == "avg_d") return Method::AveragingSubspace;
  throw ConfigError("unknown estimator method: " + name);
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Rgf: return "rgf";
    case Method::RgfSubspace: return "rgf_d";
    case Method::Prgf: return "prgf";
    case Method::PrgfSubspace: return "prgf_d";
    case Method::Averaging: return "avg";
    case Method::AveragingSubspace: return "avg_d";
  }
  throw ConfigError("unknown method enum value");
}

bool method_uses_subspace(Method m) {
  return m == Method::RgfSubspace || m == Method::PrgfSubspace ||
         m == Method::AveragingSubspace;
}

bool method_uses_prior(Method m) { return m != Method::Rgf && m != Method::RgfSubspace; }

void EstimatorConfig::validate() const {
  if (q < 1) throw ConfigError("estimator: q must be >= 1");
  if (norm_probes < 1) throw ConfigError("estimator: S must be >= 1");
  if (norm_refresh < 1) throw ConfigError("estimator: norm refresh period must be >= 1");
  if (threshold_c <= 0.0 || threshold_c >= 1.0)
    throw ConfigError("estimator: threshold c must lie in (0, 1)");
  if (lambda_override && (*lambda_override < 0.0 || *lambda_override > 1.0))
    throw ConfigError("estimator: lambda override must lie in [0, 1]");
  if (mu_override && (*mu_override < 0.0 || *mu_override > 1.0))
    throw ConfigError("estimator: mu override must lie in [0, 1]");
}

namespace {

/// Tracks the ledger delta of one estimator invocation and converts a budget
/// failure into a partial-estimate error.
struct SpendGuard {
  LossOracle& oracle;
  std::uint64_t start;
  explicit SpendGuard(LossOracle& o) : oracle(o), start(o.ledger().used()) {}
  std::uint64_t spent() const { return oracle.ledger().used() - start; }
};

double fetch_baseline(LossOracle& oracle, const RealVec& x, std::int64_t label,
                      const std::optional<double>& provided) {
  return provided ? *provided : oracle.query(x, label);
}

/// Shared refresh-then-probe phase of the prior-guided estimators. Returns the
/// effective (possibly flipped) prior direction alongside the non-negative
/// cosine estimate.
struct PriorProbe {
  RealVec v;
  double alpha = 0.0;   // |alpha_hat|
  double align2 = 0.0;  // align_hat^2, meaningful when a basis is present
};

PriorProbe probe_prior(LossOracle& oracle, const RealVec& x, std::int64_t label,
                       const TransferPrior& prior, const SubspaceBasis* basis,
                       const EstimatorConfig& cfg, PriorStats& stats, double sigma,
                       double baseline, RngStream& rng) {
  prior.validate();
  if (!stats.has_norm() || stats.age >= cfg.norm_refresh) {
    stats.grad_norm_hat =
        estimate_grad_norm(oracle, x, label, cfg.norm_probes, sigma, baseline, rng);
    stats.age = 0;
    if (basis)
      estimate_subspace_alignment(oracle, x, label, *basis, stats, cfg.norm_probes, sigma,
                                  baseline, rng);
  }
  stats.age += 1;

  estimate_alpha(oracle, x, label, prior, stats, sigma, baseline);
  PriorProbe out;
  out.alpha = std::abs(stats.alpha_hat);
  out.v = stats.alpha_hat < 0.0 ? RealVec(-prior.v) : prior.v;
  out.align2 = stats.align_hat * stats.align_hat;
  return out;
}

GradientEstimate sampled_average(LossOracle& oracle, const RealVec& x, std::int64_t label,
                                 const SamplerSpec& sampler, int q, double sigma,
                                 double baseline, RngStream& rng, GradientEstimate est,
                                 const SpendGuard& guard) {
  RealVec sum = RealVec::Zero(x.size());
  for (int i = 0; i < q; ++i) {
    try {
      const RealVec u = sample_biased(sampler, rng);
      const double deriv = (oracle.query(x + sigma * u, label) - baseline) / sigma;
      sum += deriv * u;
    } catch (const BudgetExhaustedError&) {
      est.g_hat = i > 0 ? RealVec(sum / i) : RealVec(RealVec::Zero(x.size()));
      est.queries_spent = guard.spent();
      throw PartialEstimateError(est.queries_spent, std::move(est));
    }
  }
  est.g_hat = sum / q;
  est.queries_spent = guard.spent();
  return est;
}

}  // namespace

GradientEstimate estimate_rgf(LossOracle& oracle, const RealVec& x, std::int64_t label, int q,
                              double sigma, const SubspaceBasis* basis, RngStream& rng,
                              std::optional<double> baseline) {
  if (q < 1) throw ConfigError("estimate_rgf: q must be >= 1");
  if (sigma <= 0.0) throw ConfigError("estimate_rgf: sigma must be positive");
  SpendGuard guard(oracle);
  GradientEstimate est;
  try {
    est.baseline_loss = fetch_baseline(oracle, x, label, baseline);
  } catch (const BudgetExhaustedError&) {
    est.g_hat = RealVec::Zero(x.size());
    throw PartialEstimateError(0, std::move(est));
  }
  SamplerSpec sampler;
  sampler.dim = oracle.dim();
  if (basis) sampler.subspace = *basis;
  return sampled_average(oracle, x, label, sampler, q, sigma, est.baseline_loss, rng,
                         std::move(est), guard);
}

GradientEstimate estimate_prgf(LossOracle& oracle, const RealVec& x, std::int64_t label,
                               const TransferPrior& prior, const SubspaceBasis* basis,
                               const EstimatorConfig& cfg, PriorStats& stats, RngStream& rng,
                               std::optional<double> baseline) {
  cfg.validate();
  const Eigen::Index D = oracle.dim();
  const double sigma = cfg.resolved_sigma(D);
  SpendGuard guard(oracle);
  GradientEstimate est;

  RealVec v = prior.v;
  double lambda = 0.0;
  try {
    est.baseline_loss = fetch_baseline(oracle, x, label, baseline);
    if (cfg.lambda_override) {
      lambda = *cfg.lambda_override;
    } else {
      const PriorProbe probe =
          probe_prior(oracle, x, label, prior, basis, cfg, stats, sigma, est.baseline_loss, rng);
      v = probe.v;
      est.alpha_hat = probe.alpha;
      const double alpha2 = probe.alpha * probe.alpha;
      if (basis) {
        est.align_hat = stats.align_hat;
        lambda = lambda_star_subspace(alpha2, probe.align2, cfg.q, basis->input_dim());
      } else {
        lambda = lambda_star(alpha2, cfg.q, D);
      }
    }
  } catch (const BudgetExhaustedError&) {
    est.g_hat = RealVec::Zero(x.size());
    est.queries_spent = guard.spent();
    throw PartialEstimateError(est.queries_spent, std::move(est));
  }

  est.lambda_used = lambda;
  if (lambda == 1.0) {
    est.g_hat = v;
    est.shortcut = true;
    est.queries_spent = guard.spent();
    return est;
  }

  SamplerSpec sampler;
  sampler.dim = D;
  sampler.bias_direction = v;
  sampler.bias_coefficient = lambda;
  if (basis) sampler.subspace = *basis;
  return sampled_average(oracle, x, label, sampler, cfg.q, sigma, est.baseline_loss, rng,
                         std::move(est), guard);
}

GradientEstimate estimate_averaging(LossOracle& oracle, const RealVec& x, std::int64_t label,
                                    const TransferPrior& prior, const SubspaceBasis* basis,
                                    const EstimatorConfig& cfg, PriorStats& stats, RngStream& rng,
                                    std::optional<double> baseline) {
  cfg.validate();
  const Eigen::Index D = oracle.dim();
  const double sigma = cfg.resolved_sigma(D);
  SpendGuard guard(oracle);
  GradientEstimate est;

  RealVec v = prior.v;
  double mu = 1.0;
  try {
    est.baseline_loss = fetch_baseline(oracle, x, label, baseline);
    if (cfg.mu_override) {
      mu = *cfg.mu_override;
    } else {
      const PriorProbe probe =
          probe_prior(oracle, x, label, prior, basis, cfg, stats, sigma, est.baseline_loss, rng);
      v = probe.v;
      est.alpha_hat = probe.alpha;
      const double e_beta = basis ? expected_beta_subspace(cfg.q, basis->input_dim(), probe.align2)
                                  : expected_beta(cfg.q, D);
      if (basis) est.align_hat = stats.align_hat;
      mu = mu_star(probe.alpha, e_beta);
    }
  } catch (const BudgetExhaustedError&) {
    est.g_hat = RealVec::Zero(x.size());
    est.queries_spent = guard.spent();
    throw PartialEstimateError(est.queries_spent, std::move(est));
  }

  est.mu_used = mu;
  if (mu <= cfg.threshold_c) {
    est.g_hat = v;
    est.shortcut = true;
    est.queries_spent = guard.spent();
    return est;
  }

  SamplerSpec sampler;
  sampler.dim = D;
  if (basis) sampler.subspace = *basis;
  GradientEstimate uniform = sampled_average(oracle, x, label, sampler, cfg.q, sigma,
                                             est.baseline_loss, rng, std::move(est), guard);
  const double norm = uniform.g_hat.norm();
  // A zero random estimate carries no directional information; keep the prior.
  uniform.g_hat = norm == 0.0 ? v : RealVec((1.0 - mu) * v + mu * (uniform.g_hat / norm));
  uniform.queries_spent = guard.spent();
  return uniform;
}

GradientEstimate estimate_gradient(LossOracle& oracle, const RealVec& x, std::int64_t label,
                                   const TransferPrior* prior, const SubspaceBasis* basis,
                                   const EstimatorConfig& cfg, PriorStats& stats, RngStream& rng,
                                   std::optional<double> baseline) {
  if (method_uses_subspace(cfg.method) && basis == nullptr)
    throw ConfigError("estimate_gradient: method requires a subspace basis");
  if (method_uses_prior(cfg.method) && prior == nullptr)
    throw ConfigError("estimate_gradient: method requires a transfer prior");
  const SubspaceBasis* effective_basis = method_uses_subspace(cfg.method) ? basis : nullptr;
  switch (cfg.method) {
    case Method::Rgf:
    case Method::RgfSubspace:
      return estimate_rgf(oracle, x, label, cfg.q, cfg.resolved_sigma(oracle.dim()),
                          effective_basis, rng, baseline);
    case Method::Prgf:
    case Method::PrgfSubspace:
      return estimate_prgf(oracle, x, label, *prior, effective_basis, cfg, stats, rng, baseline);
    case Method::Averaging:
    case Method::AveragingSubspace:
      return estimate_averaging(oracle, x, label, *prior, effective_basis, cfg, stats, rng,
                                baseline);
  }
  throw ConfigError("unknown method enum value");
}

}  // namespace prgf
