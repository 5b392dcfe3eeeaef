#include "prgf/mc.hpp"

#include <cmath>
#include <thread>
#include <vector>

#include "prgf/prior.hpp"
#include "prgf/sampling.hpp"

namespace prgf {

namespace {

/// Runs fn(trial) for trial in [0, n) across a few threads. Each trial owns
/// its output slot and rng stream, so the result is independent of the thread
/// count; the caller reduces in trial order.
template <typename Fn>
void for_each_trial(int n, Fn&& fn) {
  unsigned workers = std::min(std::thread::hardware_concurrency(), 8u);
  if (workers <= 1 || n < 256) {
    for (int t = 0; t < n; ++t) fn(t);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (int t = static_cast<int>(w); t < n; t += static_cast<int>(workers)) fn(t);
    });
  }
  for (auto& th : threads) th.join();
}

struct MeanStdErr {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanStdErr reduce(const std::vector<double>& values) {
  MeanStdErr out;
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std_error = n > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return out;
}

}  // namespace

MCLossReport mc_loss(const SyntheticModel& model, std::int64_t label, const RealVec& x,
                     const McRunSpec& run, int trials, std::uint64_t seed,
                     std::optional<double> closed_form) {
  if (trials < 1000) throw ConfigError("mc_loss: need at least 1000 trials");
  const RealVec g = model.gradient(x, label);
  const double g2 = g.squaredNorm();

  // The prior direction is fixed across trials; only the sampling directions
  // are random. Stream 0 is reserved for the prior construction.
  std::optional<TransferPrior> prior;
  if (run.kind != McEstimatorKind::Uniform) {
    RngStream prior_rng(seed, 0);
    prior = make_synthetic_prior(g, run.prior_cosine, prior_rng);
  }

  EstimatorConfig cfg;
  cfg.q = run.q;
  cfg.sigma = run.sigma;
  cfg.threshold_c = 1e-12;  // adjudicate the blend itself, not the shortcut rule
  if (run.kind == McEstimatorKind::Biased) {
    cfg.method = run.basis ? Method::PrgfSubspace : Method::Prgf;
    cfg.lambda_override = run.lambda;
  } else if (run.kind == McEstimatorKind::Averaging) {
    cfg.method = run.basis ? Method::AveragingSubspace : Method::Averaging;
    cfg.mu_override = run.mu;
  } else {
    cfg.method = run.basis ? Method::RgfSubspace : Method::Rgf;
  }

  // Per-trial sufficient statistics: a = g^T ghat, m = ||ghat||^2.
  std::vector<double> a(static_cast<std::size_t>(trials));
  std::vector<double> m(static_cast<std::size_t>(trials));
  for_each_trial(trials, [&](int t) {
    RngStream rng(seed, static_cast<std::uint64_t>(t) + 1);
    SyntheticOracle oracle(model.spec());
    PriorStats stats;
    const GradientEstimate est = estimate_gradient(
        oracle, x, label, prior ? &*prior : nullptr, run.basis, cfg, stats, rng);
    a[static_cast<std::size_t>(t)] = g.dot(est.g_hat);
    m[static_cast<std::size_t>(t)] = est.g_hat.squaredNorm();
  });

  const double n = static_cast<double>(trials);
  double abar = 0.0, mbar = 0.0;
  for (int t = 0; t < trials; ++t) {
    abar += a[static_cast<std::size_t>(t)];
    mbar += m[static_cast<std::size_t>(t)];
  }
  abar /= n;
  mbar /= n;

  MCLossReport report;
  report.trials = trials;
  if (closed_form) report.closed_form = *closed_form;

  if (mbar == 0.0 || abar <= 0.0) {
    // Optimal b clamps to 0 and the loss is pinned at ||g||^2; the clamp has
    // zero sensitivity to the sample means.
    report.mc_loss = g2;
    report.std_error = 0.0;
    return report;
  }

  const double b = abar / mbar;
  report.mc_loss = g2 - abar * abar / mbar;

  // Delta method on L(abar, mbar) = ||g||^2 - abar^2 / mbar:
  // dL/da = -2b, dL/dm = b^2.
  double vaa = 0.0, vmm = 0.0, vam = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double da = a[static_cast<std::size_t>(t)] - abar;
    const double dm = m[static_cast<std::size_t>(t)] - mbar;
    vaa += da * da;
    vmm += dm * dm;
    vam += da * dm;
  }
  vaa /= n - 1.0;
  vmm /= n - 1.0;
  vam /= n - 1.0;
  const double var = (4.0 * b * b * vaa + b * b * b * b * vmm - 4.0 * b * b * b * vam) / n;
  report.std_error = std::sqrt(std::max(0.0, var));
  return report;
}

MeanCosineReport simulate_expected_beta(const SyntheticModel& model, std::int64_t label,
                                        const RealVec& x, int q, const SubspaceBasis* basis,
                                        int trials, std::uint64_t seed) {
  const RealVec g = model.gradient(x, label);
  const RealVec gbar = g / g.norm();
  std::vector<double> cosines(static_cast<std::size_t>(trials));
  for_each_trial(trials, [&](int t) {
    RngStream rng(seed, static_cast<std::uint64_t>(t) + 1);
    SyntheticOracle oracle(model.spec());
    const GradientEstimate est = estimate_rgf(oracle, x, label, q, 1e-6, basis, rng);
    const double norm = est.g_hat.norm();
    cosines[static_cast<std::size_t>(t)] = norm == 0.0 ? 0.0 : gbar.dot(est.g_hat) / norm;
  });
  const MeanStdErr stats = reduce(cosines);
  return MeanCosineReport{stats.mean, stats.std_error, trials};
}

RealMat empirical_covariance(const SamplerSpec& spec, int n, std::uint64_t seed) {
  const Eigen::Index D = spec.dim;
  RealMat sum = RealMat::Zero(D, D);
  RngStream rng(seed, 0);
  for (int i = 0; i < n; ++i) {
    const RealVec u = sample_biased(spec, rng);
    sum.selfadjointView<Eigen::Lower>().rankUpdate(u);
  }
  RealMat cov = RealMat(sum.selfadjointView<Eigen::Lower>());
  return cov / static_cast<double>(n);
}

double covariance_error(const SamplerSpec& spec, const RealMat& target, int n,
                        std::uint64_t seed) {
  return (empirical_covariance(spec, n, seed) - target).norm();
}

}  // namespace prgf
