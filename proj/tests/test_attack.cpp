#include <doctest.h>

#include "prgf/attack.hpp"
#include "prgf/bench.hpp"
#include "test_util.hpp"

using namespace prgf;
using prgf::testing::FixedLinearOracle;

namespace {

AttackConfig linf_config() {
  AttackConfig cfg;
  cfg.norm = NormKind::Linf;
  cfg.epsilon = 0.05;
  cfg.eta = 0.005;
  cfg.box = std::make_pair(0.0, 1.0);
  return cfg;
}

}  // namespace

TEST_CASE("linf step moves by eta within ball and box") {
  const AttackConfig cfg = linf_config();
  RealVec x0 = RealVec::Constant(1, 0.5);
  RealVec g = RealVec::Constant(1, 2.0);
  const RealVec next = pgd_step(x0, g, x0, cfg);
  CHECK(next[0] == doctest::Approx(0.505).epsilon(1e-12));
}

TEST_CASE("linf step clamps at the epsilon face") {
  const AttackConfig cfg = linf_config();
  RealVec x0 = RealVec::Constant(3, 0.5);
  RealVec x = x0;
  x[1] = 0.55;  // already at the +eps face
  RealVec g(3);
  g << -1.0, 3.0, 0.5;
  const RealVec next = pgd_step(x, g, x0, cfg);
  CHECK(next[1] == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(next[0] == doctest::Approx(0.495).epsilon(1e-12));
}

TEST_CASE("l2 step projects back onto the epsilon sphere") {
  AttackConfig cfg;
  cfg.norm = NormKind::L2;
  cfg.epsilon = 0.3;
  cfg.eta = 10.0;  // guaranteed to exit the ball
  RngStream rng(3, 0);
  const RealVec x0 = RealVec::Zero(8);
  const RealVec g = sample_unit_sphere(8, rng);
  const RealVec next = pgd_step(x0, g, x0, cfg);
  CHECK(std::abs((next - x0).norm() - 0.3) < 1e-9);
}

TEST_CASE("zero gradient estimates give a flagged no-op step") {
  AttackConfig cfg;
  cfg.norm = NormKind::L2;
  cfg.epsilon = 0.3;
  cfg.eta = 1.0;
  const RealVec x0 = RealVec::Ones(4);
  bool zero = false;
  const RealVec next = pgd_step(x0, RealVec::Zero(4), x0, cfg, &zero);
  CHECK(zero);
  CHECK((next - x0).norm() == 0.0);
}

TEST_CASE("iterates always satisfy ball and box constraints") {
  RngStream rng(5, 0);
  for (NormKind norm : {NormKind::L2, NormKind::Linf}) {
    AttackConfig cfg;
    cfg.norm = norm;
    cfg.epsilon = 0.2;
    cfg.eta = 0.9;
    cfg.box = std::make_pair(-0.5, 0.5);
    const Eigen::Index D = 6;
    RealVec x0(D);
    for (Eigen::Index i = 0; i < D; ++i) x0[i] = 0.4 * (2.0 * rng.next_canonical() - 1.0);
    RealVec x = x0;
    for (int step = 0; step < 100; ++step) {
      x = pgd_step(x, sample_unit_sphere(D, rng), x0, cfg);
      if (norm == NormKind::L2)
        CHECK((x - x0).norm() <= cfg.epsilon + 1e-9);
      else
        CHECK((x - x0).cwiseAbs().maxCoeff() <= cfg.epsilon + 1e-9);
      CHECK(x.minCoeff() >= -0.5 - 1e-12);
      CHECK(x.maxCoeff() <= 0.5 + 1e-12);
    }
  }
}

TEST_CASE("success at the starting point costs zero attack queries") {
  SyntheticModelSpec spec;
  spec.kind = ModelKind::Linear;
  spec.dim = 4;
  spec.seed = 2;
  SyntheticOracle oracle(spec, 100);
  AttackConfig cfg;
  cfg.epsilon = 1.0;
  cfg.eta = 0.1;
  cfg.max_queries = 100;
  cfg.success.loss_threshold = -100.0;  // any loss qualifies
  EstimatorConfig est;
  est.method = Method::Rgf;
  est.q = 2;
  RngStream rng(1, 0);
  const AttackTrace trace = run_attack(oracle, RealVec::Zero(4), 0, nullptr, nullptr, cfg, est, rng);
  CHECK(trace.outcome == AttackOutcome::Success);
  CHECK(trace.queries_to_success == 0);
  CHECK(trace.total_queries == 1);  // the verification query itself is charged
  CHECK(trace.iterations.empty());
}

TEST_CASE("budgets smaller than one iteration still leave a trace") {
  SyntheticModelSpec spec;
  spec.kind = ModelKind::Linear;
  spec.dim = 8;
  spec.seed = 3;
  SyntheticOracle oracle(spec, 5);
  AttackConfig cfg;
  cfg.epsilon = 1.0;
  cfg.eta = 0.1;
  cfg.max_queries = 5;
  cfg.success.loss_threshold = 1e18;
  EstimatorConfig est;
  est.method = Method::Rgf;
  est.q = 50;
  RngStream rng(2, 0);
  const AttackTrace trace = run_attack(oracle, RealVec::Zero(8), 0, nullptr, nullptr, cfg, est, rng);
  CHECK(trace.outcome == AttackOutcome::BudgetExhausted);
  CHECK_FALSE(trace.iterations.empty());
  CHECK(trace.total_queries == 5);
}

TEST_CASE("misclassification success rule charges its check query") {
  SyntheticModelSpec spec;
  spec.kind = ModelKind::SoftplusClassifier;
  spec.dim = 8;
  spec.seed = 4;
  spec.classes = 3;
  SyntheticOracle oracle(spec, 100);
  AttackConfig cfg;
  cfg.epsilon = 1.0;
  cfg.eta = 0.1;
  cfg.max_queries = 100;
  cfg.success.kind = SuccessRule::Kind::Misclassify;
  EstimatorConfig est;
  est.method = Method::Rgf;
  est.q = 2;
  RngStream rng(3, 0);
  // At the origin all logits are zero, argmax resolves to class 0, so label 1
  // is "misclassified" before any work happens.
  const AttackTrace trace = run_attack(oracle, RealVec::Zero(8), 1, nullptr, nullptr, cfg, est, rng);
  CHECK(trace.outcome == AttackOutcome::Success);
  CHECK(trace.queries_to_success == 0);
  CHECK(trace.total_queries == 2);  // baseline + classify
}

TEST_CASE("attacks are bit-reproducible for a fixed seed bundle") {
  SyntheticModelSpec spec;
  spec.kind = ModelKind::SoftplusClassifier;
  spec.dim = 32;
  spec.seed = 5;
  spec.classes = 5;
  SyntheticModel model(spec);
  AttackConfig cfg;
  cfg.eta = 0.05;
  cfg.max_queries = 500;
  cfg.success.loss_threshold = 2.2;
  EstimatorConfig est;
  est.method = Method::Prgf;
  est.q = 10;

  const auto run_once = [&] {
    SyntheticOracle oracle(spec, cfg.max_queries);
    const AttackTrace trace = run_single_attack(oracle, model, RealVec::Zero(32), 0, 0.4,
                                                PriorSource::Mode::Rederive, nullptr, cfg, est, 77);
    return trace_to_jsonl(trace, "replay");
  };
  CHECK(run_once() == run_once());
}

TEST_CASE("trace accounting matches the ledger") {
  SyntheticModelSpec spec;
  spec.kind = ModelKind::SoftplusClassifier;
  spec.dim = 16;
  spec.seed = 6;
  SyntheticModel model(spec);
  SyntheticOracle oracle(spec, 400);
  AttackConfig cfg;
  cfg.eta = 0.02;
  cfg.max_queries = 400;
  cfg.success.loss_threshold = 1e18;
  EstimatorConfig est;
  est.method = Method::Prgf;
  est.q = 5;
  const AttackTrace trace = run_single_attack(oracle, model, RealVec::Zero(16), 0, 0.5,
                                              PriorSource::Mode::Rederive, nullptr, cfg, est, 9);
  CHECK(trace.total_queries == oracle.ledger().used());
  CHECK(trace.total_queries <= cfg.max_queries);
  std::uint64_t prev = 0;
  for (const auto& rec : trace.iterations) {
    CHECK(rec.cumulative_queries >= prev);
    prev = rec.cumulative_queries;
  }
}

TEST_CASE("aggregate computes ASR and average queries over successes") {
  AttackTrace success;
  success.outcome = AttackOutcome::Success;
  success.queries_to_success = 100;
  AttackTrace failure;
  failure.outcome = AttackOutcome::BudgetExhausted;

  const AttackSummary both = aggregate({success, failure});
  CHECK(both.success_rate == doctest::Approx(0.5));
  CHECK(both.avg_queries.value() == doctest::Approx(100.0));

  const AttackSummary none = aggregate({failure, failure});
  CHECK(none.success_rate == 0.0);
  CHECK_FALSE(none.avg_queries.has_value());
}

TEST_CASE("an informative prior reduces median queries to threshold") {
  SyntheticModelSpec spec;
  spec.kind = ModelKind::Linear;
  spec.dim = 64;
  spec.seed = 7;
  SyntheticModel model(spec);
  const double gnorm = model.gradient(RealVec::Zero(64), 0).norm();

  AttackConfig cfg;
  cfg.norm = NormKind::L2;
  cfg.eta = 0.04;
  cfg.max_queries = 4000;
  cfg.success.loss_threshold = 0.7 * gnorm * cfg.resolved_epsilon(64);

  const auto median_queries = [&](Method method) {
    EstimatorConfig est;
    est.method = method;
    est.q = 10;
    std::vector<double> scores;
    for (std::uint64_t seed = 1; seed <= 21; ++seed) {
      SyntheticOracle oracle(spec, cfg.max_queries);
      const AttackTrace trace = run_single_attack(oracle, model, RealVec::Zero(64), 0, 0.5,
                                                  PriorSource::Mode::Rederive, nullptr, cfg, est,
                                                  seed);
      scores.push_back(trace.outcome == AttackOutcome::Success
                           ? static_cast<double>(trace.queries_to_success)
                           : static_cast<double>(cfg.max_queries));
    }
    return prgf::testing::median(scores);
  };

  CHECK(median_queries(Method::Prgf) < median_queries(Method::Rgf));
}
