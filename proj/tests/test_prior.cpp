#include <doctest.h>

#include <Eigen/Cholesky>

#include "prgf/prior.hpp"
#include "prgf/synthetic.hpp"
#include "test_util.hpp"

using namespace prgf;
using prgf::testing::FixedLinearOracle;
using prgf::testing::mean_std_error;

TEST_CASE("synthetic priors hit the requested cosine exactly") {
  RngStream rng(3, 0);
  RealVec g(6);
  g << 1, -2, 0.5, 3, 0, -1;
  const RealVec ghat = g.normalized();

  CHECK((make_synthetic_prior(g, 1.0, rng).v - ghat).norm() < 1e-12);
  CHECK(std::abs(make_synthetic_prior(g, 0.0, rng).v.dot(ghat)) < 1e-9);
  for (double c : {0.3, 0.4, 0.99}) {
    const TransferPrior prior = make_synthetic_prior(g, c, rng);
    CHECK(std::abs(prior.v.norm() - 1.0) < 1e-9);
    CHECK(prior.v.dot(ghat) == doctest::Approx(c).epsilon(1e-9));
  }
  CHECK_THROWS_AS(make_synthetic_prior(g, 1.2, rng), ConfigError);
  CHECK_THROWS_AS(make_synthetic_prior(g, -0.1, rng), ConfigError);
  CHECK_THROWS_AS(make_synthetic_prior(RealVec::Zero(6), 0.5, rng), ConfigError);
}

TEST_CASE("inner product estimation is exact on linear oracles") {
  RngStream rng(5, 0);
  RealVec g(8);
  for (int i = 0; i < 8; ++i) g[i] = rng.next_normal();
  FixedLinearOracle oracle(g);
  const RealVec x = RealVec::Ones(8);
  const double f0 = oracle.query(x, 0);

  for (double sigma : {1e-6, 1e-2, 1.0}) {
    const RealVec dir = sample_unit_sphere(8, rng);
    const double est = estimate_inner_product(oracle, x, 0, dir, sigma, f0);
    CHECK(est == doctest::Approx(g.dot(dir)).epsilon(1e-9));
  }

  const RealVec ortho = project_orthogonal(sample_unit_sphere(8, rng), g.normalized());
  CHECK(std::abs(estimate_inner_product(oracle, x, 0, ortho, 1e-3, f0)) < 1e-9);
}

TEST_CASE("inner product error is O(sigma) on quadratic oracles") {
  SyntheticModelSpec spec;
  spec.kind = ModelKind::Quadratic;
  spec.dim = 8;
  spec.seed = 11;
  SyntheticOracle oracle(spec);
  RngStream rng(7, 0);
  const RealVec x = sample_unit_sphere(8, rng);
  const RealVec dir = sample_unit_sphere(8, rng);
  const double exact = dir.dot(oracle.true_gradient(x, 0));
  const double sigma = 1e-4 * std::sqrt(8.0);
  const double f0 = oracle.query(x, 0);
  const double est = estimate_inner_product(oracle, x, 0, dir, sigma, f0);
  CHECK(std::abs(est - exact) / std::abs(exact) < 10.0 * sigma);
}

TEST_CASE("gradient norm estimate vanishes at a stationary point") {
  SyntheticModelSpec spec;
  spec.kind = ModelKind::Quadratic;
  spec.dim = 6;
  spec.seed = 13;
  SyntheticOracle oracle(spec);
  const RealVec xstar =
      oracle.model().quadratic_matrix().llt().solve(-oracle.model().quadratic_vector());
  RngStream rng(8, 0);
  const double sigma = 1e-5;
  const double f0 = oracle.query(xstar, 0);
  const double est = estimate_grad_norm(oracle, xstar, 0, 10, sigma, f0, rng);
  CHECK(est < 1e-3);
}

TEST_CASE("squared norm estimator is unbiased on linear oracles") {
  RngStream setup(9, 0);
  RealVec g(16);
  for (int i = 0; i < 16; ++i) g[i] = setup.next_normal();
  FixedLinearOracle oracle(g);
  const RealVec x = RealVec::Zero(16);
  const double f0 = oracle.query(x, 0);

  const int trials = 4000;
  std::vector<double> ratios(trials);
  for (int t = 0; t < trials; ++t) {
    RngStream rng(100, static_cast<std::uint64_t>(t));
    const double est = estimate_grad_norm(oracle, x, 0, 10, 1e-3, f0, rng);
    ratios[static_cast<std::size_t>(t)] = est * est / g.squaredNorm();
  }
  const auto stats = mean_std_error(ratios);
  CHECK(std::abs(stats.mean - 1.0) < 3.0 * stats.std_error + 0.01);
}

TEST_CASE("more norm probes reduce the relative RMSE roughly as 1/sqrt(S)") {
  RngStream setup(10, 0);
  RealVec g(256);
  for (int i = 0; i < 256; ++i) g[i] = setup.next_normal();
  FixedLinearOracle oracle(g);
  const RealVec x = RealVec::Zero(256);
  const double f0 = oracle.query(x, 0);
  const double true_norm = g.norm();

  const int trials = 1000;
  const auto rmse_for = [&](int S, std::uint64_t stream_base) {
    double acc = 0.0;
    for (int t = 0; t < trials; ++t) {
      RngStream rng(11, stream_base + static_cast<std::uint64_t>(t));
      const double est = estimate_grad_norm(oracle, x, 0, S, 1e-3, f0, rng);
      const double rel = (est - true_norm) / true_norm;
      acc += rel * rel;
    }
    return std::sqrt(acc / trials);
  };

  const double rmse1 = rmse_for(1, 0);
  const double rmse10 = rmse_for(10, 100000);
  CHECK(rmse10 < rmse1);
  const double ratio = rmse10 / rmse1;
  CHECK(ratio > (1.0 / std::sqrt(10.0)) * 0.7);
  CHECK(ratio < (1.0 / std::sqrt(10.0)) * 1.3);
}

TEST_CASE("alpha estimation recovers the construction cosine") {
  RngStream setup(12, 0);
  RealVec g(50);
  for (int i = 0; i < 50; ++i) g[i] = setup.next_normal();
  FixedLinearOracle oracle(g);
  const RealVec x = RealVec::Zero(50);
  const double f0 = oracle.query(x, 0);

  PriorStats stats;
  stats.grad_norm_hat = g.norm();  // exact norm supplied

  SUBCASE("aligned prior gives alpha = 1") {
    TransferPrior prior{g.normalized()};
    CHECK(estimate_alpha(oracle, x, 0, prior, stats, 1e-6, f0) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("orthogonal prior gives alpha = 0") {
    const RealVec v = project_orthogonal(sample_unit_sphere(50, setup), g.normalized()).normalized();
    TransferPrior prior{v};
    CHECK(std::abs(estimate_alpha(oracle, x, 0, prior, stats, 1e-6, f0)) < 1e-9);
  }
  SUBCASE("median over trials lands near the target with estimated norms") {
    std::vector<double> alphas;
    for (int t = 0; t < 100; ++t) {
      RngStream rng(13, static_cast<std::uint64_t>(t));
      const TransferPrior prior = make_synthetic_prior(g, 0.4, rng);
      PriorStats st;
      st.grad_norm_hat = estimate_grad_norm(oracle, x, 0, 10, 1e-4, f0, rng);
      alphas.push_back(estimate_alpha(oracle, x, 0, prior, st, 1e-4, f0));
    }
    CHECK(std::abs(prgf::testing::median(alphas) - 0.4) < 0.1);
  }
}

TEST_CASE("alpha requires a norm estimate and degrades gracefully at zero") {
  FixedLinearOracle oracle(RealVec::Ones(4));
  const double f0 = oracle.query(RealVec::Zero(4), 0);
  PriorStats stats;
  TransferPrior prior{RealVec::Unit(4, 0)};
  CHECK_THROWS_AS(estimate_alpha(oracle, RealVec::Zero(4), 0, prior, stats, 1e-6, f0),
                  ConfigError);
  stats.grad_norm_hat = 0.0;
  CHECK(estimate_alpha(oracle, RealVec::Zero(4), 0, prior, stats, 1e-6, f0) == 0.0);
}

TEST_CASE("subspace alignment estimation matches the geometry") {
  const Eigen::Index D = 16;
  const auto basis = SubspaceBasis::block_replication(D, 4);

  SUBCASE("gradient inside the subspace gives alignment near 1") {
    RngStream rng(14, 0);
    const RealVec g = 2.0 * basis.apply(sample_unit_sphere(4, rng));
    FixedLinearOracle oracle(g);
    const double f0 = oracle.query(RealVec::Zero(D), 0);
    // The per-call estimate is noisy but its square is unbiased at 1 (the
    // clamp only ever pulls overshoots down, so the mean sits slightly low).
    std::vector<double> align2(300);
    for (int t = 0; t < 300; ++t) {
      RngStream trial_rng(14, static_cast<std::uint64_t>(t) + 1);
      PriorStats stats;
      stats.grad_norm_hat = g.norm();
      const double a = estimate_subspace_alignment(oracle, RealVec::Zero(D), 0, basis, stats, 10,
                                                   1e-6, f0, trial_rng);
      align2[static_cast<std::size_t>(t)] = a * a;
    }
    CHECK(mean_std_error(align2).mean > 0.8);
  }
  SUBCASE("gradient orthogonal to the subspace gives alignment 0") {
    RealVec g = RealVec::Zero(D);
    g[0] = 1.0;
    g[1] = -1.0;  // block columns average consecutive pairs of coordinates
    const auto basis2 = SubspaceBasis::block_replication(D, 8);
    CHECK(basis2.apply_adjoint(g).norm() < 1e-12);
    FixedLinearOracle oracle(g);
    RngStream rng(15, 0);
    const double f0 = oracle.query(RealVec::Zero(D), 0);
    PriorStats stats;
    stats.grad_norm_hat = g.norm();
    const double align =
        estimate_subspace_alignment(oracle, RealVec::Zero(D), 0, basis2, stats, 10, 1e-6, f0, rng);
    CHECK(align < 1e-9);
  }
  SUBCASE("random gradients have mean squared alignment d/D") {
    RngStream setup(16, 0);
    std::vector<double> align2(1000);
    for (int t = 0; t < 1000; ++t) {
      RealVec g(D);
      for (Eigen::Index i = 0; i < D; ++i) g[i] = setup.next_normal();
      FixedLinearOracle oracle(g);
      RngStream rng(17, static_cast<std::uint64_t>(t));
      const double f0 = oracle.query(RealVec::Zero(D), 0);
      PriorStats stats;
      stats.grad_norm_hat = g.norm();
      const double a =
          estimate_subspace_alignment(oracle, RealVec::Zero(D), 0, basis, stats, 10, 1e-6, f0, rng);
      align2[static_cast<std::size_t>(t)] = a * a;
    }
    const auto stats = mean_std_error(align2);
    CHECK(std::abs(stats.mean - 4.0 / 16.0) < 0.02);
  }
}

TEST_CASE("subspace alignment with the full space reduces to the norm estimator") {
  const Eigen::Index D = 8;
  const auto full = SubspaceBasis::block_replication(D, D);
  RngStream setup(18, 0);
  RealVec g(D);
  for (Eigen::Index i = 0; i < D; ++i) g[i] = setup.next_normal();
  FixedLinearOracle oracle(g);
  const double f0 = oracle.query(RealVec::Zero(D), 0);

  RngStream rng_a(19, 0), rng_b(19, 0);
  PriorStats stats;
  stats.grad_norm_hat = estimate_grad_norm(oracle, RealVec::Zero(D), 0, 10, 1e-5, f0, rng_a);
  const double align =
      estimate_subspace_alignment(oracle, RealVec::Zero(D), 0, full, stats, 10, 1e-5, f0, rng_b);
  // Same probes, same stream: the ratio collapses to exactly 1 (up to clamp).
  CHECK(align == doctest::Approx(1.0).epsilon(1e-9));
}
