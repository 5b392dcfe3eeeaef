#include <doctest.h>

#include "prgf/closed_form.hpp"
#include "prgf/coefficients.hpp"
#include "prgf/mc.hpp"

using namespace prgf;

namespace {

SyntheticModelSpec linear16(std::uint64_t seed) {
  SyntheticModelSpec spec;
  spec.kind = ModelKind::Linear;
  spec.dim = 16;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("objective boundary values") {
  for (double a : {0.0, 0.25, 0.9}) {
    CHECK(closed_form_F(0.0, a, 32, 7) ==
          doctest::Approx((1.0 - a) * 7.0 / (32 + 7 - 2.0)).epsilon(1e-12));
    CHECK(closed_form_F(1.0, a, 32, 7) == doctest::Approx(a).epsilon(1e-12));
    CHECK(closed_form_F_subspace(0.0, a, 0.6, 8, 7) ==
          doctest::Approx(0.6 * 7.0 / (8 + 7 - 1.0)).epsilon(1e-12));
    CHECK(closed_form_F_subspace(1.0, a, 0.6, 8, 7) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("theorem-1 closed form special cases") {
  RealVec g(4);
  g << 1.0, -2.0, 0.5, 3.0;
  const double g2 = g.squaredNorm();

  SUBCASE("isotropic covariance at q = 1") {
    const CovarianceSpec cov{1.0 / 4.0, RealVec(g.normalized()), nullptr};
    CHECK(closed_form_theorem1(g, cov, 1) == doctest::Approx(g2 * (1.0 - 0.25)).epsilon(1e-12));
  }
  SUBCASE("fully aligned direction at lambda 1 has zero loss") {
    const CovarianceSpec cov{1.0, RealVec(g.normalized()), nullptr};
    CHECK(closed_form_theorem1(g, cov, 5) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("a covariance carrying no gradient signal pins the loss to ||g||^2") {
    RealVec v = RealVec::Zero(4);
    v[0] = g[1];
    v[1] = -g[0];
    v.normalize();  // orthogonal to g
    const CovarianceSpec cov{1.0, v, nullptr};
    CHECK(closed_form_theorem1(g, cov, 5) == doctest::Approx(g2).epsilon(1e-12));
  }
}

TEST_CASE("grid argmax endpoints") {
  CHECK(grid_argmax_lambda(1.0, 64, 10, 1e-3) == doctest::Approx(1.0));
  CHECK(grid_argmax_lambda(0.0, 64, 10, 1e-3) == doctest::Approx(0.0));
}

TEST_CASE("averaging closed forms reduce correctly at the endpoints") {
  const double norm = 2.5;
  CHECK(closed_form_theorem2(0.0, 0.4, 0.3, norm) ==
        doctest::Approx((1.0 - 0.09) * norm * norm).epsilon(1e-12));
  CHECK(closed_form_theorem2(1.0, 0.4, 0.3, norm) ==
        doctest::Approx((1.0 - 0.16) * norm * norm).epsilon(1e-12));
  CHECK(closed_form_theorem3(0.0, 0.4, 0.2, 0.5, 0.3, norm) ==
        doctest::Approx((1.0 - 0.09) * norm * norm).epsilon(1e-12));
  CHECK(closed_form_theorem3(1.0, 0.4, 0.2, 0.5, 0.3, norm) ==
        doctest::Approx((1.0 - 0.16) * norm * norm).epsilon(1e-12));
}

TEST_CASE("subspace mu* reduces to the full-space formula on the full space") {
  for (double alpha : {0.2, 0.6})
    for (double e_beta : {0.1, 0.5})
      CHECK(mu_star_subspace_exact(alpha, alpha, 1.0, e_beta) ==
            doctest::Approx(mu_star(alpha, e_beta)).epsilon(1e-12));
}

TEST_CASE("mc_loss of the pure transfer direction is deterministic") {
  SyntheticModel model(linear16(3));
  const RealVec x = RealVec::Zero(16);
  const RealVec g = model.gradient(x, 0);
  McRunSpec run;
  run.kind = McEstimatorKind::Biased;
  run.q = 3;
  run.lambda = 1.0;
  run.prior_cosine = 0.7;
  const double expected = g.squaredNorm() * (1.0 - 0.49);
  const MCLossReport report = mc_loss(model, 0, x, run, 1000, 9, expected);
  CHECK(report.mc_loss == doctest::Approx(expected).epsilon(1e-9));
  CHECK(report.std_error < 1e-12);
  CHECK(report.within(3.0));
}

TEST_CASE("mc_loss of uniform sampling matches the closed form") {
  SyntheticModel model(linear16(5));
  const RealVec x = RealVec::Zero(16);
  const RealVec g = model.gradient(x, 0);
  const CovarianceSpec cov{1.0 / 16.0, RealVec(g.normalized()), nullptr};
  const double cf = closed_form_theorem1(g, cov, 5);
  McRunSpec run;
  run.kind = McEstimatorKind::Uniform;
  run.q = 5;
  const MCLossReport report = mc_loss(model, 0, x, run, 4000, 11, cf);
  CHECK(report.within(3.0));
}

TEST_CASE("mc_loss requires enough trials") {
  SyntheticModel model(linear16(7));
  McRunSpec run;
  CHECK_THROWS_AS(mc_loss(model, 0, RealVec::Zero(16), run, 10, 1), ConfigError);
}

TEST_CASE("simulated expected beta tracks the closed-form approximation") {
  SyntheticModel model(linear16(9));
  const RealVec x = RealVec::Zero(16);
  const MeanCosineReport sim = simulate_expected_beta(model, 0, x, 4, nullptr, 4000, 13);
  CHECK(std::abs(sim.mean - expected_beta(4, 16)) < 0.05);
}
