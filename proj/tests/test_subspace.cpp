#include <doctest.h>

#include "prgf/subspace.hpp"

using namespace prgf;

TEST_CASE("block replication maps basis vectors to scaled blocks") {
  const auto basis = SubspaceBasis::block_replication(8, 4);
  RealVec e1 = RealVec::Zero(4);
  e1[0] = 1.0;
  const RealVec img = basis.apply(e1);
  const double s = 1.0 / std::sqrt(2.0);
  RealVec expected(8);
  expected << s, s, 0, 0, 0, 0, 0, 0;
  CHECK((img - expected).norm() < 1e-12);
}

TEST_CASE("basis columns are orthonormal") {
  for (const auto& basis : {SubspaceBasis::block_replication(12, 3),
                            SubspaceBasis::image_nearest_neighbor(6, 6, 3, 3, 3)}) {
    for (Eigen::Index j = 0; j < basis.input_dim(); ++j)
      for (Eigen::Index k = j; k < basis.input_dim(); ++k) {
        const double dot = basis.column(j).dot(basis.column(k));
        CHECK(std::abs(dot - (j == k ? 1.0 : 0.0)) < 1e-9);
      }
  }
}

TEST_CASE("adjoint inverts apply on the subspace and project is idempotent") {
  const auto basis = SubspaceBasis::block_replication(12, 4);
  RealVec xi(4);
  xi << 0.3, -1.2, 0.05, 2.0;
  CHECK((basis.apply_adjoint(basis.apply(xi)) - xi).norm() < 1e-12);

  RealVec y(12);
  for (Eigen::Index i = 0; i < 12; ++i) y[i] = std::sin(static_cast<double>(i));
  const RealVec p = basis.project(y);
  CHECK((basis.project(p) - p).norm() < 1e-12);
  // The residual is orthogonal to the subspace.
  CHECK(basis.apply_adjoint(y - p).norm() < 1e-12);
}

TEST_CASE("divisibility violations are configuration errors") {
  CHECK_THROWS_AS(SubspaceBasis::block_replication(10, 4), ConfigError);
  CHECK_THROWS_AS(SubspaceBasis::image_nearest_neighbor(6, 6, 3, 4, 3), ConfigError);
  CHECK_THROWS_AS(make_subspace(10, 4, SubspaceMode::BlockReplication), ConfigError);
}

TEST_CASE("make_subspace resolves square image shapes") {
  // 2700 = 30*30*3 down to 675 = 15*15*3.
  const auto basis = make_subspace(2700, 675, SubspaceMode::ImageNearestNeighbor, 3);
  CHECK(basis.output_dim() == 2700);
  CHECK(basis.input_dim() == 675);
  RealVec e = RealVec::Zero(675);
  e[42] = 1.0;
  CHECK(std::abs(basis.apply(e).norm() - 1.0) < 1e-12);
  CHECK_THROWS_AS(make_subspace(2700, 600, SubspaceMode::ImageNearestNeighbor, 3), ConfigError);
}
