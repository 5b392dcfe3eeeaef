#pragma once

#include <cmath>
#include <optional>

#include "prgf/rng.hpp"
#include "prgf/subspace.hpp"
#include "prgf/types.hpp"

namespace prgf {

inline constexpr double kUnitNormTol = 1e-9;

/// x minus its component along the unit vector v. Idempotent; the result is
/// orthogonal to v up to rounding.
template <typename DerivedX, typename DerivedV>
auto project_orthogonal(const Eigen::MatrixBase<DerivedX>& x,
                        const Eigen::MatrixBase<DerivedV>& v) {
  return (x - v.dot(x) * v).eval();
}

/// Uniform draw from the unit hypersphere in R^dim: normalized i.i.d. standard
/// normals, which is rotationally invariant by construction.
inline RealVec sample_unit_sphere(Eigen::Index dim, RngStream& rng) {
  if (dim < 1) throw ConfigError("sample_unit_sphere: dim must be >= 1");
  RealVec x(dim);
  double norm2 = 0.0;
  do {
    for (Eigen::Index i = 0; i < dim; ++i) x[i] = rng.next_normal();
    norm2 = x.squaredNorm();
  } while (norm2 == 0.0);
  return x / std::sqrt(norm2);
}

/// Sampling recipe for one random direction. Without a bias direction the
/// draw is uniform on the hypersphere (of the subspace, when present). With a
/// unit bias direction v and coefficient lambda the draw is
///
///   u = sqrt(lambda) * v + sqrt(1 - lambda) * normalize((I - v v^T) xi),
///
/// with xi uniform on the unit hypersphere of R^D, or xi drawn in the
/// subspace as V*xi when a basis is present. Either way ||u|| = 1 and
/// u^T v = sqrt(lambda) exactly, and E[u u^T] realizes (full space) or
/// approximates (subspace) the one-spiked covariance the coefficient lambda
/// parameterizes.
struct SamplerSpec {
  Eigen::Index dim = 0;
  std::optional<RealVec> bias_direction;  // unit vector v
  double bias_coefficient = 0.0;          // lambda in [0, 1]
  std::optional<SubspaceBasis> subspace;

  void validate() const {
    if (dim < 1) throw ConfigError("sampler: dim must be >= 1");
    if (bias_coefficient < 0.0 || bias_coefficient > 1.0)
      throw ConfigError("sampler: bias coefficient must lie in [0,1]");
    if (bias_direction) {
      if (bias_direction->size() != dim) throw ConfigError("sampler: bias direction has wrong dimension");
      if (std::abs(bias_direction->norm() - 1.0) > kUnitNormTol)
        throw ConfigError("sampler: bias direction must be a unit vector");
    }
    if (subspace && subspace->output_dim() != dim)
      throw ConfigError("sampler: subspace output dimension mismatch");
  }
};

namespace detail {

inline RealVec raw_direction(const SamplerSpec& spec, RngStream& rng) {
  if (spec.subspace) return spec.subspace->apply(sample_unit_sphere(spec.subspace->input_dim(), rng));
  return sample_unit_sphere(spec.dim, rng);
}

}  // namespace detail

/// One draw from the sampler described by `spec`. The probability-zero
/// degeneracy (xi parallel to v) is retried once, then reported as an error.
inline RealVec sample_biased(const SamplerSpec& spec, RngStream& rng) {
  spec.validate();
  if (!spec.bias_direction) return detail::raw_direction(spec, rng);

  const RealVec& v = *spec.bias_direction;
  const double lambda = spec.bias_coefficient;
  if (lambda == 1.0) return v;

  for (int attempt = 0; attempt < 2; ++attempt) {
    const RealVec residual = project_orthogonal(detail::raw_direction(spec, rng), v);
    const double norm = residual.norm();
    if (norm > 0.0)
      return std::sqrt(lambda) * v + std::sqrt(1.0 - lambda) * (residual / norm);
  }
  throw DegenerateSampleError("sample_biased: direction collapsed onto the bias vector twice");
}

}  // namespace prgf
