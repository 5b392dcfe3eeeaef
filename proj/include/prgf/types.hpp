#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace prgf {

template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Dense real vector carrying its ambient dimension. All public entry points
/// expect finite entries.
using RealVec = VecX<double>;
using RealMat = MatX<double>;

/// Invalid dimensions, out-of-range parameters, unknown kinds or config keys.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A probability-zero sampling degeneracy persisted through a retry.
class DegenerateSampleError : public std::runtime_error {
 public:
  explicit DegenerateSampleError(const std::string& msg) : std::runtime_error(msg) {}
};

inline bool all_finite(const RealVec& x) { return x.allFinite(); }

}  // namespace prgf
