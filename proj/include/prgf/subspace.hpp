#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "prgf/types.hpp"

namespace prgf {

enum class SubspaceMode { BlockReplication, ImageNearestNeighbor };

/// Orthonormal up-sampling basis V mapping xi in R^d to V*xi in R^D.
///
/// Both modes replicate each input coordinate onto a disjoint set of output
/// coordinates and rescale by 1/sqrt(replication count), so the columns have
/// disjoint supports and orthonormality is exact, not approximate.
class SubspaceBasis {
 public:
  /// 1-D nearest-neighbor upsampling: coordinate j feeds the block of D/d
  /// consecutive output coordinates. Requires d | D.
  static SubspaceBasis block_replication(Eigen::Index D, Eigen::Index d);

  /// 2-D nearest-neighbor upsampling of (h, w, C) onto (H, W, C) images in
  /// row-major (row, col, channel) layout. Requires h | H and w | W.
  static SubspaceBasis image_nearest_neighbor(Eigen::Index H, Eigen::Index W, Eigen::Index C,
                                              Eigen::Index h, Eigen::Index w);

  Eigen::Index input_dim() const { return d_; }
  Eigen::Index output_dim() const { return D_; }
  SubspaceMode mode() const { return mode_; }

  /// V * xi
  RealVec apply(const RealVec& xi) const {
    if (xi.size() != d_) throw ConfigError("subspace: input has wrong dimension");
    RealVec out(D_);
    for (Eigen::Index i = 0; i < D_; ++i) out[i] = scale_ * xi[owner_[static_cast<std::size_t>(i)]];
    return out;
  }

  /// V^T * y
  RealVec apply_adjoint(const RealVec& y) const {
    if (y.size() != D_) throw ConfigError("subspace: adjoint input has wrong dimension");
    RealVec out = RealVec::Zero(d_);
    for (Eigen::Index i = 0; i < D_; ++i) out[owner_[static_cast<std::size_t>(i)]] += scale_ * y[i];
    return out;
  }

  /// Projection V V^T * y onto the subspace.
  RealVec project(const RealVec& y) const { return apply(apply_adjoint(y)); }

  /// Column j of V, i.e. the image of the j-th standard basis vector.
  RealVec column(Eigen::Index j) const {
    RealVec e = RealVec::Zero(d_);
    e[j] = 1.0;
    return apply(e);
  }

 private:
  SubspaceBasis(Eigen::Index D, Eigen::Index d, SubspaceMode mode,
                std::vector<Eigen::Index> owner, double scale)
      : D_(D), d_(d), mode_(mode), owner_(std::move(owner)), scale_(scale) {}

  Eigen::Index D_ = 0;
  Eigen::Index d_ = 0;
  SubspaceMode mode_ = SubspaceMode::BlockReplication;
  std::vector<Eigen::Index> owner_;  // output coordinate -> owning input coordinate
  double scale_ = 1.0;               // 1/sqrt(replication count), uniform across columns
};

inline SubspaceBasis SubspaceBasis::block_replication(Eigen::Index D, Eigen::Index d) {
  if (D < 1 || d < 1 || d > D) throw ConfigError("subspace: need 1 <= d <= D");
  if (D % d != 0) throw ConfigError("subspace: block mode requires d | D");
  const Eigen::Index rep = D / d;
  std::vector<Eigen::Index> owner(static_cast<std::size_t>(D));
  for (Eigen::Index i = 0; i < D; ++i) owner[static_cast<std::size_t>(i)] = i / rep;
  return SubspaceBasis(D, d, SubspaceMode::BlockReplication, std::move(owner),
                       1.0 / std::sqrt(static_cast<double>(rep)));
}

inline SubspaceBasis SubspaceBasis::image_nearest_neighbor(Eigen::Index H, Eigen::Index W,
                                                           Eigen::Index C, Eigen::Index h,
                                                           Eigen::Index w) {
  if (H < 1 || W < 1 || C < 1 || h < 1 || w < 1) throw ConfigError("subspace: bad image shape");
  if (H % h != 0 || W % w != 0)
    throw ConfigError("subspace: image mode requires h | H and w | W");
  const Eigen::Index rh = H / h;
  const Eigen::Index rw = W / w;
  const Eigen::Index D = H * W * C;
  const Eigen::Index d = h * w * C;
  std::vector<Eigen::Index> owner(static_cast<std::size_t>(D));
  for (Eigen::Index r = 0; r < H; ++r)
    for (Eigen::Index c = 0; c < W; ++c)
      for (Eigen::Index ch = 0; ch < C; ++ch) {
        const Eigen::Index out = (r * W + c) * C + ch;
        const Eigen::Index in = ((r / rh) * w + (c / rw)) * C + ch;
        owner[static_cast<std::size_t>(out)] = in;
      }
  return SubspaceBasis(D, d, SubspaceMode::ImageNearestNeighbor, std::move(owner),
                       1.0 / std::sqrt(static_cast<double>(rh * rw)));
}

/// Factory used by the config layer. Image mode assumes square images with
/// `channels` channels: D = N*N*channels, d = n*n*channels. Non-square shapes
/// go through SubspaceBasis::image_nearest_neighbor directly.
inline SubspaceBasis make_subspace(Eigen::Index D, Eigen::Index d, SubspaceMode mode,
                                   Eigen::Index channels = 3) {
  if (mode == SubspaceMode::BlockReplication) return SubspaceBasis::block_replication(D, d);
  if (channels < 1 || D % channels != 0 || d % channels != 0)
    throw ConfigError("subspace: image mode requires channels | D and channels | d");
  const auto isqrt = [](Eigen::Index n) {
    auto r = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    return r * r == n ? r : Eigen::Index(-1);
  };
  const Eigen::Index N = isqrt(D / channels);
  const Eigen::Index n = isqrt(d / channels);
  if (N < 0 || n < 0) throw ConfigError("subspace: image mode requires square spatial shapes");
  return SubspaceBasis::image_nearest_neighbor(N, N, channels, n, n);
}

}  // namespace prgf
