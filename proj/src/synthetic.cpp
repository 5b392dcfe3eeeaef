#include "prgf/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "prgf/rng.hpp"
#include "prgf/subspace.hpp"

namespace prgf {

ModelKind parse_model_kind(const std::string& name) {
  if (name == "linear") return ModelKind::Linear;
  if (name == "quadratic") return ModelKind::Quadratic;
  if (name == "softplus") return ModelKind::SoftplusClassifier;
  throw ConfigError("unknown model kind: " + name);
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Linear: return "linear";
    case ModelKind::Quadratic: return "quadratic";
    case ModelKind::SoftplusClassifier: return "softplus";
  }
  throw ConfigError("unknown model kind enum value");
}

void SyntheticModelSpec::validate() const {
  if (dim < 2) throw ConfigError("synthetic model: dim must be >= 2");
  if (scale <= 0.0) throw ConfigError("synthetic model: scale must be positive");
  if (kind == ModelKind::SoftplusClassifier) {
    if (classes < 2) throw ConfigError("synthetic model: need at least 2 classes");
    if (smooth_dim < 0 || smooth_dim > dim)
      throw ConfigError("synthetic model: smooth_dim must lie in [0, dim]");
    if (smooth_dim > 0 && dim % smooth_dim != 0)
      throw ConfigError("synthetic model: smooth_dim must divide dim");
    if (rough_scale < 0.0) throw ConfigError("synthetic model: rough_scale must be >= 0");
  }
}

namespace {

RealVec draw_gaussian(Eigen::Index n, double stddev, RngStream& rng) {
  RealVec out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = stddev * rng.next_normal();
  return out;
}

}  // namespace

SyntheticModel::SyntheticModel(const SyntheticModelSpec& spec) : spec_(spec) {
  spec_.validate();
  const Eigen::Index D = spec_.dim;
  const double per_coord = spec_.scale / std::sqrt(static_cast<double>(D));
  RngStream rng(spec_.seed, /*stream_id=*/0);

  switch (spec_.kind) {
    case ModelKind::Linear:
      g_ = draw_gaussian(D, per_coord, rng);
      break;
    case ModelKind::Quadratic: {
      RealMat m(D, D);
      for (Eigen::Index i = 0; i < D; ++i)
        for (Eigen::Index j = 0; j < D; ++j) m(i, j) = rng.next_normal();
      if (spec_.convex) {
        a_ = (spec_.scale / static_cast<double>(D)) * (m.transpose() * m);
      } else {
        a_ = (spec_.scale / std::sqrt(static_cast<double>(D))) * 0.5 * (m + m.transpose());
      }
      b_ = draw_gaussian(D, per_coord, rng);
      break;
    }
    case ModelKind::SoftplusClassifier: {
      w_.resize(spec_.classes, D);
      if (spec_.smooth_dim > 0) {
        const auto basis = SubspaceBasis::block_replication(D, spec_.smooth_dim);
        const double per_sub = spec_.scale / std::sqrt(static_cast<double>(spec_.smooth_dim));
        for (int k = 0; k < spec_.classes; ++k) {
          RealVec row = basis.apply(draw_gaussian(spec_.smooth_dim, per_sub, rng));
          if (spec_.rough_scale > 0.0) {
            RealVec noise = draw_gaussian(D, spec_.rough_scale * per_coord, rng);
            row += noise - basis.project(noise);
          }
          w_.row(k) = row.transpose();
        }
      } else {
        for (int k = 0; k < spec_.classes; ++k)
          w_.row(k) = draw_gaussian(D, per_coord, rng).transpose();
      }
      break;
    }
  }
}

double SyntheticModel::loss(const RealVec& x, std::int64_t label) const {
  if (x.size() != spec_.dim) throw ConfigError("synthetic model: query dimension mismatch");
  switch (spec_.kind) {
    case ModelKind::Linear:
      return g_.dot(x);
    case ModelKind::Quadratic:
      return 0.5 * x.dot(a_ * x) + b_.dot(x);
    case ModelKind::SoftplusClassifier: {
      const std::int64_t y = label;
      if (y < 0 || y >= spec_.classes) throw ConfigError("synthetic model: label out of range");
      const RealVec z = w_ * x;
      // log(1 + sum_{k != y} exp(z_k - z_y)), stabilized around the max margin
      double max_margin = 0.0;
      for (int k = 0; k < spec_.classes; ++k)
        if (k != y) max_margin = std::max(max_margin, z[k] - z[y]);
      double acc = std::exp(-max_margin);
      for (int k = 0; k < spec_.classes; ++k)
        if (k != y) acc += std::exp(z[k] - z[y] - max_margin);
      return max_margin + std::log(acc);
    }
  }
  throw ConfigError("unknown model kind enum value");
}

RealVec SyntheticModel::gradient(const RealVec& x, std::int64_t label) const {
  if (x.size() != spec_.dim) throw ConfigError("synthetic model: query dimension mismatch");
  switch (spec_.kind) {
    case ModelKind::Linear:
      return g_;
    case ModelKind::Quadratic:
      return a_ * x + b_;
    case ModelKind::SoftplusClassifier: {
      const std::int64_t y = label;
      if (y < 0 || y >= spec_.classes) throw ConfigError("synthetic model: label out of range");
      const RealVec z = w_ * x;
      double max_margin = 0.0;
      for (int k = 0; k < spec_.classes; ++k)
        if (k != y) max_margin = std::max(max_margin, z[k] - z[y]);
      double denom = std::exp(-max_margin);
      RealVec p = RealVec::Zero(spec_.classes);
      for (int k = 0; k < spec_.classes; ++k) {
        if (k == y) continue;
        p[k] = std::exp(z[k] - z[y] - max_margin);
        denom += p[k];
      }
      p /= denom;
      RealVec grad = RealVec::Zero(spec_.dim);
      double total = 0.0;
      for (int k = 0; k < spec_.classes; ++k) {
        if (k == y || p[k] == 0.0) continue;
        grad += p[k] * w_.row(k).transpose();
        total += p[k];
      }
      grad -= total * w_.row(y).transpose();
      return grad;
    }
  }
  throw ConfigError("unknown model kind enum value");
}

std::optional<std::int64_t> SyntheticModel::predicted_label(const RealVec& x) const {
  if (spec_.kind != ModelKind::SoftplusClassifier) return std::nullopt;
  Eigen::Index best = 0;
  (w_ * x).maxCoeff(&best);
  return static_cast<std::int64_t>(best);
}

const RealVec& SyntheticModel::linear_weights() const {
  if (spec_.kind != ModelKind::Linear) throw ConfigError("not a linear model");
  return g_;
}

const RealMat& SyntheticModel::quadratic_matrix() const {
  if (spec_.kind != ModelKind::Quadratic) throw ConfigError("not a quadratic model");
  return a_;
}

const RealVec& SyntheticModel::quadratic_vector() const {
  if (spec_.kind != ModelKind::Quadratic) throw ConfigError("not a quadratic model");
  return b_;
}

const RealMat& SyntheticModel::classifier_weights() const {
  if (spec_.kind != ModelKind::SoftplusClassifier) throw ConfigError("not a classifier model");
  return w_;
}

std::unique_ptr<SyntheticOracle> make_synthetic(const SyntheticModelSpec& spec,
                                                std::optional<std::uint64_t> budget) {
  return std::make_unique<SyntheticOracle>(spec, budget);
}

}  // namespace prgf
