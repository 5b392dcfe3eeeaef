#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "prgf/oracle.hpp"
#include "prgf/types.hpp"

namespace prgf {

enum class ModelKind { Linear, Quadratic, SoftplusClassifier };

ModelKind parse_model_kind(const std::string& name);
std::string model_kind_name(ModelKind kind);

/// Recipe for a deterministic synthetic model. All parameters are generated
/// from `seed`, so two specs with identical fields build bit-identical models.
struct SyntheticModelSpec {
  ModelKind kind = ModelKind::Linear;
  Eigen::Index dim = 0;
  std::uint64_t seed = 0;
  double scale = 1.0;  // overall weight magnitude

  // softplus classifier only
  int classes = 10;
  Eigen::Index smooth_dim = 0;  // >0: weights drawn inside the block-replication
                                // subspace of this dimension, plus a small
                                // orthogonal component of size rough_scale
  double rough_scale = 0.0;

  // quadratic only
  bool convex = true;

  void validate() const;
};

/// A synthetic model with analytically exact losses and gradients. Pure and
/// stateless after construction; no query accounting lives here.
///
/// linear:    f(x, y) = g^T x                          grad = g
/// quadratic: f(x, y) = x^T A x / 2 + b^T x            grad = A x + b
/// softplus:  f(x, y) = log(1 + sum_{k != y} exp(z_k - z_y)),  z_k = w_k^T x
///            (the cross-entropy of a linear softmax classifier; a smooth
///             multi-class margin loss)
class SyntheticModel {
 public:
  explicit SyntheticModel(const SyntheticModelSpec& spec);

  const SyntheticModelSpec& spec() const { return spec_; }
  Eigen::Index dim() const { return spec_.dim; }

  double loss(const RealVec& x, std::int64_t label) const;
  RealVec gradient(const RealVec& x, std::int64_t label) const;

  /// argmax_k w_k^T x; nullopt for non-classifier kinds.
  std::optional<std::int64_t> predicted_label(const RealVec& x) const;

  // Parameter accessors for tests and verification.
  const RealVec& linear_weights() const;        // linear: g
  const RealMat& quadratic_matrix() const;      // quadratic: A
  const RealVec& quadratic_vector() const;      // quadratic: b
  const RealMat& classifier_weights() const;    // softplus: rows are w_k

 private:
  SyntheticModelSpec spec_;
  RealVec g_;
  RealMat a_;
  RealVec b_;
  RealMat w_;  // classes x dim
};

/// Query-counted oracle over a synthetic model. The exact gradient is exposed
/// as a test-only backdoor for verification; estimators must not touch it.
class SyntheticOracle final : public LossOracle {
 public:
  SyntheticOracle(const SyntheticModelSpec& spec,
                  std::optional<std::uint64_t> budget = std::nullopt)
      : model_(std::make_shared<SyntheticModel>(spec)), ledger_(budget) {}
  SyntheticOracle(std::shared_ptr<const SyntheticModel> model,
                  std::optional<std::uint64_t> budget = std::nullopt)
      : model_(std::move(model)), ledger_(budget) {}

  Eigen::Index dim() const override { return model_->dim(); }
  QueryLedger& ledger() override { return ledger_; }

  double query(const RealVec& x, std::int64_t label) override {
    ledger_.charge();
    return model_->loss(x, label);
  }

  std::optional<std::int64_t> classify(const RealVec& x) override {
    auto pred = model_->predicted_label(x);
    if (pred) ledger_.charge();
    return pred;
  }

  /// Exact gradient, free of charge. Test/verify backdoor.
  RealVec true_gradient(const RealVec& x, std::int64_t label) const {
    return model_->gradient(x, label);
  }

  const SyntheticModel& model() const { return *model_; }
  std::shared_ptr<const SyntheticModel> model_ptr() const { return model_; }

 private:
  std::shared_ptr<const SyntheticModel> model_;
  QueryLedger ledger_;
};

std::unique_ptr<SyntheticOracle> make_synthetic(const SyntheticModelSpec& spec,
                                                std::optional<std::uint64_t> budget = std::nullopt);

}  // namespace prgf
