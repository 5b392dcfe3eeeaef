#include "prgf/prior.hpp"

namespace prgf {

TransferPrior make_synthetic_prior(const RealVec& true_grad, double target_cosine,
                                   RngStream& rng) {
  if (target_cosine < 0.0 || target_cosine > 1.0)
    throw ConfigError("synthetic prior: target cosine must lie in [0, 1]");
  const double norm = true_grad.norm();
  if (norm == 0.0) throw ConfigError("synthetic prior: true gradient is zero");
  const RealVec ghat = true_grad / norm;
  if (target_cosine == 1.0) return TransferPrior{ghat};

  RealVec ortho;
  double ortho_norm = 0.0;
  for (int attempt = 0; attempt < 2 && ortho_norm == 0.0; ++attempt) {
    ortho = project_orthogonal(sample_unit_sphere(ghat.size(), rng), ghat);
    ortho_norm = ortho.norm();
  }
  if (ortho_norm == 0.0)
    throw DegenerateSampleError("synthetic prior: orthogonal component collapsed twice");

  const double s = std::sqrt(1.0 - target_cosine * target_cosine);
  return TransferPrior{target_cosine * ghat + s * (ortho / ortho_norm)};
}

}  // namespace prgf
