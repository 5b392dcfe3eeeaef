#pragma once

#include <cmath>

#include "prgf/types.hpp"

namespace prgf {

/// Optimal bias coefficient for prior-guided sampling in the full space.
///
/// Given the squared cosine alpha2 between the transfer direction and the true
/// gradient, the number of sampled directions q, and the ambient dimension D,
/// the estimator loss is minimized by the piecewise closed form
///
///   lambda* = 0                                     if alpha2 <= 1 / (D + 2q - 2)
///   lambda* = (1 - a)(a(D + 2q - 2) - 1)
///             / (2 a D q - a^2 D (D + 2q - 2) - 1)  if in between   (a = alpha2)
///   lambda* = 1                                     if alpha2 >= (2q - 1) / (D + 2q - 2)
///
/// lambda* is non-decreasing in alpha2, non-increasing in q when alpha2 > 1/D,
/// and equals 1/D exactly at alpha2 = 1/D (for q >= 2; at q = 1 the objective
/// is flat in lambda at that point and the boundary branches win the tie).
inline double lambda_star(double alpha2, int q, Eigen::Index D) {
  if (D < 2) throw ConfigError("lambda_star: D must be >= 2");
  if (q < 1) throw ConfigError("lambda_star: q must be >= 1");
  const double a = std::clamp(alpha2, 0.0, 1.0);
  const double n = static_cast<double>(D);
  const double m = n + 2.0 * q - 2.0;
  if (a * m <= 1.0) return 0.0;
  if (a * m >= 2.0 * q - 1.0) return 1.0;
  const double numer = (1.0 - a) * (a * m - 1.0);
  const double denom = 2.0 * a * n * q - a * a * n * m - 1.0;
  return std::clamp(numer / denom, 0.0, 1.0);
}

/// Subspace counterpart of lambda_star. align2 is the squared norm of the
/// projection of the normalized gradient onto the d-dimensional subspace:
///
///   lambda* = 0                                  if alpha2 <= A2 / (d + 2q - 2)
///   lambda* = A2 (A2 - alpha2 (d + 2q - 2))
///             / (A2^2 + alpha2^2 d^2
///                - 2 A2 alpha2 (q + dq - 1))     if in between
///   lambda* = 1                                  if alpha2 >= A2 (2q - 1) / d
///
/// align2 = 0 with alpha2 = 0 yields 0 (pure subspace search); align2 = 0 with
/// an informative prior yields 1 (the subspace holds no gradient signal).
inline double lambda_star_subspace(double alpha2, double align2, int q, Eigen::Index d) {
  if (d < 1) throw ConfigError("lambda_star_subspace: d must be >= 1");
  if (q < 1) throw ConfigError("lambda_star_subspace: q must be >= 1");
  const double a = std::clamp(alpha2, 0.0, 1.0);
  const double A2 = std::clamp(align2, 0.0, 1.0);
  const double dd = static_cast<double>(d);
  if (a * (dd + 2.0 * q - 2.0) <= A2) return 0.0;
  if (a * dd >= A2 * (2.0 * q - 1.0)) return 1.0;
  const double numer = A2 * (A2 - a * (dd + 2.0 * q - 2.0));
  const double denom = A2 * A2 + a * a * dd * dd - 2.0 * A2 * a * (q + dd * q - 1.0);
  return std::clamp(numer / denom, 0.0, 1.0);
}

/// Expected cosine between a plain uniform-direction estimate (q directions,
/// dimension D) and the true gradient, by the closed-form approximation
/// sqrt(q / (D + q - 1)).
inline double expected_beta(int q, Eigen::Index D) {
  if (q < 1 || D < 1) throw ConfigError("expected_beta: q and D must be >= 1");
  return std::sqrt(static_cast<double>(q) / (static_cast<double>(D) + q - 1.0));
}

/// Subspace variant: sqrt(A2 * q / (d + q - 1)), where A2 is the squared
/// subspace alignment of the normalized gradient.
inline double expected_beta_subspace(int q, Eigen::Index d, double align2) {
  if (q < 1 || d < 1) throw ConfigError("expected_beta_subspace: q and d must be >= 1");
  return std::sqrt(std::clamp(align2, 0.0, 1.0) * static_cast<double>(q) /
                   (static_cast<double>(d) + q - 1.0));
}

/// Optimal weight on the random estimate when averaging it with the transfer
/// direction (estimate = (1 - mu) v + mu normalize(g_random)):
///
///   mu* = (1 - alpha^2) E[beta] / ((1 - alpha^2) E[beta] + alpha (1 - E[beta]^2))
///
/// exact under the symmetric-estimate model; the familiar shorthand
/// E[beta] / (E[beta] + alpha) is only an approximation of this. alpha = 0
/// gives 1 (ignore the prior), e_beta = 0 gives 0 (keep the prior), and
/// alpha = e_beta gives exactly 1/2. Both zero is degenerate: fall back to the
/// random estimate (1).
inline double mu_star(double alpha, double e_beta) {
  const double a = std::clamp(alpha, 0.0, 1.0);
  const double b = std::clamp(e_beta, 0.0, 1.0);
  const double numer = (1.0 - a * a) * b;
  const double denom = numer + a * (1.0 - b * b);
  if (denom == 0.0) return 1.0;
  return std::clamp(numer / denom, 0.0, 1.0);
}

}  // namespace prgf
