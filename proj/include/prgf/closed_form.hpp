#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "prgf/subspace.hpp"
#include "prgf/types.hpp"

namespace prgf {

/// Closed forms used to adjudicate the production coefficients. These are kept
/// deliberately independent of coefficients.hpp: lambda_star implements the
/// piecewise maximizer, the functions here implement the objective it claims
/// to maximize, and the test suites brute-force one against the other.

/// Cosine-squared objective F(lambda) whose maximizer is lambda_star. Derived
/// by plugging the one-spiked covariance into the estimator-loss expression:
/// L = ||g||^2 (1 - F(lambda)).
inline double closed_form_F(double lambda, double alpha2, Eigen::Index D, int q) {
  const double a = alpha2;
  const double l = lambda;
  const double rest = (1.0 - l) / (static_cast<double>(D) - 1.0);
  const double mean = l * a + rest * (1.0 - a);  // g^T C g / ||g||^2
  const double second = l * l * a + rest * rest * (1.0 - a);  // g^T C^2 g / ||g||^2
  const double denom = (1.0 - 1.0 / q) * second + (1.0 / q) * mean;
  if (denom == 0.0) return 0.0;
  return mean * mean / denom;
}

/// Subspace counterpart: the orthogonal-complement mass 1 - alpha2 is replaced
/// by the in-subspace mass align2 spread over d directions.
inline double closed_form_F_subspace(double lambda, double alpha2, double align2,
                                     Eigen::Index d, int q) {
  const double l = lambda;
  const double rest = (1.0 - l) / static_cast<double>(d);
  const double mean = l * alpha2 + rest * align2;
  const double second = l * l * alpha2 + rest * rest * align2;
  const double denom = (1.0 - 1.0 / q) * second + (1.0 / q) * mean;
  if (denom == 0.0) return 0.0;
  return mean * mean / denom;
}

/// Covariance spec for the biased sampler: C = lambda v v^T plus the uniform
/// remainder over the orthogonal complement (full space) or over the subspace.
struct CovarianceSpec {
  double lambda = 0.0;
  RealVec v;
  const SubspaceBasis* basis = nullptr;  // null: full space

  RealVec apply(const RealVec& x) const {
    const double vx = v.dot(x);
    if (basis) return lambda * vx * v + (1.0 - lambda) / basis->input_dim() * basis->project(x);
    const double rest = (1.0 - lambda) / (static_cast<double>(v.size()) - 1.0);
    return lambda * vx * v + rest * (x - vx * v);
  }
};

/// Loss of the q-direction estimator under sampling covariance C:
///
///   L = ||g||^2 - (g^T C g)^2 / ((1 - 1/q) g^T C^2 g + (1/q) g^T C g)
///
/// with the degenerate g^T C g = 0 case pinned to ||g||^2 (the estimator then
/// carries no information about g almost surely).
inline double closed_form_theorem1(const RealVec& grad, const CovarianceSpec& cov, int q) {
  const double g2 = grad.squaredNorm();
  const RealVec cg = cov.apply(grad);
  const double gcg = grad.dot(cg);
  if (gcg == 0.0) return g2;
  const double gccg = cg.squaredNorm();  // g^T C^2 g, C symmetric
  return g2 - gcg * gcg / ((1.0 - 1.0 / q) * gccg + (1.0 / q) * gcg);
}

/// Loss of the averaged estimate mu v + (1 - mu) normalize(g_random) given the
/// prior cosine alpha and the expected random-estimate cosine e_beta.
///
/// Convention note: here `mu` weighs the TRANSFER direction, while the
/// averaging algorithm (and mu_star) put their mu on the RANDOM estimate. The
/// two are complements; averaging_loss below does the bookkeeping.
inline double closed_form_theorem2(double mu, double alpha, double e_beta, double grad_norm) {
  const double num = mu * alpha + (1.0 - mu) * e_beta;
  const double den = mu * mu + (1.0 - mu) * (1.0 - mu) + 2.0 * mu * (1.0 - mu) * alpha * e_beta;
  return (1.0 - num * num / den) * grad_norm * grad_norm;
}

/// Subspace averaging loss, same mu convention as closed_form_theorem2.
/// alpha1 is the inner product of the prior direction with the (unnormalized)
/// subspace projection of the normalized gradient; it enters only through the
/// cross term.
inline double closed_form_theorem3(double mu, double alpha, double alpha1, double align2,
                                   double e_beta, double grad_norm) {
  if (align2 <= 0.0) throw ConfigError("theorem3: requires positive subspace alignment");
  const double num = mu * alpha + (1.0 - mu) * e_beta;
  const double den =
      mu * mu + (1.0 - mu) * (1.0 - mu) + 2.0 * mu * (1.0 - mu) * (alpha1 / align2) * e_beta;
  return (1.0 - num * num / den) * grad_norm * grad_norm;
}

/// Loss of the estimator (1 - mu_random) v + mu_random normalize(g_random),
/// the convention mu_star and estimate_averaging use.
inline double averaging_loss(double mu_random, double alpha, double e_beta, double grad_norm) {
  return closed_form_theorem2(1.0 - mu_random, alpha, e_beta, grad_norm);
}

inline double averaging_loss_subspace(double mu_random, double alpha, double alpha1,
                                      double align2, double e_beta, double grad_norm) {
  return closed_form_theorem3(1.0 - mu_random, alpha, alpha1, align2, e_beta, grad_norm);
}

/// Exact optimal averaging weight in the subspace setting; with the full space
/// as subspace (align2 = 1, alpha1 = alpha) it reduces to mu_star. alpha1 has
/// no query-based estimator, so this form is only used for verification
/// against synthetic ground truth.
inline double mu_star_subspace_exact(double alpha, double alpha1, double align2, double e_beta) {
  const double numer = (align2 - alpha1 * alpha) * e_beta;
  const double denom = (align2 - alpha1 * e_beta) * (alpha + e_beta);
  if (denom == 0.0) return 1.0;
  return std::clamp(numer / denom, 0.0, 1.0);
}

/// Brute-force maximizer of closed_form_F over {0, step, 2 step, ..., 1}.
inline double grid_argmax_lambda(double alpha2, Eigen::Index D, int q, double step) {
  double best_l = 0.0, best_f = -1.0;
  const auto n = static_cast<long>(std::llround(1.0 / step));
  for (long i = 0; i <= n; ++i) {
    const double l = std::min(1.0, i * step);
    const double f = closed_form_F(l, alpha2, D, q);
    if (f > best_f) {
      best_f = f;
      best_l = l;
    }
  }
  return best_l;
}

inline double grid_argmax_lambda_subspace(double alpha2, double align2, Eigen::Index d, int q,
                                          double step) {
  double best_l = 0.0, best_f = -1.0;
  const auto n = static_cast<long>(std::llround(1.0 / step));
  for (long i = 0; i <= n; ++i) {
    const double l = std::min(1.0, i * step);
    const double f = closed_form_F_subspace(l, alpha2, align2, d, q);
    if (f > best_f) {
      best_f = f;
      best_l = l;
    }
  }
  return best_l;
}

/// Brute-force maximizer over mu of the theorem-2 objective (equivalently,
/// minimizer of the loss).
inline double grid_argmin_mu(double alpha, double e_beta, double step) {
  double best_mu = 0.0, best_loss = std::numeric_limits<double>::infinity();
  const auto n = static_cast<long>(std::llround(1.0 / step));
  for (long i = 0; i <= n; ++i) {
    const double mu = std::min(1.0, i * step);
    const double loss = closed_form_theorem2(mu, alpha, e_beta, 1.0);
    if (loss < best_loss) {
      best_loss = loss;
      best_mu = mu;
    }
  }
  return best_mu;
}

}  // namespace prgf
