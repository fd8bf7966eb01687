#pragma once

#include "wpg/types.hpp"

namespace wpg {

// Gaussian-process regressor with a Matern-5/2 ARD kernel on inputs living
// in the unit cube. Outputs are standardized internally; hyperparameters
// (signal variance, noise variance, per-dimension length scales) are fitted
// by marginal-likelihood maximization with multi-start Nelder-Mead.
struct GpModel {
  Mat X;    // n x d training inputs
  Vec y;    // n observed values (original units)
  double y_mean = 0.0;
  double y_scale = 1.0;
  bool degenerate = false;  // zero-variance targets: prior-only model

  double log_sf2 = 0.0;   // log signal variance
  double log_sn2 = -12.0; // log noise variance
  Vec log_len;            // d log length scales

  Mat chol;   // lower Cholesky factor of the Gram matrix
  Vec alpha;  // K^{-1} y_standardized

  int dim() const { return static_cast<int>(X.cols()); }
  int size() const { return static_cast<int>(X.rows()); }

  // Posterior in original units; variance is clamped at zero.
  double posterior_mean(const Vec& x) const;
  double posterior_var(const Vec& x) const;

  // Mean/variance and their gradients with respect to the query point.
  void posterior_with_gradients(const Vec& x, double& mean, Vec& dmean, double& var,
                                Vec& dvar) const;

  double log_marginal_likelihood() const;
};

// Fits hyperparameters and the posterior cache; throws on fewer than two
// observations or dimension mismatches. Degenerate targets (zero variance)
// produce a flagged prior-only model with unit predictive variance.
GpModel gp_fit(const Mat& X, const Vec& y);

}  // namespace wpg
