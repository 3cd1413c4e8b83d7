#pragma once

// One-anchor, one-proxy families that are observationally equivalent.
//
// The model has a scalar latent anchor A with unit variance and
//   W = beta_W A + eps_W,  X = beta_X A + eps_X,  Y = alpha X + beta_Y A + eps_Y.
// Only the covariance of (X, Y, W) is observed. For a given signal fraction
// rho_W = beta_W^2 / E[W^2] the remaining parameters can be solved from the
// observed moments, so every feasible rho_W yields a distinct structural model
// with the same observational distribution. Quantities that depend on theta
// rather than on the observed covariance alone (the anchor-regularized
// coefficient, the causal effect alpha) are therefore not identified, while
// the proxy-regularized coefficient is a function of observables and stays
// constant across the family.

#include <vector>

#include "anchor/linalg.hpp"

namespace anchor {

struct ObservedCovariance3 {
  double sxx = 0.0;
  double sxy = 0.0;
  double sxw = 0.0;
  double syy = 0.0;
  double syw = 0.0;
  double sww = 0.0;

  // Rows and columns ordered (X, Y, W).
  Matrix to_matrix() const;
  static ObservedCovariance3 from_matrix(const Matrix& sigma);

  // Throws std::invalid_argument unless the matrix is PD and corr(W, X) > 0.
  void validate() const;
};

struct ScmParams1D {
  double beta_w = 0.0;
  double beta_x = 0.0;
  double beta_y = 0.0;
  double alpha = 0.0;
  double sigma_w2 = 0.0;
  double sigma_x2 = 0.0;
  double sigma_y2 = 0.0;
};

// Solves for the structural parameters that reproduce `sigma` when the proxy
// carries signal fraction rho_w. Throws std::invalid_argument for rho_w
// outside (0, 1] or an invalid sigma, and std::domain_error when rho_w is
// infeasible: below corr(W,X)^2 (noise variance of X would be negative) or
// yielding sigma_y2 < -1e-10. Values in [-1e-10, 0) are clamped to zero.
ScmParams1D theta_from_rho(const ObservedCovariance3& sigma, double rho_w);

// Moment map: the covariance of (X, Y, W) implied by theta.
ObservedCovariance3 implied_covariance(const ScmParams1D& theta);

// Proxy-regularized coefficient from observed moments only:
//   (Sxy Sww + lambda Syw Sxw) / (Sxx Sww + lambda Sxw^2).
// Throws std::domain_error when the denominator vanishes.
double gamma_par_1d(const ObservedCovariance3& sigma, double lambda);

// Anchor-regularized coefficient, which needs the structural parameters:
//   ((alpha beta_x^2 + beta_x beta_y)(1 + lambda) + alpha sigma_x2)
//     / (beta_x^2 (1 + lambda) + sigma_x2).
// lambda = -1 recovers alpha; lambda -> infinity gives alpha + beta_y/beta_x.
// Throws std::domain_error when the denominator is not positive.
double gamma_ar_1d(const ScmParams1D& theta, double lambda);

struct RhoScanRow {
  double rho_w = 0.0;
  ScmParams1D theta;
  double gamma_par = 0.0;
  double gamma_ar = 0.0;
};

// Evaluates the family over the grid {step, 2*step, ...} capped at 1.0,
// keeping only feasible rho_w. gamma_par is constant over the rows by
// construction; the spread of gamma_ar measures the identification gap.
std::vector<RhoScanRow> scan_rho_grid(const ObservedCovariance3& sigma, double lambda,
                                      double step = 0.01);

}  // namespace anchor
