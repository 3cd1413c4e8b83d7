#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anchor/dataset.hpp"
#include "anchor/linalg.hpp"
#include "anchor/moments.hpp"
#include "anchor/predictor.hpp"
#include "anchor/rng.hpp"

namespace anchor {

// Linear structural causal model over D = (X, Y, H) with anchors A:
//
//   D = B D + M_A A + eps,   i.e.   D = G (M_A A + eps),  G = (Id - B)^{-1}
//
// A and eps are independent and zero-mean, Y is scalar, H is never observed.
// Rows/columns of b, m_a, sigma_eps follow the canonical order
// (X_1..X_dx, Y, H_1..H_dh); Y sits at row index d_x.
struct LinearScm {
  int d_x = 0;
  int d_h = 0;
  int d_a = 0;
  Matrix b;          // D x D structural coefficients
  Matrix m_a;        // D x d_a anchor loadings
  Matrix sigma_eps;  // D x D noise covariance (PSD)
  Matrix sigma_a;    // d_a x d_a anchor covariance (PD)

  int d() const { return d_x + 1 + d_h; }
  int y_row() const { return d_x; }

  // (Id - B)^{-1}. Throws std::domain_error when Id - B is near-singular.
  Matrix g() const;
};

// Noisy linear views of the anchors: W = beta_w^T A + eps_w and, when
// present, Z = beta_z^T A + eps_z, with eps_w independent of eps_z.
struct ProxyModel {
  Matrix beta_w;       // d_a x d_w
  Matrix sigma_eps_w;  // d_w x d_w
  Matrix beta_z;       // d_a x d_z; zero-sized when only one proxy exists
  Matrix sigma_eps_z;

  bool has_z() const { return beta_z.cols() > 0; }
  Eigen::Index d_w() const { return beta_w.cols(); }
  Eigen::Index d_z() const { return beta_z.cols(); }
};

// Replacement distribution for A under do(A := nu). A deterministic shift
// has zero covariance.
struct InterventionSpec {
  Vector mean;
  Matrix cov;

  static InterventionSpec deterministic(Vector nu);
  static InterventionSpec random(Vector mu, Matrix sigma);
  bool is_deterministic() const { return cov.norm() == 0.0; }
};

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  bool ok = false;
  std::vector<ValidationCheck> checks;
};

// Checks model well-formedness: dimension consistency, rcond(Id - B) above
// 1e-10, Sigma_A positive definite, noise covariances PSD, and (when proxies
// are given) full-rank proxy loadings.
ValidationReport validate_scm(const LinearScm& scm, const ProxyModel* proxies = nullptr);

struct SimulateOptions {
  NoiseKind noise = NoiseKind::kGaussian;
  bool keep_anchors = true;
  // Test-support switches; H and eps stay internal in normal use.
  bool keep_hidden = false;
  bool keep_noise = false;
};

// Draws n i.i.d. rows. Covariances are applied through symmetric PSD square
// roots, so any zero-mean unit-variance noise family yields the model's
// second moments. A fixed (scm, n, seed) triple reproduces the dataset
// byte for byte.
Dataset simulate(const LinearScm& scm, const ProxyModel* proxies, std::size_t n,
                 std::uint64_t seed, const SimulateOptions& options = {});

// Same, but the anchor assignment is replaced by the intervention: proxies
// and the structural block still read the intervened A.
Dataset simulate_intervened(const LinearScm& scm, const ProxyModel* proxies,
                            const InterventionSpec& intervention, std::size_t n,
                            std::uint64_t seed, const SimulateOptions& options = {});

// Exact second moments of (X, Y, A, W, Z) under the training distribution:
//   Cov(D)     = G (M_A Sigma_A M_A^T + Sigma_eps) G^T
//   E[D A^T]   = G M_A Sigma_A
//   E[D W^T]   = G M_A Sigma_A beta_w,   E[W W^T] = beta_w^T Sigma_A beta_w + Sigma_eps_w
//   E[Z W^T]   = beta_z^T Sigma_A beta_w
MomentSet population_moments(const LinearScm& scm, const ProxyModel* proxies = nullptr);

// Residual loading w_gamma = (G_{y,.} - gamma^T G_{x,.})^T, so that
// Y - gamma^T X = w_gamma^T (M_A A + eps) for every anchor assignment.
Vector w_gamma(const LinearScm& scm, const Vector& gamma);

// Anchor exposure of the residual: b_gamma = M_A^T w_gamma. The residual's
// dependence on A is exactly b_gamma^T A.
Vector b_gamma(const LinearScm& scm, const Vector& gamma);

// E_do(A := nu)[(Y - gamma^T X - alpha)^2]
//   = w^T Sigma_eps w + b^T (Sigma_nu + mu mu^T) b - 2 alpha b^T mu + alpha^2.
double mspe_under_intervention(const LinearScm& scm, const LinearPredictor& predictor,
                               const InterventionSpec& intervention);

}  // namespace anchor
