#pragma once

#include "anchor/dataset.hpp"
#include "anchor/moments.hpp"
#include "anchor/predictor.hpp"

namespace anchor {

// All fitters are closed forms in second moments. With uncentered moments
// they reproduce the population formulas (alpha = 0 except for targeted
// fits); with centered moments gamma comes from covariances and alpha
// carries the intercept mean_y - gamma^T mean_x. Targeted fits additionally
// shift alpha by b^T (mu - mean_v), so a target mean is always interpreted
// in the original (uncentered) coordinates of the auxiliary variable.
//
// Normal-equation solves fall back to a pseudo-inverse when the system's
// reciprocal condition number drops below 1e-12; the predictor's
// pseudo_inverse flag records that this happened.

LinearPredictor fit_ols(const MomentSet& m);

// argmin E[R^2] + lambda E[R V^T](E[V V^T])^{-1}E[V R], V = A (anchor) or
// V = W (par). lambda >= -1 keeps the objective convex.
LinearPredictor fit_anchor(const MomentSet& m, double lambda);
LinearPredictor fit_par(const MomentSet& m, double lambda);

// argmin E[R^2] + lambda E[R W^T](E[Z W^T])^{-1}E[Z R]. Solves the
// symmetrized stationarity condition
//   (2 Sxx + lambda (L + L^T)) gamma = 2 Sxy + lambda (k1 + k2),
//   L = Sxw Szw^{-1} Szx, k1 = Sxw Szw^{-1} Szy, k2 = Sxz Swz^{-1} Swy.
// Throws std::domain_error when E[Z W^T] is not square or ill-conditioned
// (the correction needs two proxies of the anchor dimension, full rank).
LinearPredictor fit_xpar(const MomentSet& m, double lambda);

// Targeted fits: minimize the anticipated MSPE under do(A := nu) with
// E[nu] = mu_nu, Cov(nu) = sigma_nu, using residual-anchor moments:
//   gamma = (Sxx + Sxa Om Sax)^{-1} (Sxy + Sxa Om Say),
//   Om = Saa^{-1} (Sigma_nu + mu mu^T - Saa) Saa^{-1} ... split so that
//   alpha* = b_gamma^T mu absorbs the mean part, b_gamma^T = (Sya^T - gamma^T Sxa) Saa^{-1}.
LinearPredictor fit_tar(const MomentSet& m, const Vector& mu_nu, const Matrix& sigma_nu);

// Same with the W moments in place of A: callers supply the anticipated mean
// and covariance of W under the shift.
LinearPredictor fit_ptar(const MomentSet& m, const Vector& mu_w, const Matrix& sigma_w);

// Cross-proxy variant of fit_ptar: the shift is still expressed in W's
// coordinates, but residual loadings use the cross moments E[R Z^T] Szw^{-T},
// which are immune to W's measurement noise.
LinearPredictor fit_xtar(const MomentSet& m, const Vector& mu_w, const Matrix& sigma_w);

Vector predict(const LinearPredictor& predictor, const Matrix& x);
double empirical_mspe(const LinearPredictor& predictor, const Dataset& data);

// Objective values at given coefficients (uncentered moment convention).
// These are what the fitters minimize; tests pit the closed forms against a
// generic numeric minimizer of these functions.
double ls_loss(const MomentSet& m, const Vector& gamma);
double anchor_objective(const MomentSet& m, AuxKind kind, const Vector& gamma, double lambda);
double xpar_objective(const MomentSet& m, const Vector& gamma, double lambda);
double tar_objective(const MomentSet& m, const Vector& gamma, double alpha, const Vector& mu_nu,
                     const Matrix& sigma_nu);
double ptar_objective(const MomentSet& m, const Vector& gamma, double alpha, const Vector& mu_w,
                      const Matrix& sigma_w);
double xtar_objective(const MomentSet& m, const Vector& gamma, double alpha, const Vector& mu_w,
                      const Matrix& sigma_w);

// Unit-variance standardization helpers; the returned predictor metadata in
// LinearPredictor::standardization makes predict() map back to raw units.
Standardization compute_standardization(const Dataset& data);
Dataset apply_standardization(const Dataset& data, const Standardization& s);

}  // namespace anchor
