#pragma once

#include <string>
#include <utility>

#include "anchor/moments.hpp"
#include "anchor/predictor.hpp"
#include "anchor/scm.hpp"

namespace anchor {

// Families of bounded anchor interventions, each the set of zero-mean nu with
// E[nu nu^T] <= S in the PSD order:
//   kOls    S = Sigma_A            (training-strength interventions)
//   kAnchor S = (1 + lambda) Sigma_A
//   kProxy  S = Sigma_A + lambda Omega_W
enum class SetKind { kOls, kAnchor, kProxy };

struct RobustnessSet {
  Matrix s;
  std::string label;
};

// Omega_W = E[A W^T] (E[W W^T])^{-1} E[W A^T], symmetrized. This is the part
// of the anchor covariance that the proxy can see; Omega_W <= Sigma_A always,
// with equality at zero proxy noise (full-rank loadings).
Matrix omega_w(const Matrix& saa, const Matrix& saw, const Matrix& sww);

// PSD order with tolerance: lambda_min(d - c) >= -tol_scale * (1 + ||d - c||).
bool psd_leq(const Matrix& c, const Matrix& d, double tol_scale = kPsdTol);

// Strict order: lambda_min(d - c) > +tol_scale * (1 + ||d - c||).
bool psd_less_strict(const Matrix& c, const Matrix& d, double tol_scale = kPsdTol);

// Builds the requested set. kProxy needs omega (from omega_w). Throws
// std::domain_error when the resulting S is not PSD (lambda < -1 territory).
RobustnessSet build_set(SetKind kind, const Matrix& sigma_a, double lambda,
                        const Matrix* omega = nullptr);

// Projection penalty E[R V^T] (E[V V^T])^{-1} E[V R] at R = Y - gamma^T X.
double pls_penalty(const MomentSet& m, AuxKind kind, const Vector& gamma);

// Cross-proxy penalty E[R W^T] (E[Z W^T])^{-1} E[Z R]. Throws
// std::domain_error when E[Z W^T] is not square or is ill-conditioned: the
// cross-moment correction needs two proxies of the anchor dimension with
// full-rank loadings.
double cross_penalty(const MomentSet& m, const Vector& gamma);

struct WorstCase {
  double value = 0.0;
  Vector nu_star;
  // Set when the maximizing direction is undefined because S annihilates
  // b_gamma (e.g. lambda = -1 collapses the set); the value is still valid.
  bool degenerate = false;
};

// sup over {nu : E[nu nu^T] <= S} of E_do(A := nu)[(Y - gamma^T X)^2]
//   = w^T Sigma_eps w + b^T S b,  attained at nu* = S b / sqrt(b^T S b).
// Predictors with an intercept are refused: a nonzero alpha anticipates a
// mean shift, which these zero-mean sets cannot express; use a targeted fit.
WorstCase worst_case_mspe(const LinearScm& scm, const LinearPredictor& predictor,
                          const RobustnessSet& set);

// The misspecified-SVR comparison: fit PAR(W) at lambda, read its objective
// value as a worst-case claim over C = {E[nu nu^T] <= (1 + assumed_svr *
// lambda) Sigma_A}, and compare with the true worst case over that C computed
// from the model. Moments default to population; pass fitted sample moments
// to get the empirical version. Requires the scalar-SVR structure
// (beta_w, Sigma_eps_w, Sigma_A all isotropic); otherwise the single-proxy
// signal-to-variance ratio is not identified and std::domain_error is thrown.
std::pair<double, double> estimated_vs_actual_worst_case(const LinearScm& scm,
                                                         const ProxyModel& proxies, double lambda,
                                                         double assumed_svr,
                                                         const MomentSet* fitted = nullptr);

}  // namespace anchor
