#include "anchor/robustness.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "anchor/estimators.hpp"

namespace anchor {

Matrix omega_w(const Matrix& saa, const Matrix& saw, const Matrix& sww) {
  if (saw.rows() != saa.rows() || sww.rows() != saw.cols() || sww.cols() != saw.cols()) {
    throw std::invalid_argument("omega_w: inconsistent block dimensions");
  }
  const Matrix omega = saw * solve_sym(sww, Matrix(saw.transpose()));
  return 0.5 * (omega + omega.transpose());
}

bool psd_leq(const Matrix& c, const Matrix& d, double tol_scale) {
  const Matrix diff = d - c;
  return lambda_min_sym(diff) >= -tol_scale * (1.0 + diff.norm());
}

bool psd_less_strict(const Matrix& c, const Matrix& d, double tol_scale) {
  const Matrix diff = d - c;
  return lambda_min_sym(diff) > tol_scale * (1.0 + diff.norm());
}

RobustnessSet build_set(SetKind kind, const Matrix& sigma_a, double lambda, const Matrix* omega) {
  char label[48];
  RobustnessSet set;
  switch (kind) {
    case SetKind::kOls:
      set.s = sigma_a;
      set.label = "OLS";
      break;
    case SetKind::kAnchor:
      set.s = (1.0 + lambda) * sigma_a;
      std::snprintf(label, sizeof(label), "AR(%g)", lambda);
      set.label = label;
      break;
    case SetKind::kProxy:
      if (omega == nullptr) {
        throw std::invalid_argument("build_set: the proxy set needs Omega_W");
      }
      set.s = sigma_a + lambda * (*omega);
      std::snprintf(label, sizeof(label), "PAR(%g)", lambda);
      set.label = label;
      break;
  }
  if (!is_psd(set.s)) {
    throw std::domain_error("build_set: " + set.label +
                            " bound is not positive semidefinite (lambda below -1?)");
  }
  return set;
}

double pls_penalty(const MomentSet& m, AuxKind kind, const Vector& gamma) {
  const AuxBlock& block = m.aux(kind);
  const Vector rv = block.syv - block.sxv.transpose() * gamma;
  return rv.dot(solve_sym(block.svv, rv));
}

double cross_penalty(const MomentSet& m, const Vector& gamma) {
  if (m.szw.size() == 0) {
    throw std::invalid_argument("cross_penalty: moment set has no E[Z W^T] block");
  }
  if (m.szw.rows() != m.szw.cols()) {
    throw std::domain_error(
        "cross_penalty: E[Z W^T] is not square; the cross-proxy correction needs two proxies of "
        "equal dimension with full-rank loadings");
  }
  const AuxBlock& w = m.aux(AuxKind::kProxyW);
  const AuxBlock& z = m.aux(AuxKind::kProxyZ);
  const Vector rw = w.syv - w.sxv.transpose() * gamma;
  const Vector rz = z.syv - z.sxv.transpose() * gamma;
  const Matrix solved = solve_square(
      m.szw, rz,
      "cross_penalty: E[Z W^T] must be well-conditioned (two equal-dimension proxies with "
      "full-rank loadings)");
  return rw.dot(solved.col(0));
}

WorstCase worst_case_mspe(const LinearScm& scm, const LinearPredictor& predictor,
                          const RobustnessSet& set) {
  if (predictor.alpha != 0.0) {
    throw std::domain_error(
        "worst_case_mspe: predictor has an intercept; zero-mean intervention sets cannot absorb "
        "a mean shift, use a targeted fit and mspe_under_intervention instead");
  }
  if (set.s.rows() != scm.d_a) {
    throw std::invalid_argument("worst_case_mspe: set dimension does not match d_a");
  }
  const Vector w = w_gamma(scm, predictor.gamma);
  const Vector b = scm.m_a.transpose() * w;
  const double noise_term = w.dot(scm.sigma_eps * w);
  const Vector sb = set.s * b;
  const double q = b.dot(sb);

  WorstCase out;
  out.nu_star = Vector::Zero(scm.d_a);
  out.value = noise_term + q;
  if (b.norm() == 0.0) return out;
  const double scale = 1e-14 * (1.0 + set.s.norm()) * b.squaredNorm();
  if (q <= scale) {
    out.degenerate = true;  // S annihilates b (e.g. lambda = -1); no maximizer direction
    return out;
  }
  out.nu_star = sb / std::sqrt(q);
  return out;
}

std::pair<double, double> estimated_vs_actual_worst_case(const LinearScm& scm,
                                                         const ProxyModel& proxies, double lambda,
                                                         double assumed_svr,
                                                         const MomentSet* fitted) {
  // The scalar-SVR reading of the proxy objective only holds when beta_w,
  // Sigma_eps_w, and Sigma_A are all isotropic; otherwise Omega_W is not a
  // multiple of Sigma_A and no single signal-to-variance ratio exists.
  auto isotropic = [](const Matrix& m, double* level) {
    if (m.rows() != m.cols() || m.rows() == 0) return false;
    const double c = m(0, 0);
    const double tol = 1e-9 * (1.0 + m.norm());
    if ((m - c * Matrix::Identity(m.rows(), m.cols())).norm() > tol) return false;
    *level = c;
    return true;
  };
  double beta_scale = 0.0, noise_scale = 0.0, anchor_scale = 0.0;
  if (!isotropic(proxies.beta_w, &beta_scale) || !isotropic(proxies.sigma_eps_w, &noise_scale) ||
      !isotropic(scm.sigma_a, &anchor_scale)) {
    throw std::domain_error(
        "estimated_vs_actual_worst_case: needs the scalar-SVR structure (isotropic beta_w, "
        "Sigma_eps_w, Sigma_A); with anisotropic proxy noise the signal-to-variance ratio is not "
        "identified from a single proxy");
  }
  if (!(assumed_svr > 0.0 && assumed_svr <= 1.0)) {
    throw std::invalid_argument("estimated_vs_actual_worst_case: assumed_svr must be in (0, 1]");
  }

  MomentSet population;
  const MomentSet* m = fitted;
  if (m == nullptr) {
    population = population_moments(scm, &proxies);
    m = &population;
  }
  const LinearPredictor par = fit_par(*m, lambda);
  const double estimated = ls_loss(*m, par.gamma) + lambda * pls_penalty(*m, AuxKind::kProxyW, par.gamma);

  const Matrix claimed = (1.0 + assumed_svr * lambda) * scm.sigma_a;
  const WorstCase actual = worst_case_mspe(scm, par, RobustnessSet{claimed, "claimed"});
  return {estimated, actual.value};
}

}  // namespace anchor
