#include "anchor/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "anchor/robustness.hpp"

namespace anchor {

namespace {

// Every fitter reduces to one symmetric solve
//   (Sxx + weight * p) gamma = Sxy + weight * q,
// so lambda = 0 reproduces OLS through the very same instructions.
LinearPredictor fit_quadratic(const MomentSet& m, const Matrix& p, const Vector& q,
                              double weight, Method method) {
  LinearPredictor out;
  out.method = method;
  bool used_pinv = false;
  const Matrix lhs = m.sxx + weight * p;
  const Vector rhs = m.sxy + weight * q;
  out.gamma = solve_sym(lhs, rhs, &used_pinv);
  out.pseudo_inverse = used_pinv;
  if (m.centered) out.alpha = m.mean_y - out.gamma.dot(m.mean_x);
  return out;
}

// Curvature/linear parts of the projection penalty on auxiliary V.
void projection_parts(const AuxBlock& v, Matrix* p, Vector* q) {
  Matrix rhs(v.sxv.cols(), v.sxv.rows() + 1);
  rhs.leftCols(v.sxv.rows()) = v.sxv.transpose();
  rhs.col(v.sxv.rows()) = v.syv;
  const Matrix solved = solve_sym(v.svv, rhs);
  *p = v.sxv * solved.leftCols(v.sxv.rows());
  *q = v.sxv * solved.col(v.sxv.rows());
}

const char* const kXparCondMessage =
    "cross-proxy fit: E[Z W^T] must be square and well-conditioned; the correction requires two "
    "proxies of the anchor dimension with full-rank loadings";

void check_cross_block(const MomentSet& m) {
  if (m.szw.size() == 0) {
    throw std::invalid_argument("cross-proxy fit: moment set has no E[Z W^T] block");
  }
  if (m.szw.rows() != m.szw.cols() || rcond(m.szw) < kRcondFloor) {
    throw std::domain_error(kXparCondMessage);
  }
}

// Intercept for targeted fits: the target mean is expressed in the
// auxiliary's original coordinates, so centered moments shift it by the
// training mean before applying the residual loading.
double targeted_alpha(const MomentSet& m, const LinearPredictor& fit, const Vector& loading,
                      const Vector& mu, const Vector& train_mean) {
  Vector shift = mu;
  if (m.centered) shift -= train_mean;
  return fit.alpha + loading.dot(shift);
}

}  // namespace

LinearPredictor fit_ols(const MomentSet& m) {
  const Eigen::Index d = m.d_x();
  LinearPredictor out =
      fit_quadratic(m, Matrix::Zero(d, d), Vector::Zero(d), 0.0, Method::kOls);
  return out;
}

LinearPredictor fit_anchor(const MomentSet& m, double lambda) {
  Matrix p;
  Vector q;
  projection_parts(m.aux(AuxKind::kAnchor), &p, &q);
  LinearPredictor out = fit_quadratic(m, p, q, lambda, Method::kAnchor);
  out.lambda = lambda;
  return out;
}

LinearPredictor fit_par(const MomentSet& m, double lambda) {
  Matrix p;
  Vector q;
  projection_parts(m.aux(AuxKind::kProxyW), &p, &q);
  LinearPredictor out = fit_quadratic(m, p, q, lambda, Method::kPar);
  out.lambda = lambda;
  return out;
}

LinearPredictor fit_xpar(const MomentSet& m, double lambda) {
  check_cross_block(m);
  const AuxBlock& w = m.aux(AuxKind::kProxyW);
  const AuxBlock& z = m.aux(AuxKind::kProxyZ);
  // L = Sxw Szw^{-1} Szx, k1 = Sxw Szw^{-1} Szy, k2 = Sxz Swz^{-1} Swy
  Matrix rhs(m.szw.rows(), w.sxv.rows() + 1);
  rhs.leftCols(w.sxv.rows()) = z.sxv.transpose();
  rhs.col(w.sxv.rows()) = z.syv;
  const Matrix solved = solve_square(m.szw, rhs, kXparCondMessage);
  const Matrix l = w.sxv * solved.leftCols(w.sxv.rows());
  const Vector k1 = w.sxv * solved.col(w.sxv.rows());
  const Vector k2 = z.sxv * solve_square(m.szw.transpose(), w.syv, kXparCondMessage);
  // Halving both sides keeps the lambda = 0 path bit-identical to OLS.
  const Matrix p = 0.5 * (l + l.transpose());
  const Vector q = 0.5 * (k1 + k2);
  LinearPredictor out = fit_quadratic(m, p, q, lambda, Method::kXpar);
  out.lambda = lambda;
  return out;
}

LinearPredictor fit_tar(const MomentSet& m, const Vector& mu_nu, const Matrix& sigma_nu) {
  const AuxBlock& a = m.aux(AuxKind::kAnchor);
  if (mu_nu.size() != a.svv.rows() || sigma_nu.rows() != a.svv.rows() ||
      sigma_nu.cols() != a.svv.cols()) {
    throw std::invalid_argument("fit_tar: target dimensions do not match the anchor block");
  }
  const Matrix delta = sigma_nu - a.svv;
  const Matrix omega = solve_sym(a.svv, Matrix(solve_sym(a.svv, delta).transpose()));
  const Matrix p = a.sxv * omega * a.sxv.transpose();
  const Vector q = a.sxv * (omega * a.syv);
  LinearPredictor out = fit_quadratic(m, 0.5 * (p + p.transpose()), q, 1.0, Method::kTar);
  out.method = Method::kTar;
  const Vector b = solve_sym(a.svv, Vector(a.syv - a.sxv.transpose() * out.gamma));
  out.alpha = targeted_alpha(m, out, b, mu_nu, a.mean);
  out.target_mean = mu_nu;
  out.target_cov = sigma_nu;
  return out;
}

LinearPredictor fit_ptar(const MomentSet& m, const Vector& mu_w, const Matrix& sigma_w) {
  const AuxBlock& w = m.aux(AuxKind::kProxyW);
  if (mu_w.size() != w.svv.rows() || sigma_w.rows() != w.svv.rows() ||
      sigma_w.cols() != w.svv.cols()) {
    throw std::invalid_argument("fit_ptar: target dimensions do not match the W block");
  }
  const Matrix delta = sigma_w - w.svv;
  const Matrix omega = solve_sym(w.svv, Matrix(solve_sym(w.svv, delta).transpose()));
  const Matrix p = w.sxv * omega * w.sxv.transpose();
  const Vector q = w.sxv * (omega * w.syv);
  LinearPredictor out = fit_quadratic(m, 0.5 * (p + p.transpose()), q, 1.0, Method::kPtar);
  out.method = Method::kPtar;
  const Vector c = solve_sym(w.svv, Vector(w.syv - w.sxv.transpose() * out.gamma));
  out.alpha = targeted_alpha(m, out, c, mu_w, w.mean);
  out.target_mean = mu_w;
  out.target_cov = sigma_w;
  return out;
}

LinearPredictor fit_xtar(const MomentSet& m, const Vector& mu_w, const Matrix& sigma_w) {
  check_cross_block(m);
  const AuxBlock& w = m.aux(AuxKind::kProxyW);
  const AuxBlock& z = m.aux(AuxKind::kProxyZ);
  if (mu_w.size() != w.svv.rows() || sigma_w.rows() != w.svv.rows() ||
      sigma_w.cols() != w.svv.cols()) {
    throw std::invalid_argument("fit_xtar: target dimensions do not match the W block");
  }
  const Matrix delta = sigma_w - w.svv;
  // Omega~ = Szw^{-T} delta Szw^{-1}, the cross-moment analogue of the
  // targeted curvature correction.
  const Matrix s1 = solve_square(m.szw.transpose(), delta, kXparCondMessage);
  const Matrix omega_raw =
      solve_square(m.szw.transpose(), Matrix(s1.transpose()), kXparCondMessage).transpose();
  const Matrix omega = 0.5 * (omega_raw + omega_raw.transpose());
  const Matrix p_raw = z.sxv * omega * z.sxv.transpose();
  const Vector q = z.sxv * (omega * z.syv);
  LinearPredictor out = fit_quadratic(m, 0.5 * (p_raw + p_raw.transpose()), q, 1.0, Method::kXtar);
  out.method = Method::kXtar;
  const Vector a_load =
      solve_square(m.szw, Vector(z.syv - z.sxv.transpose() * out.gamma), kXparCondMessage);
  out.alpha = targeted_alpha(m, out, a_load, mu_w, w.mean);
  out.target_mean = mu_w;
  out.target_cov = sigma_w;
  return out;
}

Vector predict(const LinearPredictor& predictor, const Matrix& x) {
  if (x.cols() != predictor.gamma.size()) {
    throw std::invalid_argument("predict: x has " + std::to_string(x.cols()) +
                                " columns, predictor expects " +
                                std::to_string(predictor.gamma.size()));
  }
  if (!predictor.standardization.has_value()) {
    return (x * predictor.gamma).array() + predictor.alpha;
  }
  const Standardization& s = *predictor.standardization;
  Matrix xs = x;
  xs.rowwise() -= s.x_mean.transpose();
  xs.array().rowwise() /= s.x_scale.transpose().array();
  Vector y_std = (xs * predictor.gamma).array() + predictor.alpha;
  return (y_std.array() * s.y_scale + s.y_mean).matrix();
}

double empirical_mspe(const LinearPredictor& predictor, const Dataset& data) {
  const Vector resid = data.y - predict(predictor, data.x);
  return resid.squaredNorm() / static_cast<double>(data.n());
}

double ls_loss(const MomentSet& m, const Vector& gamma) {
  return m.syy - 2.0 * gamma.dot(m.sxy) + gamma.dot(m.sxx * gamma);
}

double anchor_objective(const MomentSet& m, AuxKind kind, const Vector& gamma, double lambda) {
  return ls_loss(m, gamma) + lambda * pls_penalty(m, kind, gamma);
}

double xpar_objective(const MomentSet& m, const Vector& gamma, double lambda) {
  return ls_loss(m, gamma) + lambda * cross_penalty(m, gamma);
}

double tar_objective(const MomentSet& m, const Vector& gamma, double alpha, const Vector& mu_nu,
                     const Matrix& sigma_nu) {
  const AuxBlock& a = m.aux(AuxKind::kAnchor);
  const Vector b = solve_sym(a.svv, Vector(a.syv - a.sxv.transpose() * gamma));
  const double mean_term = b.dot(mu_nu) - alpha;
  return ls_loss(m, gamma) + b.dot((sigma_nu - a.svv) * b) + mean_term * mean_term;
}

double ptar_objective(const MomentSet& m, const Vector& gamma, double alpha, const Vector& mu_w,
                      const Matrix& sigma_w) {
  const AuxBlock& w = m.aux(AuxKind::kProxyW);
  const Vector c = solve_sym(w.svv, Vector(w.syv - w.sxv.transpose() * gamma));
  const double mean_term = c.dot(mu_w) - alpha;
  return ls_loss(m, gamma) + c.dot((sigma_w - w.svv) * c) + mean_term * mean_term;
}

double xtar_objective(const MomentSet& m, const Vector& gamma, double alpha, const Vector& mu_w,
                      const Matrix& sigma_w) {
  check_cross_block(m);
  const AuxBlock& w = m.aux(AuxKind::kProxyW);
  const AuxBlock& z = m.aux(AuxKind::kProxyZ);
  const Vector a_load =
      solve_square(m.szw, Vector(z.syv - z.sxv.transpose() * gamma), kXparCondMessage);
  const double mean_term = a_load.dot(mu_w) - alpha;
  return ls_loss(m, gamma) + a_load.dot((sigma_w - w.svv) * a_load) + mean_term * mean_term;
}

Standardization compute_standardization(const Dataset& data) {
  Standardization s;
  const double n = static_cast<double>(data.n());
  s.x_mean = data.x.colwise().mean();
  s.x_scale.resize(data.x.cols());
  for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
    const double var = (data.x.col(j).array() - s.x_mean(j)).square().sum() / n;
    s.x_scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  s.y_mean = data.y.mean();
  const double y_var = (data.y.array() - s.y_mean).square().sum() / n;
  s.y_scale = y_var > 0.0 ? std::sqrt(y_var) : 1.0;
  return s;
}

Dataset apply_standardization(const Dataset& data, const Standardization& s) {
  Dataset out = data;
  out.x.rowwise() -= s.x_mean.transpose();
  out.x.array().rowwise() /= s.x_scale.transpose().array();
  out.y = ((out.y.array() - s.y_mean) / s.y_scale).matrix();
  return out;
}

}  // namespace anchor
