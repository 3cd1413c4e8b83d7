#include "anchor/identifiability.hpp"

#include <cmath>
#include <stdexcept>

namespace anchor {

namespace {
constexpr double kSigmaY2Tol = 1e-10;
}

Matrix ObservedCovariance3::to_matrix() const {
  Matrix sigma(3, 3);
  sigma << sxx, sxy, sxw, sxy, syy, syw, sxw, syw, sww;
  return sigma;
}

ObservedCovariance3 ObservedCovariance3::from_matrix(const Matrix& sigma) {
  if (sigma.rows() != 3 || sigma.cols() != 3) {
    throw std::invalid_argument("ObservedCovariance3: expected a 3x3 matrix");
  }
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * (1.0 + sigma.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("ObservedCovariance3: matrix is not symmetric");
  }
  ObservedCovariance3 out;
  out.sxx = sigma(0, 0);
  out.sxy = sigma(0, 1);
  out.sxw = sigma(0, 2);
  out.syy = sigma(1, 1);
  out.syw = sigma(1, 2);
  out.sww = sigma(2, 2);
  return out;
}

void ObservedCovariance3::validate() const {
  if (!is_pd(to_matrix())) {
    throw std::invalid_argument("ObservedCovariance3: matrix is not positive definite");
  }
  if (sxw <= 0.0) {
    throw std::invalid_argument(
        "ObservedCovariance3: the construction assumes corr(W, X) > 0; flip the sign of W first");
  }
}

ScmParams1D theta_from_rho(const ObservedCovariance3& sigma, double rho_w) {
  sigma.validate();
  if (!(rho_w > 0.0) || rho_w > 1.0) {
    throw std::invalid_argument("theta_from_rho: rho_w must lie in (0, 1]");
  }
  const double corr2 = sigma.sxw * sigma.sxw / (sigma.sxx * sigma.sww);
  if (rho_w < corr2) {
    throw std::domain_error(
        "theta_from_rho: rho_w below corr(W,X)^2 would force a negative noise variance on X");
  }
  ScmParams1D t;
  t.beta_w = std::sqrt(sigma.sww * rho_w);
  t.sigma_w2 = sigma.sww * (1.0 - rho_w);
  const double rho_x = corr2 / rho_w;
  t.beta_x = std::sqrt(sigma.sxx * rho_x);
  t.sigma_x2 = sigma.sxx * (1.0 - rho_x);
  const double denom = t.beta_w * (1.0 - rho_x);
  if (!(std::abs(denom) > 0.0)) {
    throw std::domain_error(
        "theta_from_rho: rho_w equals corr(W,X)^2, leaving no X noise to carry the W-Y "
        "covariance");
  }
  t.beta_y = (sigma.syw - sigma.sxy * sigma.sxw / sigma.sxx) / denom;
  t.alpha = (sigma.sxy - t.beta_y * t.beta_x) / sigma.sxx;
  t.sigma_y2 = sigma.syy - t.alpha * t.alpha * sigma.sxx -
               2.0 * t.alpha * t.beta_y * t.beta_x - t.beta_y * t.beta_y;
  if (t.sigma_y2 < -kSigmaY2Tol) {
    throw std::domain_error("theta_from_rho: rho_w outside the feasible set, sigma_y2 = " +
                            std::to_string(t.sigma_y2));
  }
  if (t.sigma_y2 < 0.0) t.sigma_y2 = 0.0;
  return t;
}

ObservedCovariance3 implied_covariance(const ScmParams1D& t) {
  ObservedCovariance3 out;
  out.sxx = t.beta_x * t.beta_x + t.sigma_x2;
  out.sxw = t.beta_w * t.beta_x;
  out.sxy = t.beta_y * t.beta_x + t.alpha * out.sxx;
  out.sww = t.beta_w * t.beta_w + t.sigma_w2;
  out.syw = t.beta_w * (t.beta_y + t.alpha * t.beta_x);
  out.syy = t.alpha * t.alpha * out.sxx + 2.0 * t.alpha * t.beta_y * t.beta_x +
            t.beta_y * t.beta_y + t.sigma_y2;
  return out;
}

double gamma_par_1d(const ObservedCovariance3& sigma, double lambda) {
  const double denom = sigma.sxx * sigma.sww + lambda * sigma.sxw * sigma.sxw;
  if (denom == 0.0) {
    throw std::domain_error("gamma_par_1d: denominator vanishes");
  }
  return (sigma.sxy * sigma.sww + lambda * sigma.syw * sigma.sxw) / denom;
}

double gamma_ar_1d(const ScmParams1D& theta, double lambda) {
  const double bx2 = theta.beta_x * theta.beta_x;
  const double denom = bx2 * (1.0 + lambda) + theta.sigma_x2;
  if (!(denom > 0.0)) {
    throw std::domain_error("gamma_ar_1d: denominator must be positive");
  }
  const double numer =
      (theta.alpha * bx2 + theta.beta_x * theta.beta_y) * (1.0 + lambda) +
      theta.alpha * theta.sigma_x2;
  return numer / denom;
}

std::vector<RhoScanRow> scan_rho_grid(const ObservedCovariance3& sigma, double lambda,
                                      double step) {
  sigma.validate();
  if (!(step > 0.0) || step > 1.0) {
    throw std::invalid_argument("scan_rho_grid: step must lie in (0, 1]");
  }
  std::vector<RhoScanRow> rows;
  for (long k = 1;; ++k) {
    double rho = static_cast<double>(k) * step;
    rho = std::round(rho * 1e10) / 1e10;
    if (rho > 1.0) break;
    RhoScanRow row;
    row.rho_w = rho;
    try {
      row.theta = theta_from_rho(sigma, rho);
    } catch (const std::domain_error&) {
      continue;
    }
    row.gamma_par = gamma_par_1d(sigma, lambda);
    row.gamma_ar = gamma_ar_1d(row.theta, lambda);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace anchor
