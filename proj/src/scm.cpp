#include "anchor/scm.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace anchor {

namespace {

std::string dim_string(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

Matrix LinearScm::g() const {
  const Matrix id_minus_b = Matrix::Identity(d(), d()) - b;
  if (rcond(id_minus_b) < kRcondFloor) {
    throw std::domain_error("Id - B is near-singular; the structural system has no stable solution");
  }
  return Eigen::PartialPivLU<Matrix>(id_minus_b).inverse();
}

InterventionSpec InterventionSpec::deterministic(Vector nu) {
  InterventionSpec spec;
  spec.cov = Matrix::Zero(nu.size(), nu.size());
  spec.mean = std::move(nu);
  return spec;
}

InterventionSpec InterventionSpec::random(Vector mu, Matrix sigma) {
  require(sigma.rows() == mu.size() && sigma.cols() == mu.size(),
          "intervention covariance must be square with the mean's dimension");
  InterventionSpec spec;
  spec.mean = std::move(mu);
  spec.cov = std::move(sigma);
  return spec;
}

ValidationReport validate_scm(const LinearScm& scm, const ProxyModel* proxies) {
  ValidationReport report;
  auto add = [&report](const std::string& name, bool passed, const std::string& detail) {
    report.checks.push_back({name, passed, detail});
  };

  const int d = scm.d();
  const bool dims_ok = scm.d_x >= 1 && scm.d_h >= 0 && scm.d_a >= 1 && scm.b.rows() == d &&
                       scm.b.cols() == d && scm.m_a.rows() == d && scm.m_a.cols() == scm.d_a &&
                       scm.sigma_eps.rows() == d && scm.sigma_eps.cols() == d &&
                       scm.sigma_a.rows() == scm.d_a && scm.sigma_a.cols() == scm.d_a;
  add("dimensions", dims_ok,
      "B " + dim_string(scm.b) + ", M_A " + dim_string(scm.m_a) + ", Sigma_eps " +
          dim_string(scm.sigma_eps) + ", Sigma_A " + dim_string(scm.sigma_a) + " against D=" +
          std::to_string(d) + ", d_a=" + std::to_string(scm.d_a));
  if (dims_ok) {
    const double rc = rcond(Matrix::Identity(d, d) - scm.b);
    add("id_minus_b_invertible", rc >= kRcondFloor, "rcond(Id - B) = " + std::to_string(rc));
    add("sigma_a_positive_definite", is_pd(scm.sigma_a),
        "lambda_min = " + std::to_string(lambda_min_sym(scm.sigma_a)));
    add("sigma_eps_psd", is_psd(scm.sigma_eps),
        "lambda_min = " + std::to_string(lambda_min_sym(scm.sigma_eps)));
  }
  if (proxies != nullptr) {
    const bool w_dims = proxies->beta_w.rows() == scm.d_a && proxies->d_w() >= 1 &&
                        proxies->sigma_eps_w.rows() == proxies->d_w() &&
                        proxies->sigma_eps_w.cols() == proxies->d_w();
    add("proxy_w_dimensions", w_dims,
        "beta_w " + dim_string(proxies->beta_w) + ", Sigma_eps_w " + dim_string(proxies->sigma_eps_w));
    if (w_dims) {
      add("sigma_eps_w_psd", is_psd(proxies->sigma_eps_w),
          "lambda_min = " + std::to_string(lambda_min_sym(proxies->sigma_eps_w)));
      const double rc = rcond(proxies->beta_w);
      add("beta_w_full_rank", rc >= kRcondFloor, "rcond = " + std::to_string(rc));
    }
    if (proxies->has_z()) {
      const bool z_dims = proxies->beta_z.rows() == scm.d_a &&
                          proxies->sigma_eps_z.rows() == proxies->d_z() &&
                          proxies->sigma_eps_z.cols() == proxies->d_z();
      add("proxy_z_dimensions", z_dims,
          "beta_z " + dim_string(proxies->beta_z) + ", Sigma_eps_z " + dim_string(proxies->sigma_eps_z));
      if (z_dims) {
        add("sigma_eps_z_psd", is_psd(proxies->sigma_eps_z),
            "lambda_min = " + std::to_string(lambda_min_sym(proxies->sigma_eps_z)));
        const double rc = rcond(proxies->beta_z);
        add("beta_z_full_rank", rc >= kRcondFloor, "rcond = " + std::to_string(rc));
      }
    }
  }
  report.ok = true;
  for (const auto& check : report.checks) report.ok = report.ok && check.passed;
  return report;
}

namespace {

// Shared body of simulate / simulate_intervened. Draw order is fixed
// (anchors, structural noise, W noise, Z noise) so seeds mean the same thing
// everywhere.
Dataset simulate_impl(const LinearScm& scm, const ProxyModel* proxies,
                      const InterventionSpec* intervention, std::size_t n, std::uint64_t seed,
                      const SimulateOptions& options) {
  const ValidationReport report = validate_scm(scm, proxies);
  if (!report.ok) {
    for (const auto& check : report.checks) {
      if (!check.passed) {
        throw std::invalid_argument("simulate: model fails check '" + check.name + "' (" +
                                    check.detail + ")");
      }
    }
  }
  const auto rows = static_cast<Eigen::Index>(n);
  require(rows > 0, "simulate: n must be positive");

  NoiseSampler sampler(options.noise, seed);
  Matrix anchors;
  if (intervention == nullptr) {
    anchors = sampler.draw_matrix(rows, scm.d_a) * psd_sqrt(scm.sigma_a);
  } else {
    require(intervention->mean.size() == scm.d_a,
            "simulate: intervention dimension does not match d_a");
    if (intervention->is_deterministic()) {
      anchors = intervention->mean.transpose().replicate(rows, 1);
    } else {
      anchors = sampler.draw_matrix(rows, scm.d_a) * psd_sqrt(intervention->cov);
      anchors.rowwise() += intervention->mean.transpose();
    }
  }

  const Matrix eps = sampler.draw_matrix(rows, scm.d()) * psd_sqrt(scm.sigma_eps);
  const Matrix gt = scm.g().transpose();
  const Matrix outcome = (anchors * scm.m_a.transpose() + eps) * gt;

  Dataset data;
  data.x = outcome.leftCols(scm.d_x);
  data.y = outcome.col(scm.y_row());
  if (proxies != nullptr) {
    data.w = anchors * proxies->beta_w + sampler.draw_matrix(rows, proxies->d_w()) *
                                             psd_sqrt(proxies->sigma_eps_w);
    if (proxies->has_z()) {
      data.z = anchors * proxies->beta_z + sampler.draw_matrix(rows, proxies->d_z()) *
                                               psd_sqrt(proxies->sigma_eps_z);
    }
  }
  if (options.keep_anchors) data.a = std::move(anchors);
  if (options.keep_hidden && scm.d_h > 0) data.hidden = outcome.rightCols(scm.d_h);
  if (options.keep_noise) data.noise = eps;
  data.ensure_names();
  return data;
}

}  // namespace

Dataset simulate(const LinearScm& scm, const ProxyModel* proxies, std::size_t n,
                 std::uint64_t seed, const SimulateOptions& options) {
  return simulate_impl(scm, proxies, nullptr, n, seed, options);
}

Dataset simulate_intervened(const LinearScm& scm, const ProxyModel* proxies,
                            const InterventionSpec& intervention, std::size_t n,
                            std::uint64_t seed, const SimulateOptions& options) {
  return simulate_impl(scm, proxies, &intervention, n, seed, options);
}

MomentSet population_moments(const LinearScm& scm, const ProxyModel* proxies) {
  const Matrix g = scm.g();
  const Matrix t = g * scm.m_a;  // E[D A^T] Sigma_A^{-1}, i.e. D's anchor loading after solving
  const Matrix cov_d = g * (scm.m_a * scm.sigma_a * scm.m_a.transpose() + scm.sigma_eps) *
                       g.transpose();
  const Matrix da = t * scm.sigma_a;  // E[D A^T]
  const int y = scm.y_row();

  MomentSet m;
  m.sxx = cov_d.topLeftCorner(scm.d_x, scm.d_x);
  m.sxy = cov_d.col(y).head(scm.d_x);
  m.syy = cov_d(y, y);
  AuxBlock a;
  a.sxv = da.topRows(scm.d_x);
  a.syv = da.row(y).transpose();
  a.svv = scm.sigma_a;
  m.a = std::move(a);
  if (proxies != nullptr) {
    AuxBlock w;
    w.sxv = da.topRows(scm.d_x) * proxies->beta_w;
    w.syv = proxies->beta_w.transpose() * da.row(y).transpose();
    w.svv = proxies->beta_w.transpose() * scm.sigma_a * proxies->beta_w + proxies->sigma_eps_w;
    m.w = std::move(w);
    if (proxies->has_z()) {
      AuxBlock z;
      z.sxv = da.topRows(scm.d_x) * proxies->beta_z;
      z.syv = proxies->beta_z.transpose() * da.row(y).transpose();
      z.svv = proxies->beta_z.transpose() * scm.sigma_a * proxies->beta_z + proxies->sigma_eps_z;
      m.z = std::move(z);
      m.szw = proxies->beta_z.transpose() * scm.sigma_a * proxies->beta_w;
    }
  }
  return m;
}

Vector w_gamma(const LinearScm& scm, const Vector& gamma) {
  require(gamma.size() == scm.d_x, "w_gamma: gamma must have d_x entries");
  const Matrix g = scm.g();
  return (g.row(scm.y_row()) - gamma.transpose() * g.topRows(scm.d_x)).transpose();
}

Vector b_gamma(const LinearScm& scm, const Vector& gamma) {
  return scm.m_a.transpose() * w_gamma(scm, gamma);
}

double mspe_under_intervention(const LinearScm& scm, const LinearPredictor& predictor,
                               const InterventionSpec& intervention) {
  require(intervention.mean.size() == scm.d_a,
          "mspe_under_intervention: intervention dimension does not match d_a");
  const Vector w = w_gamma(scm, predictor.gamma);
  const Vector b = scm.m_a.transpose() * w;
  const double noise_term = w.dot(scm.sigma_eps * w);
  const double b_mu = b.dot(intervention.mean);
  const double second_moment = b.dot(intervention.cov * b) + b_mu * b_mu;
  return noise_term + second_moment - 2.0 * predictor.alpha * b_mu +
         predictor.alpha * predictor.alpha;
}

}  // namespace anchor
