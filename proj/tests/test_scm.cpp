#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "anchor/moments.hpp"
#include "anchor/scm.hpp"
#include "support/oracle.hpp"

using namespace anchor;
namespace ts = anchor::testsupport;

namespace {

bool same_matrix(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (a.size() == 0) return true;
  return (a.array() == b.array()).all();
}

// |sample mean of u.*v - target| within 5 standard errors, entrywise.
void check_moment_column(const Vector& u, const Vector& v, double target) {
  const Eigen::Index n = u.size();
  const Vector prod = u.cwiseProduct(v);
  const double mean = prod.mean();
  const double var = (prod.array() - mean).square().sum() / double(n - 1);
  const double se = std::sqrt(var / double(n));
  CHECK(std::abs(mean - target) <= 5.0 * se + 1e-12);
}

}  // namespace

TEST_CASE("g inverts Id - B") {
  std::mt19937_64 gen(21);
  const LinearScm scm = ts::random_scm(gen, 3, 2, 2);
  const Matrix g = scm.g();
  const Matrix id = Matrix::Identity(scm.d(), scm.d());
  CHECK((g * (id - scm.b) - id).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("simulated rows satisfy the residual identity for every noise family") {
  std::mt19937_64 gen(22);
  for (NoiseKind kind : {NoiseKind::kGaussian, NoiseKind::kUniform, NoiseKind::kRademacher}) {
    const ts::RandomModel model = ts::random_model(gen, 3, 1, 2);
    SimulateOptions options;
    options.noise = kind;
    options.keep_hidden = true;
    options.keep_noise = true;
    const Dataset data = simulate(model.scm, &model.proxies, 2000, 77, options);
    const Vector gamma = ts::random_vector(gen, model.scm.d_x);
    const Vector w = w_gamma(model.scm, gamma);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const double residual = data.y(i) - gamma.dot(data.x.row(i));
      const Vector driver =
          model.scm.m_a * data.a.row(i).transpose() + data.noise.row(i).transpose();
      CHECK(std::abs(residual - w.dot(driver)) < 1e-10);
    }
  }
}

TEST_CASE("sample moments approach population moments") {
  std::mt19937_64 gen(23);
  const ts::RandomModel model = ts::random_model(gen, 2, 1, 2);
  const MomentSet pop = population_moments(model.scm, &model.proxies);
  const Dataset data = simulate(model.scm, &model.proxies, 100000, 3, {});
  const int dx = model.scm.d_x;
  for (int i = 0; i < dx; ++i) {
    for (int j = 0; j < dx; ++j) check_moment_column(data.x.col(i), data.x.col(j), pop.sxx(i, j));
    check_moment_column(data.x.col(i), data.y, pop.sxy(i));
  }
  check_moment_column(data.y, data.y, pop.syy);
  struct BlockRef {
    AuxKind kind;
    const Matrix* cols;
  };
  for (const BlockRef& ref : {BlockRef{AuxKind::kAnchor, &data.a},
                              BlockRef{AuxKind::kProxyW, &data.w},
                              BlockRef{AuxKind::kProxyZ, &data.z}}) {
    REQUIRE(pop.has(ref.kind));
    const AuxBlock& block = pop.aux(ref.kind);
    for (int i = 0; i < dx; ++i)
      for (int j = 0; j < ref.cols->cols(); ++j)
        check_moment_column(data.x.col(i), ref.cols->col(j), block.sxv(i, j));
    for (int j = 0; j < ref.cols->cols(); ++j) {
      check_moment_column(data.y, ref.cols->col(j), block.syv(j));
      for (int k = 0; k < ref.cols->cols(); ++k)
        check_moment_column(ref.cols->col(j), ref.cols->col(k), block.svv(j, k));
    }
  }
  for (int i = 0; i < model.proxies.d_z(); ++i)
    for (int j = 0; j < model.proxies.d_w(); ++j)
      check_moment_column(data.z.col(i), data.w.col(j), pop.szw(i, j));
}

TEST_CASE("population szw matches the loading formula") {
  std::mt19937_64 gen(24);
  const ts::RandomModel model = ts::random_model(gen, 2, 0, 3);
  const MomentSet pop = population_moments(model.scm, &model.proxies);
  const Matrix expected =
      model.proxies.beta_z.transpose() * model.scm.sigma_a * model.proxies.beta_w;
  CHECK((pop.szw - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("interventions orthogonal to the residual exposure leave the loss unchanged") {
  std::mt19937_64 gen(25);
  const LinearScm scm = ts::random_scm(gen, 2, 1, 3);
  const Vector gamma = ts::random_vector(gen, scm.d_x);
  const Vector b = b_gamma(scm, gamma);
  REQUIRE(b.head(2).norm() > 0.0);
  Vector nu = Vector::Zero(scm.d_a);
  nu(0) = b(1);
  nu(1) = -b(0);
  LinearPredictor p;
  p.gamma = gamma;
  const double at_nu = mspe_under_intervention(scm, p, InterventionSpec::deterministic(nu));
  const double at_zero =
      mspe_under_intervention(scm, p, InterventionSpec::deterministic(Vector::Zero(scm.d_a)));
  CHECK(at_nu == at_zero);
}

TEST_CASE("mspe_under_intervention matches Monte Carlo") {
  std::mt19937_64 gen(26);
  const ts::RandomModel model = ts::random_model(gen, 2, 1, 2);
  LinearPredictor p;
  p.gamma = ts::random_vector(gen, 2);
  p.alpha = 0.3;
  const Vector mu = ts::random_vector(gen, 2);
  std::mt19937_64 gen2(27);
  const Matrix cov = ts::random_pd(gen2, 2, 0.5, 0.5);
  const InterventionSpec spec = InterventionSpec::random(mu, cov);
  const double analytic = mspe_under_intervention(model.scm, p, spec);
  const Dataset data = simulate_intervened(model.scm, nullptr, spec, 200000, 5, {});
  Vector resid = data.y - data.x * p.gamma;
  resid.array() -= p.alpha;
  const Vector sq2 = resid.cwiseProduct(resid);
  const double mean = sq2.mean();
  const double sd = std::sqrt((sq2.array() - mean).square().sum() / double(sq2.size() - 1));
  CHECK(std::abs(mean - analytic) <= 5.0 * sd / std::sqrt(double(sq2.size())));
}

TEST_CASE("deterministic interventions pin the anchor columns") {
  std::mt19937_64 gen(28);
  const ts::RandomModel model = ts::random_model(gen, 2, 0, 2);
  Vector nu(2);
  nu << -1.5, 0.25;
  const Dataset data =
      simulate_intervened(model.scm, &model.proxies, InterventionSpec::deterministic(nu), 50, 9, {});
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    CHECK(data.a(i, 0) == nu(0));
    CHECK(data.a(i, 1) == nu(1));
  }
  // proxies still see the intervened anchors through their loadings
  CHECK(data.w.cols() == 2);
}

TEST_CASE("identical seeds reproduce the dataset exactly") {
  std::mt19937_64 gen(29);
  const ts::RandomModel model = ts::random_model(gen, 3, 1, 2);
  SimulateOptions options;
  options.keep_hidden = true;
  options.keep_noise = true;
  const Dataset a = simulate(model.scm, &model.proxies, 500, 123, options);
  const Dataset b = simulate(model.scm, &model.proxies, 500, 123, options);
  const Dataset c = simulate(model.scm, &model.proxies, 500, 124, options);
  CHECK(same_matrix(a.x, b.x));
  CHECK((a.y.array() == b.y.array()).all());
  CHECK(same_matrix(a.a, b.a));
  CHECK(same_matrix(a.w, b.w));
  CHECK(same_matrix(a.z, b.z));
  CHECK(same_matrix(a.hidden, b.hidden));
  CHECK(same_matrix(a.noise, b.noise));
  CHECK_FALSE(same_matrix(a.x, c.x));
}

TEST_CASE("hidden and noise blocks stay internal by default") {
  std::mt19937_64 gen(30);
  const ts::RandomModel model = ts::random_model(gen, 2, 2, 2);
  const Dataset data = simulate(model.scm, &model.proxies, 10, 1, {});
  CHECK(data.hidden.size() == 0);
  CHECK(data.noise.size() == 0);
  SimulateOptions options;
  options.keep_anchors = false;
  const Dataset bare = simulate(model.scm, &model.proxies, 10, 1, options);
  CHECK_FALSE(bare.has_a());
  CHECK(bare.has_w());
}

TEST_CASE("validation names the failing checks") {
  std::mt19937_64 gen(31);
  LinearScm scm = ts::random_scm(gen, 1, 0, 1);
  CHECK(validate_scm(scm).ok);

  LinearScm cyclic = scm;
  cyclic.b = Matrix::Zero(2, 2);
  cyclic.b(0, 1) = 1.0;
  cyclic.b(1, 0) = 1.0;
  const ValidationReport r1 = validate_scm(cyclic);
  CHECK_FALSE(r1.ok);
  bool found_failed = false;
  for (const ValidationCheck& check : r1.checks) {
    if (!check.passed) {
      found_failed = true;
      CHECK_FALSE(check.name.empty());
    }
  }
  CHECK(found_failed);

  LinearScm bad_dims = scm;
  bad_dims.m_a = Matrix::Zero(3, 1);
  CHECK_FALSE(validate_scm(bad_dims).ok);

  LinearScm bad_sigma = scm;
  bad_sigma.sigma_a = -Matrix::Identity(1, 1);
  CHECK_FALSE(validate_scm(bad_sigma).ok);

  ProxyModel flat;
  flat.beta_w = Matrix::Zero(1, 1);
  flat.sigma_eps_w = Matrix::Identity(1, 1);
  flat.beta_z = Matrix(1, 0);
  flat.sigma_eps_z = Matrix(0, 0);
  CHECK_FALSE(validate_scm(scm, &flat).ok);
}
