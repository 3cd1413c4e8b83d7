#pragma once

// Shared test machinery: an independent numeric minimizer, random model
// generators, and a brute-force intervention-set sampler. Everything here is
// deliberately naive so that agreement with the library is evidence, not
// tautology.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "anchor/linalg.hpp"
#include "anchor/moments.hpp"
#include "anchor/robustness.hpp"
#include "anchor/scm.hpp"

namespace anchor::testsupport {

inline std::string repo_path(const std::string& rel) {
  return std::string(ANCHOR_REPO_DIR) + "/" + rel;
}

inline std::string make_temp_dir(const std::string& tag) {
  namespace fs = std::filesystem;
  static std::atomic<int> counter{0};
  const fs::path p = fs::temp_directory_path() /
                     (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::create_directories(p);
  return p.string();
}

// Newton's method with central finite differences. For a quadratic objective
// one step from any point is exact up to rounding, regardless of the step
// size h, because central differences have no second-order error term. Two
// passes guard against accumulated rounding on badly scaled problems.
template <typename F>
Vector fd_minimize(const F& f, int dim, double h = 0.25, int passes = 2) {
  Vector x = Vector::Zero(dim);
  for (int pass = 0; pass < passes; ++pass) {
    Vector grad(dim);
    Matrix hess(dim, dim);
    const double fx = f(x);
    for (int i = 0; i < dim; ++i) {
      Vector ei = Vector::Zero(dim);
      ei(i) = h;
      const double fp = f(x + ei);
      const double fm = f(x - ei);
      grad(i) = (fp - fm) / (2.0 * h);
      hess(i, i) = (fp - 2.0 * fx + fm) / (h * h);
      for (int j = i + 1; j < dim; ++j) {
        Vector ej = Vector::Zero(dim);
        ej(j) = h;
        const double v = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) /
                         (4.0 * h * h);
        hess(i, j) = v;
        hess(j, i) = v;
      }
    }
    x -= hess.colPivHouseholderQr().solve(grad);
  }
  return x;
}

inline Matrix random_dense(std::mt19937_64& gen, int rows, int cols, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = u(gen);
  return m;
}

inline Vector random_vector(std::mt19937_64& gen, int n, double lo = -1.5, double hi = 1.5) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(gen);
  return v;
}

// Identity plus a scaled Wishart-style bump: always comfortably PD.
inline Matrix random_pd(std::mt19937_64& gen, int d, double base = 1.0, double bump = 0.3) {
  const Matrix q = random_dense(gen, d, d, -1.0, 1.0);
  return base * Matrix::Identity(d, d) + (bump / d) * (q * q.transpose());
}

// Square loading matrix, resampled until it is far from singular.
inline Matrix random_full_rank(std::mt19937_64& gen, int d) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    Matrix b = random_dense(gen, d, d, -1.5, 1.5);
    if (rcond(b) > 0.05) return b;
  }
  throw std::runtime_error("random_full_rank: no well-conditioned draw in 200 attempts");
}

// Acyclic structural matrix: entries only below the diagonal of a random
// vertex ordering, so Id - B is always invertible (unit determinant).
inline Matrix random_acyclic_b(std::mt19937_64& gen, int d) {
  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), gen);
  std::uniform_real_distribution<double> coef(-0.7, 0.7);
  std::bernoulli_distribution keep(0.6);
  Matrix b = Matrix::Zero(d, d);
  for (int i = 1; i < d; ++i)
    for (int j = 0; j < i; ++j)
      if (keep(gen)) b(order[i], order[j]) = coef(gen);
  return b;
}

inline LinearScm random_scm(std::mt19937_64& gen, int d_x, int d_h, int d_a) {
  LinearScm scm;
  scm.d_x = d_x;
  scm.d_h = d_h;
  scm.d_a = d_a;
  const int d = scm.d();
  scm.b = random_acyclic_b(gen, d);
  scm.m_a = random_dense(gen, d, d_a, -1.0, 1.0);
  scm.sigma_eps = random_pd(gen, d);
  scm.sigma_a = random_pd(gen, d_a);
  return scm;
}

// Two square full-rank proxies with PD noise, the setting in which the
// cross-proxy machinery is exact.
inline ProxyModel random_proxies(std::mt19937_64& gen, int d_a, bool with_z = true,
                                 double noise_scale = 0.4) {
  ProxyModel p;
  p.beta_w = random_full_rank(gen, d_a);
  p.sigma_eps_w = noise_scale * random_pd(gen, d_a);
  if (with_z) {
    p.beta_z = random_full_rank(gen, d_a);
    p.sigma_eps_z = noise_scale * random_pd(gen, d_a);
  } else {
    p.beta_z = Matrix(d_a, 0);
    p.sigma_eps_z = Matrix(0, 0);
  }
  return p;
}

struct RandomModel {
  LinearScm scm;
  ProxyModel proxies;
};

inline RandomModel random_model(std::mt19937_64& gen, int d_x, int d_h, int d_a,
                                bool with_z = true, double noise_scale = 0.4) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    RandomModel m{random_scm(gen, d_x, d_h, d_a), random_proxies(gen, d_a, with_z, noise_scale)};
    if (validate_scm(m.scm, &m.proxies).ok) return m;
  }
  throw std::runtime_error("random_model: no valid draw in 50 attempts");
}

// Max interventional MSPE over `draws` directions sampled on the boundary
// {nu = S^{1/2} u, ||u|| = 1} of an intervention set. A sup over the set is
// attained on this boundary, so the sample never legitimately exceeds the
// analytic value and approaches it from below.
inline double boundary_max_mspe(const LinearScm& scm, const Vector& gamma, const Matrix& s,
                                int draws, std::uint64_t seed) {
  const Matrix root = psd_sqrt(s);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  LinearPredictor p;
  p.gamma = gamma;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < draws; ++i) {
    Vector u(s.rows());
    do {
      for (Eigen::Index k = 0; k < u.size(); ++k) u(k) = normal(gen);
    } while (u.norm() == 0.0);
    u.normalize();
    const Vector nu = root * u;
    best = std::max(best, mspe_under_intervention(scm, p, InterventionSpec::deterministic(nu)));
  }
  return best;
}

}  // namespace anchor::testsupport
