#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "anchor/linalg.hpp"
#include "support/oracle.hpp"

using namespace anchor;
namespace ts = anchor::testsupport;

TEST_CASE("psd_sqrt squares back to the input") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix s = ts::random_pd(gen, 4, 0.5, 1.0);
    const Matrix root = psd_sqrt(s);
    CHECK(((root * root) - s).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((root - root.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("psd_sqrt clamps rounding-level negatives and rejects real ones") {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 1.0;
  s(1, 1) = -1e-12;
  const Matrix root = psd_sqrt(s);
  CHECK(root(1, 1) == 0.0);
  s(1, 1) = -1e-3;
  CHECK_THROWS_AS(psd_sqrt(s), std::domain_error);
}

TEST_CASE("rcond and sym_rcond agree on symmetric matrices") {
  std::mt19937_64 gen(12);
  const Matrix s = ts::random_pd(gen, 3);
  CHECK(sym_rcond(s) == doctest::Approx(rcond(s)).epsilon(1e-9));
  CHECK(sym_rcond(Matrix::Zero(3, 3)) == 0.0);
  CHECK(sym_rcond(Matrix::Identity(5, 5)) == doctest::Approx(1.0));
}

TEST_CASE("lambda_min_sym on a known spectrum") {
  Matrix s(2, 2);
  s << 2.0, 1.0, 1.0, 2.0;
  CHECK(lambda_min_sym(s) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(is_pd(s));
  CHECK(is_psd(s));
  Matrix t(2, 2);
  t << 1.0, 1.0, 1.0, 1.0;
  CHECK(is_psd(t));
  CHECK_FALSE(is_pd(t));
}

TEST_CASE("solve_sym matches a dense inverse on well-posed systems") {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = ts::random_pd(gen, 4);
    const Vector b = ts::random_vector(gen, 4);
    bool used_pinv = true;
    const Vector x = solve_sym(a, b, &used_pinv);
    CHECK_FALSE(used_pinv);
    CHECK((a * x - b).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("solve_sym falls back to a minimum-norm solution on singular systems") {
  // Rank-1 system: a = v v^T, b = v, so the minimum-norm solution is
  // v / ||v||^2.
  Vector v(3);
  v << 1.0, 2.0, 2.0;
  const Matrix a = v * v.transpose();
  bool used_pinv = false;
  const Vector x = solve_sym(a, v, &used_pinv);
  CHECK(used_pinv);
  CHECK((x - v / v.squaredNorm()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("solve_sym matrix overload solves column-wise") {
  std::mt19937_64 gen(14);
  const Matrix a = ts::random_pd(gen, 3);
  const Matrix b = ts::random_dense(gen, 3, 2, -1.0, 1.0);
  const Matrix x = solve_sym(a, b);
  CHECK((a * x - b).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("solve_square names its caller when the system is singular") {
  Matrix a(2, 2);
  a << 1.0, 2.0, 2.0, 4.0;
  const Matrix b = Matrix::Identity(2, 2);
  CHECK_THROWS_WITH_AS(solve_square(a, b, "cross-proxy fit"),
                       doctest::Contains("cross-proxy fit"), std::domain_error);
  Matrix good(2, 2);
  good << 2.0, 0.0, 1.0, 1.0;
  const Matrix x = solve_square(good, b, "test");
  CHECK((good * x - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sym_pinv is a Moore-Penrose inverse on symmetric input") {
  std::mt19937_64 gen(15);
  Vector v = ts::random_vector(gen, 3);
  const Matrix a = v * v.transpose();
  const Matrix p = sym_pinv(a);
  CHECK((a * p * a - a).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((p * a * p - p).cwiseAbs().maxCoeff() < 1e-9);
  const Matrix full = ts::random_pd(gen, 3);
  CHECK((sym_pinv(full) * full - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);
}
