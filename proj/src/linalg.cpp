#include "anchor/linalg.hpp"

#include <stdexcept>
#include <string>

namespace anchor {

namespace {

Matrix symmetrized(const Matrix& s) { return 0.5 * (s + s.transpose()); }

}  // namespace

double sym_rcond(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(s), Eigen::EigenvaluesOnly);
  const Vector abs_ev = es.eigenvalues().cwiseAbs();
  const double lo = abs_ev.minCoeff();
  const double hi = abs_ev.maxCoeff();
  return hi > 0.0 ? lo / hi : 0.0;
}

double rcond(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

double lambda_min_sym(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(s), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_psd(const Matrix& s, double tol) {
  if (s.rows() == 0) return true;
  return lambda_min_sym(s) >= -tol * (1.0 + s.norm());
}

bool is_pd(const Matrix& s, double tol) {
  if (s.rows() == 0) return true;
  return lambda_min_sym(s) > tol * (1.0 + s.norm());
}

Matrix psd_sqrt(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(s));
  Vector ev = es.eigenvalues();
  const double tol = kPsdTol * (1.0 + s.norm());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol) {
      throw std::domain_error("psd_sqrt: matrix has eigenvalue " + std::to_string(ev(i)) +
                              ", not positive semidefinite");
    }
    ev(i) = ev(i) > 0.0 ? std::sqrt(ev(i)) : 0.0;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Matrix sym_pinv(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(s));
  Vector ev = es.eigenvalues();
  const double cut = kSolveRcondFloor * ev.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    ev(i) = std::abs(ev(i)) > cut ? 1.0 / ev(i) : 0.0;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

Matrix solve_sym_impl(const Matrix& a, const Matrix& b, bool* used_pinv) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(a));
  const Vector& ev = es.eigenvalues();
  const double hi = ev.cwiseAbs().maxCoeff();
  const double lo = ev.cwiseAbs().minCoeff();
  const bool degenerate = hi == 0.0 || lo < kSolveRcondFloor * hi;
  if (used_pinv != nullptr) *used_pinv = degenerate;
  Vector inv_ev(ev.size());
  const double cut = kSolveRcondFloor * hi;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    inv_ev(i) = std::abs(ev(i)) > cut ? 1.0 / ev(i) : 0.0;
  }
  return es.eigenvectors() * (inv_ev.asDiagonal() * (es.eigenvectors().transpose() * b));
}

}  // namespace

Vector solve_sym(const Matrix& a, const Vector& b, bool* used_pinv) {
  return solve_sym_impl(a, b, used_pinv).col(0);
}

Matrix solve_sym(const Matrix& a, const Matrix& b, bool* used_pinv) {
  return solve_sym_impl(a, b, used_pinv);
}

Matrix solve_square(const Matrix& a, const Matrix& b, const char* context) {
  if (rcond(a) < kRcondFloor) {
    throw std::domain_error(std::string(context) +
                            ": matrix is ill-conditioned (reciprocal condition number below 1e-10)");
  }
  return Eigen::PartialPivLU<Matrix>(a).solve(b);
}

}  // namespace anchor
