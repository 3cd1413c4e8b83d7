#pragma once

#include <Eigen/Dense>

namespace anchor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Reciprocal condition number below which a structural matrix (Id - B, a
// cross-proxy moment block, ...) is treated as effectively singular.
inline constexpr double kRcondFloor = 1e-10;

// Reciprocal condition number below which fitter normal equations fall back
// to a pseudo-inverse solve instead of a direct factorization.
inline constexpr double kSolveRcondFloor = 1e-12;

// PSD comparisons use an absolute tolerance scaled by the matrix magnitude:
// tol = kPsdTol * (1 + ||D - C||).
inline constexpr double kPsdTol = 1e-9;

// Reciprocal condition number min|eig| / max|eig| of a symmetric matrix.
// Returns 0 for the zero matrix.
double sym_rcond(const Matrix& s);

// Reciprocal condition number sigma_min / sigma_max of a general square
// matrix, via SVD.
double rcond(const Matrix& m);

// Smallest eigenvalue of a symmetric matrix.
double lambda_min_sym(const Matrix& s);

// Whether s (symmetrized) has all eigenvalues >= -tol.
bool is_psd(const Matrix& s, double tol = kPsdTol);

// Whether s (symmetrized) has all eigenvalues >= tol_scale * ||s||.
bool is_pd(const Matrix& s, double tol = kPsdTol);

// Symmetric PSD square root. Eigenvalues in [-tol, 0) are clamped to zero;
// more negative ones raise std::domain_error.
Matrix psd_sqrt(const Matrix& s);

// Moore-Penrose pseudo-inverse of a symmetric matrix (eigenvalues below
// kSolveRcondFloor * max|eig| are dropped).
Matrix sym_pinv(const Matrix& s);

// Solves a x = b for symmetric a. Uses an eigendecomposition; when
// rcond(a) < kSolveRcondFloor the small eigenvalues are dropped
// (pseudo-inverse solve) and *used_pinv, if given, is set.
Vector solve_sym(const Matrix& a, const Vector& b, bool* used_pinv = nullptr);
Matrix solve_sym(const Matrix& a, const Matrix& b, bool* used_pinv = nullptr);

// Solves a x = b for general square a with partial-pivot LU. Throws
// std::domain_error when rcond(a) < kRcondFloor.
Matrix solve_square(const Matrix& a, const Matrix& b, const char* context);

}  // namespace anchor
