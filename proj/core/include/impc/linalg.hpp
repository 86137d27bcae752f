#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace impc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Spectral radius (largest eigenvalue modulus) of a square matrix.
double spectral_radius(const Matrix& m);

/// Right pseudoinverse computed through an SVD. Singular values below
/// `rel_tol * sigma_max` are treated as zero; the numerical rank is
/// written to `rank` when it is non-null.
Matrix pseudoinverse(const Matrix& m, double rel_tol, Index* rank = nullptr);

/// Numerical rank with the same thresholding rule as pseudoinverse().
Index numerical_rank(const Matrix& m, double rel_tol);

/// Elementwise maximum absolute difference; shapes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

/// Stack a list of equally sized column vectors into a matrix.
Matrix hstack(std::span<const Vector> columns);

/// Stack matrices vertically; all blocks must share the column count.
Matrix vstack(const Matrix& top, const Matrix& bottom);

}  // namespace impc
