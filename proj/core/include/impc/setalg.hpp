#pragma once

#include "impc/linalg.hpp"

#include <vector>

namespace impc::setalg {

/// Interval matrix  C (+) [-R, R]  with elementwise nonnegative radius R.
class IntervalMatrix {
 public:
  IntervalMatrix() = default;
  IntervalMatrix(Matrix center, Matrix radius);

  /// Degenerate interval holding a single matrix.
  static IntervalMatrix point(const Matrix& m);
  /// Zero-centered interval [-R, R].
  static IntervalMatrix symmetric(const Matrix& radius);

  const Matrix& center() const noexcept { return center_; }
  const Matrix& radius() const noexcept { return radius_; }
  Index rows() const noexcept { return center_.rows(); }
  Index cols() const noexcept { return center_.cols(); }
  Matrix lower() const { return center_ - radius_; }
  Matrix upper() const { return center_ + radius_; }

  bool contains(const Matrix& m, double tol = 1e-9) const;
  /// Elementwise inclusion of intervals.
  bool contains(const IntervalMatrix& other, double tol = 1e-9) const;

 private:
  Matrix center_;
  Matrix radius_;
};

/// Minkowski sum: centers and radii add.
IntervalMatrix operator+(const IntervalMatrix& a, const IntervalMatrix& b);

/// Matrix zonotope < C; G_1, ..., G_k > = { C + sum_i beta_i G_i : |beta_i| <= 1 }.
/// Generator order is part of the value and is preserved by every operation.
class MatrixZonotope {
 public:
  MatrixZonotope() = default;
  explicit MatrixZonotope(Matrix center, std::vector<Matrix> generators = {});

  /// Zero-centered zonotope whose generators are the nonzero entry matrices of
  /// `radius`; equal as a set to the interval [-radius, radius].
  static MatrixZonotope from_symmetric_interval(const Matrix& radius);

  const Matrix& center() const noexcept { return center_; }
  const std::vector<Matrix>& generators() const noexcept { return generators_; }
  Index rows() const noexcept { return center_.rows(); }
  Index cols() const noexcept { return center_.cols(); }
  std::size_t num_generators() const noexcept { return generators_.size(); }

  /// Member for coefficient vector beta (size num_generators()).
  Matrix member(const Vector& beta) const;

 private:
  Matrix center_;
  std::vector<Matrix> generators_;
};

/// Minkowski sum of matrix zonotopes: generator lists concatenate.
MatrixZonotope operator+(const MatrixZonotope& a, const MatrixZonotope& b);

/// Vector box  c (+) [-r, r].
struct Box {
  Vector center;
  Vector radius;

  static Box zero(Index n);
  static Box symmetric(Vector radius);
  Index dim() const noexcept { return radius.size(); }
  bool contains(const Vector& x, double tol = 1e-9) const;
};

/// Smallest interval matrix containing the zonotope.
IntervalMatrix box_of_zonotope(const MatrixZonotope& m);

/// Entry decomposition: the l*q matrices each carrying one entry of `m`,
/// in row-major order.
std::vector<Matrix> entry_decomposition(const Matrix& m);

/// Zonotopic outer bound of the product set I * M. Generators are C*G_i in
/// order followed by the nonzero entry matrices of
/// F = Delta (|M_C| + sum |G_i|) in row-major order.
MatrixZonotope transport(const IntervalMatrix& i, const MatrixZonotope& m);

/// j-fold composition of transport(i, .); j = 0 returns m unchanged.
MatrixZonotope transport_iter(const IntervalMatrix& i, const MatrixZonotope& m, int j);

/// Outer bound of the product of two interval matrices.
IntervalMatrix interval_product_bound(const IntervalMatrix& a, const IntervalMatrix& b);

/// Decides x in m with a feasibility LP over the generator coefficients
/// (residual tolerance `tol`). Throws SolverFailure if the LP gives no verdict.
bool zonotope_contains(const MatrixZonotope& m, const Matrix& x, double tol = 1e-9);

}  // namespace impc::setalg
