#include "impc/linalg.hpp"

#include "impc/errors.hpp"

#include <Eigen/Eigenvalues>

namespace impc {

double spectral_radius(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeMismatch("spectral_radius: matrix is not square");
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix pseudoinverse(const Matrix& m, double rel_tol, Index* rank) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? rel_tol * s(0) : 0.0;
  Index r = 0;
  Vector inv = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) {
      inv(i) = 1.0 / s(i);
      ++r;
    }
  }
  if (rank != nullptr) *rank = r;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Index numerical_rank(const Matrix& m, double rel_tol) {
  Index r = 0;
  pseudoinverse(m, rel_tol, &r);
  return r;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeMismatch("max_abs_diff: shapes differ");
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

Matrix hstack(std::span<const Vector> columns) {
  if (columns.empty()) return Matrix();
  Matrix out(columns.front().size(), static_cast<Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k].size() != out.rows()) throw ShapeMismatch("hstack: column sizes differ");
    out.col(static_cast<Index>(k)) = columns[k];
  }
  return out;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
  if (top.size() == 0) return bottom;
  if (bottom.size() == 0) return top;
  if (top.cols() != bottom.cols()) throw ShapeMismatch("vstack: column counts differ");
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

}  // namespace impc
