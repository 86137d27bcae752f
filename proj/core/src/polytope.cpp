#include "impc/polytope.hpp"

#include "impc/errors.hpp"
#include "impc/qpsolve.hpp"

#include <algorithm>
#include <cmath>

namespace impc {

Polytope::Polytope(Matrix h, Vector b) : h_(std::move(h)), b_(std::move(b)) {
  if (h_.rows() != b_.size()) throw ShapeMismatch("Polytope: H and b have different row counts");
}

Polytope Polytope::box(const Vector& lower, const Vector& upper) {
  if (lower.size() != upper.size()) throw ShapeMismatch("Polytope::box: bound sizes differ");
  if ((upper - lower).minCoeff() < 0.0) throw InvalidArgument("Polytope::box: lower exceeds upper");
  const Index n = lower.size();
  Matrix h(2 * n, n);
  h << Matrix::Identity(n, n), -Matrix::Identity(n, n);
  Vector b(2 * n);
  b << upper, -lower;
  return Polytope(std::move(h), std::move(b));
}

Polytope Polytope::from_box(const setalg::Box& box) {
  return Polytope::box(box.center - box.radius, box.center + box.radius);
}

bool Polytope::contains(const Vector& x, double tol) const {
  if (x.size() != dim()) throw ShapeMismatch("Polytope::contains: dimension mismatch");
  if (h_.rows() == 0) return true;
  return (h_ * x - b_).maxCoeff() <= tol;
}

bool Polytope::contains(const setalg::Box& box, double tol) const {
  if (box.dim() != dim()) throw ShapeMismatch("Polytope::contains(Box): dimension mismatch");
  if (h_.rows() == 0) return true;
  return (h_ * box.center + h_.cwiseAbs() * box.radius - b_).maxCoeff() <= tol;
}

std::optional<double> Polytope::support(const Vector& direction) const {
  if (direction.size() != dim()) throw ShapeMismatch("Polytope::support: dimension mismatch");
  auto lp = qp::QpProblem::linear_program(-direction, Matrix(0, dim()), Vector(0), h_, b_);
  const auto sol = qp::solve_lp(lp);
  switch (sol.status) {
    case qp::Status::Optimal: return -sol.objective;
    case qp::Status::Unbounded: return std::nullopt;
    case qp::Status::Infeasible: throw InvalidArgument("Polytope::support: polytope is empty");
    case qp::Status::MaxIter: break;
  }
  throw SolverFailure("Polytope::support: LP did not converge");
}

bool Polytope::is_empty() const {
  auto lp = qp::QpProblem::linear_program(Vector::Zero(dim()), Matrix(0, dim()), Vector(0), h_, b_);
  qp::Options opts;
  opts.feasibility_only = true;
  const auto sol = qp::solve_lp(lp, opts);
  if (sol.status == qp::Status::MaxIter) throw SolverFailure("Polytope::is_empty: LP did not converge");
  return sol.status == qp::Status::Infeasible;
}

setalg::Box Polytope::bounding_box() const {
  const Index n = dim();
  Vector lo(n);
  Vector hi(n);
  for (Index i = 0; i < n; ++i) {
    const Vector e = Vector::Unit(n, i);
    const auto up = support(e);
    const auto dn = support(-e);
    if (!up || !dn) throw InvalidArgument("Polytope::bounding_box: polytope is unbounded");
    hi(i) = *up;
    lo(i) = -*dn;
  }
  return setalg::Box{0.5 * (lo + hi), (0.5 * (hi - lo)).cwiseMax(0.0)};
}

Polytope Polytope::without_redundant(double tol) const {
  const Index m = num_constraints();
  // Normalize, then drop exact duplicates before the LP pass.
  std::vector<Index> keep;
  Matrix hn(m, dim());
  Vector bn(m);
  for (Index i = 0; i < m; ++i) {
    const double nrm = h_.row(i).norm();
    if (nrm <= 1e-14) {
      if (b_(i) < -tol) return Polytope(h_.row(i), b_.segment(i, 1));
      continue;
    }
    hn.row(i) = h_.row(i) / nrm;
    bn(i) = b_(i) / nrm;
    bool dup = false;
    for (Index k : keep) {
      if ((hn.row(k) - hn.row(i)).cwiseAbs().maxCoeff() <= 1e-12) {
        bn(k) = std::min(bn(k), bn(i));
        dup = true;
        break;
      }
    }
    if (!dup) keep.push_back(i);
  }
  std::vector<char> active(keep.size(), 1);
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const Index row = keep[k];
    Index cnt = 0;
    for (std::size_t j = 0; j < keep.size(); ++j)
      if (j != k && active[j]) ++cnt;
    Matrix h_rest(cnt, dim());
    Vector b_rest(cnt);
    Index r = 0;
    for (std::size_t j = 0; j < keep.size(); ++j) {
      if (j == k || !active[j]) continue;
      h_rest.row(r) = hn.row(keep[j]);
      b_rest(r) = bn(keep[j]);
      ++r;
    }
    // Bound the row's own direction so the LP stays bounded.
    Matrix h_lp(cnt + 1, dim());
    Vector b_lp(cnt + 1);
    h_lp << h_rest, hn.row(row);
    b_lp << b_rest, bn(row) + 1.0;
    auto lp = qp::QpProblem::linear_program(-hn.row(row).transpose(), Matrix(0, dim()), Vector(0), h_lp, b_lp);
    const auto sol = qp::solve_lp(lp);
    if (sol.status == qp::Status::Infeasible) {
      // Empty polytope: a single infeasible witness row suffices.
      return Polytope(hn.row(row), Vector::Constant(1, bn(row)));
    }
    if (sol.status != qp::Status::Optimal) throw SolverFailure("Polytope::without_redundant: LP failed");
    if (-sol.objective <= bn(row) + tol) active[k] = 0;
  }
  std::vector<Index> rows;
  for (std::size_t k = 0; k < keep.size(); ++k)
    if (active[k]) rows.push_back(keep[k]);
  Matrix h(static_cast<Index>(rows.size()), dim());
  Vector b(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    h.row(static_cast<Index>(k)) = hn.row(rows[k]);
    b(static_cast<Index>(k)) = bn(rows[k]);
  }
  return Polytope(std::move(h), std::move(b));
}

std::vector<Vector> Polytope::vertices_2d() const {
  if (dim() != 2) throw ShapeMismatch("Polytope::vertices_2d: polytope is not 2-D");
  std::vector<Vector> pts;
  const Index m = num_constraints();
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) {
      Eigen::Matrix2d a;
      a << h_.row(i), h_.row(j);
      const double det = a.determinant();
      if (std::abs(det) < 1e-12) continue;
      const Eigen::Vector2d v = a.inverse() * Eigen::Vector2d(b_(i), b_(j));
      if (contains(Vector(v), 1e-7)) pts.emplace_back(v);
    }
  }
  if (pts.empty()) return pts;
  Vector c = Vector::Zero(2);
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Vector& a, const Vector& b) {
    return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
  });
  std::vector<Vector> out;
  for (const auto& p : pts) {
    if (out.empty() || (p - out.back()).norm() > 1e-9) out.push_back(p);
  }
  if (out.size() > 1 && (out.front() - out.back()).norm() <= 1e-9) out.pop_back();
  return out;
}

}  // namespace impc
