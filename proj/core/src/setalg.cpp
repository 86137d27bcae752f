#include "impc/setalg.hpp"

#include "impc/errors.hpp"
#include "impc/qpsolve.hpp"

#include <string>

namespace impc::setalg {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeMismatch(std::string(what) + ": shapes differ (" + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()) + ")");
}

}  // namespace

IntervalMatrix::IntervalMatrix(Matrix center, Matrix radius)
    : center_(std::move(center)), radius_(std::move(radius)) {
  require_same_shape(center_, radius_, "IntervalMatrix");
  if (radius_.size() > 0 && radius_.minCoeff() < 0.0)
    throw InvalidArgument("IntervalMatrix: radius must be elementwise nonnegative");
}

IntervalMatrix IntervalMatrix::point(const Matrix& m) {
  return IntervalMatrix(m, Matrix::Zero(m.rows(), m.cols()));
}

IntervalMatrix IntervalMatrix::symmetric(const Matrix& radius) {
  return IntervalMatrix(Matrix::Zero(radius.rows(), radius.cols()), radius);
}

bool IntervalMatrix::contains(const Matrix& m, double tol) const {
  require_same_shape(center_, m, "IntervalMatrix::contains");
  return ((m - center_).cwiseAbs() - radius_).maxCoeff() <= tol || m.size() == 0;
}

bool IntervalMatrix::contains(const IntervalMatrix& other, double tol) const {
  require_same_shape(center_, other.center_, "IntervalMatrix::contains");
  if (center_.size() == 0) return true;
  return (other.lower() - lower()).minCoeff() >= -tol && (upper() - other.upper()).minCoeff() >= -tol;
}

IntervalMatrix operator+(const IntervalMatrix& a, const IntervalMatrix& b) {
  require_same_shape(a.center(), b.center(), "IntervalMatrix sum");
  return IntervalMatrix(a.center() + b.center(), a.radius() + b.radius());
}

MatrixZonotope::MatrixZonotope(Matrix center, std::vector<Matrix> generators)
    : center_(std::move(center)), generators_(std::move(generators)) {
  for (const auto& g : generators_) require_same_shape(center_, g, "MatrixZonotope generator");
}

MatrixZonotope MatrixZonotope::from_symmetric_interval(const Matrix& radius) {
  if (radius.size() > 0 && radius.minCoeff() < 0.0)
    throw InvalidArgument("from_symmetric_interval: radius must be nonnegative");
  std::vector<Matrix> gens;
  for (auto& e : entry_decomposition(radius)) {
    if (!e.isZero(0.0)) gens.push_back(std::move(e));
  }
  return MatrixZonotope(Matrix::Zero(radius.rows(), radius.cols()), std::move(gens));
}

Matrix MatrixZonotope::member(const Vector& beta) const {
  if (beta.size() != static_cast<Index>(generators_.size()))
    throw ShapeMismatch("MatrixZonotope::member: coefficient count differs from generator count");
  Matrix out = center_;
  for (std::size_t i = 0; i < generators_.size(); ++i) out += beta(static_cast<Index>(i)) * generators_[i];
  return out;
}

MatrixZonotope operator+(const MatrixZonotope& a, const MatrixZonotope& b) {
  require_same_shape(a.center(), b.center(), "MatrixZonotope sum");
  std::vector<Matrix> gens = a.generators();
  gens.insert(gens.end(), b.generators().begin(), b.generators().end());
  return MatrixZonotope(a.center() + b.center(), std::move(gens));
}

Box Box::zero(Index n) { return Box{Vector::Zero(n), Vector::Zero(n)}; }

Box Box::symmetric(Vector radius) {
  if (radius.size() > 0 && radius.minCoeff() < 0.0) throw InvalidArgument("Box: radius must be nonnegative");
  const Index n = radius.size();
  return Box{Vector::Zero(n), std::move(radius)};
}

bool Box::contains(const Vector& x, double tol) const {
  if (x.size() != center.size()) throw ShapeMismatch("Box::contains: dimension mismatch");
  if (x.size() == 0) return true;
  return ((x - center).cwiseAbs() - radius).maxCoeff() <= tol;
}

IntervalMatrix box_of_zonotope(const MatrixZonotope& m) {
  Matrix radius = Matrix::Zero(m.rows(), m.cols());
  for (const auto& g : m.generators()) radius += g.cwiseAbs();
  return IntervalMatrix(m.center(), std::move(radius));
}

std::vector<Matrix> entry_decomposition(const Matrix& m) {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      Matrix e = Matrix::Zero(m.rows(), m.cols());
      e(i, j) = m(i, j);
      out.push_back(std::move(e));
    }
  }
  return out;
}

MatrixZonotope transport(const IntervalMatrix& i, const MatrixZonotope& m) {
  if (i.cols() != m.rows())
    throw ShapeMismatch("transport: interval is " + std::to_string(i.rows()) + "x" + std::to_string(i.cols()) +
                        " but zonotope has " + std::to_string(m.rows()) + " rows");
  const Matrix& c = i.center();
  std::vector<Matrix> gens;
  gens.reserve(m.num_generators() + static_cast<std::size_t>(i.rows() * m.cols()));
  Matrix abs_sum = m.center().cwiseAbs();
  for (const auto& g : m.generators()) {
    gens.push_back(c * g);
    abs_sum += g.cwiseAbs();
  }
  const Matrix f = i.radius() * abs_sum;
  for (Index r = 0; r < f.rows(); ++r) {
    for (Index col = 0; col < f.cols(); ++col) {
      if (f(r, col) == 0.0) continue;
      Matrix e = Matrix::Zero(f.rows(), f.cols());
      e(r, col) = f(r, col);
      gens.push_back(std::move(e));
    }
  }
  return MatrixZonotope(c * m.center(), std::move(gens));
}

MatrixZonotope transport_iter(const IntervalMatrix& i, const MatrixZonotope& m, int j) {
  if (j < 0) throw InvalidArgument("transport_iter: iteration count must be nonnegative");
  if (i.rows() != i.cols()) throw ShapeMismatch("transport_iter: interval matrix must be square");
  if (i.cols() != m.rows()) throw ShapeMismatch("transport_iter: interval and zonotope do not conform");
  MatrixZonotope out = m;
  for (int k = 0; k < j; ++k) out = transport(i, out);
  return out;
}

IntervalMatrix interval_product_bound(const IntervalMatrix& a, const IntervalMatrix& b) {
  if (a.cols() != b.rows()) throw ShapeMismatch("interval_product_bound: inner dimensions differ");
  Matrix radius = a.center().cwiseAbs() * b.radius() + a.radius() * b.center().cwiseAbs() + a.radius() * b.radius();
  return IntervalMatrix(a.center() * b.center(), std::move(radius));
}

bool zonotope_contains(const MatrixZonotope& m, const Matrix& x, double tol) {
  require_same_shape(m.center(), x, "zonotope_contains");
  const Index k = static_cast<Index>(m.num_generators());
  const Index rows = m.rows() * m.cols();
  const Vector target = Eigen::Map<const Vector>((x - m.center()).eval().data(), rows);
  if (k == 0) return rows == 0 || target.cwiseAbs().maxCoeff() <= tol;

  Matrix eq(rows, k);
  for (Index g = 0; g < k; ++g) {
    const Matrix& gen = m.generators()[static_cast<std::size_t>(g)];
    eq.col(g) = Eigen::Map<const Vector>(gen.data(), rows);
  }
  Matrix ineq(2 * k, k);
  ineq << Matrix::Identity(k, k), -Matrix::Identity(k, k);
  Vector rhs = Vector::Ones(2 * k);
  auto lp = qp::QpProblem::linear_program(Vector::Zero(k), std::move(eq), target, std::move(ineq), std::move(rhs));
  qp::Options opts;
  opts.feasibility_tol = tol;
  opts.feasibility_only = true;
  const auto sol = qp::solve_lp(lp, opts);
  switch (sol.status) {
    case qp::Status::Optimal: return true;
    case qp::Status::Infeasible: return false;
    default:
      throw SolverFailure(std::string("zonotope_contains: LP ended with status ") +
                          std::string(qp::to_string(sol.status)));
  }
}

}  // namespace impc::setalg
