#include "impc/errors.hpp"
#include "impc/qpsolve.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace impc;
using namespace impc::qp;
using namespace impc::testing;

namespace {

QpProblem make(Matrix h, Vector c, Matrix e, Vector f, Matrix g, Vector b) {
  QpProblem p;
  p.hessian = std::move(h);
  p.linear = std::move(c);
  p.eq_lhs = std::move(e);
  p.eq_rhs = std::move(f);
  p.ineq_lhs = std::move(g);
  p.ineq_rhs = std::move(b);
  return p;
}

// Random bounded instance: box rows plus extra random cuts through a feasible center.
void random_polytope(std::mt19937_64& rng, Index d, Index extra, Matrix& g, Vector& h) {
  g.resize(2 * d + extra, d);
  h.resize(2 * d + extra);
  g.topRows(d) = Matrix::Identity(d, d);
  g.middleRows(d, d) = -Matrix::Identity(d, d);
  h.head(2 * d).setConstant(2.0);
  const Matrix cuts = random_matrix(rng, extra, d);
  g.bottomRows(extra) = cuts;
  const Vector center = random_matrix(rng, d, 1, -0.5, 0.5).col(0);
  h.tail(extra) = cuts * center + random_matrix(rng, extra, 1, 0.1, 1.0).col(0);
}

double kkt_stationarity(const QpProblem& p, const QpSolution& s) {
  Vector r = p.hessian * s.x + p.linear;
  if (p.num_eq() > 0) r += p.eq_lhs.transpose() * s.eq_multipliers;
  if (p.num_ineq() > 0) r += p.ineq_lhs.transpose() * s.ineq_multipliers;
  return r.cwiseAbs().maxCoeff();
}

double primal_violation(const QpProblem& p, const Vector& x) {
  double v = 0.0;
  if (p.num_eq() > 0) v = std::max(v, (p.eq_lhs * x - p.eq_rhs).cwiseAbs().maxCoeff());
  if (p.num_ineq() > 0) v = std::max(v, (p.ineq_lhs * x - p.ineq_rhs).maxCoeff());
  return v;
}

}  // namespace

TEST_SUITE("qpsolve") {

TEST_CASE("active bound") {
  const auto p = make(mat({{2}}), vec({0}), Matrix(0, 1), Vector(0), mat({{-1}}), vec({-1}));
  const auto s = solve_qp(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.x(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.ineq_multipliers(0) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("unconstrained minimum") {
  const auto p = make(2.0 * Matrix::Identity(3, 3), Vector::Zero(3), Matrix(0, 3), Vector(0), Matrix(0, 3), Vector(0));
  const auto s = solve_qp(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.x.norm() < 1e-14);
}

TEST_CASE("equality-constrained QP matches the KKT linear system") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix l = random_matrix(rng, 5, 5);
    const Matrix h = l * l.transpose() + 0.5 * Matrix::Identity(5, 5);
    const Vector c = random_matrix(rng, 5, 1).col(0);
    const Matrix e = random_matrix(rng, 3, 5);
    const Vector f = random_matrix(rng, 3, 1).col(0);
    const auto s = solve_qp(make(h, c, e, f, Matrix(0, 5), Vector(0)));
    REQUIRE(s.status == Status::Optimal);
    Matrix kkt = Matrix::Zero(8, 8);
    kkt.topLeftCorner(5, 5) = h;
    kkt.topRightCorner(5, 3) = e.transpose();
    kkt.bottomLeftCorner(3, 5) = e;
    Vector rhs(8);
    rhs << -c, f;
    const Vector sol = kkt.fullPivLu().solve(rhs);
    CHECK((s.x - sol.head(5)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("inequality QPs satisfy KKT conditions") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = 2 + trial % 5;
    const Matrix l = random_matrix(rng, d, d);
    const Matrix h = l * l.transpose() + 0.1 * Matrix::Identity(d, d);
    const Vector c = random_matrix(rng, d, 1, -5, 5).col(0);
    Matrix g;
    Vector b;
    random_polytope(rng, d, 4, g, b);
    const auto p = make(h, c, Matrix(0, d), Vector(0), g, b);
    const auto s = solve_qp(p);
    REQUIRE(s.status == Status::Optimal);
    CHECK(primal_violation(p, s.x) <= 1e-8);
    CHECK(kkt_stationarity(p, s) <= 1e-8);
    CHECK(s.ineq_multipliers.minCoeff() >= -1e-10);
    // Complementarity and duality gap.
    const Vector slack = b - g * s.x;
    CHECK(std::abs(slack.dot(s.ineq_multipliers)) <= 1e-7 * (1.0 + std::abs(s.objective)));
  }
}

TEST_CASE("bounded LP") {
  const auto p = QpProblem::linear_program(vec({-1}), Matrix(0, 1), Vector(0), mat({{1}, {-1}}), vec({1.1, -0.9}));
  const auto s = solve_lp(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.x(0) == doctest::Approx(1.1).epsilon(1e-12));
}

TEST_CASE("infeasible LP carries a Farkas certificate") {
  const auto p = QpProblem::linear_program(vec({0}), Matrix(0, 1), Vector(0), mat({{1}, {-1}}), vec({0, -1}));
  const auto s = solve_lp(p);
  REQUIRE(s.status == Status::Infeasible);
  CHECK(s.infeasibility > 0.0);
  const Vector& lam = s.ineq_multipliers;
  CHECK(lam.minCoeff() >= 0.0);
  CHECK(std::abs((p.ineq_lhs.transpose() * lam)(0)) < 1e-12);
  CHECK(p.ineq_rhs.dot(lam) < 0.0);
}

TEST_CASE("unbounded LP is reported") {
  const auto p = QpProblem::linear_program(vec({-1, 0}), Matrix(0, 2), Vector(0), mat({{-1, 0}, {0, 1}, {0, -1}}),
                                           vec({0, 1, 1}));
  CHECK(solve_lp(p).status == Status::Unbounded);
}

TEST_CASE("random LPs match vertex enumeration") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const Index d = 2 + trial % 5;
    Matrix g;
    Vector b;
    random_polytope(rng, d, 3, g, b);
    const Vector c = random_matrix(rng, d, 1).col(0);
    const auto ref = lp_by_vertices(c, g, b);
    REQUIRE(ref.has_value());
    const auto s = solve_lp(QpProblem::linear_program(c, Matrix(0, d), Vector(0), g, b));
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == doctest::Approx(*ref).epsilon(1e-9));
  }
}

TEST_CASE("random infeasible systems yield valid certificates") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 3;
    Matrix g(2 * d + 1, d);
    Vector b(2 * d + 1);
    g.topRows(d) = Matrix::Identity(d, d);
    g.middleRows(d, d) = -Matrix::Identity(d, d);
    b.head(2 * d).setConstant(1.0);
    // a'x >= |a|_1 + 0.5 cannot hold inside the unit box
    const Vector a = random_matrix(rng, d, 1).col(0);
    g.row(2 * d) = -a.transpose();
    b(2 * d) = -(a.cwiseAbs().sum() + 0.5);
    const Matrix e = random_matrix(rng, 1, d);
    const auto p = QpProblem::linear_program(Vector::Zero(d), e, vec({0.0}), g, b);
    const auto s = solve_lp(p);
    REQUIRE(s.status == Status::Infeasible);
    const Vector resid = e.transpose() * s.eq_multipliers + g.transpose() * s.ineq_multipliers;
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(s.ineq_multipliers.minCoeff() >= 0.0);
    CHECK(vec({0.0}).dot(s.eq_multipliers) + b.dot(s.ineq_multipliers) < 0.0);
  }
}

TEST_CASE("singular Hessian is handled and flagged") {
  // min (x - y)^2 + x  s.t. 0 <= x, y <= 1: flat along x = y.
  const auto p = make(mat({{2, -2}, {-2, 2}}), vec({1, 0}), Matrix(0, 2), Vector(0),
                      mat({{1, 0}, {-1, 0}, {0, 1}, {0, -1}}), vec({1, 0, 1, 0}));
  const auto s = solve_qp(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.singular_hessian);
  CHECK(s.objective == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(s.x(0) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(kkt_stationarity(p, s) <= 1e-8);
}

TEST_CASE("iteration cap yields MaxIter") {
  std::mt19937_64 rng(41);
  Matrix g;
  Vector b;
  random_polytope(rng, 6, 10, g, b);
  Options opts;
  opts.max_iterations = 1;
  const auto s = solve_lp(QpProblem::linear_program(random_matrix(rng, 6, 1).col(0), Matrix(0, 6), Vector(0), g, b), opts);
  CHECK(s.status == Status::MaxIter);
}

TEST_CASE("identical input gives identical output") {
  std::mt19937_64 rng(43);
  Matrix g;
  Vector b;
  random_polytope(rng, 4, 6, g, b);
  const Matrix l = random_matrix(rng, 4, 4);
  const auto p = make(l * l.transpose(), random_matrix(rng, 4, 1).col(0), Matrix(0, 4), Vector(0), g, b);
  const auto a = solve_qp(p);
  const auto c = solve_qp(p);
  CHECK(a.x == c.x);
  CHECK(a.ineq_multipliers == c.ineq_multipliers);
  CHECK(a.objective == c.objective);
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(make(mat({{1, 2}, {0, 1}}), vec({0, 0}), Matrix(0, 2), Vector(0), Matrix(0, 2), Vector(0)).validate(),
                  InvalidArgument);
  CHECK_THROWS_AS(make(mat({{-1}}), vec({0}), Matrix(0, 1), Vector(0), Matrix(0, 1), Vector(0)).validate(),
                  InvalidArgument);
  CHECK_THROWS_AS(make(mat({{1}}), vec({0, 0}), Matrix(0, 1), Vector(0), Matrix(0, 1), Vector(0)).validate(),
                  ShapeMismatch);
  CHECK_THROWS_AS(solve_lp(make(mat({{1}}), vec({0}), Matrix(0, 1), Vector(0), Matrix(0, 1), Vector(0))),
                  InvalidArgument);
}

}
