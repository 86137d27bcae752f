#include "impc/ident.hpp"

#include "impc/errors.hpp"
#include "impc/qpsolve.hpp"

#include <string>

namespace impc::ident {

void Dataset::validate() const {
  if (states.size() != inputs.size() + 1)
    throw ShapeMismatch("Dataset: expected T+1 states for T inputs, got " + std::to_string(states.size()) +
                        " states and " + std::to_string(inputs.size()) + " inputs");
  if (inputs.empty()) throw InvalidArgument("Dataset: trajectory is empty");
  const Index n = state_dim();
  const Index m = input_dim();
  for (const auto& x : states)
    if (x.size() != n) throw ShapeMismatch("Dataset: state dimensions differ");
  for (const auto& u : inputs)
    if (u.size() != m) throw ShapeMismatch("Dataset: input dimensions differ");
  if (w_bar.size() != n) throw ShapeMismatch("Dataset: w_bar has the wrong dimension");
  if (w_bar.size() > 0 && w_bar.minCoeff() < 0.0) throw InvalidArgument("Dataset: w_bar must be nonnegative");
}

DataMatrices build_data_matrices(const Dataset& d) {
  d.validate();
  const Index n = d.state_dim();
  const Index m = d.input_dim();
  const Index t = d.length();
  DataMatrices out;
  out.x_plus.resize(n, t);
  out.x_minus.resize(n, t);
  out.u_minus.resize(m, t);
  for (Index k = 0; k < t; ++k) {
    out.x_minus.col(k) = d.states[static_cast<std::size_t>(k)];
    out.x_plus.col(k) = d.states[static_cast<std::size_t>(k + 1)];
    out.u_minus.col(k) = d.inputs[static_cast<std::size_t>(k)];
  }
  out.phi = vstack(out.x_minus, out.u_minus);
  out.rank = numerical_rank(out.phi, kRankTolerance);
  out.rank_condition = out.rank == n + m;
  if (!out.rank_condition) throw RankDeficient(out.rank, n + m);
  return out;
}

Matrix UncertainModel::theta_hat() const {
  Matrix out(a_hat.rows(), a_hat.cols() + b_hat.cols());
  out << a_hat, b_hat;
  return out;
}

Matrix UncertainModel::delta_s() const {
  Matrix out(delta_a.rows(), delta_a.cols() + delta_b.cols());
  out << delta_a, delta_b;
  return out;
}

setalg::IntervalMatrix UncertainModel::theta_interval() const {
  return setalg::IntervalMatrix(theta_hat(), delta_s());
}

void UncertainModel::validate() const {
  const Index n = a_hat.rows();
  const Index m = b_hat.cols();
  if (a_hat.cols() != n || b_hat.rows() != n || delta_a.rows() != n || delta_a.cols() != n ||
      delta_b.rows() != n || delta_b.cols() != m || w_bar.size() != n)
    throw ShapeMismatch("UncertainModel: inconsistent shapes");
  if ((n > 0 && delta_a.minCoeff() < 0.0) || (delta_b.size() > 0 && delta_b.minCoeff() < 0.0) ||
      (n > 0 && w_bar.minCoeff() < 0.0))
    throw InvalidArgument("UncertainModel: radii must be nonnegative");
}

namespace {

UncertainModel split(const Matrix& center, const Matrix& radius, Index n, const Vector& w_bar) {
  UncertainModel model;
  model.a_hat = center.leftCols(n);
  model.b_hat = center.rightCols(center.cols() - n);
  model.delta_a = radius.leftCols(n);
  model.delta_b = radius.rightCols(radius.cols() - n);
  model.w_bar = w_bar;
  return model;
}

}  // namespace

UncertainModel dd_interval_bounds(const Dataset& d) {
  const DataMatrices dm = build_data_matrices(d);
  const Matrix pinv = pseudoinverse(dm.phi, kRankTolerance);
  const Matrix center = dm.x_plus * pinv;
  const Matrix radius = d.w_bar * (Vector::Ones(d.length()).transpose() * pinv.cwiseAbs());
  return split(center, radius, d.state_dim(), d.w_bar);
}

UncertainModel sm_interval_bounds(const Dataset& d) {
  d.validate();
  const Index n = d.state_dim();
  const Index m = d.input_dim();
  const Index t = d.length();
  const Index p = n + m;
  Matrix phi_t(t, p);
  for (Index k = 0; k < t; ++k) {
    phi_t.row(k).head(n) = d.states[static_cast<std::size_t>(k)].transpose();
    phi_t.row(k).tail(m) = d.inputs[static_cast<std::size_t>(k)].transpose();
  }
  Matrix ineq(2 * t, p);
  ineq << phi_t, -phi_t;

  Matrix center(n, p);
  Matrix radius(n, p);
  for (Index i = 0; i < n; ++i) {
    Vector rhs(2 * t);
    for (Index k = 0; k < t; ++k) {
      const double next = d.states[static_cast<std::size_t>(k + 1)](i);
      rhs(k) = next + d.w_bar(i);
      rhs(t + k) = -(next - d.w_bar(i));
    }
    for (Index c = 0; c < p; ++c) {
      double bounds[2] = {0.0, 0.0};
      for (int dir = 0; dir < 2; ++dir) {
        Vector cost = Vector::Zero(p);
        cost(c) = dir == 0 ? 1.0 : -1.0;
        auto lp = qp::QpProblem::linear_program(cost, Matrix(0, p), Vector(0), ineq, rhs);
        const auto sol = qp::solve_lp(lp);
        switch (sol.status) {
          case qp::Status::Optimal: break;
          case qp::Status::Infeasible:
            throw InconsistentData("set-membership LP for state row " + std::to_string(i) +
                                   " is infeasible: data inconsistent with w_bar");
          case qp::Status::Unbounded: throw UnboundedParameter(i, c);
          case qp::Status::MaxIter: throw SolverFailure("set-membership LP hit the iteration cap");
        }
        bounds[dir] = sol.x(c);
      }
      center(i, c) = 0.5 * (bounds[0] + bounds[1]);
      radius(i, c) = std::max(0.0, 0.5 * (bounds[1] - bounds[0]));
    }
  }
  return split(center, radius, n, d.w_bar);
}

}  // namespace impc::ident
