#include "impc/rmpc.hpp"

#include "impc/errors.hpp"

#include <limits>
#include <string>

namespace impc::rmpc {

void ControllerConfig::validate() const {
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (n_max < 1) throw InvalidArgument("n_max must be at least 1");
  const Index n = state_dim();
  const Index m = input_dim();
  if (n == 0 || m == 0) throw ShapeMismatch("gain K must be a nonempty m x n matrix");
  if (state_set.dim() != n || terminal_set.dim() != n)
    throw ShapeMismatch("state and terminal sets must live in the state space");
  if (input_set.dim() != m) throw ShapeMismatch("input set must live in the input space");
  if (cost_weight.rows() != m || cost_weight.cols() != m) throw ShapeMismatch("cost weight must be m x m");
  if ((cost_weight - cost_weight.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidArgument("cost weight must be symmetric");
  if (Eigen::SelfAdjointEigenSolver<Matrix>(cost_weight).eigenvalues().minCoeff() < -1e-12)
    throw InvalidArgument("cost weight must be positive semidefinite");
  if (state_set.is_empty()) throw InvalidArgument("state set is empty");
  if (input_set.is_empty()) throw InvalidArgument("input set is empty");
  if (terminal_set.is_empty()) throw InvalidArgument("terminal set is empty");
}

namespace {

const char* kind_name(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::State: return "state";
    case ConstraintKind::Input: return "input";
    case ConstraintKind::Terminal: return "terminal";
  }
  return "?";
}

}  // namespace

TightenedConstraint tighten_constraints(const tube::TubeTables& tables, const ControllerConfig& cfg, int j,
                                        ConstraintKind kind) {
  if (j < 0 || j > tables.n_max()) throw InvalidArgument("tighten_constraints: step out of range");
  const Polytope& set = kind == ConstraintKind::State   ? cfg.state_set
                        : kind == ConstraintKind::Input ? cfg.input_set
                                                        : cfg.terminal_set;
  TightenedConstraint out;
  out.h = set.h();
  out.weight = kind == ConstraintKind::Input ? Matrix((set.h() * cfg.k_gain).cwiseAbs()) : Matrix(set.h().cwiseAbs());
  out.b = set.b() - out.weight * tables.w_cumulative[static_cast<std::size_t>(j)].radius;
  for (int i = 0; i < j; ++i) out.delta_radii.push_back(tables.delta_radius(j - i - 1));
  if (Polytope(out.h, out.b).is_empty())
    throw EmptyTightened(std::string(kind_name(kind)) + " constraints are empty after tightening at step " +
                         std::to_string(j));
  return out;
}

ConstraintTable::ConstraintTable(const tube::TubeTables& tables, const ControllerConfig& cfg)
    : n_max_(cfg.n_max) {
  if (tables.n_max() < cfg.n_max) throw InvalidArgument("tube tables are shorter than n_max");
  auto make = [&](int j, ConstraintKind kind) {
    Entry e;
    try {
      e.c = tighten_constraints(tables, cfg, j, kind);
    } catch (const EmptyTightened&) {
    }
    return e;
  };
  for (int j = 0; j <= n_max_; ++j) {
    state_.push_back(make(j, ConstraintKind::State));
    terminal_.push_back(j == 0 ? Entry{} : make(j, ConstraintKind::Terminal));
    input_.push_back(j == n_max_ ? Entry{} : make(j, ConstraintKind::Input));
  }
}

const TightenedConstraint& ConstraintTable::get(int j, ConstraintKind kind) const {
  const auto& list = kind == ConstraintKind::State ? state_ : kind == ConstraintKind::Input ? input_ : terminal_;
  if (j < 0 || j >= static_cast<int>(list.size()) || !list[static_cast<std::size_t>(j)].c)
    throw EmptyTightened(std::string(kind_name(kind)) + " constraint unavailable at step " + std::to_string(j));
  return *list[static_cast<std::size_t>(j)].c;
}

bool ConstraintTable::horizon_excluded(int n) const {
  if (n < 1 || n > n_max_) return true;
  for (int j = 0; j <= n; ++j)
    if (!state_[static_cast<std::size_t>(j)].c) return true;
  for (int j = 0; j < n; ++j)
    if (!input_[static_cast<std::size_t>(j)].c) return true;
  return !terminal_[static_cast<std::size_t>(n)].c;
}

namespace {

// Appends rows  h y(j) + weight * sum_i delta_radii[i] s(i) <= b.
void add_tube_rows(Matrix& g, Vector& rhs, Index& row, const TightenedConstraint& c, Index y_offset,
                   const QpLayout& lay) {
  const Index rows = c.h.rows();
  g.block(row, y_offset, rows, c.h.cols()) = c.h;
  for (std::size_t i = 0; i < c.delta_radii.size(); ++i)
    g.block(row, lay.s(static_cast<int>(i)), rows, lay.n + lay.m) = c.weight * c.delta_radii[i];
  rhs.segment(row, rows) = c.b;
  row += rows;
}

}  // namespace

qp::QpProblem assemble_horizon_qp(const Vector& x, int n, const ident::UncertainModel& model,
                                  const ConstraintTable& constraints, const ControllerConfig& cfg) {
  if (n < 1 || n > cfg.n_max) throw InvalidArgument("assemble_horizon_qp: horizon out of range");
  const QpLayout lay{model.state_dim(), model.input_dim(), n};
  if (x.size() != lay.n) throw ShapeMismatch("assemble_horizon_qp: state has the wrong dimension");
  const Index d = lay.dim();
  const Index p = lay.n + lay.m;

  qp::QpProblem qp;
  qp.hessian = Matrix::Zero(d, d);
  qp.linear = Vector::Zero(d);
  const Matrix r2 = 2.0 * cfg.cost_weight;
  const Matrix rk = r2 * cfg.k_gain;
  const Matrix krk = cfg.k_gain.transpose() * rk;
  for (int j = 0; j < n; ++j) {
    qp.hessian.block(lay.v(j), lay.v(j), lay.m, lay.m) += r2;
    qp.hessian.block(lay.v(j), lay.z(j), lay.m, lay.n) -= rk;
    qp.hessian.block(lay.z(j), lay.v(j), lay.n, lay.m) -= rk.transpose();
    qp.hessian.block(lay.z(j), lay.z(j), lay.n, lay.n) += krk;
  }

  qp.eq_lhs = Matrix::Zero(lay.n * (n + 1), d);
  qp.eq_rhs = Vector::Zero(lay.n * (n + 1));
  qp.eq_lhs.block(0, lay.z(0), lay.n, lay.n).setIdentity();
  qp.eq_rhs.head(lay.n) = x;
  for (int j = 0; j < n; ++j) {
    const Index row = lay.n * (j + 1);
    qp.eq_lhs.block(row, lay.z(j + 1), lay.n, lay.n).setIdentity();
    qp.eq_lhs.block(row, lay.z(j), lay.n, lay.n) = -model.a_hat;
    qp.eq_lhs.block(row, lay.v(j), lay.n, lay.m) = -model.b_hat;
  }

  Index rows = 2 * p * n;
  for (int j = 0; j <= n; ++j) {
    if (constraints.horizon_excluded(n)) break;
    rows += constraints.get(j, ConstraintKind::State).h.rows();
    if (j < n) rows += constraints.get(j, ConstraintKind::Input).h.rows();
  }
  const bool excluded = constraints.horizon_excluded(n);
  if (excluded) {
    // Some tightened set is empty: encode the contradiction 0 <= -1.
    qp.ineq_lhs = Matrix::Zero(1, d);
    qp.ineq_rhs = Vector::Constant(1, -1.0);
    return qp;
  }
  rows += constraints.get(n, ConstraintKind::Terminal).h.rows();
  qp.ineq_lhs = Matrix::Zero(rows, d);
  qp.ineq_rhs = Vector::Zero(rows);
  Index row = 0;
  for (int i = 0; i < n; ++i) {
    // xi(i) - s(i) <= 0 and -xi(i) - s(i) <= 0.
    for (int sign : {1, -1}) {
      qp.ineq_lhs.block(row, lay.z(i), lay.n, lay.n) = sign * Matrix::Identity(lay.n, lay.n);
      qp.ineq_lhs.block(row + lay.n, lay.v(i), lay.m, lay.m) = sign * Matrix::Identity(lay.m, lay.m);
      qp.ineq_lhs.block(row, lay.s(i), p, p) = -Matrix::Identity(p, p);
      row += p;
    }
  }
  for (int j = 0; j <= n; ++j) {
    add_tube_rows(qp.ineq_lhs, qp.ineq_rhs, row, constraints.get(j, ConstraintKind::State), lay.z(j), lay);
    if (j < n)
      add_tube_rows(qp.ineq_lhs, qp.ineq_rhs, row, constraints.get(j, ConstraintKind::Input), lay.v(j), lay);
  }
  add_tube_rows(qp.ineq_lhs, qp.ineq_rhs, row, constraints.get(n, ConstraintKind::Terminal), lay.z(n), lay);
  return qp;
}

qp::QpProblem assemble_horizon_qp(const Vector& x, int n, const ident::UncertainModel& model,
                                  const tube::TubeTables& tables, const ControllerConfig& cfg) {
  return assemble_horizon_qp(x, n, model, ConstraintTable(tables, cfg), cfg);
}

Controller::Controller(ident::UncertainModel model, tube::TubeTables tables, ControllerConfig cfg)
    : model_(std::move(model)), tables_(std::move(tables)), cfg_(std::move(cfg)), constraints_(tables_, cfg_) {
  model_.validate();
  cfg_.validate();
  if (model_.state_dim() != cfg_.state_dim() || model_.input_dim() != cfg_.input_dim())
    throw ShapeMismatch("controller: model and gain dimensions differ");
}

qp::QpProblem Controller::horizon_qp(const Vector& x, int n) const {
  return assemble_horizon_qp(x, n, model_, constraints_, cfg_);
}

qp::QpSolution Controller::check_horizon(const Vector& x, int n) const {
  qp::Options opts;
  opts.feasibility_only = true;
  return qp::solve_qp(horizon_qp(x, n), opts);
}

std::optional<int> Controller::feasible_horizon(const Vector& x, int hint) const {
  if (hint >= 1 && hint <= cfg_.n_max && !constraints_.horizon_excluded(hint) && check_horizon(x, hint).optimal())
    return hint;
  for (int n = 1; n <= cfg_.n_max; ++n) {
    if (n == hint || constraints_.horizon_excluded(n)) continue;
    if (check_horizon(x, n).optimal()) return n;
  }
  return std::nullopt;
}

HorizonSolution Controller::solve(const Vector& x) const {
  const QpLayout base{model_.state_dim(), model_.input_dim(), 0};
  HorizonSolution best;
  best.j_star = std::numeric_limits<double>::infinity();
  bool solver_trouble = false;
  for (int n = 1; n <= cfg_.n_max; ++n) {
    if (constraints_.horizon_excluded(n)) {
      best.statuses.push_back(qp::Status::Infeasible);
      continue;
    }
    const auto sol = qp::solve_qp(horizon_qp(x, n));
    best.statuses.push_back(sol.status);
    if (sol.status == qp::Status::Infeasible) continue;
    if (!sol.optimal()) {
      solver_trouble = true;
      continue;
    }
    const double cost = cfg_.gamma * n + sol.objective;
    if (cost < best.j_star) {
      const QpLayout lay{base.n, base.m, n};
      best.n_star = n;
      best.j_star = cost;
      best.z_seq.clear();
      best.v_seq.clear();
      for (int j = 0; j <= n; ++j) best.z_seq.push_back(sol.x.segment(lay.z(j), lay.n));
      for (int j = 0; j < n; ++j) best.v_seq.push_back(sol.x.segment(lay.v(j), lay.m));
    }
  }
  if (best.n_star == 0) {
    if (solver_trouble) throw SolverFailure("variable-horizon solve: no horizon reached a verdict");
    throw AllInfeasible("no horizon length admits a feasible solution");
  }
  return best;
}

HorizonSolution solve_variable_horizon(const Vector& x, const ident::UncertainModel& model,
                                       const tube::TubeTables& tables, const ControllerConfig& cfg) {
  return Controller(model, tables, cfg).solve(x);
}

Vector control_step(const Vector& x, const HorizonSolution& sol, const ControllerConfig& cfg) {
  if (sol.z_seq.empty() || sol.v_seq.empty()) throw InvalidArgument("control_step: empty solution");
  if (x.size() != sol.z_seq.front().size()) throw ShapeMismatch("control_step: state has the wrong dimension");
  return cfg.k_gain * (x - sol.z_seq.front()) + sol.v_seq.front();
}

double tube_inclusion_slack(const HorizonSolution& sol, const tube::TubeTables& tables,
                            const ControllerConfig& cfg) {
  const int n = sol.n_star;
  std::vector<Vector> xi;
  for (int i = 0; i < n; ++i) {
    Vector v(sol.z_seq[static_cast<std::size_t>(i)].size() + sol.v_seq[static_cast<std::size_t>(i)].size());
    v << sol.z_seq[static_cast<std::size_t>(i)], sol.v_seq[static_cast<std::size_t>(i)];
    xi.push_back(std::move(v));
  }
  double slack = std::numeric_limits<double>::infinity();
  auto check = [&](const Polytope& set, const Vector& center, const Vector& radius) {
    const Vector s = set.b() - set.h() * center - set.h().cwiseAbs() * radius;
    if (s.size() > 0) slack = std::min(slack, s.minCoeff());
  };
  for (int j = 0; j <= n; ++j) {
    const Vector r = tube::tube_box(tables, xi, j).radius;
    check(cfg.state_set, sol.z_seq[static_cast<std::size_t>(j)], r);
    if (j < n) {
      // v (+) K B: support in direction h is h'v + |h'K| r.
      const Vector s = cfg.input_set.b() - cfg.input_set.h() * sol.v_seq[static_cast<std::size_t>(j)] -
                       (cfg.input_set.h() * cfg.k_gain).cwiseAbs() * r;
      if (s.size() > 0) slack = std::min(slack, s.minCoeff());
    }
    if (j == n) check(cfg.terminal_set, sol.z_seq[static_cast<std::size_t>(j)], r);
  }
  return slack;
}

}  // namespace impc::rmpc
