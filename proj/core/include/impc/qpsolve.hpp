#pragma once

#include "impc/linalg.hpp"

#include <string_view>

namespace impc::qp {

/// Dense convex quadratic program
///
///   minimize    0.5 x'Hx + c'x
///   subject to  E x = f,  G x <= h.
///
/// An empty `eq_lhs`/`ineq_lhs` (zero rows) means no constraints of that kind;
/// the column count must still match the dimension when rows are present.
struct QpProblem {
  Matrix hessian;
  Vector linear;
  Matrix eq_lhs;
  Vector eq_rhs;
  Matrix ineq_lhs;
  Vector ineq_rhs;

  Index dim() const noexcept { return linear.size(); }
  Index num_eq() const noexcept { return eq_rhs.size(); }
  Index num_ineq() const noexcept { return ineq_rhs.size(); }

  /// Throws ShapeMismatch on inconsistent shapes and InvalidArgument when the
  /// Hessian is not symmetric (1e-12) or not positive semidefinite.
  void validate() const;

  /// Linear program with the given constraints (zero Hessian).
  static QpProblem linear_program(Vector c, Matrix eq_lhs, Vector eq_rhs, Matrix ineq_lhs,
                                  Vector ineq_rhs);
};

enum class Status { Optimal, Infeasible, Unbounded, MaxIter };

std::string_view to_string(Status s) noexcept;

struct Options {
  double feasibility_tol = 1e-8;
  double stationarity_tol = 1e-8;
  /// Per-phase iteration cap; 0 selects 10 * (dim + num_ineq).
  int max_iterations = 0;
  /// Stop after phase 1 and return the first feasible point found.
  bool feasibility_only = false;
};

struct QpSolution {
  Vector x;
  double objective = 0.0;
  Status status = Status::MaxIter;
  /// At Optimal: KKT multipliers (H x + c + E'mu + G'lambda = 0, lambda >= 0).
  /// At Infeasible: a Farkas certificate (E'mu + G'lambda = 0, lambda >= 0,
  /// f'mu + h'lambda < 0).
  Vector eq_multipliers;
  Vector ineq_multipliers;
  /// Optimal value of the phase-1 problem (largest violation that cannot be
  /// removed); positive when Infeasible.
  double infeasibility = 0.0;
  int phase1_iterations = 0;
  int phase2_iterations = 0;
  /// The Hessian was singular; steps along zero-curvature directions were taken.
  bool singular_hessian = false;

  bool optimal() const noexcept { return status == Status::Optimal; }
};

/// Primal active-set solver with a phase-1 LP for the initial feasible point.
/// Deterministic: ties are broken toward the lowest constraint index and
/// Bland's rule takes over after repeated degenerate steps.
QpSolution solve_qp(const QpProblem& p, const Options& opts = {});

/// As solve_qp, but requires a zero Hessian.
QpSolution solve_lp(const QpProblem& p, const Options& opts = {});

}  // namespace impc::qp
