#pragma once

#include "impc/ident.hpp"
#include "impc/polytope.hpp"
#include "impc/qpsolve.hpp"
#include "impc/tube.hpp"

#include <optional>
#include <vector>

namespace impc::rmpc {

struct ControllerConfig {
  double gamma = 1.0;
  int n_max = 10;
  Polytope state_set;
  Polytope input_set;
  Polytope terminal_set;
  Matrix k_gain;
  /// Weight R of the stage cost ||v - K z||_R^2.
  Matrix cost_weight;

  Index state_dim() const noexcept { return k_gain.cols(); }
  Index input_dim() const noexcept { return k_gain.rows(); }
  /// Throws InvalidArgument / ShapeMismatch; checks the polytopes are nonempty.
  void validate() const;
};

enum class ConstraintKind { State, Input, Terminal };

/// Constraint  h y + weight * sum_{i<j} delta_radii[i] s(i) <= b  at step j,
/// where y is z(j) (State, Terminal) or v(j) (Input) and s(i) >= |xi(i)|.
struct TightenedConstraint {
  Matrix h;
  Vector b;
  /// |H| for state-like kinds, |H K| for inputs.
  Matrix weight;
  /// delta_radii[i] = Delta_I(j - i - 1), i = 0..j-1.
  std::vector<Matrix> delta_radii;
};

/// Tightens the selected set by B^W(j). Throws EmptyTightened if the result is empty.
TightenedConstraint tighten_constraints(const tube::TubeTables& tables, const ControllerConfig& cfg, int j,
                                        ConstraintKind kind);

/// Index bookkeeping for the decision vector (z(0..N), v(0..N-1), s(0..N-1)).
struct QpLayout {
  Index n = 0;
  Index m = 0;
  int horizon = 0;

  Index z(int j) const noexcept { return j * n; }
  Index v(int j) const noexcept { return (horizon + 1) * n + j * m; }
  Index s(int i) const noexcept { return (horizon + 1) * n + horizon * m + i * (n + m); }
  Index dim() const noexcept { return (horizon + 1) * n + horizon * (m + n + m); }
};

/// Precomputed tightened constraints for every step; reused across QP builds.
class ConstraintTable {
 public:
  ConstraintTable(const tube::TubeTables& tables, const ControllerConfig& cfg);

  const TightenedConstraint& get(int j, ConstraintKind kind) const;
  /// Some constraint needed by horizon n is empty after tightening.
  bool horizon_excluded(int n) const;

 private:
  struct Entry {
    std::optional<TightenedConstraint> c;
  };
  std::vector<Entry> state_, input_, terminal_;
  int n_max_ = 0;
};

qp::QpProblem assemble_horizon_qp(const Vector& x, int n, const ident::UncertainModel& model,
                                  const tube::TubeTables& tables, const ControllerConfig& cfg);
qp::QpProblem assemble_horizon_qp(const Vector& x, int n, const ident::UncertainModel& model,
                                  const ConstraintTable& constraints, const ControllerConfig& cfg);

struct HorizonSolution {
  int n_star = 0;
  std::vector<Vector> v_seq;
  std::vector<Vector> z_seq;
  double j_star = 0.0;
  /// Per horizon n = 1..n_max: solver status of its QP.
  std::vector<qp::Status> statuses;
};

/// Everything the online controller needs, built once per model.
class Controller {
 public:
  Controller(ident::UncertainModel model, tube::TubeTables tables, ControllerConfig cfg);

  const ident::UncertainModel& model() const noexcept { return model_; }
  const tube::TubeTables& tables() const noexcept { return tables_; }
  const ControllerConfig& config() const noexcept { return cfg_; }
  const ConstraintTable& constraints() const noexcept { return constraints_; }

  qp::QpProblem horizon_qp(const Vector& x, int n) const;
  /// Solves every horizon and returns the minimizer of gamma n + QP objective
  /// (ties toward smaller n). Throws AllInfeasible.
  HorizonSolution solve(const Vector& x) const;
  /// Horizon with a feasible QP, trying `hint` first; nullopt if none.
  std::optional<int> feasible_horizon(const Vector& x, int hint = 0) const;
  /// Phase-1 result for a single horizon (feasibility only).
  qp::QpSolution check_horizon(const Vector& x, int n) const;

 private:
  ident::UncertainModel model_;
  tube::TubeTables tables_;
  ControllerConfig cfg_;
  ConstraintTable constraints_;
};

HorizonSolution solve_variable_horizon(const Vector& x, const ident::UncertainModel& model,
                                       const tube::TubeTables& tables, const ControllerConfig& cfg);

/// u = K (x - z*(0)) + v*(0).
Vector control_step(const Vector& x, const HorizonSolution& sol, const ControllerConfig& cfg);

/// Smallest slack of the tube inclusions z(j) (+) B(j) in X, v(j) (+) K B(j) in U
/// and z(N) (+) B(N) in X_f, evaluated with the actual |xi| of the solution.
double tube_inclusion_slack(const HorizonSolution& sol, const tube::TubeTables& tables,
                            const ControllerConfig& cfg);

}  // namespace impc::rmpc
