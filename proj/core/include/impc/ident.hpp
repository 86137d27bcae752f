#pragma once

#include "impc/linalg.hpp"
#include "impc/setalg.hpp"

#include <filesystem>
#include <vector>

namespace impc::ident {

/// Recorded input-state trajectory x(0..T), u(0..T-1) with the componentwise
/// disturbance bound w_bar.
struct Dataset {
  std::vector<Vector> states;
  std::vector<Vector> inputs;
  Vector w_bar;

  Index state_dim() const { return states.empty() ? 0 : states.front().size(); }
  Index input_dim() const { return inputs.empty() ? 0 : inputs.front().size(); }
  Index length() const { return static_cast<Index>(inputs.size()); }

  /// Throws ShapeMismatch / InvalidArgument on inconsistent lengths or a negative bound.
  void validate() const;
};

struct DataMatrices {
  Matrix x_plus;   // n x T
  Matrix x_minus;  // n x T
  Matrix u_minus;  // m x T
  Matrix phi;      // (n+m) x T
  Index rank = 0;
  bool rank_condition = false;
};

/// Relative singular-value threshold used for every rank decision.
inline constexpr double kRankTolerance = 1e-8;

/// Throws RankDeficient when rank(phi) < n + m.
DataMatrices build_data_matrices(const Dataset& d);

/// Interval model [A B] in [A_hat B_hat] (+) [-Delta, Delta] plus the disturbance bound.
struct UncertainModel {
  Matrix a_hat;
  Matrix b_hat;
  Matrix delta_a;
  Matrix delta_b;
  Vector w_bar;

  Index state_dim() const noexcept { return a_hat.rows(); }
  Index input_dim() const noexcept { return b_hat.cols(); }
  Matrix theta_hat() const;
  Matrix delta_s() const;
  setalg::IntervalMatrix theta_interval() const;
  void validate() const;
};

/// Data-driven bound: center X+ pinv(Phi), radius w_bar 1' |pinv(Phi)|.
UncertainModel dd_interval_bounds(const Dataset& d);

/// Set-membership bound: elementwise extremes of the parameters consistent
/// with the data, each obtained by a linear program. Center is the midpoint.
UncertainModel sm_interval_bounds(const Dataset& d);

/// Reads `k,x_1..x_n,u_1..u_m` CSV (the final row may leave inputs empty).
Dataset read_dataset_csv(const std::filesystem::path& path, const Vector& w_bar);
void write_dataset_csv(const std::filesystem::path& path, const Dataset& d);

}  // namespace impc::ident
