#pragma once

#include "impc/ident.hpp"
#include "impc/setalg.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace impc::tube {

/// Closed-loop interval  A_hat + B_hat K (+) [-Delta_K, Delta_K]  with
/// Delta_K = Delta_A + Delta_B |K|.
struct ClosedLoopInterval {
  Matrix a_k_hat;
  Matrix delta_k;

  static ClosedLoopInterval from(const ident::UncertainModel& model, const Matrix& k_gain);
  setalg::IntervalMatrix interval() const { return setalg::IntervalMatrix(a_k_hat, delta_k); }
  Index dim() const noexcept { return a_k_hat.rows(); }
};

/// Offline tube ingredients for steps j = 0..n_max.
struct TubeTables {
  /// Zero-centered n x (n+m) intervals, j = 0..n_max-1.
  std::vector<setalg::IntervalMatrix> delta_terms;
  /// Disturbance images, j = 0..n_max-1.
  std::vector<setalg::Box> w_terms;
  /// Partial sums of w_terms, j = 0..n_max (entry 0 is the zero box).
  std::vector<setalg::Box> w_cumulative;

  int n_max() const noexcept { return static_cast<int>(delta_terms.size()); }
  Index state_dim() const { return delta_terms.empty() ? 0 : delta_terms.front().rows(); }
  /// Radius of delta_terms[j].
  const Matrix& delta_radius(int j) const { return delta_terms.at(static_cast<std::size_t>(j)).radius(); }
};

TubeTables precompute_tube(const ident::UncertainModel& model, const Matrix& k_gain, int n_max);

/// Radii of box(T^j(I_Delta)) for j = 0..n_max-1 from the scalar recursion
///   F_0 = Delta_S,  F_{j+1} = Delta_K sum_{i<=j} |A_K^{j-i}| F_i,
/// checked against the closed form F_j = Delta_K P_j Delta_S. Throws
/// std::logic_error when the two disagree by more than 1e-10.
std::vector<Matrix> recursion_radii(const ClosedLoopInterval& cl, const Matrix& delta_s, int n_max);

/// Box bound of the tube cross-section B_k(j) for a concrete nominal
/// sequence xi(i) = (z(i), v(i)), i < j.
setalg::Box tube_box(const TubeTables& tables, const std::vector<Vector>& xi, int j);

/// Content hash of (model, K, n_max), FNV-1a over the raw bytes.
std::uint64_t cache_key(const ident::UncertainModel& model, const Matrix& k_gain, int n_max);

/// JSON serialization; doubles are stored as exact hexadecimal bit patterns.
void save_tables(const std::filesystem::path& path, std::uint64_t key, const TubeTables& tables);
/// Returns nullopt if the file is missing or was written for another key.
std::optional<TubeTables> load_tables(const std::filesystem::path& path, std::uint64_t key);

/// Loads `dir/tube_<key>.json` when present, otherwise computes and stores it.
TubeTables cached_tube(const std::filesystem::path& dir, const ident::UncertainModel& model,
                       const Matrix& k_gain, int n_max);

}  // namespace impc::tube
