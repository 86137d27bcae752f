#pragma once

#include "impc/linalg.hpp"
#include "impc/polytope.hpp"
#include "impc/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace impc::harness {

enum class Scheme { DataDriven, SetMembership };
enum class DisturbanceLaw { Uniform, Vertex };

std::string to_string(Scheme s);
std::string to_string(DisturbanceLaw l);

struct ExperimentConfig {
  // Plant used for data generation and closed-loop simulation.
  std::optional<Matrix> a_true;
  std::optional<Matrix> b_true;

  // Dataset: read from `dataset_path` when set, otherwise generated.
  std::optional<std::filesystem::path> dataset_path;
  int data_length = 50;
  double excitation_scale = 0.8;
  Vector data_x0;

  Vector w_bar;
  DisturbanceLaw disturbance_law = DisturbanceLaw::Uniform;
  double epsilon_w = 1.0;

  Scheme scheme = Scheme::DataDriven;

  Polytope state_set;
  Polytope input_set;
  Matrix k_gain;
  Matrix cost_weight;
  double gamma = 1.0;
  int n_max = 10;
  synth::TerminalMethod terminal = synth::TerminalMethod::Maximal;
  double eps = 1e-3;

  std::vector<int> grid{30, 10};
  int fd_datasets = 50;
  int runs = 100;
  int steps = 30;
  std::vector<Vector> initial_states;
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> cache_dir;

  Index state_dim() const noexcept { return k_gain.cols(); }
  Index input_dim() const noexcept { return k_gain.rows(); }
  /// Disturbance bound actually in force: epsilon_w * w_bar.
  Vector effective_w_bar() const { return epsilon_w * w_bar; }
  bool has_true_system() const noexcept { return a_true.has_value() && b_true.has_value(); }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses a JSON config. Relative dataset/cache paths are resolved against `base_dir`.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace impc::harness
