#pragma once

#include "impc/config.hpp"
#include "impc/ident.hpp"
#include "impc/rmpc.hpp"
#include "impc/synth.hpp"
#include "impc/tube.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace impc::harness {

/// Independent random stream for (master seed, purpose, index).
enum class StreamPurpose : std::uint64_t { Dataset = 1, Disturbance = 2, Plant = 3, Sampling = 4 };
std::mt19937_64 make_stream(std::uint64_t master, StreamPurpose purpose, std::uint64_t index);

/// Disturbance drawn from [-w_bar, w_bar]: uniform, or uniformly among the vertices.
Vector sample_disturbance(std::mt19937_64& rng, const Vector& w_bar, DisturbanceLaw law);

/// Simulates the true plant under uniform excitation on 0.8 of the input box.
/// Throws InvalidArgument without a true system and RankDeficient when the
/// recorded data do not satisfy the rank condition.
ident::Dataset generate_dataset(const ExperimentConfig& cfg, std::uint64_t dataset_index);

/// Dataset from the configured file, or generated with the given index.
ident::Dataset obtain_dataset(const ExperimentConfig& cfg, std::uint64_t dataset_index);

ident::UncertainModel identify(const ExperimentConfig& cfg, const ident::Dataset& data);

/// Model, synthesis artifacts and controller built from one dataset.
struct Pipeline {
  ident::UncertainModel model;
  synth::SynthesisReport synthesis;
  std::shared_ptr<const rmpc::Controller> controller;

  const rmpc::ControllerConfig& controller_config() const { return controller->config(); }
  const tube::TubeTables& tables() const { return controller->tables(); }
};

Pipeline build_pipeline(const ExperimentConfig& cfg, const ident::Dataset& data);
Pipeline build_pipeline(const ExperimentConfig& cfg, const ident::UncertainModel& model);

struct StepRecord {
  int k = 0;
  Vector x;
  Vector u;
  int n_star = 0;
  double j_star = 0.0;
  double solve_ms = 0.0;
  bool in_terminal = false;
};

struct RunRecord {
  std::vector<StepRecord> steps;
  /// State after the last applied input.
  Vector final_state;
  int constraint_violations = 0;
  bool infeasible = false;
  /// First k with x(k) in X_f, or -1.
  int terminal_entry = -1;
  std::string failure;
};

/// Plant matrices used by the simulation; defaults to the configured true system.
struct Plant {
  Matrix a;
  Matrix b;
};

/// Closed loop from x0 for cfg.steps steps with disturbances from stream `run_index`.
/// Throws InfeasibleStart if the first solve fails.
RunRecord simulate(const Pipeline& pipeline, const ExperimentConfig& cfg, const Plant& plant, const Vector& x0,
                   std::uint64_t run_index);
RunRecord simulate(const Pipeline& pipeline, const ExperimentConfig& cfg, const Vector& x0,
                   std::uint64_t run_index);
/// Builds the pipeline from dataset 0 and simulates run 0.
RunRecord simulate(const ExperimentConfig& cfg, const Vector& x0);

/// Closed-loop properties that the theory guarantees for a run.
struct RunProperties {
  bool cost_decrease = true;
  double worst_cost_decrease_excess = -1e300;
  bool terminal_entry_in_time = true;
  int terminal_entry_bound = 0;
  bool horizon_tail = true;
  bool tail_in_x_infinity = true;
  int tail_start = -1;

  bool all() const noexcept { return cost_decrease && terminal_entry_in_time && horizon_tail && tail_in_x_infinity; }
};

RunProperties check_run(const RunRecord& run, const Pipeline& pipeline, double gamma, int tail_delay = 5,
                        double cost_tol = 1e-7);

/// Plant drawn from the identified interval: uniformly, or at a random vertex.
Plant sample_plant(const ident::UncertainModel& model, std::mt19937_64& rng, bool vertex);

}  // namespace impc::harness
