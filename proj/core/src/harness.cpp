#include "impc/harness.hpp"

#include "impc/errors.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace impc::harness {

std::mt19937_64 make_stream(std::uint64_t master, StreamPurpose purpose, std::uint64_t index) {
  const auto p = static_cast<std::uint64_t>(purpose);
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Vector sample_disturbance(std::mt19937_64& rng, const Vector& w_bar, DisturbanceLaw law) {
  Vector w(w_bar.size());
  if (law == DisturbanceLaw::Uniform) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (Index i = 0; i < w.size(); ++i) w(i) = w_bar(i) * unit(rng);
  } else {
    std::bernoulli_distribution coin(0.5);
    for (Index i = 0; i < w.size(); ++i) w(i) = coin(rng) ? w_bar(i) : -w_bar(i);
  }
  return w;
}

ident::Dataset generate_dataset(const ExperimentConfig& cfg, std::uint64_t dataset_index) {
  if (!cfg.has_true_system()) throw InvalidArgument("generate_dataset: no true system configured");
  auto rng = make_stream(cfg.seed, StreamPurpose::Dataset, dataset_index);
  const setalg::Box u_box = cfg.input_set.bounding_box();
  const Vector w_bar = cfg.effective_w_bar();
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  ident::Dataset d;
  d.w_bar = w_bar;
  Vector x = cfg.data_x0;
  d.states.push_back(x);
  for (int k = 0; k < cfg.data_length; ++k) {
    Vector u(u_box.dim());
    for (Index i = 0; i < u.size(); ++i)
      u(i) = u_box.center(i) + cfg.excitation_scale * u_box.radius(i) * unit(rng);
    const Vector w = sample_disturbance(rng, w_bar, DisturbanceLaw::Uniform);
    x = *cfg.a_true * x + *cfg.b_true * u + w;
    d.inputs.push_back(u);
    d.states.push_back(x);
  }
  ident::build_data_matrices(d);  // rank check
  return d;
}

ident::Dataset obtain_dataset(const ExperimentConfig& cfg, std::uint64_t dataset_index) {
  if (cfg.dataset_path) return ident::read_dataset_csv(*cfg.dataset_path, cfg.effective_w_bar());
  return generate_dataset(cfg, dataset_index);
}

ident::UncertainModel identify(const ExperimentConfig& cfg, const ident::Dataset& data) {
  return cfg.scheme == Scheme::DataDriven ? ident::dd_interval_bounds(data) : ident::sm_interval_bounds(data);
}

Pipeline build_pipeline(const ExperimentConfig& cfg, const ident::UncertainModel& model) {
  Pipeline p;
  p.model = model;
  p.synthesis = synth::synthesize(model, cfg.k_gain, cfg.state_set, cfg.input_set, cfg.terminal, cfg.eps);
  rmpc::ControllerConfig cc;
  cc.gamma = cfg.gamma;
  cc.n_max = cfg.n_max;
  cc.state_set = cfg.state_set;
  cc.input_set = cfg.input_set;
  cc.terminal_set = p.synthesis.terminal_set;
  cc.k_gain = cfg.k_gain;
  cc.cost_weight = cfg.cost_weight;
  auto tables = cfg.cache_dir ? tube::cached_tube(*cfg.cache_dir, model, cfg.k_gain, cfg.n_max)
                              : tube::precompute_tube(model, cfg.k_gain, cfg.n_max);
  // Independent route to the same radii; a mismatch means the tables cannot be trusted.
  const auto radii = tube::recursion_radii(tube::ClosedLoopInterval::from(model, cfg.k_gain), model.delta_s(),
                                           cfg.n_max);
  for (int j = 0; j < cfg.n_max; ++j) {
    const double diff = max_abs_diff(radii[static_cast<std::size_t>(j)], tables.delta_radius(j));
    if (diff > 1e-10)
      throw std::logic_error("tube tables disagree with the scalar recursion at step " + std::to_string(j) +
                             " by " + std::to_string(diff));
  }
  p.controller = std::make_shared<const rmpc::Controller>(model, std::move(tables), std::move(cc));
  return p;
}

Pipeline build_pipeline(const ExperimentConfig& cfg, const ident::Dataset& data) {
  return build_pipeline(cfg, identify(cfg, data));
}

RunRecord simulate(const Pipeline& pipeline, const ExperimentConfig& cfg, const Plant& plant, const Vector& x0,
                   std::uint64_t run_index) {
  const auto& ctl = *pipeline.controller;
  const auto& cc = ctl.config();
  if (x0.size() != cc.state_dim()) throw ShapeMismatch("simulate: initial state has the wrong dimension");
  auto rng = make_stream(cfg.seed, StreamPurpose::Disturbance, run_index);
  const Vector w_bar = cfg.effective_w_bar();

  RunRecord run;
  Vector x = x0;
  auto note_state = [&](const Vector& s, int k) {
    if (!cc.state_set.contains(s, 1e-9)) ++run.constraint_violations;
    const bool in_terminal = cc.terminal_set.contains(s, 1e-9);
    if (in_terminal && run.terminal_entry < 0) run.terminal_entry = k;
    return in_terminal;
  };
  for (int k = 0; k < cfg.steps; ++k) {
    StepRecord step;
    step.k = k;
    step.x = x;
    step.in_terminal = note_state(x, k);
    rmpc::HorizonSolution sol;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      sol = ctl.solve(x);
    } catch (const AllInfeasible& e) {
      if (k == 0) throw InfeasibleStart("initial state is outside the feasible domain");
      run.infeasible = true;
      run.failure = "step " + std::to_string(k) + ": " + e.what();
      break;
    }
    step.solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    step.u = rmpc::control_step(x, sol, cc);
    step.n_star = sol.n_star;
    step.j_star = sol.j_star;
    if (!cc.input_set.contains(step.u, 1e-9)) ++run.constraint_violations;
    const Vector w = sample_disturbance(rng, w_bar, cfg.disturbance_law);
    x = plant.a * x + plant.b * step.u + w;
    run.steps.push_back(std::move(step));
  }
  run.final_state = x;
  if (!run.infeasible) note_state(x, cfg.steps);
  return run;
}

RunRecord simulate(const Pipeline& pipeline, const ExperimentConfig& cfg, const Vector& x0,
                   std::uint64_t run_index) {
  if (!cfg.has_true_system()) throw InvalidArgument("simulate: no true system configured");
  return simulate(pipeline, cfg, Plant{*cfg.a_true, *cfg.b_true}, x0, run_index);
}

RunRecord simulate(const ExperimentConfig& cfg, const Vector& x0) {
  const Pipeline p = build_pipeline(cfg, obtain_dataset(cfg, 0));
  return simulate(p, cfg, x0, 0);
}

RunProperties check_run(const RunRecord& run, const Pipeline& pipeline, double gamma, int tail_delay,
                        double cost_tol) {
  RunProperties out;
  const auto& steps = run.steps;
  if (steps.empty()) return out;
  for (std::size_t k = 0; k + 1 < steps.size(); ++k) {
    if (steps[k].n_star > 1) {
      const double excess = steps[k + 1].j_star - (steps[k].j_star - gamma);
      out.worst_cost_decrease_excess = std::max(out.worst_cost_decrease_excess, excess);
      if (excess > cost_tol) out.cost_decrease = false;
    } else {
      if (steps[k + 1].n_star != 1 || std::abs(steps[k + 1].j_star - gamma) > cost_tol) out.horizon_tail = false;
    }
  }
  out.terminal_entry_bound = static_cast<int>(std::floor(steps.front().j_star / gamma)) + 1;
  out.terminal_entry_in_time = run.terminal_entry >= 0 && run.terminal_entry <= out.terminal_entry_bound;
  if (run.terminal_entry >= 0) {
    out.tail_start = run.terminal_entry + tail_delay + 1;
    const auto& box = pipeline.synthesis.x_infinity;
    for (const auto& s : steps)
      if (s.k >= out.tail_start && !box.contains(s.x, 1e-9)) out.tail_in_x_infinity = false;
    if (static_cast<int>(steps.size()) >= out.tail_start && !run.infeasible && !box.contains(run.final_state, 1e-9))
      out.tail_in_x_infinity = false;
  }
  return out;
}

Plant sample_plant(const ident::UncertainModel& model, std::mt19937_64& rng, bool vertex) {
  const Matrix theta = model.theta_hat();
  const Matrix ds = model.delta_s();
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  Matrix t = theta;
  for (Index i = 0; i < t.rows(); ++i)
    for (Index j = 0; j < t.cols(); ++j) t(i, j) += ds(i, j) * (vertex ? (coin(rng) ? 1.0 : -1.0) : unit(rng));
  const Index n = model.state_dim();
  return Plant{t.leftCols(n), t.rightCols(t.cols() - n)};
}

}  // namespace impc::harness
