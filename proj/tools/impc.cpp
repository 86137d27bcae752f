// Command-line front end: identify, synthesize, simulate and fd stages.

#include "impc/config.hpp"
#include "impc/errors.hpp"
#include "impc/feasible_domain.hpp"
#include "impc/harness.hpp"
#include "impc/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>

namespace fs = std::filesystem;
using namespace impc;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kViolation = 2;

nlohmann::json to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

std::string model_json(const ident::UncertainModel& m, const std::string& scheme) {
  nlohmann::json j;
  j["scheme"] = scheme;
  j["a_hat"] = to_json(m.a_hat);
  j["b_hat"] = to_json(m.b_hat);
  j["delta_a"] = to_json(m.delta_a);
  j["delta_b"] = to_json(m.delta_b);
  j["w_bar"] = to_json(Matrix(m.w_bar));
  return j.dump(2) + "\n";
}

int run_identify(const harness::ExperimentConfig& cfg, const fs::path& out) {
  const auto data = harness::obtain_dataset(cfg, 0);
  const auto dm = ident::build_data_matrices(data);
  ident::write_dataset_csv(out / "dataset.csv", data);
  const auto model = harness::identify(cfg, data);
  report::write_text(out / "model.json", model_json(model, harness::to_string(cfg.scheme)));
  std::printf("rank(Phi) = %ld of %ld required\n", static_cast<long>(dm.rank),
              static_cast<long>(data.state_dim() + data.input_dim()));
  std::printf("model written to %s\n", (out / "model.json").string().c_str());
  return kOk;
}

int run_synthesize(harness::ExperimentConfig cfg, const fs::path& out) {
  if (!cfg.cache_dir) cfg.cache_dir = out / "cache";
  const auto data = harness::obtain_dataset(cfg, 0);
  const auto p = harness::build_pipeline(cfg, data);
  report::write_text(out / "model.json", model_json(p.model, harness::to_string(cfg.scheme)));
  report::write_text(out / "synthesis.json", p.synthesis.to_json() + "\n");
  const auto& g = p.synthesis.gain;
  std::printf("gain: necessary %s (max sampled rho %.4f), abs bound rho %.4f, series rho %.4f\n",
              g.necessary_ok ? "ok" : "FAILED", g.witness_radius, g.abs_bound_radius, g.series_radius);
  std::printf("terminal set: %ld facets (%s), X_inf radius [%s]\n",
              static_cast<long>(p.synthesis.terminal_set.num_constraints()),
              synth::to_string(p.synthesis.method).c_str(),
              report::fmt(p.synthesis.x_infinity.radius.maxCoeff()).c_str());
  return g.necessary_ok ? kOk : kViolation;
}

int run_simulate(const harness::ExperimentConfig& cfg, const fs::path& out) {
  const auto p = harness::build_pipeline(cfg, harness::obtain_dataset(cfg, 0));
  std::vector<Vector> starts = cfg.initial_states;
  if (starts.empty()) starts.push_back(Vector::Zero(cfg.state_dim()));
  std::vector<harness::RunRecord> runs;
  report::CsvWriter summary({"run", "x0_index", "steps", "violations", "infeasible", "terminal_entry", "j0",
                             "properties_hold"});
  int violations = 0, infeasible = 0, property_failures = 0;
  double total_ms = 0.0;
  long solves = 0;
  for (int r = 0; r < cfg.runs; ++r) {
    const auto idx = static_cast<std::size_t>(r) % starts.size();
    auto run = harness::simulate(p, cfg, starts[idx], static_cast<std::uint64_t>(r));
    const auto props = harness::check_run(run, p, cfg.gamma);
    violations += run.constraint_violations;
    infeasible += run.infeasible ? 1 : 0;
    property_failures += props.all() ? 0 : 1;
    for (const auto& s : run.steps) total_ms += s.solve_ms;
    solves += static_cast<long>(run.steps.size());
    char name[32];
    std::snprintf(name, sizeof name, "run_%03d.csv", r);
    report::write_text(out / "runs" / name, report::run_csv(run));
    summary.row({std::to_string(r), std::to_string(idx), std::to_string(run.steps.size()),
                 std::to_string(run.constraint_violations), run.infeasible ? "1" : "0",
                 std::to_string(run.terminal_entry), report::fmt(run.steps.empty() ? 0.0 : run.steps[0].j_star),
                 props.all() ? "1" : "0"});
    runs.push_back(std::move(run));
  }
  summary.row({"total", "", "", std::to_string(violations), std::to_string(infeasible), "", "",
               std::to_string(cfg.runs - property_failures)});
  summary.save(out / "simulate_summary.csv");
  const auto& cc = p.controller_config();
  report::write_text(out / "trajectories.svg", report::trajectories_svg(runs, cc.state_set, cc.input_set,
                                                                        p.synthesis.x_infinity, cc.terminal_set));
  std::printf("%d runs: %d constraint violations, %d mid-run infeasibilities, %d runs breaking a property\n",
              cfg.runs, violations, infeasible, property_failures);
  std::printf("average solve time %.3f ms over %ld steps\n", solves ? total_ms / static_cast<double>(solves) : 0.0,
              solves);
  return violations == 0 && infeasible == 0 && property_failures == 0 ? kOk : kViolation;
}

int run_fd(const harness::ExperimentConfig& cfg, const fs::path& out) {
  std::vector<harness::FeasibleDomain> domains;
  const auto stats = harness::feasible_domain_statistics(cfg, &domains);
  report::write_text(out / "fd_statistics.csv", report::fd_statistics_csv(stats));
  if (!domains.empty()) report::write_text(out / "fd_map.csv", report::fd_map_csv(domains.front()));
  report::write_text(out / "feasible_domains.svg", report::feasible_domain_svg(domains, cfg.state_set));
  std::printf("%s over %d datasets: mean area %.3f, std %.3f, min %.3f, max %.3f, empty %d\n",
              harness::to_string(cfg.scheme).c_str(), cfg.fd_datasets, stats.mean, stats.stddev, stats.min,
              stats.max, stats.empty_count);
  for (std::size_t i = 0; i < stats.notes.size(); ++i)
    if (!stats.notes[i].empty()) std::printf("dataset %zu: %s\n", i, stats.notes[i].c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interval-matrix robust predictive control from data"};
  app.require_subcommand(1, 1);
  fs::path config_path;
  fs::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  for (const char* name : {"identify", "synthesize", "simulate", "fd"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON experiment configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the master seed");
    sub->add_option("--out", out_dir, "Output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    auto cfg = harness::load_config(config_path);
    if (seed) cfg.seed = *seed;
    fs::create_directories(out_dir);
    if (stage == "identify") return run_identify(cfg, out_dir);
    if (stage == "synthesize") return run_synthesize(cfg, out_dir);
    if (stage == "simulate") return run_simulate(cfg, out_dir);
    return run_fd(cfg, out_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kUsage;
  } catch (const InfeasibleStart& e) {
    std::fprintf(stderr, "%s: %s\n", stage.c_str(), e.what());
    return kViolation;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "%s: internal consistency check failed: %s\n", stage.c_str(), e.what());
    return kViolation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: %s\n", stage.c_str(), e.what());
    return kUsage;
  }
}
