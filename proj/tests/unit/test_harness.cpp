#include "impc/config.hpp"
#include "impc/errors.hpp"
#include "impc/feasible_domain.hpp"
#include "impc/harness.hpp"
#include "impc/report.hpp"

#include "support.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>

using namespace impc;
using namespace impc::harness;
using namespace impc::testing;

namespace {

std::string benchmark_json() {
  return R"({
    "system": {"A": [[1, 1], [0, 1]], "B": [[0], [1]]},
    "dataset": {"T": 50, "x0": [0, 0]},
    "disturbance": {"w_bar": [0.1, 0.05]},
    "scheme": "DD-IMPC",
    "constraints": {"state": {"lower": [-12, -4], "upper": [12, 4]},
                    "input": {"H": [[1], [-1]], "b": [2, 2]}},
    "controller": {"K": [[-0.42208244, -1.24392885]], "cost_weight": [[1]], "gamma": 1, "n_max": 10},
    "simulation": {"runs": 3, "steps": 20, "initial_states": [[-6, 0]]},
    "fd": {"grid": [12, 6], "datasets": 2},
    "seed": 7
  })";
}

std::string config_error_field(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

std::string with(const std::string& key, const std::string& replacement) {
  auto doc = nlohmann::json::parse(benchmark_json());
  nlohmann::json::json_pointer ptr(key);
  doc[ptr] = nlohmann::json::parse(replacement);
  return doc.dump();
}

ExperimentConfig nominal_config() {
  auto cfg = benchmark_config();
  cfg.w_bar = Vector::Zero(2);
  cfg.steps = 15;
  return cfg;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("shipped benchmark config parses") {
  const auto cfg = load_config(IMPC_SOURCE_DIR "/configs/double_integrator.json");
  CHECK(cfg.has_true_system());
  CHECK(cfg.data_length == 50);
  CHECK(max_abs_diff(cfg.w_bar, vec({0.1, 0.05})) == 0.0);
  CHECK(cfg.scheme == Scheme::DataDriven);
  CHECK(cfg.n_max == 10);
  CHECK(cfg.runs == 100);
  CHECK(cfg.grid == std::vector<int>{30, 10});
  CHECK(cfg.seed == 2024u);
  CHECK(cfg.state_set.contains(vec({12, -4})));
  CHECK_FALSE(cfg.state_set.contains(vec({12.01, 0})));
}

TEST_CASE("config errors name the field") {
  CHECK(config_error_field(benchmark_json()).empty());
  CHECK(config_error_field(with("/controller/gamma", "-1")) == "controller.gamma");
  CHECK(config_error_field(with("/controller/n_max", "0")) == "controller.n_max");
  CHECK(config_error_field(with("/disturbance/w_bar", "[0.1, -0.05]")) == "disturbance.w_bar");
  CHECK(config_error_field(with("/disturbance/w_bar", "[0.1]")) == "disturbance.w_bar");
  CHECK(config_error_field(with("/scheme", "\"LQR\"")) == "scheme");
  CHECK(config_error_field(with("/fd/grid", "[10]")) == "fd.grid");
  CHECK(config_error_field(with("/system/A", "[[1, 1, 0], [0, 1, 0]]")) == "system.A");
  CHECK(config_error_field("{not json") == "<document>");
}

TEST_CASE("set-membership scheme and epsilon scaling") {
  const auto cfg = parse_config(with("/disturbance", R"({"w_bar": [0.1, 0.05], "epsilon_w": 0.5, "law": "vertex"})"));
  CHECK(cfg.disturbance_law == DisturbanceLaw::Vertex);
  CHECK(max_abs_diff(cfg.effective_w_bar(), vec({0.05, 0.025})) < 1e-15);
  CHECK(parse_config(with("/scheme", "\"SM-IMPC\"")).scheme == Scheme::SetMembership);
}

TEST_CASE("random streams are reproducible and independent") {
  auto a = make_stream(5, StreamPurpose::Disturbance, 3);
  auto b = make_stream(5, StreamPurpose::Disturbance, 3);
  auto c = make_stream(5, StreamPurpose::Plant, 3);
  auto d = make_stream(5, StreamPurpose::Disturbance, 4);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
}

TEST_CASE("disturbance laws") {
  auto rng = make_stream(1, StreamPurpose::Disturbance, 0);
  const Vector w_bar = vec({0.1, 0.05});
  for (int i = 0; i < 200; ++i) {
    const Vector u = sample_disturbance(rng, w_bar, DisturbanceLaw::Uniform);
    CHECK((u.cwiseAbs() - w_bar).maxCoeff() <= 0.0);
    const Vector v = sample_disturbance(rng, w_bar, DisturbanceLaw::Vertex);
    CHECK(max_abs_diff(v.cwiseAbs(), w_bar) == 0.0);
  }
}

TEST_CASE("generated datasets satisfy the rank condition") {
  const auto cfg = benchmark_config();
  const auto d = generate_dataset(cfg, 0);
  CHECK(d.length() == 50);
  CHECK(ident::build_data_matrices(d).rank == 3);
  for (const auto& u : d.inputs) CHECK(std::abs(u(0)) <= 0.8 * 2.0);
  const auto again = generate_dataset(cfg, 0);
  CHECK(again.states.back() == d.states.back());
  CHECK(generate_dataset(cfg, 1).states.back() != d.states.back());
}

TEST_CASE("equilibrium stays put") {
  const auto cfg = nominal_config();
  const auto run = simulate(cfg, Vector::Zero(2));
  REQUIRE(run.steps.size() == static_cast<std::size_t>(cfg.steps));
  for (const auto& s : run.steps) {
    CHECK(s.x.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(s.u.cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK(run.constraint_violations == 0);
  CHECK(run.terminal_entry == 0);
}

TEST_CASE("start outside the feasible domain") {
  const auto cfg = benchmark_config();
  CHECK_THROWS_AS(simulate(cfg, vec({12, 4})), InfeasibleStart);
  CHECK_THROWS_AS(simulate(cfg, vec({40, 0})), InfeasibleStart);
}

TEST_CASE("benchmark run satisfies the closed-loop properties") {
  auto cfg = benchmark_config();
  const auto pipe = build_pipeline(cfg, obtain_dataset(cfg, 0));
  for (std::uint64_t r = 0; r < 3; ++r) {
    const auto run = simulate(pipe, cfg, vec({-6, 0}), r);
    CHECK(run.constraint_violations == 0);
    CHECK_FALSE(run.infeasible);
    const auto props = check_run(run, pipe, cfg.gamma);
    CHECK(props.cost_decrease);
    CHECK(props.horizon_tail);
    CHECK(props.terminal_entry_in_time);
    CHECK(props.tail_in_x_infinity);
  }
}

TEST_CASE("sampled plants lie in the interval") {
  const auto cfg = benchmark_config();
  const auto model = identify(cfg, obtain_dataset(cfg, 0));
  auto rng = make_stream(3, StreamPurpose::Plant, 0);
  const auto theta = model.theta_interval();
  for (int i = 0; i < 50; ++i) {
    for (bool vertex : {false, true}) {
      const auto p = sample_plant(model, rng, vertex);
      Matrix th(2, 3);
      th << p.a, p.b;
      CHECK(theta.contains(th, 1e-15));
      if (vertex) CHECK(max_abs_diff((th - theta.center()).cwiseAbs(), theta.radius()) < 1e-15);
    }
  }
}

TEST_CASE("identical seed gives byte-identical CSV") {
  auto cfg = benchmark_config();
  const auto a = report::run_csv(simulate(cfg, vec({-6, 0})));
  const auto b = report::run_csv(simulate(cfg, vec({-6, 0})));
  CHECK(a == b);
  cfg.seed = 2025;
  CHECK(report::run_csv(simulate(cfg, vec({-6, 0}))) != a);
}

TEST_CASE("state grid") {
  const auto pts = state_grid(Polytope::box(vec({-1, 0}), vec({1, 2})), {3, 2});
  REQUIRE(pts.size() == 6u);
  CHECK(max_abs_diff(pts[0], vec({-1, 0})) == 0.0);
  CHECK(max_abs_diff(pts[1], vec({-1, 2})) == 0.0);
  CHECK(max_abs_diff(pts[2], vec({0, 0})) == 0.0);
  CHECK(max_abs_diff(pts[5], vec({1, 2})) == 0.0);
}

TEST_CASE("hull and area") {
  std::vector<Vector> pts = {vec({0, 0}), vec({1, 0}), vec({1, 1}), vec({0, 1}), vec({0.5, 0.5}), vec({0.5, 0})};
  const auto hull = convex_hull_2d(pts);
  CHECK(hull.size() == 4u);
  CHECK(polygon_area(hull) == doctest::Approx(1.0));
  CHECK(polygon_area({vec({0, 0}), vec({2, 0}), vec({0, 3})}) == doctest::Approx(3.0));
  CHECK(polygon_area(convex_hull_2d({vec({0, 0}), vec({1, 1}), vec({2, 2})})) == 0.0);
  CHECK(convex_hull_2d({}).empty());
}

TEST_CASE("summary statistics") {
  FdStatistics s;
  s.areas = {2, 4, 4, 4, 5, 5, 7, 9};
  s.empty.assign(8, false);
  s.empty[0] = true;
  summarize(s);
  CHECK(s.mean == doctest::Approx(5.0));
  CHECK(s.stddev == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(s.min == 2.0);
  CHECK(s.max == 9.0);
  CHECK(s.empty_count == 1);
}

TEST_CASE("feasible domain agrees with the full solve") {
  const auto cfg = benchmark_config();
  const auto pipe = build_pipeline(cfg, obtain_dataset(cfg, 0));
  const auto fd = estimate_feasible_domain(*pipe.controller, {13, 7});
  REQUIRE(fd.points.size() == fd.feasible.size());
  int mismatches = 0;
  for (std::size_t i = 0; i < fd.points.size(); ++i) {
    bool solved = true;
    try {
      pipe.controller->solve(fd.points[i]);
    } catch (const AllInfeasible&) {
      solved = false;
    }
    mismatches += solved != fd.feasible[i];
  }
  CHECK(mismatches == 0);
  CHECK(fd.feasible_count() > 0);
  CHECK(fd.area > 0.0);
}

TEST_CASE("nominal feasible domain matches a nominal MPC") {
  const auto cfg = nominal_config();
  const auto pipe = build_pipeline(cfg, obtain_dataset(cfg, 0));
  CHECK(pipe.model.delta_s().maxCoeff() < 1e-9);
  const std::vector<int> grid{25, 11};
  const auto fd = estimate_feasible_domain(*pipe.controller, grid);
  const auto& c = pipe.controller_config();
  std::vector<Vector> oracle_pts;
  int disagreements = 0;
  for (std::size_t i = 0; i < fd.points.size(); ++i) {
    const bool ok = nominal_mpc(*cfg.a_true, *cfg.b_true, c.k_gain, c.cost_weight, c.state_set, c.input_set,
                                c.terminal_set, c.gamma, c.n_max, fd.points[i])
                        .has_value();
    if (ok) oracle_pts.push_back(fd.points[i]);
    disagreements += ok != fd.feasible[i];
  }
  const double oracle_area = polygon_area(convex_hull_2d(oracle_pts));
  // One grid cell band around the oracle hull.
  const double cell = std::hypot(24.0 / (grid[0] - 1), 8.0 / (grid[1] - 1));
  double perimeter = 0.0;
  const auto hull = convex_hull_2d(oracle_pts);
  for (std::size_t i = 0; i < hull.size(); ++i) perimeter += (hull[(i + 1) % hull.size()] - hull[i]).norm();
  CHECK(std::abs(fd.area - oracle_area) <= perimeter * cell);
  CHECK(disagreements <= static_cast<int>(fd.points.size()) / 50);
}

TEST_CASE("feasible domain statistics over datasets") {
  auto cfg = parse_config(benchmark_json());
  std::vector<FeasibleDomain> domains;
  const auto stats = feasible_domain_statistics(cfg, &domains);
  REQUIRE(stats.areas.size() == 2u);
  CHECK(domains.size() == 2u);
  CHECK(stats.empty_count == 0);
  CHECK(stats.min > 0.0);
  CHECK(stats.mean == doctest::Approx(0.5 * (stats.areas[0] + stats.areas[1])));
  const auto csv = report::fd_statistics_csv(stats);
  CHECK(csv.rfind("dataset_id,area,empty\r\n", 0) == 0);
  CHECK(csv.find("mean,") != std::string::npos);
  CHECK(csv.find("std,") != std::string::npos);
}

TEST_CASE("CSV writer quoting and number format") {
  report::CsvWriter w({"a", "b"});
  w.row({"1,5", "say \"hi\""});
  CHECK(w.str() == "a,b\r\n\"1,5\",\"say \"\"hi\"\"\"\r\n");
  CHECK_THROWS(w.row({"only one"}));
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12.0}) CHECK(std::stod(report::fmt(v)) == v);
}

}
