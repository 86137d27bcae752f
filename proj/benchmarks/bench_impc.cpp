#include "impc/harness.hpp"
#include "impc/setalg.hpp"
#include "impc/tube.hpp"

#include <benchmark/benchmark.h>

using namespace impc;

namespace {

harness::ExperimentConfig double_integrator() {
  harness::ExperimentConfig cfg;
  Matrix a(2, 2), b(2, 1), k(1, 2);
  a << 1, 1, 0, 1;
  b << 0, 1;
  k << -0.42208244, -1.24392885;
  cfg.a_true = a;
  cfg.b_true = b;
  cfg.data_x0 = Vector::Zero(2);
  cfg.w_bar = Vector(2);
  cfg.w_bar << 0.1, 0.05;
  Vector lo(2), hi(2), ulo(1), uhi(1);
  lo << -12, -4;
  hi << 12, 4;
  ulo << -2;
  uhi << 2;
  cfg.state_set = Polytope::box(lo, hi);
  cfg.input_set = Polytope::box(ulo, uhi);
  cfg.k_gain = k;
  cfg.cost_weight = Matrix::Identity(1, 1);
  cfg.seed = 2024;
  return cfg;
}

const harness::Pipeline& pipeline() {
  static const harness::Pipeline p = [] {
    const auto cfg = double_integrator();
    return harness::build_pipeline(cfg, harness::obtain_dataset(cfg, 0));
  }();
  return p;
}

Vector start() {
  Vector x(2);
  x << -6, 0;
  return x;
}

void BM_VariableHorizonSolve(benchmark::State& state) {
  const auto& ctl = *pipeline().controller;
  const Vector x = start();
  for (auto _ : state) benchmark::DoNotOptimize(ctl.solve(x));
}
BENCHMARK(BM_VariableHorizonSolve)->Unit(benchmark::kMillisecond);

void BM_HorizonQp(benchmark::State& state) {
  const auto& ctl = *pipeline().controller;
  const auto qp = ctl.horizon_qp(start(), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qp::solve_qp(qp));
}
BENCHMARK(BM_HorizonQp)->Arg(1)->Arg(5)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_FeasibilityCheck(benchmark::State& state) {
  const auto& ctl = *pipeline().controller;
  const Vector x = start();
  for (auto _ : state) benchmark::DoNotOptimize(ctl.feasible_horizon(x));
}
BENCHMARK(BM_FeasibilityCheck)->Unit(benchmark::kMicrosecond);

void BM_PrecomputeTube(benchmark::State& state) {
  const auto& p = pipeline();
  const auto& k = p.controller_config().k_gain;
  for (auto _ : state) benchmark::DoNotOptimize(tube::precompute_tube(p.model, k, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PrecomputeTube)->Arg(10)->Arg(30)->Unit(benchmark::kMicrosecond);

void BM_Identification(benchmark::State& state) {
  const auto cfg = double_integrator();
  const auto data = harness::obtain_dataset(cfg, 0);
  const bool sm = state.range(0) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(sm ? ident::sm_interval_bounds(data) : ident::dd_interval_bounds(data));
}
BENCHMARK(BM_Identification)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
