#include "impc/errors.hpp"
#include "impc/tube.hpp"

#include "support.hpp"

#include <doctest.h>

#include <filesystem>

using namespace impc;
using namespace impc::tube;
using namespace impc::testing;

namespace {

const Matrix kGain = mat({{-0.42208244, -1.24392885}});

ident::UncertainModel benchmark_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto d = simulate_data(rng, mat({{1, 1}, {0, 1}}), mat({{0}, {1}}), vec({0.1, 0.05}), 50, 1.6);
  return ident::dd_interval_bounds(d);
}

ident::UncertainModel random_model(std::mt19937_64& rng, Index n, Index m, Matrix& k) {
  ident::UncertainModel model;
  model.a_hat = random_with_radius(rng, n, 0.7);
  model.b_hat = random_matrix(rng, n, m);
  k = Matrix::Zero(m, n);
  model.delta_a = random_matrix(rng, n, n, 0.0, 0.02);
  model.delta_b = random_matrix(rng, n, m, 0.0, 0.02);
  model.w_bar = random_matrix(rng, n, 1, 0.0, 0.1).col(0);
  return model;
}

}  // namespace

TEST_SUITE("tube") {

TEST_CASE("step zero terms") {
  const auto model = benchmark_model(3);
  const auto t = precompute_tube(model, kGain, 10);
  REQUIRE(t.n_max() == 10);
  REQUIRE(t.w_cumulative.size() == 11);
  CHECK(t.delta_terms[0].radius() == model.delta_s());
  CHECK(t.delta_terms[0].center().isZero(0.0));
  CHECK(t.w_terms[0].radius == model.w_bar);
  CHECK(t.w_cumulative[0].radius.isZero(0.0));
}

TEST_CASE("nominal model gives zero tables") {
  ident::UncertainModel model;
  model.a_hat = mat({{1, 1}, {0, 1}});
  model.b_hat = mat({{0}, {1}});
  model.delta_a = Matrix::Zero(2, 2);
  model.delta_b = Matrix::Zero(2, 1);
  model.w_bar = Vector::Zero(2);
  const auto t = precompute_tube(model, kGain, 8);
  for (int j = 0; j < 8; ++j) {
    CHECK(t.delta_radius(j).isZero(0.0));
    CHECK(t.w_terms[static_cast<std::size_t>(j)].radius.isZero(0.0));
  }
  for (const auto& b : t.w_cumulative) CHECK(b.radius.isZero(0.0));
}

TEST_CASE("cumulative disturbance is monotone and sums the terms") {
  const auto t = precompute_tube(benchmark_model(5), kGain, 10);
  for (int j = 0; j < 10; ++j) {
    const auto& lo = t.w_cumulative[static_cast<std::size_t>(j)].radius;
    const auto& hi = t.w_cumulative[static_cast<std::size_t>(j + 1)].radius;
    CHECK((hi - lo - t.w_terms[static_cast<std::size_t>(j)].radius).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((hi - lo).minCoeff() >= 0.0);
  }
}

TEST_CASE("sampled products stay inside the delta terms") {
  const auto model = benchmark_model(7);
  const auto t = precompute_tube(model, kGain, 10);
  const auto cl = ClosedLoopInterval::from(model, kGain);
  const auto ak = cl.interval();
  const auto id = setalg::IntervalMatrix::symmetric(model.delta_s());
  std::mt19937_64 rng(99);
  int violations = 0;
  for (int s = 0; s < 10000; ++s) {
    const int j = s % 11 == 10 ? 9 : s % 10;
    const Vector xi = random_matrix(rng, 3, 1, -10, 10).col(0);
    Vector y = sample_interval(rng, id) * xi;
    for (int i = 0; i < j; ++i) y = sample_interval(rng, ak) * y;
    const Vector bound = t.delta_radius(j) * xi.cwiseAbs();
    if ((y.cwiseAbs() - bound).maxCoeff() > 1e-10 * (1.0 + bound.maxCoeff())) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("recursion examples") {
  const auto model = benchmark_model(11);
  const auto cl = ClosedLoopInterval::from(model, kGain);
  const auto r = recursion_radii(cl, model.delta_s(), 3);
  REQUIRE(r.size() == 3);
  CHECK(max_abs_diff(r[0], model.delta_s()) == 0.0);
  const Matrix one = cl.a_k_hat.cwiseAbs() * model.delta_s() + cl.delta_k * model.delta_s();
  CHECK(max_abs_diff(r[1], one) < 1e-14);
}

TEST_CASE("closed-loop interval") {
  const auto model = benchmark_model(13);
  const auto cl = ClosedLoopInterval::from(model, kGain);
  CHECK(max_abs_diff(cl.a_k_hat, model.a_hat + model.b_hat * kGain) < 1e-15);
  CHECK(max_abs_diff(cl.delta_k, model.delta_a + model.delta_b * kGain.cwiseAbs()) < 1e-15);
  CHECK(cl.delta_k.minCoeff() >= 0.0);
}

TEST_CASE("recursion agrees with iterated transport") {
  const auto model = benchmark_model(17);
  const auto t = precompute_tube(model, kGain, 10);
  const auto r = recursion_radii(ClosedLoopInterval::from(model, kGain), model.delta_s(), 10);
  for (int j = 0; j < 10; ++j) CHECK(max_abs_diff(r[static_cast<std::size_t>(j)], t.delta_radius(j)) <= 1e-10);

  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix k;
    const auto m = random_model(rng, 1 + trial % 4, 1 + trial % 2, k);
    const auto tt = precompute_tube(m, k, 10);
    const auto rr = recursion_radii(ClosedLoopInterval::from(m, k), m.delta_s(), 10);
    for (int j = 0; j < 10; ++j) CHECK(max_abs_diff(rr[static_cast<std::size_t>(j)], tt.delta_radius(j)) <= 1e-10);
  }
}

TEST_CASE("error trajectories stay inside the tube") {
  // True system drawn from the interval model; nominal sequences random.
  const auto model = benchmark_model(23);
  const int n_max = 10;
  const auto t = precompute_tube(model, kGain, n_max);
  const auto theta = model.theta_interval();
  std::mt19937_64 rng(29);
  int violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    Matrix th = sample_interval(rng, theta);
    if (trial % 4 == 0) {
      // vertex of the parameter interval
      const Matrix sign = random_matrix(rng, th.rows(), th.cols()).array().sign().matrix();
      th = theta.center() + sign.cwiseProduct(theta.radius());
    }
    const Matrix a = th.leftCols(2);
    const Matrix b = th.rightCols(1);
    Vector z = random_matrix(rng, 2, 1, -8, 8).col(0);
    Vector x = z;
    std::vector<Vector> xi;
    for (int j = 0; j < n_max; ++j) {
      const Vector v = random_matrix(rng, 1, 1, -2, 2).col(0);
      Vector step(3);
      step << z, v;
      xi.push_back(step);
      const Vector u = kGain * (x - z) + v;
      const Vector w = random_matrix(rng, 2, 1).col(0).cwiseProduct(model.w_bar);
      x = a * x + b * u + w;
      z = model.a_hat * z + model.b_hat * v;
      const auto box = tube_box(t, xi, j + 1);
      if (!box.contains(x - z, 1e-9)) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("tube box at step zero is the origin") {
  const auto t = precompute_tube(benchmark_model(31), kGain, 4);
  const auto b = tube_box(t, {}, 0);
  CHECK(b.radius.isZero(0.0));
  CHECK_THROWS(tube_box(t, {}, 1));
}

TEST_CASE("delta terms grow with the model radius") {
  auto model = benchmark_model(37);
  const auto base = precompute_tube(model, kGain, 10);
  std::mt19937_64 rng(41);
  model.delta_a += random_matrix(rng, 2, 2, 0.0, 0.01);
  model.delta_b += random_matrix(rng, 2, 1, 0.0, 0.01);
  const auto bigger = precompute_tube(model, kGain, 10);
  for (int j = 0; j < 10; ++j) CHECK((bigger.delta_radius(j) - base.delta_radius(j)).minCoeff() >= 0.0);
}

TEST_CASE("shape errors") {
  const auto model = benchmark_model(43);
  CHECK_THROWS_AS(precompute_tube(model, Matrix::Zero(1, 3), 5), ShapeMismatch);
  CHECK_THROWS(precompute_tube(model, kGain, 0));
}

TEST_CASE("cache round trip is bit identical") {
  const auto model = benchmark_model(47);
  const auto t = precompute_tube(model, kGain, 10);
  const auto key = cache_key(model, kGain, 10);
  CHECK(key != cache_key(model, kGain, 9));
  CHECK(key == cache_key(model, kGain, 10));
  const auto dir = std::filesystem::temp_directory_path() / "impc_tube_cache_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto path = dir / "t.json";
  save_tables(path, key, t);
  const auto back = load_tables(path, key);
  REQUIRE(back.has_value());
  for (int j = 0; j < 10; ++j) CHECK(back->delta_radius(j) == t.delta_radius(j));
  for (std::size_t j = 0; j < t.w_terms.size(); ++j) CHECK(back->w_terms[j].radius == t.w_terms[j].radius);
  for (std::size_t j = 0; j < t.w_cumulative.size(); ++j)
    CHECK(back->w_cumulative[j].radius == t.w_cumulative[j].radius);
  CHECK_FALSE(load_tables(path, key + 1).has_value());
  CHECK_FALSE(load_tables(dir / "missing.json", key).has_value());

  const auto first = cached_tube(dir, model, kGain, 10);
  int cache_files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    cache_files += e.path().filename().string().rfind("tube_", 0) == 0;
  CHECK(cache_files == 1);
  const auto second = cached_tube(dir, model, kGain, 10);
  for (int j = 0; j < 10; ++j) CHECK(first.delta_radius(j) == second.delta_radius(j));
  std::filesystem::remove_all(dir);
}

}
