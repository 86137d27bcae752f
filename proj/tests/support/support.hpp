#pragma once

#include "impc/config.hpp"
#include "impc/ident.hpp"
#include "impc/polytope.hpp"
#include "impc/qpsolve.hpp"
#include "impc/setalg.hpp"

#include <optional>
#include <random>
#include <vector>

namespace impc::testing {

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

inline Matrix random_matrix(std::mt19937_64& rng, Index r, Index c, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

/// Uniform member of an interval matrix.
inline Matrix sample_interval(std::mt19937_64& rng, const setalg::IntervalMatrix& im) {
  return im.center() + random_matrix(rng, im.rows(), im.cols()).cwiseProduct(im.radius());
}

/// Member of a matrix zonotope with uniform coefficients in [-1, 1].
inline Matrix sample_zonotope(std::mt19937_64& rng, const setalg::MatrixZonotope& z) {
  return z.member(random_matrix(rng, static_cast<Index>(z.num_generators()), 1).col(0));
}

/// Double integrator with the benchmark constraints and LQR gain.
harness::ExperimentConfig benchmark_config();

/// Trajectory of x+ = A x + B u + w with uniform inputs in [-u_max, u_max] and w uniform in [-w_bar, w_bar].
ident::Dataset simulate_data(std::mt19937_64& rng, const Matrix& a, const Matrix& b, const Vector& w_bar, int t,
                             double u_max, double w_scale = 1.0);

/// Random matrix with spectral radius `rho`.
Matrix random_with_radius(std::mt19937_64& rng, Index n, double rho);

/// Nominal variable-horizon MPC written in condensed form (inputs only):
/// min gamma N + sum ||v - K z||_R^2, z(j) in X, v(j) in U, z(N) in X_f.
struct NominalResult {
  int n_star = 0;
  double cost = 0.0;
  Vector u0;
};
std::optional<NominalResult> nominal_mpc(const Matrix& a, const Matrix& b, const Matrix& k, const Matrix& r,
                                         const Polytope& x_set, const Polytope& u_set, const Polytope& x_f,
                                         double gamma, int n_max, const Vector& x);

/// Brute-force LP: enumerates all vertices of {x : G x <= h} (bounded) and
/// returns the best value of c'x, or nullopt if the polytope is empty.
std::optional<double> lp_by_vertices(const Vector& c, const Matrix& g, const Vector& h);

}  // namespace impc::testing
