#include "support.hpp"

#include <limits>

namespace impc::testing {

harness::ExperimentConfig benchmark_config() {
  harness::ExperimentConfig cfg;
  cfg.a_true = mat({{1, 1}, {0, 1}});
  cfg.b_true = mat({{0}, {1}});
  cfg.data_length = 50;
  cfg.data_x0 = Vector::Zero(2);
  cfg.w_bar = vec({0.1, 0.05});
  cfg.state_set = Polytope::box(vec({-12, -4}), vec({12, 4}));
  cfg.input_set = Polytope::box(vec({-2}), vec({2}));
  cfg.k_gain = mat({{-0.42208244, -1.24392885}});
  cfg.cost_weight = Matrix::Identity(1, 1);
  cfg.gamma = 1.0;
  cfg.n_max = 10;
  cfg.initial_states = {vec({-6, 0})};
  cfg.seed = 2024;
  cfg.validate();
  return cfg;
}

ident::Dataset simulate_data(std::mt19937_64& rng, const Matrix& a, const Matrix& b, const Vector& w_bar, int t,
                             double u_max, double w_scale) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ident::Dataset d;
  d.w_bar = w_bar;
  Vector x = Vector::Zero(a.rows());
  d.states.push_back(x);
  for (int k = 0; k < t; ++k) {
    Vector u(b.cols());
    for (Index i = 0; i < u.size(); ++i) u(i) = u_max * unit(rng);
    Vector w(a.rows());
    for (Index i = 0; i < w.size(); ++i) w(i) = w_scale * w_bar(i) * unit(rng);
    x = a * x + b * u + w;
    d.inputs.push_back(u);
    d.states.push_back(x);
  }
  return d;
}

Matrix random_with_radius(std::mt19937_64& rng, Index n, double rho) {
  Matrix m = random_matrix(rng, n, n);
  const double r = spectral_radius(m);
  return r > 0.0 ? Matrix(m * (rho / r)) : m;
}

std::optional<NominalResult> nominal_mpc(const Matrix& a, const Matrix& b, const Matrix& k, const Matrix& r,
                                         const Polytope& x_set, const Polytope& u_set, const Polytope& x_f,
                                         double gamma, int n_max, const Vector& x) {
  if (!x_set.contains(x, 1e-9)) return std::nullopt;
  const Index n = a.rows();
  const Index m = b.cols();
  std::optional<NominalResult> best;
  for (int horizon = 1; horizon <= n_max; ++horizon) {
    const Index d = m * horizon;
    // z(j) = free[j] + lift[j] * v
    std::vector<Vector> free_part;
    std::vector<Matrix> lift;
    Vector z = x;
    Matrix l = Matrix::Zero(n, d);
    for (int j = 0; j <= horizon; ++j) {
      free_part.push_back(z);
      lift.push_back(l);
      if (j == horizon) break;
      z = a * z;
      Matrix next = a * l;
      next.block(0, j * m, n, m) += b;
      l = next;
    }
    // Stage residual v(j) - K z(j) = sel[j] v - K free[j] - K lift[j] v.
    Matrix hess = Matrix::Zero(d, d);
    Vector lin = Vector::Zero(d);
    double constant = 0.0;
    for (int j = 0; j < horizon; ++j) {
      Matrix map = -k * lift[static_cast<std::size_t>(j)];
      map.block(0, j * m, m, m) += Matrix::Identity(m, m);
      const Vector offset = -k * free_part[static_cast<std::size_t>(j)];
      hess += 2.0 * map.transpose() * r * map;
      lin += 2.0 * map.transpose() * r * offset;
      constant += offset.dot(r * offset);
    }
    std::vector<Matrix> blocks;
    std::vector<Vector> rhs;
    for (int j = 1; j <= horizon; ++j) {
      blocks.push_back(x_set.h() * lift[static_cast<std::size_t>(j)]);
      rhs.push_back(x_set.b() - x_set.h() * free_part[static_cast<std::size_t>(j)]);
    }
    for (int j = 0; j < horizon; ++j) {
      Matrix sel = Matrix::Zero(u_set.num_constraints(), d);
      sel.block(0, j * m, u_set.num_constraints(), m) = u_set.h();
      blocks.push_back(sel);
      rhs.push_back(u_set.b());
    }
    blocks.push_back(x_f.h() * lift[static_cast<std::size_t>(horizon)]);
    rhs.push_back(x_f.b() - x_f.h() * free_part[static_cast<std::size_t>(horizon)]);
    Index rows = 0;
    for (const auto& bl : blocks) rows += bl.rows();
    Matrix g(rows, d);
    Vector h(rows);
    Index at = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      g.middleRows(at, blocks[i].rows()) = blocks[i];
      h.segment(at, blocks[i].rows()) = rhs[i];
      at += blocks[i].rows();
    }
    qp::QpProblem p;
    p.hessian = 0.5 * (hess + hess.transpose());
    p.linear = lin;
    p.eq_lhs = Matrix(0, d);
    p.eq_rhs = Vector(0);
    p.ineq_lhs = g;
    p.ineq_rhs = h;
    const auto sol = qp::solve_qp(p);
    if (!sol.optimal()) continue;
    const double cost = gamma * horizon + sol.objective + constant;
    if (!best || cost < best->cost) best = NominalResult{horizon, cost, sol.x.head(m)};
  }
  return best;
}

std::optional<double> lp_by_vertices(const Vector& c, const Matrix& g, const Vector& h) {
  const Index d = c.size();
  const Index q = g.rows();
  std::optional<double> best;
  std::vector<Index> pick(static_cast<std::size_t>(d));
  // Enumerate d-subsets of the rows.
  std::vector<bool> mask(static_cast<std::size_t>(q), false);
  std::fill(mask.begin(), mask.begin() + d, true);
  do {
    Matrix a(d, d);
    Vector b(d);
    Index k = 0;
    for (Index i = 0; i < q; ++i)
      if (mask[static_cast<std::size_t>(i)]) {
        a.row(k) = g.row(i);
        b(k) = h(i);
        ++k;
      }
    Eigen::FullPivLU<Matrix> lu(a);
    if (lu.rank() < d) continue;
    const Vector x = lu.solve(b);
    if (((g * x - h).array() > 1e-9).any()) continue;
    const double v = c.dot(x);
    if (!best || v < *best) best = v;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

}  // namespace impc::testing
