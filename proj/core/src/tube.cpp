#include "impc/tube.hpp"

#include "impc/errors.hpp"

#include <stdexcept>
#include <string>

namespace impc::tube {

ClosedLoopInterval ClosedLoopInterval::from(const ident::UncertainModel& model, const Matrix& k_gain) {
  model.validate();
  if (k_gain.rows() != model.input_dim() || k_gain.cols() != model.state_dim())
    throw ShapeMismatch("gain K must be " + std::to_string(model.input_dim()) + "x" +
                        std::to_string(model.state_dim()));
  return ClosedLoopInterval{model.a_hat + model.b_hat * k_gain, model.delta_a + model.delta_b * k_gain.cwiseAbs()};
}

TubeTables precompute_tube(const ident::UncertainModel& model, const Matrix& k_gain, int n_max) {
  if (n_max < 1) throw InvalidArgument("precompute_tube: n_max must be positive");
  const auto cl = ClosedLoopInterval::from(model, k_gain);
  const auto interval = cl.interval();
  const Index n = model.state_dim();

  TubeTables t;
  auto m_delta = setalg::MatrixZonotope::from_symmetric_interval(model.delta_s());
  auto m_w = setalg::MatrixZonotope::from_symmetric_interval(Matrix(model.w_bar));
  t.w_cumulative.push_back(setalg::Box::zero(n));
  for (int j = 0; j < n_max; ++j) {
    if (j > 0) {
      m_delta = setalg::transport(interval, m_delta);
      m_w = setalg::transport(interval, m_w);
    }
    t.delta_terms.push_back(setalg::IntervalMatrix::symmetric(setalg::box_of_zonotope(m_delta).radius()));
    const Vector w_radius = setalg::box_of_zonotope(m_w).radius().col(0);
    t.w_terms.push_back(setalg::Box::symmetric(w_radius));
    t.w_cumulative.push_back(setalg::Box::symmetric(t.w_cumulative.back().radius + w_radius));
  }
  return t;
}

std::vector<Matrix> recursion_radii(const ClosedLoopInterval& cl, const Matrix& delta_s, int n_max) {
  if (n_max < 1) throw InvalidArgument("recursion_radii: n_max must be positive");
  const Index n = cl.dim();
  if (delta_s.rows() != n) throw ShapeMismatch("recursion_radii: Delta_S must have n rows");

  // abs_pow[t] = |A_K^t|
  std::vector<Matrix> abs_pow;
  Matrix power = Matrix::Identity(n, n);
  for (int t = 0; t < n_max; ++t) {
    abs_pow.push_back(power.cwiseAbs());
    power = cl.a_k_hat * power;
  }

  std::vector<Matrix> f{delta_s};
  std::vector<Matrix> radii;
  for (int j = 0; j < n_max; ++j) {
    Matrix acc = Matrix::Zero(n, delta_s.cols());
    for (int i = 0; i <= j; ++i) acc += abs_pow[static_cast<std::size_t>(j - i)] * f[static_cast<std::size_t>(i)];
    radii.push_back(acc);
    f.push_back(cl.delta_k * acc);
  }

  // P_1 = I,  P_{j+1} = |A_K^j| + sum_{h=1..j} P_h Delta_K |A_K^{j-h}|
  std::vector<Matrix> p{Matrix::Identity(n, n)};
  for (int j = 1; j < n_max; ++j) {
    Matrix next = abs_pow[static_cast<std::size_t>(j)];
    for (int h = 1; h <= j; ++h)
      next += p[static_cast<std::size_t>(h - 1)] * cl.delta_k * abs_pow[static_cast<std::size_t>(j - h)];
    p.push_back(next);
  }
  for (int j = 1; j < n_max; ++j) {
    const Matrix closed_form = cl.delta_k * p[static_cast<std::size_t>(j - 1)] * delta_s;
    const double diff = max_abs_diff(closed_form, f[static_cast<std::size_t>(j)]);
    if (!(diff <= 1e-10))
      throw std::logic_error("recursion_radii: F_" + std::to_string(j) + " routes disagree by " +
                             std::to_string(diff));
  }
  return radii;
}

setalg::Box tube_box(const TubeTables& tables, const std::vector<Vector>& xi, int j) {
  if (j < 0 || j > tables.n_max()) throw InvalidArgument("tube_box: step out of range");
  if (static_cast<int>(xi.size()) < j) throw InvalidArgument("tube_box: too few nominal points");
  Vector radius = tables.w_cumulative[static_cast<std::size_t>(j)].radius;
  for (int i = 0; i < j; ++i)
    radius += tables.delta_radius(j - i - 1) * xi[static_cast<std::size_t>(i)].cwiseAbs();
  return setalg::Box::symmetric(std::move(radius));
}

}  // namespace impc::tube
