#include "impc/synth.hpp"

#include "impc/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <random>

namespace impc::synth {

namespace {

// sum_t |A^t| truncated once the terms are negligible; nullopt if A is not Schur.
std::optional<Matrix> abs_power_series(const Matrix& a) {
  const Index n = a.rows();
  if (spectral_radius(a) >= 1.0) return std::nullopt;
  Matrix sum = Matrix::Identity(n, n);
  Matrix power = Matrix::Identity(n, n);
  for (int t = 1; t < 100000; ++t) {
    power = a * power;
    const Matrix term = power.cwiseAbs();
    sum += term;
    if (term.maxCoeff() <= 1e-16 * sum.maxCoeff()) return sum;
  }
  return std::nullopt;
}

// Rows of the one-step tube map preimage of { x : h x <= b }: for every sign
// pattern sigma of (x, Kx), h A_K x + |h| Delta_S diag(sigma) [I; K] x <= b - |h| w.
void pre_rows(const ident::UncertainModel& model, const Matrix& k_gain, const Matrix& h, const Vector& b,
              Matrix& out_h, Vector& out_b) {
  const Index n = model.state_dim();
  const Index p = n + model.input_dim();
  const Matrix a_k = model.a_hat + model.b_hat * k_gain;
  Matrix lift(p, n);
  lift << Matrix::Identity(n, n), k_gain;
  const Matrix ds = model.delta_s();
  const Index patterns = Index{1} << p;
  out_h.resize(h.rows() * patterns, n);
  out_b.resize(h.rows() * patterns);
  Index row = 0;
  for (Index i = 0; i < h.rows(); ++i) {
    const Vector habs = h.row(i).cwiseAbs().transpose();
    const Eigen::RowVectorXd weight = habs.transpose() * ds;
    const Eigen::RowVectorXd nominal = h.row(i) * a_k;
    const double rhs = b(i) - habs.dot(model.w_bar);
    for (Index mask = 0; mask < patterns; ++mask) {
      Eigen::RowVectorXd signed_weight = weight;
      for (Index c = 0; c < p; ++c)
        if (mask & (Index{1} << c)) signed_weight(c) = -signed_weight(c);
      out_h.row(row) = nominal + signed_weight * lift;
      out_b(row) = rhs;
      ++row;
    }
  }
}

}  // namespace

ContractionCertificate contraction(const tube::ClosedLoopInterval& cl) {
  ContractionCertificate c;
  c.abs_bound_radius = spectral_radius(cl.a_k_hat.cwiseAbs() + cl.delta_k);
  c.nominal_radius = spectral_radius(cl.a_k_hat);
  const auto series = abs_power_series(cl.a_k_hat);
  c.series_radius = series ? spectral_radius(cl.delta_k * *series) : std::numeric_limits<double>::infinity();
  return c;
}

GainEvidence validate_gain(const ident::UncertainModel& model, const Matrix& k_gain, int samples,
                           std::uint64_t seed) {
  const auto cl = tube::ClosedLoopInterval::from(model, k_gain);
  const Index n = model.state_dim();
  const Index p = n + model.input_dim();
  Matrix lift(p, n);
  lift << Matrix::Identity(n, n), k_gain;
  const Matrix ds = model.delta_s();

  GainEvidence ev;
  ev.witness = cl.a_k_hat;
  ev.witness_radius = spectral_radius(cl.a_k_hat);
  auto consider = [&](const Matrix& a, double& running_max) {
    const double r = spectral_radius(a);
    running_max = std::max(running_max, r);
    if (r > ev.witness_radius) {
      ev.witness_radius = r;
      ev.witness = a;
    }
  };

  const Index entries = ds.size();
  if (entries <= 20) {
    ev.vertex_check_complete = true;
    const Index count = Index{1} << entries;
    for (Index mask = 0; mask < count; ++mask) {
      Matrix d = ds;
      for (Index e = 0; e < entries; ++e)
        if (mask & (Index{1} << e)) d(e / ds.cols(), e % ds.cols()) = -d(e / ds.cols(), e % ds.cols());
      consider(cl.a_k_hat + d * lift, ev.vertex_max_radius);
    }
    ev.vertex_count = static_cast<int>(count);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    Matrix d(ds.rows(), ds.cols());
    for (Index i = 0; i < ds.rows(); ++i)
      for (Index j = 0; j < ds.cols(); ++j) d(i, j) = ds(i, j) * unit(rng);
    consider(cl.a_k_hat + d * lift, ev.sampled_max_radius);
  }
  ev.sample_count = samples;
  ev.necessary_ok = ev.witness_radius < 1.0;

  const auto cert = contraction(cl);
  ev.abs_bound_radius = cert.abs_bound_radius;
  ev.abs_bound_ok = cert.abs_bound_ok();
  ev.nominal_radius = cert.nominal_radius;
  ev.series_radius = cert.series_radius;
  ev.series_ok = cert.series_ok();
  return ev;
}

setalg::Box compute_x_infinity(const tube::ClosedLoopInterval& cl, const Vector& w_bar, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("compute_x_infinity: eps must be positive");
  if (w_bar.size() != cl.dim()) throw ShapeMismatch("compute_x_infinity: w_bar has the wrong dimension");
  const auto cert = contraction(cl);
  if (!cert.ok())
    throw NotContractive("closed-loop interval is not contractive: rho(|A_K|+Delta_K) = " +
                         std::to_string(cert.abs_bound_radius) + ", series radius " +
                         std::to_string(cert.series_radius));
  const auto interval = cl.interval();
  auto m = setalg::MatrixZonotope::from_symmetric_interval(Matrix(w_bar));
  Vector acc = Vector::Zero(cl.dim());
  for (int i = 0; i < 100000; ++i) {
    if (i > 0) m = setalg::transport(interval, m);
    const Vector term = setalg::box_of_zonotope(m).radius().col(0);
    acc += term;
    if (term.lpNorm<Eigen::Infinity>() <= eps * acc.lpNorm<Eigen::Infinity>())
      return setalg::Box::symmetric((1.0 + eps) * acc);
  }
  throw NotContractive("compute_x_infinity: series did not reach the truncation threshold");
}

Vector x_infinity_limit(const tube::ClosedLoopInterval& cl, const Vector& w_bar) {
  const auto series = abs_power_series(cl.a_k_hat);
  if (!series) throw NotContractive("x_infinity_limit: nominal closed loop is not Schur");
  const Index n = cl.dim();
  const Matrix loop = Matrix::Identity(n, n) - cl.delta_k * *series;
  return *series * loop.lu().solve(w_bar);
}

TerminalResult box_terminal_set(const tube::ClosedLoopInterval& cl, const Vector& w_bar, const Polytope& state_set,
                                const Polytope& input_set, const Matrix& k_gain, double eps, int max_iterations) {
  const Matrix bound = cl.a_k_hat.cwiseAbs() + cl.delta_k;
  const setalg::Box outer = state_set.bounding_box();
  Vector r = compute_x_infinity(cl, w_bar, eps).radius;
  TerminalResult out;
  for (int it = 0; it < max_iterations; ++it) {
    const Vector next = bound * r + w_bar;
    if (((next - r).array() <= 0.0).all()) {
      out.iterations = it;
      out.converged = true;
      break;
    }
    r = (1.0 + eps) * next.cwiseMax(r);
    if (((r - (outer.radius + outer.center.cwiseAbs())).array() > 0.0).any())
      throw NoValidTerminalSet("invariant box grows beyond the state constraints");
  }
  if (!out.converged) throw NoValidTerminalSet("box iteration did not certify invariance");
  const auto box = setalg::Box::symmetric(r);
  if (!state_set.contains(box)) throw NoValidTerminalSet("invariant box is not inside the state constraints");
  const Vector image_slack =
      input_set.b() - (input_set.h() * k_gain).cwiseAbs() * r;
  if (image_slack.size() > 0 && image_slack.minCoeff() < -1e-9)
    throw NoValidTerminalSet("K times the invariant box violates the input constraints");
  out.set = Polytope::from_box(box);
  return out;
}

TerminalResult maximal_terminal_set(const ident::UncertainModel& model, const Matrix& k_gain,
                                    const Polytope& state_set, const Polytope& input_set, int max_iterations) {
  constexpr double kTol = 1e-9;
  const Index n = model.state_dim();
  Matrix h0(state_set.num_constraints() + input_set.num_constraints(), n);
  h0 << state_set.h(), input_set.h() * k_gain;
  Vector b0(h0.rows());
  b0 << state_set.b(), input_set.b();
  Polytope omega = Polytope(h0, b0).without_redundant();
  if (omega.is_empty()) throw NoValidTerminalSet("{x in X : Kx in U} is empty");

  TerminalResult out;
  for (int it = 1; it <= max_iterations; ++it) {
    Matrix ph;
    Vector pb;
    pre_rows(model, k_gain, omega.h(), omega.b(), ph, pb);
    bool invariant = true;
    for (Index i = 0; i < ph.rows() && invariant; ++i) {
      const auto s = omega.support(ph.row(i).transpose());
      if (!s || *s > pb(i) + kTol * (1.0 + std::abs(pb(i)))) invariant = false;
    }
    if (invariant) {
      out.set = omega;
      out.iterations = it - 1;
      out.converged = true;
      return out;
    }
    Matrix hh(omega.num_constraints() + ph.rows(), n);
    hh << omega.h(), ph;
    Vector bb(hh.rows());
    bb << omega.b(), pb;
    Polytope next(hh, bb);
    if (next.is_empty()) throw NoValidTerminalSet("invariant set iteration collapsed to the empty set");
    omega = next.without_redundant();
  }
  throw NoValidTerminalSet("invariant set iteration did not converge in " + std::to_string(max_iterations) +
                           " steps");
}

double invariance_violation(const ident::UncertainModel& model, const Matrix& k_gain, const Polytope& set) {
  Matrix ph;
  Vector pb;
  pre_rows(model, k_gain, set.h(), set.b(), ph, pb);
  double worst = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < ph.rows(); ++i) {
    const auto s = set.support(ph.row(i).transpose());
    if (!s) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, *s - pb(i));
  }
  return worst;
}

std::string to_string(TerminalMethod m) { return m == TerminalMethod::Box ? "box" : "maximal"; }

SynthesisReport synthesize(const ident::UncertainModel& model, const Matrix& k_gain, const Polytope& state_set,
                           const Polytope& input_set, TerminalMethod method, double eps) {
  SynthesisReport rep;
  rep.method = method;
  rep.gain = validate_gain(model, k_gain);
  if (!rep.gain.sufficient_ok())
    throw NotContractive("gain K has no contraction certificate (rho(|A_K|+Delta_K) = " +
                         std::to_string(rep.gain.abs_bound_radius) + ", series radius " +
                         std::to_string(rep.gain.series_radius) + ")");
  const auto cl = tube::ClosedLoopInterval::from(model, k_gain);
  rep.x_infinity = compute_x_infinity(cl, model.w_bar, eps);
  const TerminalResult term = method == TerminalMethod::Box
                                  ? box_terminal_set(cl, model.w_bar, state_set, input_set, k_gain, eps)
                                  : maximal_terminal_set(model, k_gain, state_set, input_set);
  rep.terminal_set = term.set;
  rep.iterations = term.iterations;
  rep.converged = term.converged;
  return rep;
}

namespace {

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

std::string SynthesisReport::to_json() const {
  nlohmann::json j;
  j["gain"] = {{"valid", gain.valid()},
               {"necessary_ok", gain.necessary_ok},
               {"vertex_check_complete", gain.vertex_check_complete},
               {"vertex_count", gain.vertex_count},
               {"vertex_max_spectral_radius", gain.vertex_max_radius},
               {"sample_count", gain.sample_count},
               {"sampled_max_spectral_radius", gain.sampled_max_radius},
               {"witness", matrix_json(gain.witness)},
               {"witness_spectral_radius", gain.witness_radius},
               {"abs_bound_spectral_radius", gain.abs_bound_radius},
               {"abs_bound_ok", gain.abs_bound_ok},
               {"nominal_spectral_radius", gain.nominal_radius},
               {"series_spectral_radius", gain.series_radius},
               {"series_ok", gain.series_ok}};
  j["x_infinity"] = {{"center", vector_json(x_infinity.center)}, {"radius", vector_json(x_infinity.radius)}};
  j["terminal_set"] = {{"method", synth::to_string(method)},
                       {"H", matrix_json(terminal_set.h())},
                       {"b", vector_json(terminal_set.b())},
                       {"iterations", iterations},
                       {"converged", converged}};
  return j.dump(2);
}

}  // namespace impc::synth
