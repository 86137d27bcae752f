#pragma once

#include "impc/ident.hpp"
#include "impc/polytope.hpp"
#include "impc/tube.hpp"

#include <cstdint>
#include <string>

namespace impc::synth {

struct GainEvidence {
  /// Largest spectral radius over the 2^{n(n+m)} vertices of the interval
  /// family (only when vertex_check_complete).
  double vertex_max_radius = 0.0;
  bool vertex_check_complete = false;
  int vertex_count = 0;
  /// Largest spectral radius over random interior samples.
  double sampled_max_radius = 0.0;
  int sample_count = 0;
  /// Family member attaining the largest radius seen, and that radius.
  Matrix witness;
  double witness_radius = 0.0;
  /// Necessary condition: every checked member is Schur.
  bool necessary_ok = false;

  /// rho(|A_K_hat| + Delta_K).
  double abs_bound_radius = 0.0;
  bool abs_bound_ok = false;
  /// rho(A_K_hat) and rho(Delta_K sum_t |A_K_hat^t|): the tube series converges
  /// when both are below one.
  double nominal_radius = 0.0;
  double series_radius = 0.0;
  bool series_ok = false;

  /// Contractivity certificate used by the synthesis steps.
  bool sufficient_ok() const noexcept { return abs_bound_ok || series_ok; }
  bool valid() const noexcept { return necessary_ok && sufficient_ok(); }
};

struct ContractionCertificate {
  double abs_bound_radius = 0.0;
  double nominal_radius = 0.0;
  double series_radius = 0.0;
  bool abs_bound_ok() const noexcept { return abs_bound_radius < 1.0; }
  bool series_ok() const noexcept { return nominal_radius < 1.0 && series_radius < 1.0; }
  bool ok() const noexcept { return abs_bound_ok() || series_ok(); }
};

ContractionCertificate contraction(const tube::ClosedLoopInterval& cl);

/// Evidence for the Schur property of A + B K over the whole interval model.
GainEvidence validate_gain(const ident::UncertainModel& model, const Matrix& k_gain, int samples = 10000,
                           std::uint64_t seed = 1);

/// Outer box of the sum of box(T^i(W)), truncated once the newest term falls
/// below eps times the accumulated radius, then scaled by (1 + eps).
/// Throws NotContractive when the contraction certificate fails.
setalg::Box compute_x_infinity(const tube::ClosedLoopInterval& cl, const Vector& w_bar, double eps = 1e-3);

/// Closed form of the untruncated series radius (valid under the series certificate).
Vector x_infinity_limit(const tube::ClosedLoopInterval& cl, const Vector& w_bar);

enum class TerminalMethod { Box, Maximal };

struct TerminalResult {
  Polytope set;
  int iterations = 0;
  bool converged = false;
};

/// Box terminal set: iterates r <- (|A_K_hat| + Delta_K) r + w_bar from the
/// X_inf candidate, inflating by (1 + eps) until invariance is certified, then
/// checks S in X and K S in U. Throws NoValidTerminalSet.
TerminalResult box_terminal_set(const tube::ClosedLoopInterval& cl, const Vector& w_bar, const Polytope& state_set,
                                const Polytope& input_set, const Matrix& k_gain, double eps = 1e-3,
                                int max_iterations = 10000);

/// Largest polytope in {x in X : K x in U} that is invariant under the
/// one-step tube map x -> A_K_hat x (+) [-(Delta_S |(x, Kx)| + w_bar), +(...)].
/// Throws NoValidTerminalSet if the iteration does not settle or collapses.
TerminalResult maximal_terminal_set(const ident::UncertainModel& model, const Matrix& k_gain,
                                    const Polytope& state_set, const Polytope& input_set,
                                    int max_iterations = 200);

/// Worst-case violation of the invariance condition of a terminal set,
/// max over its vertices (2-D) or a sampled check otherwise; <= 0 when invariant.
double invariance_violation(const ident::UncertainModel& model, const Matrix& k_gain, const Polytope& set);

struct SynthesisReport {
  GainEvidence gain;
  setalg::Box x_infinity;
  Polytope terminal_set;
  TerminalMethod method = TerminalMethod::Maximal;
  int iterations = 0;
  bool converged = false;

  std::string to_json() const;
};

/// validate_gain + compute_x_infinity + terminal set. Throws NotContractive
/// when the gain has no contraction certificate.
SynthesisReport synthesize(const ident::UncertainModel& model, const Matrix& k_gain, const Polytope& state_set,
                           const Polytope& input_set, TerminalMethod method, double eps = 1e-3);

std::string to_string(TerminalMethod m);

}  // namespace impc::synth
