#include "impc/qpsolve.hpp"

#include "impc/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace impc::qp {

std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    case Status::MaxIter: return "MaxIter";
  }
  return "Unknown";
}

void QpProblem::validate() const {
  const Index d = linear.size();
  if (hessian.rows() != d || hessian.cols() != d)
    throw ShapeMismatch("QpProblem: hessian must be " + std::to_string(d) + "x" + std::to_string(d));
  if (eq_rhs.size() > 0 && (eq_lhs.rows() != eq_rhs.size() || eq_lhs.cols() != d))
    throw ShapeMismatch("QpProblem: equality block has inconsistent shape");
  if (eq_rhs.size() == 0 && eq_lhs.rows() != 0)
    throw ShapeMismatch("QpProblem: equality lhs without rhs");
  if (ineq_rhs.size() > 0 && (ineq_lhs.rows() != ineq_rhs.size() || ineq_lhs.cols() != d))
    throw ShapeMismatch("QpProblem: inequality block has inconsistent shape");
  if (ineq_rhs.size() == 0 && ineq_lhs.rows() != 0)
    throw ShapeMismatch("QpProblem: inequality lhs without rhs");
  if (d == 0) return;
  const double scale = std::max(1.0, hessian.cwiseAbs().maxCoeff());
  if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("QpProblem: hessian is not symmetric");
  if (hessian.isZero(0.0)) return;
  Eigen::LDLT<Matrix> ldlt(hessian);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < -1e-10 * scale)
    throw InvalidArgument("QpProblem: hessian is not positive semidefinite");
}

QpProblem QpProblem::linear_program(Vector c, Matrix eq_lhs, Vector eq_rhs, Matrix ineq_lhs,
                                    Vector ineq_rhs) {
  QpProblem p;
  const Index d = c.size();
  p.hessian = Matrix::Zero(d, d);
  p.linear = std::move(c);
  p.eq_lhs = eq_rhs.size() > 0 ? std::move(eq_lhs) : Matrix(0, d);
  p.eq_rhs = std::move(eq_rhs);
  p.ineq_lhs = ineq_rhs.size() > 0 ? std::move(ineq_lhs) : Matrix(0, d);
  p.ineq_rhs = std::move(ineq_rhs);
  return p;
}

namespace {

constexpr double kRowNormFloor = 1e-12;
constexpr int kBlandAfterDegenerateSteps = 3;

struct EngineResult {
  enum class Kind { Optimal, Unbounded, MaxIter, TargetReached };
  Kind kind = Kind::MaxIter;
  Vector y;
  std::vector<Index> working;
  Vector multipliers;  // aligned with `working`
  int iterations = 0;
};

// Primal active-set iteration for  min 0.5 y'Hy + c'y  s.t.  G y <= h  with
// unit-norm rows of G. `linear` skips all Hessian work.
class ActiveSetEngine {
 public:
  ActiveSetEngine(const Matrix* hessian, const Vector& c, const Matrix& g, const Vector& h,
                  const Options& opts)
      : hessian_(hessian), c_(c), g_(g), h_(h), opts_(opts) {}

  EngineResult run(Vector y, std::vector<Index> working, int max_iter,
                   std::optional<double> target) const {
    const Index r = y.size();
    const Index q = g_.rows();
    std::vector<char> in_working(static_cast<std::size_t>(q), 0);
    for (Index i : working) in_working[static_cast<std::size_t>(i)] = 1;

    EngineResult out;
    int degenerate = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
      out.iterations = iter + 1;
      const Vector grad = hessian_ != nullptr ? Vector(*hessian_ * y + c_) : c_;
      const Index w = static_cast<Index>(working.size());

      Matrix q_full;
      Matrix r_upper;
      if (w > 0) {
        Matrix at(r, w);
        for (Index k = 0; k < w; ++k) at.col(k) = g_.row(working[static_cast<std::size_t>(k)]).transpose();
        Eigen::HouseholderQR<Matrix> qr(at);
        q_full = qr.householderQ();
        r_upper = qr.matrixQR().topLeftCorner(w, w).triangularView<Eigen::Upper>();
      }
      const Index nz = r - w;

      Vector p = Vector::Zero(r);
      bool bounded_step = true;
      if (nz > 0) {
        const Matrix z = w > 0 ? Matrix(q_full.rightCols(nz)) : Matrix::Identity(r, r);
        const Vector gz = z.transpose() * grad;
        if (hessian_ == nullptr) {
          if (gz.norm() > 1e-14 * (1.0 + grad.norm())) {
            p = -z * gz;
            bounded_step = false;
          }
        } else {
          const Matrix hz = z.transpose() * (*hessian_) * z;
          const double hscale = std::max(1.0, hz.diagonal().cwiseAbs().maxCoeff());
          Eigen::LLT<Matrix> llt(hz);
          bool pd = llt.info() == Eigen::Success;
          if (pd) {
            const double min_pivot = Matrix(llt.matrixL()).diagonal().minCoeff();
            pd = min_pivot * min_pivot > 1e-11 * hscale;
          }
          if (pd) {
            p = -z * llt.solve(gz);
          } else {
            Eigen::SelfAdjointEigenSolver<Matrix> es(hz);
            const Vector& lam = es.eigenvalues();
            const Matrix& v = es.eigenvectors();
            const double thr = 1e-10 * std::max(1.0, lam.cwiseAbs().maxCoeff());
            Vector null_part = Vector::Zero(nz);
            Vector range_part = Vector::Zero(nz);
            for (Index k = 0; k < nz; ++k) {
              const double proj = v.col(k).dot(gz);
              if (lam(k) <= thr) {
                null_part += proj * v.col(k);
              } else {
                range_part += (proj / lam(k)) * v.col(k);
              }
            }
            if (null_part.norm() > 1e-12 * (1.0 + grad.norm())) {
              p = -z * null_part;
              bounded_step = false;
            } else {
              p = -z * range_part;
            }
          }
        }
      }

      const double pnorm = p.cwiseAbs().maxCoeff();
      if (nz == 0 || pnorm <= 1e-13 * (1.0 + y.cwiseAbs().maxCoeff())) {
        // Stationary on the working set: inspect multipliers.
        Vector lambda;
        if (w > 0) {
          const Vector rhs = -(q_full.leftCols(w).transpose() * grad);
          lambda = r_upper.triangularView<Eigen::Upper>().solve(rhs);
        }
        Index drop = -1;
        const bool bland = degenerate >= kBlandAfterDegenerateSteps;
        double most_negative = -opts_.stationarity_tol;
        Index drop_constraint = std::numeric_limits<Index>::max();
        for (Index k = 0; k < w; ++k) {
          const Index idx = working[static_cast<std::size_t>(k)];
          if (bland) {
            if (lambda(k) < -opts_.stationarity_tol && idx < drop_constraint) {
              drop = k;
              drop_constraint = idx;
            }
          } else if (lambda(k) < most_negative ||
                     (drop >= 0 && lambda(k) == most_negative && idx < drop_constraint)) {
            most_negative = lambda(k);
            drop = k;
            drop_constraint = idx;
          }
        }
        if (drop < 0) {
          out.kind = EngineResult::Kind::Optimal;
          out.y = std::move(y);
          out.working = std::move(working);
          out.multipliers = std::move(lambda);
          return out;
        }
        in_working[static_cast<std::size_t>(working[static_cast<std::size_t>(drop)])] = 0;
        working.erase(working.begin() + drop);
        continue;
      }

      double alpha = bounded_step ? 1.0 : std::numeric_limits<double>::infinity();
      Index block = -1;
      const Vector gp = g_ * p;
      const Vector slack = h_ - g_ * y;
      const double pn2 = p.norm();
      for (Index i = 0; i < q; ++i) {
        if (in_working[static_cast<std::size_t>(i)]) continue;
        if (gp(i) <= 1e-12 * pn2) continue;
        const double ratio = std::max(0.0, slack(i)) / gp(i);
        if (ratio < alpha) {
          alpha = ratio;
          block = i;
        }
      }
      if (block < 0 && !bounded_step) {
        out.kind = EngineResult::Kind::Unbounded;
        out.y = std::move(y);
        out.working = std::move(working);
        return out;
      }
      y += alpha * p;
      if (block >= 0) {
        working.push_back(block);
        in_working[static_cast<std::size_t>(block)] = 1;
      }
      if (alpha * pnorm <= 1e-14 * (1.0 + y.cwiseAbs().maxCoeff())) {
        ++degenerate;
      } else {
        degenerate = 0;
      }
      if (target.has_value()) {
        double obj = c_.dot(y);
        if (hessian_ != nullptr) obj += 0.5 * y.dot(*hessian_ * y);
        if (obj <= *target) {
          out.kind = EngineResult::Kind::TargetReached;
          out.y = std::move(y);
          out.working = std::move(working);
          return out;
        }
      }
    }
    out.kind = EngineResult::Kind::MaxIter;
    out.y = std::move(y);
    out.working = std::move(working);
    return out;
  }

 private:
  const Matrix* hessian_;
  const Vector& c_;
  const Matrix& g_;
  const Vector& h_;
  const Options& opts_;
};

// Keeps the candidates (in the given order) whose rows are linearly
// independent of the ones already kept.
std::vector<Index> independent_subset(const Matrix& g, const std::vector<Index>& candidates) {
  std::vector<Index> kept;
  Matrix acc(0, g.cols());
  for (Index idx : candidates) {
    if (static_cast<Index>(kept.size()) >= g.cols()) break;
    Matrix trial(acc.rows() + 1, g.cols());
    trial << acc, g.row(idx);
    Eigen::ColPivHouseholderQR<Matrix> qr(trial.transpose());
    qr.setThreshold(1e-10);
    if (qr.rank() == trial.rows()) {
      acc = std::move(trial);
      kept.push_back(idx);
    }
  }
  return kept;
}

// Least-squares equality multipliers: E' mu = -rhs.
Vector equality_multipliers(const Matrix& e, const Vector& rhs) {
  if (e.rows() == 0) return Vector();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(e.transpose());
  return cod.solve(-rhs);
}

double objective_value(const QpProblem& p, const Vector& x) {
  return 0.5 * x.dot(p.hessian * x) + p.linear.dot(x);
}

QpSolution solve_impl(const QpProblem& p, const Options& opts, bool linear) {
  p.validate();
  const Index d = p.dim();
  const Index q = p.num_ineq();
  const int max_iter = opts.max_iterations > 0 ? opts.max_iterations : static_cast<int>(10 * (d + q) + 10);

  QpSolution sol;
  if (!linear) {
    if (d > 0) {
      // Pivoted LDL': a zero (or roundoff-sized) pivot means a flat direction.
      const Vector piv = Eigen::LDLT<Matrix>(p.hessian).vectorD();
      sol.singular_hessian = piv.minCoeff() <= 1e-12 * std::max(1.0, piv.cwiseAbs().maxCoeff());
    }
  }

  // Eliminate equalities: x = xp + Z y.
  Vector xp = Vector::Zero(d);
  Matrix z = Matrix::Identity(d, d);
  if (p.num_eq() > 0) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(p.eq_lhs);
    xp = cod.solve(p.eq_rhs);
    const Vector resid = p.eq_lhs * xp - p.eq_rhs;
    const double res = resid.size() > 0 ? resid.cwiseAbs().maxCoeff() : 0.0;
    if (res > opts.feasibility_tol * (1.0 + p.eq_rhs.cwiseAbs().maxCoeff())) {
      sol.status = Status::Infeasible;
      sol.x = xp;
      sol.objective = objective_value(p, xp);
      sol.eq_multipliers = resid;
      sol.ineq_multipliers = Vector::Zero(q);
      sol.infeasibility = res;
      return sol;
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(p.eq_lhs.transpose());
    qr.setThreshold(1e-12);
    const Index rank = qr.rank();
    const Matrix qfull = qr.householderQ();
    z = qfull.rightCols(d - rank);
  }
  const Index r = z.cols();

  Matrix hr;
  if (!linear) hr = z.transpose() * p.hessian * z;
  const Vector cr = z.transpose() * (p.hessian * xp + p.linear);
  const Matrix gr_raw = q > 0 ? Matrix(p.ineq_lhs * z) : Matrix(0, r);
  const Vector hr_raw = q > 0 ? Vector(p.ineq_rhs - p.ineq_lhs * xp) : Vector(0);

  // Normalize rows; rows constant on the equality manifold are checked directly.
  std::vector<Index> row_map;
  std::vector<double> row_norm;
  for (Index i = 0; i < q; ++i) {
    const double nrm = gr_raw.row(i).norm();
    if (nrm > kRowNormFloor) {
      row_map.push_back(i);
      row_norm.push_back(nrm);
    } else if (hr_raw(i) < -opts.feasibility_tol) {
      sol.status = Status::Infeasible;
      sol.x = xp;
      sol.objective = objective_value(p, xp);
      sol.ineq_multipliers = Vector::Zero(q);
      sol.ineq_multipliers(i) = 1.0;
      sol.eq_multipliers = equality_multipliers(p.eq_lhs, p.ineq_lhs.row(i).transpose());
      sol.infeasibility = -hr_raw(i);
      return sol;
    }
  }
  const Index qn = static_cast<Index>(row_map.size());
  Matrix gn(qn, r);
  Vector hn(qn);
  for (Index k = 0; k < qn; ++k) {
    gn.row(k) = gr_raw.row(row_map[static_cast<std::size_t>(k)]) / row_norm[static_cast<std::size_t>(k)];
    hn(k) = hr_raw(row_map[static_cast<std::size_t>(k)]) / row_norm[static_cast<std::size_t>(k)];
  }

  auto to_original_lambda = [&](const std::vector<Index>& working, const Vector& mult) {
    Vector lam = Vector::Zero(q);
    for (std::size_t k = 0; k < working.size(); ++k) {
      const Index idx = working[k];
      if (idx >= qn) continue;
      lam(row_map[static_cast<std::size_t>(idx)]) = mult(static_cast<Index>(k)) / row_norm[static_cast<std::size_t>(idx)];
    }
    return lam;
  };

  // Phase 1: min t  s.t.  Gn y - t <= hn,  -t <= 0.
  Vector y = Vector::Zero(r);
  std::vector<Index> working;
  const double t0 = qn > 0 ? std::max(0.0, (-hn).maxCoeff()) : 0.0;
  if (t0 > opts.feasibility_tol) {
    Matrix g1 = Matrix::Zero(qn + 1, r + 1);
    g1.topLeftCorner(qn, r) = gn;
    g1.col(r).setConstant(-1.0);
    Vector h1(qn + 1);
    h1.head(qn) = hn;
    h1(qn) = 0.0;
    // Rows of g1 are no longer unit norm; rescale them for consistent tolerances.
    Vector scale1(qn + 1);
    for (Index k = 0; k <= qn; ++k) scale1(k) = g1.row(k).norm();
    for (Index k = 0; k <= qn; ++k) {
      g1.row(k) /= scale1(k);
      h1(k) /= scale1(k);
    }
    Vector c1 = Vector::Zero(r + 1);
    c1(r) = 1.0;
    Vector y1 = Vector::Zero(r + 1);
    y1(r) = t0;
    Index first = 0;
    for (Index k = 0; k < qn; ++k) {
      if (-hn(k) >= t0) {
        first = k;
        break;
      }
    }
    ActiveSetEngine engine(nullptr, c1, g1, h1, opts);
    EngineResult res = engine.run(std::move(y1), {first}, max_iter, 0.0);
    sol.phase1_iterations = res.iterations;
    if (res.kind == EngineResult::Kind::MaxIter) {
      sol.status = Status::MaxIter;
      sol.x = xp + z * res.y.head(r);
      sol.objective = objective_value(p, sol.x);
      return sol;
    }
    const double tstar = res.y(r);
    if (res.kind == EngineResult::Kind::Optimal && tstar > opts.feasibility_tol) {
      sol.status = Status::Infeasible;
      sol.infeasibility = tstar;
      sol.x = xp + z * res.y.head(r);
      sol.objective = objective_value(p, sol.x);
      Vector mult = res.multipliers;
      for (std::size_t k = 0; k < res.working.size(); ++k) {
        mult(static_cast<Index>(k)) /= scale1(res.working[k]);
      }
      sol.ineq_multipliers = to_original_lambda(res.working, mult);
      sol.eq_multipliers = equality_multipliers(p.eq_lhs, p.ineq_lhs.transpose() * sol.ineq_multipliers);
      return sol;
    }
    y = res.y.head(r);
    std::vector<Index> cand;
    for (Index idx : res.working)
      if (idx < qn) cand.push_back(idx);
    working = independent_subset(gn, cand);
  } else if (qn > 0) {
    std::vector<Index> cand;
    for (Index k = 0; k < qn; ++k)
      if (std::abs(hn(k)) <= opts.feasibility_tol) cand.push_back(k);
    working = independent_subset(gn, cand);
  }

  if (opts.feasibility_only) {
    sol.status = Status::Optimal;
    sol.x = xp + z * y;
    sol.objective = objective_value(p, sol.x);
    return sol;
  }

  // Phase 2.
  ActiveSetEngine engine(linear ? nullptr : &hr, cr, gn, hn, opts);
  EngineResult res = engine.run(std::move(y), std::move(working), max_iter, std::nullopt);
  sol.phase2_iterations = res.iterations;
  sol.x = xp + z * res.y;
  sol.objective = objective_value(p, sol.x);
  switch (res.kind) {
    case EngineResult::Kind::Optimal: {
      sol.status = Status::Optimal;
      sol.ineq_multipliers = to_original_lambda(res.working, res.multipliers);
      Vector stat = p.hessian * sol.x + p.linear;
      if (q > 0) stat += p.ineq_lhs.transpose() * sol.ineq_multipliers;
      sol.eq_multipliers = equality_multipliers(p.eq_lhs, stat);
      break;
    }
    case EngineResult::Kind::Unbounded:
      sol.status = Status::Unbounded;
      break;
    case EngineResult::Kind::MaxIter:
    case EngineResult::Kind::TargetReached:
      sol.status = Status::MaxIter;
      break;
  }
  return sol;
}

}  // namespace

QpSolution solve_qp(const QpProblem& p, const Options& opts) { return solve_impl(p, opts, false); }

QpSolution solve_lp(const QpProblem& p, const Options& opts) {
  if (!p.hessian.isZero(0.0)) throw InvalidArgument("solve_lp: hessian must be zero");
  return solve_impl(p, opts, true);
}

}  // namespace impc::qp
