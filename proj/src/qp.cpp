#include "wpg/qp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace wpg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One-sided view of the scaled problem: g'u <= h for inequalities, g'u = h
// for equalities (rows whose bounds coincide). Equalities are stored first.
struct Rows {
  std::vector<Vec> g;
  std::vector<double> h;
  std::vector<int> orig;  // source row in A
  std::vector<int> side;  // +1 upper bound, -1 lower bound, 0 equality
  int n_eq = 0;
};

// Equality-constrained step and multipliers via the null-space method.
// Factorizes M' (n x mw) per working set; problems are small, so no
// incremental updates.
struct KktSolver {
  Mat Y;   // n x mw range-space basis
  Mat Z;   // n x (n - mw) null-space basis
  Mat R1;  // mw x mw upper triangular
  Eigen::LLT<Mat> reduced;  // LLT of Z'QZ
  int n = 0, mw = 0;
  bool ok = false;

  void factor(const Mat& Q, const Rows& rows, const std::vector<int>& ws, double reg) {
    n = static_cast<int>(Q.rows());
    mw = static_cast<int>(ws.size());
    if (mw == 0) {
      Z = Mat::Identity(n, n);
      Y.resize(n, 0);
      R1.resize(0, 0);
    } else {
      Mat Mt(n, mw);
      for (int k = 0; k < mw; ++k) Mt.col(k) = rows.g[ws[k]];
      Eigen::HouseholderQR<Mat> qr(Mt);
      Mat Qf = qr.householderQ();
      Y = Qf.leftCols(mw);
      Z = Qf.rightCols(n - mw);
      R1 = qr.matrixQR().topRows(mw).triangularView<Eigen::Upper>();
    }
    ok = true;
    if (n - mw > 0) {
      Mat Hz = Z.transpose() * Q * Z;
      reduced.compute(Hz);
      if (reduced.info() != Eigen::Success) {
        Hz.diagonal().array() += std::max(reg, 1e-12 * Hz.diagonal().maxCoeff());
        reduced.compute(Hz);
        ok = reduced.info() == Eigen::Success;
      }
    }
  }

  // Step d with M(u + d) = h_W and minimal 1/2 (u+d)'Q(u+d) + p'(u+d).
  Vec step(const Mat& Q, const Vec& p, const Vec& u, const Rows& rows,
           const std::vector<int>& ws) const {
    Vec d = Vec::Zero(n);
    if (mw > 0) {
      Vec resid(mw);
      for (int k = 0; k < mw; ++k) resid[k] = rows.h[ws[k]] - rows.g[ws[k]].dot(u);
      // M Y = R1', so the range-space component solves R1' w = resid.
      Vec w = R1.transpose().triangularView<Eigen::Lower>().solve(resid);
      d = Y * w;
    }
    if (n - mw > 0) {
      Vec rhs = -(Z.transpose() * (Q * (u + d) + p));
      d += Z * reduced.solve(rhs);
    }
    return d;
  }

  // Least-squares multipliers for M' lambda = -(Qu + p).
  Vec multipliers(const Mat& Q, const Vec& p, const Vec& u) const {
    if (mw == 0) return Vec();
    Vec rhs = Y.transpose() * (-(Q * u + p));
    return R1.triangularView<Eigen::Upper>().solve(rhs);
  }

  // True when `g` is numerically independent of the working-set rows.
  bool independent(const Vec& g) const {
    if (n - mw <= 0) return false;
    return (Z.transpose() * g).lpNorm<Eigen::Infinity>() >
           1e-10 * std::max(1.0, g.lpNorm<Eigen::Infinity>());
  }
};

struct CoreResult {
  Vec u;
  QpStatus status = QpStatus::MaxIterations;
  int iterations = 0;
  std::vector<double> lambda;  // per Rows entry
};

// Active-set loop on the one-sided form, starting from a point feasible to
// within tolerance. Independent equality rows enter the working set up front
// and never leave; consistent dependent ones are implied by them.
CoreResult active_set_core(const Mat& Q, const Vec& p, const Rows& rows, Vec u,
                           const QpOptions& opt, int max_iter) {
  const int n = static_cast<int>(u.size());
  const int nr = static_cast<int>(rows.g.size());
  CoreResult res;
  res.lambda.assign(nr, 0.0);

  std::vector<int> ws;
  int n_fixed = 0;
  KktSolver kkt;
  kkt.factor(Q, rows, ws, opt.reg);
  for (int r = 0; r < rows.n_eq; ++r) {
    if (!kkt.independent(rows.g[r])) continue;
    ws.push_back(r);
    kkt.factor(Q, rows, ws, opt.reg);
    ++n_fixed;
  }
  // Activate already-tight inequalities (pays off on warm starts).
  for (int r = rows.n_eq; r < nr; ++r) {
    if (static_cast<int>(ws.size()) >= n) break;
    if (std::abs(rows.g[r].dot(u) - rows.h[r]) <= 1e-9 && kkt.independent(rows.g[r])) {
      ws.push_back(r);
      kkt.factor(Q, rows, ws, opt.reg);
    }
  }

  auto in_ws = [&](int r) { return std::find(ws.begin(), ws.end(), r) != ws.end(); };

  for (res.iterations = 1; res.iterations <= max_iter; ++res.iterations) {
    if (!kkt.ok) break;
    Vec d = kkt.step(Q, p, u, rows, ws);

    if (d.lpNorm<Eigen::Infinity>() <= 1e-11 * (1.0 + u.lpNorm<Eigen::Infinity>())) {
      Vec lam = kkt.multipliers(Q, p, u);
      int worst = -1;
      double worst_val = -1e-9;
      for (int k = n_fixed; k < static_cast<int>(ws.size()); ++k) {
        if (lam[k] < worst_val) {
          worst_val = lam[k];
          worst = k;
        }
      }
      if (worst < 0) {
        for (int k = 0; k < static_cast<int>(ws.size()); ++k) res.lambda[ws[k]] = lam[k];
        res.u = u;
        res.status = QpStatus::Optimal;
        return res;
      }
      ws.erase(ws.begin() + worst);
      kkt.factor(Q, rows, ws, opt.reg);
      continue;
    }

    // Ratio test against the inactive inequalities; ties break to the lowest
    // row index via strict improvement.
    double alpha = 1.0;
    int blocking = -1;
    const double dnorm = std::max(1.0, d.lpNorm<Eigen::Infinity>());
    for (int r = rows.n_eq; r < nr; ++r) {
      if (in_ws(r)) continue;
      const double gd = rows.g[r].dot(d);
      if (gd <= 1e-12 * dnorm) continue;
      const double slack = rows.h[r] - rows.g[r].dot(u);
      const double a = std::max(0.0, slack) / gd;
      if (a < alpha - 1e-14) {
        alpha = a;
        blocking = r;
      }
    }
    u += alpha * d;
    if (blocking >= 0 && kkt.independent(rows.g[blocking])) {
      ws.push_back(blocking);
      kkt.factor(Q, rows, ws, opt.reg);
    }
    // A dependent blocking row cannot occur once u satisfies the working set
    // exactly; if numerics produce one, the shortened step was still taken.
  }

  res.u = u;
  res.status = QpStatus::MaxIterations;
  return res;
}

double max_violation(const Rows& rows, const Vec& u) {
  double v = 0.0;
  for (size_t r = 0; r < rows.g.size(); ++r) {
    const double margin = rows.g[r].dot(u) - rows.h[r];
    v = std::max(v, rows.side[r] == 0 ? std::abs(margin) : margin);
  }
  return v;
}

// Minimizes the largest violation: variables (u, t), every row relaxed to
// g'u - t <= h (equalities as a +/- pair) plus t >= 0, started strictly
// feasible at t0 = violation + 1. Small curvature on u keeps the subproblem
// strictly convex without biasing the slack minimization.
Vec phase1(const Rows& rows, const Vec& u0, const QpOptions& opt, int max_iter,
           double* t_out, bool* hit_cap) {
  const int n = static_cast<int>(u0.size());
  Mat Q = Mat::Zero(n + 1, n + 1);
  Q.topLeftCorner(n, n).diagonal().setConstant(1e-6);
  Q(n, n) = 1e-2;
  Vec p = Vec::Zero(n + 1);
  p[n] = 1.0;
  p.head(n) = -1e-6 * u0;

  Rows aux;
  aux.n_eq = 0;
  for (size_t r = 0; r < rows.g.size(); ++r) {
    const bool eq = rows.side[r] == 0;
    for (int pass = 0; pass < (eq ? 2 : 1); ++pass) {
      Vec g(n + 1);
      g.head(n) = (pass == 1 ? Vec(-rows.g[r]) : rows.g[r]);
      g[n] = -1.0;
      aux.g.push_back(g);
      aux.h.push_back(pass == 1 ? -rows.h[r] : rows.h[r]);
      aux.orig.push_back(static_cast<int>(r));
      aux.side.push_back(1);
    }
  }
  {
    Vec g = Vec::Zero(n + 1);
    g[n] = -1.0;
    aux.g.push_back(g);
    aux.h.push_back(0.0);
    aux.orig.push_back(-1);
    aux.side.push_back(1);
  }

  Vec start(n + 1);
  start.head(n) = u0;
  start[n] = max_violation(rows, u0) + 1.0;
  CoreResult r = active_set_core(Q, p, aux, start, opt, max_iter);
  *t_out = r.u[n];
  *hit_cap = r.status == QpStatus::MaxIterations;
  return r.u.head(n);
}

}  // namespace

void QpProblem::validate() const {
  const int nn = n();
  if (Q.rows() != nn || Q.cols() != nn)
    throw std::invalid_argument("QpProblem: Q must be n x n");
  if (A.rows() != lb.size() || A.rows() != ub.size())
    throw std::invalid_argument("QpProblem: A/lb/ub row mismatch");
  if (A.rows() > 0 && A.cols() != nn)
    throw std::invalid_argument("QpProblem: A column count != n");
  if (nn > 0) {
    const double scale = std::max(1.0, Q.lpNorm<Eigen::Infinity>());
    if ((Q - Q.transpose()).lpNorm<Eigen::Infinity>() > 1e-12 * scale)
      throw std::invalid_argument("QpProblem: Q not symmetric");
  }
}

QpSolution solve_qp(const QpProblem& problem, const std::optional<Vec>& warm_start,
                    const QpOptions& options) {
  problem.validate();
  const int n = problem.n();
  const int mc = problem.mc();
  if (warm_start && warm_start->size() != n)
    throw std::invalid_argument("solve_qp: warm start has wrong dimension");

  QpSolution sol;
  sol.lambda = Vec::Zero(mc);
  auto objective_of = [&](const Vec& u) {
    return 0.5 * u.dot(problem.Q * u) + problem.p.dot(u);
  };
  auto finish = [&](Vec u, QpStatus status, int iterations) {
    sol.u = std::move(u);
    sol.status = status;
    sol.iterations = iterations;
    sol.objective = objective_of(sol.u);
    return sol;
  };

  // Ridge when Q is (near-)singular *relative to its own scale*: curvatures
  // spanning ~15 orders of magnitude make the reduced factorizations
  // noise-dominated, so both the trigger and the lift are proportional to the
  // largest diagonal entry. Well-conditioned problems are left untouched.
  Mat Q = problem.Q;
  {
    Eigen::LDLT<Mat> ldlt(Q);
    const double min_pivot =
        ldlt.info() == Eigen::Success && n > 0 ? ldlt.vectorD().minCoeff() : -1.0;
    const double scale = n > 0 ? std::max(1.0, Q.diagonal().maxCoeff()) : 1.0;
    if (min_pivot <= options.pivot_min * scale) Q.diagonal().array() += options.reg * scale;
  }

  // Build scaled one-sided rows; constant and free rows are resolved here.
  Rows rows;
  std::vector<double> row_scale(mc, 1.0);
  for (int pass = 0; pass < 2; ++pass) {  // equalities first
    for (int i = 0; i < mc; ++i) {
      const double lo = problem.lb[i];
      const double hi = problem.ub[i];
      if (std::isnan(lo) || std::isnan(hi))
        throw std::invalid_argument("solve_qp: NaN bound");
      if (lo == -kInf && hi == kInf) continue;
      if (lo > hi || lo == kInf || hi == -kInf)
        return finish(warm_start ? *warm_start : Vec::Zero(n), QpStatus::Infeasible, 0);
      const double norm = problem.A.row(i).lpNorm<Eigen::Infinity>();
      if (norm < 1e-14) {
        if (lo > options.feas_tol || hi < -options.feas_tol)
          return finish(warm_start ? *warm_start : Vec::Zero(n), QpStatus::Infeasible, 0);
        continue;
      }
      const bool eq = std::isfinite(lo) && std::isfinite(hi) &&
                      hi - lo <= 1e-12 * std::max(1.0, std::abs(hi));
      if ((pass == 0) != eq) continue;
      const double s = 1.0 / norm;
      row_scale[i] = s;
      const Vec a = problem.A.row(i).transpose() * s;
      if (eq) {
        rows.g.push_back(a);
        rows.h.push_back(0.5 * (lo + hi) * s);
        rows.orig.push_back(i);
        rows.side.push_back(0);
        ++rows.n_eq;
      } else {
        if (hi < kInf) {
          rows.g.push_back(a);
          rows.h.push_back(hi * s);
          rows.orig.push_back(i);
          rows.side.push_back(1);
        }
        if (lo > -kInf) {
          rows.g.push_back(-a);
          rows.h.push_back(-lo * s);
          rows.orig.push_back(i);
          rows.side.push_back(-1);
        }
      }
    }
  }

  const int max_iter =
      options.max_iterations > 0 ? options.max_iterations : std::max(2000, 30 * (n + mc));

  Vec u0 = warm_start ? *warm_start : Vec::Zero(n);
  int used_iterations = 0;
  if (max_violation(rows, u0) > options.feas_tol) {
    double t_star = 0.0;
    bool capped = false;
    u0 = phase1(rows, u0, options, max_iter, &t_star, &capped);
    used_iterations = 1;  // counted as one outer event; the cap guards runaway
    if (capped) return finish(u0, QpStatus::MaxIterations, max_iter);
    if (t_star > options.phase1_tol) return finish(u0, QpStatus::Infeasible, used_iterations);
  }

  CoreResult core = active_set_core(Q, problem.p, rows, u0, options, max_iter);
  finish(core.u, core.status, std::min(max_iter, used_iterations + core.iterations));
  for (size_t r = 0; r < rows.g.size(); ++r) {
    if (core.lambda[r] == 0.0) continue;
    // Back to the signed two-sided convention, undoing the row scaling.
    double contrib = core.lambda[r] * row_scale[rows.orig[r]];
    if (rows.side[r] == -1) contrib = -contrib;
    sol.lambda[rows.orig[r]] += contrib;
  }
  return sol;
}

}  // namespace wpg
