// Dense primal active-set solver for strictly convex quadratic programs with
// two-sided linear inequality constraints:
//
//   minimize 1/2 u'Qu + p'u   subject to   lb <= A u <= ub
//
// Sized for the MPC problems here (n ~ 36, m_c ~ 40): dense factorizations,
// exact active-set identification, cheap warm starting across control cycles.
// Feasible starting points come from an internal phase-1 subproblem that
// minimizes the largest constraint violation; a strictly positive minimum is
// the infeasibility certificate.
#pragma once

#include <optional>

#include "wpg/types.hpp"

namespace wpg {

struct QpProblem {
  Mat Q;   // n x n, symmetric positive semidefinite
  Vec p;   // n
  Mat A;   // m_c x n (m_c may be 0)
  Vec lb;  // m_c, -inf allowed
  Vec ub;  // m_c, +inf allowed

  int n() const { return static_cast<int>(p.size()); }
  int mc() const { return static_cast<int>(A.rows()); }
  // Throws std::invalid_argument on inconsistent dimensions or asymmetric Q.
  void validate() const;
};

enum class QpStatus { Optimal, Infeasible, MaxIterations };

struct QpSolution {
  Vec u;
  QpStatus status = QpStatus::MaxIterations;
  double objective = 0.0;
  int iterations = 0;
  // Signed multipliers per constraint row: >= 0 when the upper bound is
  // active, <= 0 at the lower bound, 0 when inactive. Stationarity holds as
  // Q u + p + A' lambda = 0 within tolerance for Optimal solutions.
  Vec lambda;
};

struct QpOptions {
  double feas_tol = 1e-7;    // bound satisfaction, after row scaling
  double stat_tol = 1e-6;    // KKT stationarity residual
  double phase1_tol = 1e-8;  // max-violation threshold for infeasibility
  // Ridge policy: when the smallest LDLT pivot of Q falls to or below
  // pivot_min * max(1, max diagonal), reg * max(1, max diagonal) is added to
  // the diagonal. Both are relative so large, well-conditioned objectives are
  // never perturbed.
  double pivot_min = 1e-10;
  double reg = 1e-9;
  // 0 -> max(2000, 30*(n + m_c)). Near-singular objectives (curvature spans
  // many orders of magnitude) converge exactly but zigzag along degenerate
  // facets, so the ceiling is generous; well-conditioned problems never
  // approach it.
  int max_iterations = 0;
};

QpSolution solve_qp(const QpProblem& problem,
                    const std::optional<Vec>& warm_start = std::nullopt,
                    const QpOptions& options = QpOptions{});

}  // namespace wpg
