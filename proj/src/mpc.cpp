#include "wpg/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wpg {

namespace {

constexpr double kKernelTol = 1e-9;

struct Layout {
  int N = 0, m = 0;
  bool free_state = false;
  int n() const { return 2 * N + 2 * m + (free_state ? 4 : 0); }
  int z(int axis) const { return axis * (N + m); }
  int f(int axis) const { return axis * (N + m) + N; }
  int s(int axis) const { return 2 * N + 2 * m + 2 * axis; }
  int rows() const { return 2 * (N + m + 1); }
  int row0(int axis) const { return axis * (N + m + 1); }
};

void check_inputs(const References& refs, const SelectionMatrices& sel, int N, int m) {
  if (refs.Vref.rows() != N || refs.Zref.rows() != N || refs.Xfref.rows() != m)
    throw std::invalid_argument("assemble_qp: reference dimensions disagree with N/m");
  if (sel.U_c.size() != N || sel.U.rows() != N || sel.U.cols() != m)
    throw std::invalid_argument("assemble_qp: selection dimensions disagree with N/m");
}

// Cost and constraints for one QP; `theta` engages the free-initial-state
// variant. All index arithmetic follows the (Z_x, X^f, Z_y, Y^f[, state])
// layout above.
QpProblem assemble_impl(const LipmState& state, const GaitPhase& phase,
                        const CostWeights& weights, const References& refs,
                        const SelectionMatrices& sel, const GaitConfig& config,
                        const Layout& L, double theta) {
  weights.validate();
  config.validate();
  check_inputs(refs, sel, L.N, L.m);

  const int N = L.N, m = L.m, n = L.n();
  const PredictionMatrices pred = build_prediction_matrices(config, N);
  const double omega = config.omega0;
  const double s1 = stance_sign(phase.stance_foot);

  QpProblem qp;
  qp.Q = Mat::Zero(n, n);
  qp.p = Vec::Zero(n);
  qp.A = Mat::Zero(L.rows(), n);
  qp.lb = Vec::Zero(L.rows());
  qp.ub = Vec::Zero(L.rows());

  for (int axis = 0; axis < 2; ++axis) {
    const int zo = L.z(axis), fo = L.f(axis);
    const Vec2 xhat(state.c[axis], state.cdot[axis]);
    const double fc = phase.stance_pos[axis];
    const Vec vref = refs.Vref.col(axis);

    const double alpha = weights.alpha[axis];
    if (alpha > 0.0) {
      qp.Q.block(zo, zo, N, N) += alpha * pred.P_vu.transpose() * pred.P_vu;
      if (!L.free_state) {
        qp.p.segment(zo, N) +=
            alpha * pred.P_vu.transpose() * (pred.P_vs * xhat - vref);
      } else {
        const int so = L.s(axis);
        qp.Q.block(zo, so, N, 2) += alpha * pred.P_vu.transpose() * pred.P_vs;
        qp.Q.block(so, zo, 2, N) += alpha * pred.P_vs.transpose() * pred.P_vu;
        qp.Q.block(so, so, 2, 2) += alpha * pred.P_vs.transpose() * pred.P_vs;
        qp.p.segment(zo, N) += -alpha * pred.P_vu.transpose() * vref;
        qp.p.segment(so, 2) += -alpha * pred.P_vs.transpose() * vref;
      }
    }

    const double beta = weights.beta[axis];
    if (beta > 0.0) {
      qp.Q.block(zo, zo, N, N).diagonal().array() += beta;
      qp.Q.block(zo, fo, N, m) += -beta * sel.U;
      qp.Q.block(fo, zo, m, N) += -beta * sel.U.transpose();
      qp.Q.block(fo, fo, m, m) += beta * sel.U.transpose() * sel.U;
      qp.p.segment(zo, N) += -beta * fc * sel.U_c;
      qp.p.segment(fo, m) += beta * fc * sel.U.transpose() * sel.U_c;
    }

    const double delta = weights.delta[axis];
    if (delta > 0.0) {
      // Each footstep is pulled toward its predecessor, offset laterally by
      // the alternating nominal width (zero offset in x).
      for (int j = 0; j < m; ++j) {
        const double off = axis == 1 ? s1 * (j % 2 == 0 ? 1.0 : -1.0) * config.L_p : 0.0;
        qp.Q(fo + j, fo + j) += delta;
        if (j == 0) {
          qp.p[fo] += -delta * (fc + off);
        } else {
          qp.Q(fo + j - 1, fo + j - 1) += delta;
          qp.Q(fo + j, fo + j - 1) += -delta;
          qp.Q(fo + j - 1, fo + j) += -delta;
          qp.p[fo + j] += -delta * off;
          qp.p[fo + j - 1] += delta * off;
        }
      }
    }

    const double eta = weights.eta[axis];
    if (eta > 0.0) {
      // Terminal DCM toward the last planned footstep: the residual is
      // linear in (Z, X^f_m [, xhat]), so accumulate it as a rank-1 form.
      Vec coef = Vec::Zero(n);
      coef.segment(zo, N) =
          (pred.P_pu.row(N - 1) + pred.P_vu.row(N - 1) / omega).transpose();
      coef[fo + m - 1] = -1.0;
      const Eigen::RowVector2d srow =
          pred.P_ps.row(N - 1) + pred.P_vs.row(N - 1) / omega;
      double c0 = 0.0;
      if (!L.free_state) {
        c0 = srow * xhat;
      } else {
        coef.segment(L.s(axis), 2) = srow.transpose();
      }
      qp.Q += eta * coef * coef.transpose();
      qp.p += eta * c0 * coef;
    }

    if (L.free_state) {
      const int so = L.s(axis);
      qp.Q.block(so, so, 2, 2).diagonal().array() += 2.0 * theta;
      qp.p[so] += -2.0 * theta * state.c[axis];
      qp.p[so + 1] += -2.0 * theta * state.cdot[axis];
    }

    // ZMP within the active support region at every sample.
    const double half = 0.5 * (axis == 0 ? config.L_f : config.W_f);
    for (int i = 0; i < N; ++i) {
      const int r = L.row0(axis) + i;
      qp.A(r, zo + i) = 1.0;
      qp.A.row(r).segment(fo, m) -= sel.U.row(i);
      qp.lb[r] = sel.U_c[i] * fc - half;
      qp.ub[r] = sel.U_c[i] * fc + half;
    }

    // Footstep displacement boxes, chained through the plan.
    for (int j = 0; j < m; ++j) {
      const int r = L.row0(axis) + N + j;
      qp.A(r, fo + j) = 1.0;
      double base = 0.0;
      if (j == 0) {
        base = fc;
      } else {
        qp.A(r, fo + j - 1) = -1.0;
      }
      if (axis == 0) {
        qp.lb[r] = base - config.L_max;
        qp.ub[r] = base + config.L_max;
      } else {
        const double sj = s1 * (j % 2 == 0 ? 1.0 : -1.0);
        const double a = sj * (config.L_p + config.W_min);
        const double b = sj * (config.L_p + config.W_max);
        qp.lb[r] = base + std::min(a, b);
        qp.ub[r] = base + std::max(a, b);
      }
    }

    // Swing reachability of the first landing within the remaining time.
    {
      const int r = L.row0(axis) + N + m;
      const double win =
          std::max(0.0, phase.t_td - std::clamp(phase.t_in_step, 0.0, phase.t_td));
      qp.A(r, fo) = 1.0;
      qp.lb[r] = phase.swing_pos[axis] - config.v_max[axis] * win;
      qp.ub[r] = phase.swing_pos[axis] + config.v_max[axis] * win;
    }
  }

  qp.Q.diagonal().array() += kAssemblyRidge;
  return qp;
}

// One-sample receding-horizon shift of a decision vector; footstep variables
// carry over unchanged and the ZMP tails repeat their last sample.
Vec shift_decision(const Vec& u, const Layout& L) {
  Vec out = u;
  for (int axis = 0; axis < 2; ++axis) {
    const int zo = L.z(axis);
    for (int i = 0; i + 1 < L.N; ++i) out[zo + i] = u[zo + i + 1];
    out[zo + L.N - 1] = u[zo + L.N - 1];
  }
  return out;
}

Vec nominal_decision(const References& refs, const Layout& L) {
  Vec u = Vec::Zero(L.n());
  for (int axis = 0; axis < 2; ++axis) {
    u.segment(L.z(axis), L.N) = refs.Zref.col(axis);
    u.segment(L.f(axis), L.m) = refs.Xfref.col(axis);
  }
  return u;
}

void fill_plan(MpcPlan& plan, const Vec& u, const LipmState& start,
               const GaitConfig& config, const Layout& L) {
  const int N = L.N, m = L.m;
  const PredictionMatrices pred = build_prediction_matrices(config, N);
  plan.zmp.resize(N, 2);
  plan.footsteps.resize(m, 2);
  plan.com_traj.resize(N, 2);
  plan.comdot_traj.resize(N, 2);
  for (int axis = 0; axis < 2; ++axis) {
    const Vec z = u.segment(L.z(axis), N);
    const Vec2 xhat(start.c[axis], start.cdot[axis]);
    plan.zmp.col(axis) = z;
    plan.footsteps.col(axis) = u.segment(L.f(axis), m);
    plan.com_traj.col(axis) = pred.P_ps * xhat + pred.P_pu * z;
    plan.comdot_traj.col(axis) = pred.P_vs * xhat + pred.P_vu * z;
  }
  plan.terminal_dcm = plan.com_traj.row(N - 1).transpose() +
                      plan.comdot_traj.row(N - 1).transpose() / config.omega0;
  plan.u = u;
  plan.initial_state = start;
}

}  // namespace

QpProblem assemble_qp(const LipmState& state, const GaitPhase& phase,
                      const CostWeights& weights, const References& refs,
                      const SelectionMatrices& sel, const GaitConfig& config,
                      int N, int m) {
  Layout L{N, m, false};
  return assemble_impl(state, phase, weights, refs, sel, config, L, 0.0);
}

MpcPlan solve_mpc(const LipmState& state, const GaitPhase& phase,
                  const CostWeights& weights, const References& refs,
                  const GaitConfig& config, const MpcPlan* previous) {
  const int N = static_cast<int>(refs.Vref.rows());
  const int m = static_cast<int>(refs.Xfref.rows());
  const Layout L{N, m, false};
  const SelectionMatrices sel = selection_matrices(phase, config, N, m);
  const QpProblem qp = assemble_impl(state, phase, weights, refs, sel, config, L, 0.0);

  std::optional<Vec> warm;
  if (previous && previous->u.size() == L.n()) warm = shift_decision(previous->u, L);
  const QpSolution sol = solve_qp(qp, warm);

  MpcPlan plan;
  plan.qp_status = sol.status;
  plan.qp_iterations = sol.iterations;
  plan.in_kernel = viability_bounds(config, phase)
                       .contains(dcm(state, config) - phase.stance_pos, kKernelTol);
  Vec u;
  if (sol.status == QpStatus::Optimal) {
    u = sol.u;
  } else if (warm) {
    u = *warm;  // previous plan, shifted by one sample
  } else {
    u = nominal_decision(refs, L);
  }
  fill_plan(plan, u, state, config, L);
  plan.feasible = plan.in_kernel && sol.status == QpStatus::Optimal;
  return plan;
}

MpcPlan solve_mpc_approach1(const LipmState& state_measured, const GaitPhase& phase,
                            const CostWeights& weights, double theta,
                            const References& refs, const GaitConfig& config,
                            const MpcPlan* previous) {
  if (theta < 0.0) throw std::invalid_argument("solve_mpc_approach1: theta must be >= 0");
  const int N = static_cast<int>(refs.Vref.rows());
  const int m = static_cast<int>(refs.Xfref.rows());
  const Layout L{N, m, true};
  const SelectionMatrices sel = selection_matrices(phase, config, N, m);
  const QpProblem qp =
      assemble_impl(state_measured, phase, weights, refs, sel, config, L, theta);

  std::optional<Vec> warm;
  if (previous && previous->u.size() == L.n()) {
    warm = shift_decision(previous->u, L);
  } else {
    Vec w = Vec::Zero(L.n());
    const Layout base{N, m, false};
    w.head(base.n()) = previous && previous->u.size() == base.n()
                           ? shift_decision(previous->u, base)
                           : nominal_decision(refs, base);
    for (int axis = 0; axis < 2; ++axis) {
      w[L.s(axis)] = state_measured.c[axis];
      w[L.s(axis) + 1] = state_measured.cdot[axis];
    }
    warm = w;
  }
  const QpSolution sol = solve_qp(qp, warm);

  MpcPlan plan;
  plan.qp_status = sol.status;
  plan.qp_iterations = sol.iterations;
  plan.in_kernel = viability_bounds(config, phase)
                       .contains(dcm(state_measured, config) - phase.stance_pos, kKernelTol);
  const Vec& u = sol.status == QpStatus::Optimal ? sol.u : *warm;
  LipmState start;
  start.c = Vec2(u[L.s(0)], u[L.s(1)]);
  start.cdot = Vec2(u[L.s(0) + 1], u[L.s(1) + 1]);
  fill_plan(plan, u, start, config, L);
  plan.feasible = sol.status == QpStatus::Optimal;
  return plan;
}

}  // namespace wpg
