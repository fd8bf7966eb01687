#pragma once

#include <optional>

#include "wpg/gait.hpp"
#include "wpg/lipm.hpp"
#include "wpg/qp.hpp"
#include "wpg/types.hpp"
#include "wpg/viability.hpp"

namespace wpg {

// One receding-horizon plan over N samples and m future footsteps.
struct MpcPlan {
  Mat zmp;          // N x 2 planned ZMP
  Mat footsteps;    // m x 2 planned landings
  Mat com_traj;     // N x 2 predicted CoM positions
  Mat comdot_traj;  // N x 2 predicted CoM velocities
  Vec2 terminal_dcm{0.0, 0.0};

  // True when the input state was inside the viability kernel and the QP
  // solved to optimality. A false value with qp_status == Optimal means the
  // kernel membership failed: the plan is still the QP optimum, but the
  // controller's premise is broken and the flag records it.
  bool feasible = false;
  bool in_kernel = false;
  QpStatus qp_status = QpStatus::MaxIterations;
  int qp_iterations = 0;

  LipmState initial_state;  // the state the plan actually starts from
  Vec u;                    // raw decision vector (Z_x, X^f, Z_y, Y^f)

  int horizon() const { return static_cast<int>(zmp.rows()); }
  int n_footsteps() const { return static_cast<int>(footsteps.rows()); }
};

// Builds the quadratic program over u = (Z_x, X^f, Z_y, Y^f):
//   - velocity tracking   alpha/2 ||P_vs xhat + P_vu Z - Vref||^2
//   - ZMP centering       beta/2  ||Z - U_c stance - U X^f||^2
//   - footstep regularity delta/2 sum_j ||X^f_j - (predecessor + offset_j)||^2
//   - terminal DCM        eta/2   ||xi_N - X^f_m||^2
// plus a uniform diagonal shift kAssemblyRidge, included in the objective.
// Constraint rows per axis, in order: N ZMP-in-support rows, m footstep
// displacement rows, 1 swing reachability row (axis x first, then y).
QpProblem assemble_qp(const LipmState& state, const GaitPhase& phase,
                      const CostWeights& weights, const References& refs,
                      const SelectionMatrices& sel, const GaitConfig& config,
                      int N, int m);

inline constexpr double kAssemblyRidge = 1e-10;

// Solves one MPC cycle. The caller is responsible for projecting the state
// first when the viability guarantee is wanted; this function only reports
// kernel membership. On a QP failure the previous plan, shifted by one
// sample with the tail repeated, is carried instead.
MpcPlan solve_mpc(const LipmState& state, const GaitPhase& phase,
                  const CostWeights& weights, const References& refs,
                  const GaitConfig& config, const MpcPlan* previous = nullptr);

// Variant with the initial CoM state as four extra decision variables and a
// cost theta * (||X0 - measured||^2 + ||X0dot - measured||^2) tying them to
// the measurement. Feasible for any measured state; the optimized initial
// state is reported in plan.initial_state.
MpcPlan solve_mpc_approach1(const LipmState& state_measured, const GaitPhase& phase,
                            const CostWeights& weights, double theta,
                            const References& refs, const GaitConfig& config,
                            const MpcPlan* previous = nullptr);

}  // namespace wpg
