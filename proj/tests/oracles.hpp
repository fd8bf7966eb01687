// Independent reference implementations used to validate the library code.
// Everything here deliberately avoids the closed forms under test: dynamics
// are integrated numerically, costs are summed term by term over simulated
// trajectories, and QP optima come from first-order methods or direct KKT
// solves.
#pragma once

#include "wpg/gait.hpp"
#include "wpg/lipm.hpp"
#include "wpg/types.hpp"

namespace wpg::oracle {

// RK4 integration of pos'' = omega^2 (pos - zmp) + accel, both axes.
LipmState rk4_step(const LipmState& state, const Vec2& zmp, const Vec2& accel,
                   double dt, const GaitConfig& config, int n_sub = 400);

// Objective value of the walking QP at decision u = (Z_x, X^f_x, Z_y, X^f_y),
// evaluated the long way: RK4-roll the CoM through the planned ZMP sequence,
// then add up every cost contribution (velocity tracking, ZMP centering,
// footstep regularization, terminal DCM, uniform ridge) per axis.
double cost_sum(const LipmState& state, const GaitPhase& phase, const CostWeights& w,
                const References& refs, const SelectionMatrices& sel,
                const GaitConfig& config, int N, int m, const Vec& u);

// Box-constrained QP minimizer by projected gradient descent with a fixed
// 1/L step; runs until the iterate stalls below 1e-14 or max_iters.
Vec projected_gradient_box(const Mat& Q, const Vec& p, const Vec& lo, const Vec& hi,
                           int max_iters = 400000);

// Equality-constrained QP minimizer from the dense KKT system.
Vec kkt_equality(const Mat& Q, const Vec& p, const Mat& A, const Vec& b);

}  // namespace wpg::oracle
