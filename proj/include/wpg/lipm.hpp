// Linear Inverted Pendulum Model dynamics: closed-form transition, DCM, and
// the condensed prediction matrices used by the receding-horizon planner.
//
// Per axis the model is x'' = w0^2 (x - z) with ZMP z as input. With a
// piecewise-constant z over dt the transition is exact:
//
//   xhat+ = G(dt) xhat + H(dt) z,   xhat = (x, xdot)
//   G(dt) = [ cosh(w dt)    sinh(w dt)/w ]     H(dt) = [ 1 - cosh(w dt)  ]
//           [ w sinh(w dt)  cosh(w dt)   ]             [ -w sinh(w dt)   ]
//
// A constant external CoM acceleration a acts like a ZMP shifted by -a/w0^2,
// which is how force pushes are injected.
#pragma once

#include "wpg/types.hpp"

namespace wpg {

// 2x2 transition matrix G(dt) for natural frequency omega.
Eigen::Matrix2d lipm_transition(double omega, double dt);

// 2x1 input matrix H(dt).
Vec2 lipm_input(double omega, double dt);

// Exact propagation of both axes over dt under ZMP `zmp` (held constant) and
// constant external CoM acceleration `accel_ext`.
LipmState lipm_step(const LipmState& state, const Vec2& zmp, double dt,
                    const Vec2& accel_ext, const GaitConfig& config);

// Divergent component of motion xi = c + cdot / omega0.
Vec2 dcm(const LipmState& state, const GaitConfig& config);

// Condensed prediction over N samples of period T (axis-independent):
//   X_{k+1..k+N}    = P_ps xhat_k + P_pu Z_k
//   Xdot_{k+1..k+N} = P_vs xhat_k + P_vu Z_k
// P_pu/P_vu are lower triangular with entry (i,j), 1-based, j <= i:
//   P_pu(i,j) = cosh(w(i-j)T) - cosh(w(i-j+1)T)
//   P_vu(i,j) = w [sinh(w(i-j)T) - sinh(w(i-j+1)T)]
struct PredictionMatrices {
  Mat P_ps;  // N x 2
  Mat P_vs;  // N x 2
  Mat P_pu;  // N x N, lower triangular
  Mat P_vu;  // N x N, lower triangular
  int N = 0;
};

PredictionMatrices build_prediction_matrices(const GaitConfig& config, int N);

}  // namespace wpg
