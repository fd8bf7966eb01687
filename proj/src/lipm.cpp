#include "wpg/lipm.hpp"

#include <stdexcept>

namespace wpg {

Eigen::Matrix2d lipm_transition(double omega, double dt) {
  const double ch = std::cosh(omega * dt);
  const double sh = std::sinh(omega * dt);
  Eigen::Matrix2d G;
  G << ch, sh / omega, omega * sh, ch;
  return G;
}

Vec2 lipm_input(double omega, double dt) {
  const double ch = std::cosh(omega * dt);
  const double sh = std::sinh(omega * dt);
  return {1.0 - ch, -omega * sh};
}

LipmState lipm_step(const LipmState& state, const Vec2& zmp, double dt,
                    const Vec2& accel_ext, const GaitConfig& config) {
  if (!(dt > 0)) throw std::invalid_argument("lipm_step: dt must be positive");
  if (!state.finite() || !zmp.allFinite() || !accel_ext.allFinite())
    throw std::invalid_argument("lipm_step: non-finite input");

  const double w = config.omega0;
  const Eigen::Matrix2d G = lipm_transition(w, dt);
  const Vec2 H = lipm_input(w, dt);

  LipmState out;
  for (int axis = 0; axis < 2; ++axis) {
    // Constant acceleration a is the particular solution of a ZMP shifted by
    // -a/w^2, so it rides along the same closed form.
    const double z_eff = zmp[axis] - accel_ext[axis] / (w * w);
    const Vec2 x{state.c[axis], state.cdot[axis]};
    const Vec2 xn = G * x + H * z_eff;
    out.c[axis] = xn[0];
    out.cdot[axis] = xn[1];
  }
  return out;
}

Vec2 dcm(const LipmState& state, const GaitConfig& config) {
  return state.c + state.cdot / config.omega0;
}

PredictionMatrices build_prediction_matrices(const GaitConfig& config, int N) {
  if (N < 1) throw std::invalid_argument("build_prediction_matrices: N must be >= 1");
  const double w = config.omega0;
  const double T = config.T;

  PredictionMatrices P;
  P.N = N;
  P.P_ps.setZero(N, 2);
  P.P_vs.setZero(N, 2);
  P.P_pu.setZero(N, N);
  P.P_vu.setZero(N, N);

  for (int i = 1; i <= N; ++i) {
    P.P_ps(i - 1, 0) = std::cosh(w * i * T);
    P.P_ps(i - 1, 1) = std::sinh(w * i * T) / w;
    P.P_vs(i - 1, 0) = w * std::sinh(w * i * T);
    P.P_vs(i - 1, 1) = std::cosh(w * i * T);
    for (int j = 1; j <= i; ++j) {
      const int d = i - j;
      P.P_pu(i - 1, j - 1) = std::cosh(w * d * T) - std::cosh(w * (d + 1) * T);
      P.P_vu(i - 1, j - 1) = w * (std::sinh(w * d * T) - std::sinh(w * (d + 1) * T));
    }
  }
  return P;
}

}  // namespace wpg
