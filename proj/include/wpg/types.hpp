// Core value types shared by every module: gait/model parameters, the LIPM
// state, and the MPC cost-weight vector.
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

namespace wpg {

using Vec2 = Eigen::Vector2d;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Physical and timing parameters of the model and the gait.
//
// W_max / W_min are step-width *offsets* about the nominal width L_p: the
// admissible lateral step width is [L_p + W_min, L_p + W_max]. They may be
// negative (a cross-over margin).
struct GaitConfig {
  double h = 0.8;        // CoM height (m)
  double g = 9.81;       // gravity (m/s^2)
  double omega0 = std::sqrt(9.81 / 0.8);  // sqrt(g/h) (1/s)
  double L_f = 0.2;      // foot length (m)
  double W_f = 0.1;      // foot width (m)
  double L_p = 0.2;      // pelvis width / nominal step width (m)
  double L_max = 0.6;    // max step length (m)
  double W_max = 0.2;    // max step-width offset about L_p (m)
  double W_min = -0.08;  // min step-width offset about L_p (m)
  double T_ss = 0.5;     // single-support duration (s)
  double T_ds = 0.1;     // double-support duration (s)
  double T = 0.1;        // MPC sampling period (s); equals T_ds
  Vec2 v_max{1.5, 1.5};  // max average swing-foot velocity per axis (m/s)
  double robot_mass = 41.0;  // kg

  double step_duration() const { return T_ss + T_ds; }

  // Recomputes omega0 from (g, h). Call after editing g or h.
  void refresh_omega() { omega0 = std::sqrt(g / h); }

  // Throws std::invalid_argument when a structural invariant is broken.
  void validate() const {
    if (!(h > 0) || !(g > 0)) throw std::invalid_argument("GaitConfig: h and g must be positive");
    if (std::abs(omega0 - std::sqrt(g / h)) > 1e-12 * omega0)
      throw std::invalid_argument("GaitConfig: omega0 != sqrt(g/h)");
    if (std::abs(T_ds - T) > 1e-12)
      throw std::invalid_argument("GaitConfig: the MPC period T must equal T_ds");
    if (!(L_p + W_min > 0)) throw std::invalid_argument("GaitConfig: L_p + W_min must be positive");
    if (!(W_min <= W_max)) throw std::invalid_argument("GaitConfig: W_min > W_max");
    if (!(L_f > 0 && W_f > 0 && L_p > 0 && L_max > 0 && T_ss > 0 && T_ds > 0))
      throw std::invalid_argument("GaitConfig: lengths and durations must be positive");
    if (!(v_max.x() > 0 && v_max.y() > 0))
      throw std::invalid_argument("GaitConfig: v_max must be positive");
  }
};

// Horizontal CoM position and velocity; the plant and MPC state.
struct LipmState {
  Vec2 c{0.0, 0.0};     // CoM position (m)
  Vec2 cdot{0.0, 0.0};  // CoM velocity (m/s)

  bool finite() const { return c.allFinite() && cdot.allFinite(); }
};

// The 8-D cost-weight vector: (alpha, beta, delta, eta) with an (x, y) pair
// each. alpha: velocity tracking, beta: ZMP centering, delta: footstep
// regularization, eta: terminal DCM capturability.
struct CostWeights {
  Vec2 alpha{1.0, 1.0};
  Vec2 beta{0.0, 0.0};
  Vec2 delta{0.0, 0.0};
  Vec2 eta{0.0, 0.0};

  void validate() const {
    auto nonneg = [](const Vec2& v) { return v.x() >= 0.0 && v.y() >= 0.0; };
    if (!nonneg(alpha) || !nonneg(beta) || !nonneg(delta) || !nonneg(eta))
      throw std::invalid_argument("CostWeights: weights must be non-negative");
  }

  // Flat (alpha_x, alpha_y, beta_x, beta_y, delta_x, delta_y, eta_x, eta_y).
  Eigen::Matrix<double, 8, 1> flat() const {
    Eigen::Matrix<double, 8, 1> v;
    v << alpha.x(), alpha.y(), beta.x(), beta.y(), delta.x(), delta.y(), eta.x(), eta.y();
    return v;
  }
  static CostWeights from_flat(const Eigen::Matrix<double, 8, 1>& v) {
    CostWeights w;
    w.alpha = {v[0], v[1]};
    w.beta = {v[2], v[3]};
    w.delta = {v[4], v[5]};
    w.eta = {v[6], v[7]};
    return w;
  }
};

}  // namespace wpg
