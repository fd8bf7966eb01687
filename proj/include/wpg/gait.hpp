// Walking-cycle bookkeeping: stance/swing alternation, footstep selection
// matrices over the horizon, swing-foot ground-projection motion, and
// reference generation.
#pragma once

#include <optional>
#include <vector>

#include "wpg/types.hpp"

namespace wpg {

enum class Foot { Left, Right };

inline Foot other_foot(Foot f) { return f == Foot::Left ? Foot::Right : Foot::Left; }

// Sign of the nominal lateral displacement of the *next* footstep relative to
// the current stance: the swing foot lands across the pelvis, so a right
// stance steps to +y and a left stance to -y.
inline double stance_sign(Foot stance) { return stance == Foot::Right ? 1.0 : -1.0; }

// Where we are inside the current step. A step spans [0, T_ss + T_ds):
// single support on [0, T_ss), double support on [T_ss, T_ss + T_ds), with
// touchdown scheduled at t_td = T_ss.
struct GaitPhase {
  Foot stance_foot = Foot::Right;
  Vec2 stance_pos{0.0, -0.1};   // stance-foot center (m)
  Vec2 swing_pos{0.0, 0.1};     // current swing-foot ground projection (m)
  Vec2 liftoff_pos{0.0, 0.1};   // swing-foot position at the start of the step (m)
  double t_in_step = 0.0;       // s since step start
  double t_td = 0.5;            // scheduled touchdown time of this step (s)
  int step_index = 0;

  bool in_single_support(const GaitConfig& config) const {
    return t_in_step < config.T_ss;
  }
};

// Row-wise assignment of horizon samples to support feet: U_c picks the
// current stance, column j of U picks future footstep j.
struct SelectionMatrices {
  Vec U_c;  // N
  Mat U;    // N x m, entries in {0,1}
};

// Piecewise-constant desired CoM velocity schedule.
struct ReferenceProfile {
  // (start time, velocity) knots sorted by time; vdes(t) is the value of the
  // last knot with start <= t, and zero before the first knot.
  std::vector<std::pair<double, Vec2>> knots{{0.0, Vec2{0.0, 0.0}}};
  double episode_length = 10.0;  // s

  Vec2 vdes(double t) const;
};

// References handed to the MPC assembly: per-sample desired velocities plus
// the nominal ZMP / footstep chains used for reporting and regularization.
struct References {
  Mat Zref;   // N x 2 nominal ZMP (stance/footstep-reference centers)
  Mat Xfref;  // m x 2 nominal footstep chain
  Mat Vref;   // N x 2 desired velocities, sampled at sample starts
};

// Advances the phase clock by dt. Crossing the step boundary requires the
// landed footstep position (the first MPC footstep decision at touchdown):
// stance and swing exchange, the clock wraps, and step_index increments.
GaitPhase advance_phase(const GaitPhase& phase, double dt,
                        const std::optional<Vec2>& landed_step,
                        const GaitConfig& config);

// Builds U_c / U for N samples and m future footsteps. Sample i (1-based)
// covers [(i-1)T, iT) from now; it belongs to the current stance while the
// sample start precedes the step boundary, then to footstep 1, 2, ... with
// the horizon tail saturating on the last footstep column.
SelectionMatrices selection_matrices(const GaitPhase& phase, const GaitConfig& config,
                                     int N, int m);

// Ground projection of the swing foot at phase.t_in_step when moving from
// liftoff_pos toward planned_landing, per-axis velocity capped at v_max.
Vec2 swing_position(const GaitPhase& phase, const Vec2& planned_landing,
                    const GaitConfig& config);

// Rate-capped incremental update used by the simulator: moves `pos` toward
// `target` so that it would arrive exactly at `time_left` (capped at v_max).
Vec2 swing_advance(const Vec2& pos, const Vec2& target, double time_left, double dt,
                   const GaitConfig& config);

// Nominal footstep chain: each footstep references its predecessor's x (zero
// nominal step length) and alternates +/- L_p laterally by stance side.
References references(const GaitPhase& phase, const ReferenceProfile& profile,
                      const GaitConfig& config, int N, int m, double t_now);

}  // namespace wpg
