#include "wpg/gait.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wpg {

namespace {
// Slack for phase-boundary comparisons; phase clocks accumulate sim steps, so
// boundaries can be off by a few ulp but never by a millisecond.
constexpr double kPhaseEps = 1e-9;
}  // namespace

Vec2 ReferenceProfile::vdes(double t) const {
  Vec2 v{0.0, 0.0};
  for (const auto& [start, value] : knots) {
    if (start <= t + kPhaseEps) v = value;
    else break;
  }
  return v;
}

GaitPhase advance_phase(const GaitPhase& phase, double dt,
                        const std::optional<Vec2>& landed_step,
                        const GaitConfig& config) {
  if (!(dt > 0)) throw std::invalid_argument("advance_phase: dt must be positive");
  const double dur = config.step_duration();
  GaitPhase out = phase;
  const double t_new = phase.t_in_step + dt;
  if (t_new < dur - kPhaseEps) {
    out.t_in_step = t_new;
    return out;
  }
  if (t_new > dur + config.T + kPhaseEps)
    throw std::invalid_argument("advance_phase: dt crosses more than one step boundary");
  if (!landed_step)
    throw std::invalid_argument("advance_phase: landed_step required at a step boundary");

  out.stance_foot = other_foot(phase.stance_foot);
  out.liftoff_pos = phase.stance_pos;  // the old stance foot becomes the swing foot
  out.swing_pos = phase.stance_pos;
  out.stance_pos = *landed_step;
  out.t_in_step = t_new - dur;
  out.t_td = config.T_ss;
  out.step_index = phase.step_index + 1;
  return out;
}

SelectionMatrices selection_matrices(const GaitPhase& phase, const GaitConfig& config,
                                     int N, int m) {
  if (N < 1 || m < 1) throw std::invalid_argument("selection_matrices: N, m must be >= 1");
  const double dur = config.step_duration();
  if (N * config.T < dur - kPhaseEps)
    throw std::invalid_argument("selection_matrices: horizon shorter than one step");

  const double remaining = dur - phase.t_in_step;
  SelectionMatrices sel;
  sel.U_c.setZero(N);
  sel.U.setZero(N, m);
  for (int i = 1; i <= N; ++i) {
    const double sample_start = (i - 1) * config.T;
    if (sample_start < remaining - kPhaseEps) {
      sel.U_c[i - 1] = 1.0;
    } else {
      int step = 1 + static_cast<int>(std::floor((sample_start - remaining + kPhaseEps) / dur));
      step = std::min(step, m);  // tail saturates on the last footstep
      sel.U(i - 1, step - 1) = 1.0;
    }
  }
  return sel;
}

Vec2 swing_position(const GaitPhase& phase, const Vec2& planned_landing,
                    const GaitConfig& config) {
  const double t = std::clamp(phase.t_in_step, 0.0, config.T_ss);
  Vec2 pos;
  for (int axis = 0; axis < 2; ++axis) {
    const double span = planned_landing[axis] - phase.liftoff_pos[axis];
    const double advance = std::min(std::abs(span) * t / config.T_ss,
                                    config.v_max[axis] * t);
    pos[axis] = phase.liftoff_pos[axis] + (span < 0 ? -advance : advance);
  }
  return pos;
}

Vec2 swing_advance(const Vec2& pos, const Vec2& target, double time_left, double dt,
                   const GaitConfig& config) {
  Vec2 out = pos;
  for (int axis = 0; axis < 2; ++axis) {
    const double gap = target[axis] - pos[axis];
    double rate = config.v_max[axis];
    if (time_left > kPhaseEps) rate = std::min(rate, std::abs(gap) / time_left);
    double move = rate * dt;
    move = std::min(move, std::abs(gap));  // never overshoot the target
    out[axis] += (gap < 0 ? -move : move);
  }
  return out;
}

References references(const GaitPhase& phase, const ReferenceProfile& profile,
                      const GaitConfig& config, int N, int m, double t_now) {
  References refs;
  refs.Vref.setZero(N, 2);
  for (int i = 1; i <= N; ++i) {
    refs.Vref.row(i - 1) = profile.vdes(t_now + (i - 1) * config.T).transpose();
  }

  // Nominal chain: zero forward progress, lateral alternation of +/- L_p
  // starting across the pelvis from the stance foot.
  refs.Xfref.setZero(m, 2);
  double s = stance_sign(phase.stance_foot);
  Vec2 prev = phase.stance_pos;
  for (int j = 0; j < m; ++j) {
    Vec2 ref = prev;
    ref.y() += s * config.L_p;
    refs.Xfref.row(j) = ref.transpose();
    prev = ref;
    s = -s;
  }

  const SelectionMatrices sel = selection_matrices(phase, config, N, m);
  refs.Zref.setZero(N, 2);
  for (int axis = 0; axis < 2; ++axis) {
    refs.Zref.col(axis) = sel.U_c * phase.stance_pos[axis] + sel.U * refs.Xfref.col(axis);
  }
  return refs;
}

}  // namespace wpg
