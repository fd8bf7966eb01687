#include "wpg/viability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wpg/lipm.hpp"

namespace wpg {

namespace {

// Shared quantities for one evaluation: everything is measured at the
// current phase time, clamped to single support.
struct PhaseCtx {
  double omega;
  double E;       // exp(omega * T_ss), growth over one full stance
  double decay;   // exp(-omega * (T_ss - t)), discount back to "now"
  double window;  // time the swing foot still has to travel
};

PhaseCtx make_ctx(const GaitConfig& config, const GaitPhase& phase) {
  PhaseCtx ctx;
  ctx.omega = config.omega0;
  const double t = std::clamp(phase.t_in_step, 0.0, config.T_ss);
  ctx.E = std::exp(ctx.omega * config.T_ss);
  ctx.decay = std::exp(-ctx.omega * (config.T_ss - t));
  ctx.window = std::max(0.0, phase.t_td - t);
  return ctx;
}

}  // namespace

Vec2 sagittal_bounds(const GaitConfig& config, const GaitPhase& phase) {
  const PhaseCtx ctx = make_ctx(config, phase);
  const double steady = config.L_max / (ctx.E - 1.0);

  // How far ahead/behind the current stance foot the swing foot can land,
  // limited by both its speed and the step-length box.
  const double reach_max =
      std::min(phase.swing_pos.x() + config.v_max.x() * ctx.window - phase.stance_pos.x(),
               config.L_max);
  const double reach_min =
      std::max(phase.swing_pos.x() - config.v_max.x() * ctx.window - phase.stance_pos.x(),
               -config.L_max);

  const double b_max = (steady + reach_max) * ctx.decay + 0.5 * config.L_f;
  const double b_min = (-steady + reach_min) * ctx.decay - 0.5 * config.L_f;
  return Vec2(b_min, b_max);
}

Vec2 lateral_bounds(const GaitConfig& config, const GaitPhase& phase) {
  const PhaseCtx ctx = make_ctx(config, phase);
  const double E = ctx.E;
  const double w_in = config.L_p + config.W_max;   // widest admissible step
  const double w_out = config.L_p + config.W_min;  // narrowest admissible step

  // Alternating stance sides turn the infinite-horizon recursion into a
  // two-step geometric series; these are its fixed-point offsets.
  const double series_mid = config.L_p / (1.0 + E);
  const double series_in = (config.W_max - config.W_min * E) / (1.0 - E * E);
  const double series_out = (config.W_min - config.W_max * E) / (1.0 - E * E);

  const double travel = config.v_max.y() * ctx.window;
  const double rel_hi = phase.swing_pos.y() + travel - phase.stance_pos.y();
  const double rel_lo = phase.swing_pos.y() - travel - phase.stance_pos.y();

  if (phase.stance_foot == Foot::Right) {
    // Next step lands on the +y side.
    const double reach_in = std::min(rel_hi, w_in);
    const double reach_out = std::max(rel_lo, w_out);
    const double b_in = 0.5 * config.W_f + (reach_in - series_mid - series_in) * ctx.decay;
    const double b_out = -0.5 * config.W_f + (reach_out - series_mid - series_out) * ctx.decay;
    return Vec2(b_out, b_in);
  }
  // Left stance mirrors right: negate the y geometry and swap the roles of
  // the two ends of the interval.
  const double reach_in = std::max(rel_lo, -w_in);
  const double reach_out = std::min(rel_hi, -w_out);
  const double b_in = -0.5 * config.W_f + (reach_in + series_mid + series_in) * ctx.decay;
  const double b_out = 0.5 * config.W_f + (reach_out + series_mid + series_out) * ctx.decay;
  return Vec2(b_in, b_out);
}

ViabilityBounds viability_bounds(const GaitConfig& config, const GaitPhase& phase) {
  const Vec2 sx = sagittal_bounds(config, phase);
  const Vec2 sy = lateral_bounds(config, phase);
  ViabilityBounds b;
  b.x_min = sx[0];
  b.x_max = sx[1];
  b.y_min = sy[0];
  b.y_max = sy[1];
  return b;
}

namespace {

// One axis of the brute-force capture search. Landing positions only enter
// through the displacement new_stance - old_stance, so each step contributes
// an admissible displacement interval, discretized into grid_points choices.
struct AxisSearch {
  double omega;
  double half;    // foot half-extent along this axis
  double T_ss;
  double delta0;  // remaining time in the current stance
  std::vector<std::pair<double, double>> disp;  // per landing, [lo, hi]
  int grid_points;

  // Marks every stage (0 = now, k = after k landings) at which some landing
  // sequence puts the reachable DCM offset over the support foot. Within a
  // stance the signs of (lo - half) and (hi + half) are invariant, so
  // checking stage starts is exhaustive.
  void search(int stage, double lo, double hi, std::vector<char>& capture_at) const {
    if (lo <= half && hi >= -half) capture_at[stage] = 1;
    if (stage >= static_cast<int>(disp.size())) return;
    const double dur = stage == 0 ? delta0 : T_ss;
    const double e = std::exp(omega * dur);
    const double plo = lo * e - half * (e - 1.0);
    const double phi = hi * e + half * (e - 1.0);
    const auto [dlo, dhi] = disp[stage];
    for (int g = 0; g < grid_points; ++g) {
      const double frac = grid_points == 1 ? 0.5 : static_cast<double>(g) / (grid_points - 1);
      const double d = dlo + frac * (dhi - dlo);
      search(stage + 1, plo - d, phi - d, capture_at);
    }
  }
};

}  // namespace

bool capturability_oracle(const GaitConfig& config, const GaitPhase& phase,
                          const LipmState& state, int n_steps, int grid_points) {
  if (n_steps < 0 || grid_points < 1)
    throw std::invalid_argument("capturability_oracle: bad search parameters");
  if (!state.finite()) return false;

  const double t = std::clamp(phase.t_in_step, 0.0, config.T_ss);
  const double window = std::max(0.0, phase.t_td - t);
  const Vec2 offset = dcm(state, config) - phase.stance_pos;

  // First landing: where the swing foot can actually get to, intersected
  // with the step box around the stance foot.
  const double fx_lo = std::max(phase.swing_pos.x() - config.v_max.x() * window,
                                phase.stance_pos.x() - config.L_max);
  const double fx_hi = std::min(phase.swing_pos.x() + config.v_max.x() * window,
                                phase.stance_pos.x() + config.L_max);
  const double s = stance_sign(phase.stance_foot);
  const double y_near = phase.stance_pos.y() + s * (config.L_p + config.W_min);
  const double y_far = phase.stance_pos.y() + s * (config.L_p + config.W_max);
  const double fy_lo = std::max(phase.swing_pos.y() - config.v_max.y() * window,
                                std::min(y_near, y_far));
  const double fy_hi = std::min(phase.swing_pos.y() + config.v_max.y() * window,
                                std::max(y_near, y_far));

  // A landing needs both axes admissible; an empty box on either axis means
  // no stepping at all (holding the current stance is still checked).
  int steps = n_steps;
  if (fx_lo > fx_hi || fy_lo > fy_hi) steps = 0;

  AxisSearch ax;
  ax.omega = config.omega0;
  ax.T_ss = config.T_ss;
  ax.delta0 = window;
  ax.grid_points = grid_points;

  std::vector<char> cap_x(steps + 1, 0), cap_y(steps + 1, 0);

  ax.half = 0.5 * config.L_f;
  ax.disp.clear();
  if (steps > 0) {
    ax.disp.emplace_back(fx_lo - phase.stance_pos.x(), fx_hi - phase.stance_pos.x());
    for (int k = 1; k < steps; ++k) ax.disp.emplace_back(-config.L_max, config.L_max);
  }
  ax.search(0, offset.x(), offset.x(), cap_x);

  ax.half = 0.5 * config.W_f;
  ax.disp.clear();
  if (steps > 0) {
    ax.disp.emplace_back(fy_lo - phase.stance_pos.y(), fy_hi - phase.stance_pos.y());
    for (int k = 1; k < steps; ++k) {
      const double sk = s * (k % 2 == 0 ? 1.0 : -1.0);
      const double a = sk * (config.L_p + config.W_min);
      const double b = sk * (config.L_p + config.W_max);
      ax.disp.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  ax.search(0, offset.y(), offset.y(), cap_y);

  // Capture must happen at a common stage: once both axes hold the DCM over
  // the foot, walking stops, so neither axis may demand further steps.
  for (int j = 0; j <= steps; ++j)
    if (cap_x[j] && cap_y[j]) return true;
  return false;
}

LipmState project_state(const GaitConfig& config, const GaitPhase& phase,
                        const LipmState& state, double w, bool* was_projected) {
  if (w <= 0.0) throw std::invalid_argument("project_state: w must be positive");
  if (was_projected) *was_projected = false;
  if (!state.finite()) return state;

  const ViabilityBounds bounds = viability_bounds(config, phase);
  const double omega = config.omega0;
  const Vec2 offset = dcm(state, config) - phase.stance_pos;
  const Vec2 target(std::clamp(offset.x(), bounds.x_min, bounds.x_max),
                    std::clamp(offset.y(), bounds.y_min, bounds.y_max));
  const Vec2 shift = target - offset;
  if (shift.x() == 0.0 && shift.y() == 0.0) return state;

  if (was_projected) *was_projected = true;
  // Split the DCM shift to minimize dc^2 + w * dcdot^2 subject to
  // dc + dcdot / omega = shift; the stationarity condition gives the split
  // below, which lands exactly on the bound and is idempotent.
  const double c_gain = 1.0 / (1.0 + 1.0 / (w * omega * omega));
  const double v_gain = omega / (1.0 + w * omega * omega);
  LipmState out = state;
  out.c += c_gain * shift;
  out.cdot += v_gain * shift;
  return out;
}

}  // namespace wpg
