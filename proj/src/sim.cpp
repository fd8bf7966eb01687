#include "wpg/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wpg/csv.hpp"
#include "wpg/lipm.hpp"
#include "wpg/parallel.hpp"

namespace wpg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kKernelTol = 1e-9;

// During double support both feet are down and the next stepping decision
// belongs to the just-landed foot, so viability is evaluated as if that foot
// had just begun its stance.
GaitPhase effective_phase(const GaitPhase& phase, const GaitConfig& gait) {
  if (phase.in_single_support(gait)) return phase;
  GaitPhase eff = phase;
  eff.stance_foot = other_foot(phase.stance_foot);
  eff.stance_pos = phase.swing_pos;
  eff.swing_pos = phase.stance_pos;
  eff.liftoff_pos = phase.stance_pos;
  eff.t_in_step = 0.0;
  eff.t_td = gait.T_ss;
  eff.step_index = phase.step_index + 1;
  return eff;
}

bool fallen(const LipmState& state, const GaitPhase& phase, const GaitConfig& gait,
            double fall_radius) {
  if (!state.finite()) return true;
  const Vec2 offset = dcm(state, gait) - phase.stance_pos;
  return offset.lpNorm<Eigen::Infinity>() > fall_radius;
}

// Start of the symmetric stepping-in-place orbit for the default phase. With
// supports alternating every T_ss + T_ds and the ZMP near the stance centers
// at +-L_p/2, the mirror-periodic lateral solution crosses the feet midline
// exactly at the support exchange, moving toward the new stance foot:
//   cdot_y(0) = -sign * omega * (L_p / 2) * tanh(omega * T_step / 2).
// Starting here instead of at rest avoids opening every episode with a
// capture transient that has nothing to do with the scenario under test.
LipmState initial_orbit_state(const GaitPhase& phase, const GaitConfig& gait) {
  const double t_step = gait.step_duration();
  const double sway =
      gait.omega0 * 0.5 * gait.L_p * std::tanh(0.5 * gait.omega0 * t_step);
  LipmState state;
  state.c = Vec2(0.0, 0.5 * (phase.stance_pos.y() + phase.swing_pos.y()));
  state.cdot = Vec2(0.0, -stance_sign(phase.stance_foot) * sway);
  return state;
}

}  // namespace

void EpisodeConfig::validate() const {
  weights.validate();
  if (!(sim_dt > 0) || !(mpc_period > 0))
    throw std::invalid_argument("EpisodeConfig: time steps must be positive");
  const double ratio = mpc_period / sim_dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9)
    throw std::invalid_argument("EpisodeConfig: mpc_period must be a multiple of sim_dt");
  if (horizon < 1 || n_footsteps < 1)
    throw std::invalid_argument("EpisodeConfig: horizon and n_footsteps must be >= 1");
  if (!(profile.episode_length > 0))
    throw std::invalid_argument("EpisodeConfig: episode_length must be positive");
  for (const auto& d : disturbances) {
    if (d.kind == Disturbance::Kind::Push && !(d.duration > 0))
      throw std::invalid_argument("EpisodeConfig: push duration must be positive");
    if (d.time < 0 || d.time > profile.episode_length)
      throw std::invalid_argument("EpisodeConfig: disturbance outside the episode");
  }
}

EpisodeResult run_episode(const EpisodeConfig& config, const GaitConfig& gait) {
  config.validate();
  gait.validate();

  const int N = config.horizon;
  const int m = config.n_footsteps;
  const int fine_per_cycle = static_cast<int>(std::round(config.mpc_period / config.sim_dt));
  const int n_cycles =
      static_cast<int>(std::round(config.profile.episode_length / config.mpc_period));

  // Time-sorted disturbances; jumps apply once, pushes by activity window.
  std::vector<Disturbance> events = config.disturbances;
  std::stable_sort(events.begin(), events.end(),
                   [](const Disturbance& a, const Disturbance& b) { return a.time < b.time; });
  size_t next_jump = 0;
  auto apply_jumps_up_to = [&](double t, LipmState& state) {
    while (next_jump < events.size()) {
      // Find the next unapplied jump among time-ordered events.
      if (events[next_jump].kind != Disturbance::Kind::StateJump) {
        ++next_jump;
        continue;
      }
      if (events[next_jump].time > t) break;
      state.c += events[next_jump].delta_c;
      state.cdot += events[next_jump].delta_cdot;
      ++next_jump;
    }
  };
  auto push_accel = [&](double t_mid) {
    Vec2 a{0.0, 0.0};
    for (const auto& d : events) {
      if (d.kind != Disturbance::Kind::Push) continue;
      if (t_mid >= d.time && t_mid < d.time + d.duration) a += d.force / gait.robot_mass;
    }
    return a;
  };

  EpisodeResult result;
  GaitPhase phase;
  LipmState state = initial_orbit_state(phase, gait);
  MpcPlan plan;
  bool have_plan = false;

  for (int k = 0; k < n_cycles; ++k) {
    const double t = k * config.mpc_period;
    apply_jumps_up_to(t + 0.25 * config.sim_dt, state);

    if (fallen(state, phase, gait, config.fall_radius)) {
      result.fell = true;
      result.t_fall = t;
      break;
    }

    const GaitPhase eff = effective_phase(phase, gait);
    const References refs = references(phase, config.profile, gait, N, m, t);

    bool projected = false;
    LipmState solve_state = state;
    if (config.controller == ControllerKind::Projection) {
      solve_state = project_state(gait, eff, state, 1.0, &projected);
      if (projected) {
        ++result.n_projections;
        if (config.overwrite_measured) state = solve_state;
      }
    }

    const bool in_kernel =
        viability_bounds(gait, eff).contains(dcm(solve_state, gait) - eff.stance_pos,
                                             kKernelTol);

    if (config.controller == ControllerKind::ApproachOne) {
      plan = solve_mpc_approach1(solve_state, phase, config.weights, config.theta, refs,
                                 gait, have_plan ? &plan : nullptr);
      result.max_com_jump = std::max(
          result.max_com_jump, (plan.initial_state.c - solve_state.c).lpNorm<Eigen::Infinity>());
    } else {
      plan = solve_mpc(solve_state, phase, config.weights, refs, gait,
                       have_plan ? &plan : nullptr);
    }
    have_plan = true;

    const bool feasible = config.controller == ControllerKind::ApproachOne
                              ? plan.qp_status == QpStatus::Optimal
                              : in_kernel && plan.qp_status == QpStatus::Optimal;
    if (!feasible) ++result.n_infeasible;

    TraceRow row;
    row.t = t;
    row.c = state.c;
    row.cdot = state.cdot;
    row.xi = dcm(state, gait);
    row.zmp = plan.zmp.row(0).transpose();
    row.bounds = viability_bounds(gait, eff);
    row.stance = eff.stance_pos;
    row.projected = projected;
    row.feasible = feasible;
    result.traces.push_back(row);

    const Vec2 verr = state.cdot - config.profile.vdes(t);
    result.tracking_cost += verr.squaredNorm();

    // Plant propagation under the plan's first ZMP sample, held constant.
    const Vec2 zmp_cmd = plan.zmp.row(0).transpose();
    const Vec2 landing = plan.footsteps.row(0).transpose();
    bool fell_fine = false;
    for (int q = 0; q < fine_per_cycle; ++q) {
      const double tq = t + q * config.sim_dt;
      apply_jumps_up_to(tq + 0.25 * config.sim_dt, state);
      const Vec2 accel = push_accel(tq + 0.5 * config.sim_dt);
      state = lipm_step(state, zmp_cmd, config.sim_dt, accel, gait);

      if (phase.in_single_support(gait)) {
        const double time_left = phase.t_td - phase.t_in_step;
        phase.swing_pos =
            swing_advance(phase.swing_pos, landing, time_left, config.sim_dt, gait);
      }
      phase = advance_phase(phase, config.sim_dt, phase.swing_pos, gait);

      if (fallen(state, phase, gait, config.fall_radius)) {
        result.fell = true;
        result.t_fall = tq + config.sim_dt;
        fell_fine = true;
        break;
      }
    }
    if (fell_fine) break;
  }

  return result;
}

double tracking_cost(const EpisodeResult& result, const ReferenceProfile& profile,
                     const FallPenalty& penalty) {
  if (result.fell) {
    const double frac = std::clamp(result.t_fall / profile.episode_length, 0.0, 1.0);
    return penalty.c_base + penalty.c_fail * (1.0 - frac);
  }
  double cost = 0.0;
  for (const auto& row : result.traces) {
    cost += (row.cdot - profile.vdes(row.t)).squaredNorm();
  }
  return cost;
}

void write_trace_csv(const std::string& path, const EpisodeResult& result) {
  Csv csv(path);
  csv.row({"t", "cx", "cy", "cdx", "cdy", "xix", "xiy", "zx", "zy", "bx_min", "bx_max",
           "by_min", "by_max", "stance_x", "stance_y", "projected", "feasible"});
  for (const auto& r : result.traces) {
    csv.row({format_num(r.t), format_num(r.c.x()), format_num(r.c.y()),
             format_num(r.cdot.x()), format_num(r.cdot.y()), format_num(r.xi.x()),
             format_num(r.xi.y()), format_num(r.zmp.x()), format_num(r.zmp.y()),
             format_num(r.bounds.x_min), format_num(r.bounds.x_max),
             format_num(r.bounds.y_min), format_num(r.bounds.y_max),
             format_num(r.stance.x()), format_num(r.stance.y()),
             format_num(r.projected ? 1 : 0), format_num(r.feasible ? 1 : 0)});
  }
}

std::vector<PushGridCell> push_grid(const PushGridParams& params, const GaitConfig& gait) {
  if (params.directions_deg.empty() || params.phases_s.empty())
    throw std::invalid_argument("push_grid: direction and phase lists must be non-empty");
  if (!(params.force_step > 0) || !(params.f_max >= params.force_step))
    throw std::invalid_argument("push_grid: need 0 < force_step <= f_max");

  const int n_cells = static_cast<int>(params.directions_deg.size() * params.phases_s.size());
  std::vector<PushGridCell> grid(n_cells);

  auto measure = [&](double direction_deg, double phase_s, ControllerKind controller) {
    const double rad = direction_deg * kPi / 180.0;
    const Vec2 dir(std::sin(rad), -std::cos(rad));
    double best = 0.0;
    for (double f = params.force_step; f <= params.f_max + 1e-9; f += params.force_step) {
      EpisodeConfig ep;
      ep.controller = controller;
      ep.weights = params.weights;
      ep.profile.knots = {{0.0, Vec2{0.0, 0.0}}};
      ep.profile.episode_length = params.episode_length;
      ep.overwrite_measured = false;
      Disturbance push;
      push.kind = Disturbance::Kind::Push;
      push.time = params.push_lead_in + phase_s;
      push.duration = params.push_duration;
      push.force = f * dir;
      ep.disturbances = {push};
      if (run_episode(ep, gait).fell) break;
      best = f;
    }
    return best;
  };

  // Both controllers for one cell stay on the same worker so the ladder can
  // be cut short; cells are independent.
  parallel_for(n_cells, params.jobs, [&](int idx) {
    const size_t pi = idx % params.phases_s.size();
    const size_t di = idx / params.phases_s.size();
    PushGridCell cell;
    cell.direction_deg = params.directions_deg[di];
    cell.phase_s = params.phases_s[pi];
    cell.fmax_proj = measure(cell.direction_deg, cell.phase_s, ControllerKind::Projection);
    cell.fmax_noproj = measure(cell.direction_deg, cell.phase_s, ControllerKind::NoProjection);
    grid[idx] = cell;
  });
  return grid;
}

void write_push_grid_csv(const std::string& path, const std::vector<PushGridCell>& grid) {
  Csv csv(path);
  csv.row({"direction_deg", "phase_s", "fmax_proj_N", "fmax_noproj_N"});
  for (const auto& cell : grid) {
    csv.row({format_num(cell.direction_deg), format_num(cell.phase_s),
             format_num(cell.fmax_proj), format_num(cell.fmax_noproj)});
  }
}

Disturbance PushSampler::sample(Rng& rng) const {
  Disturbance d;
  d.kind = Disturbance::Kind::Push;
  const double fx = rng.uniform(sagittal_range[0], sagittal_range[1]);
  const double fy = rng.uniform(lateral_range[0], lateral_range[1]);
  d.force = scale * Vec2(fx, fy);
  d.duration = duration;
  d.time = rng.uniform(t_min, t_max);
  return d;
}

}  // namespace wpg
