#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wpg/gait.hpp"
#include "wpg/mpc.hpp"
#include "wpg/rng.hpp"
#include "wpg/types.hpp"
#include "wpg/viability.hpp"

namespace wpg {

struct Disturbance {
  enum class Kind { StateJump, Push };
  Kind kind = Kind::StateJump;
  double time = 0.0;            // s from episode start
  Vec2 delta_c{0.0, 0.0};       // StateJump: position offset (m)
  Vec2 delta_cdot{0.0, 0.0};    // StateJump: velocity offset (m/s)
  Vec2 force{0.0, 0.0};         // Push: horizontal force (N)
  double duration = 0.0;        // Push: s
};

enum class ControllerKind { Projection, NoProjection, ApproachOne };

struct EpisodeConfig {
  ControllerKind controller = ControllerKind::Projection;
  double theta = 0.0;  // ApproachOne's initial-state anchoring weight
  CostWeights weights;
  ReferenceProfile profile;
  std::vector<Disturbance> disturbances;
  double sim_dt = 0.001;
  double mpc_period = 0.1;
  std::uint64_t seed = 0;
  // After a projection, overwrite the plant state with the projected state
  // (the lab convention for the figure reproductions). Disable to keep the
  // plant untouched and let only the controller see the projected state.
  bool overwrite_measured = true;
  double fall_radius = 1.0;  // m, DCM-to-stance distance declaring a fall
  int horizon = 16;          // MPC samples
  int n_footsteps = 2;       // MPC footstep variables

  void validate() const;
};

// One row per MPC cycle; states are post-projection when overwriting is on.
// Bounds and the stance reference come from the effective support phase
// (during double support: the just-landed foot at phase 0).
struct TraceRow {
  double t = 0.0;
  Vec2 c, cdot, xi, zmp;
  ViabilityBounds bounds;
  Vec2 stance;
  bool projected = false;
  bool feasible = true;
};

struct EpisodeResult {
  bool fell = false;
  double t_fall = 0.0;
  double tracking_cost = 0.0;  // sum of squared velocity errors at MPC samples
  int n_projections = 0;
  int n_infeasible = 0;
  double max_com_jump = 0.0;  // ApproachOne: largest planned-vs-measured X0 gap
  std::vector<TraceRow> traces;
};

// Runs one closed-loop episode from the default phase (right stance, step
// start) with the CoM on the symmetric stepping-in-place orbit: at the feet
// midline, moving laterally toward the stance foot at the orbit's sway speed.
EpisodeResult run_episode(const EpisodeConfig& config, const GaitConfig& gait);

// Fall penalty constants: a fall at time t costs
// c_base + c_fail * (1 - t_fall / episode_length).
struct FallPenalty {
  double c_base = 1.0;
  double c_fail = 9.0;
};

// Velocity-tracking cost recomputed from traces; falls return the penalty.
double tracking_cost(const EpisodeResult& result, const ReferenceProfile& profile,
                     const FallPenalty& penalty = FallPenalty{});

void write_trace_csv(const std::string& path, const EpisodeResult& result);

// Largest push survived per (direction, phase) cell for both controllers.
struct PushGridCell {
  double direction_deg = 0.0;
  double phase_s = 0.0;
  double fmax_proj = 0.0;
  double fmax_noproj = 0.0;
};

struct PushGridParams {
  std::vector<double> directions_deg;
  std::vector<double> phases_s;
  double force_step = 5.0;  // N, ladder resolution
  double f_max = 200.0;     // N, search cap
  double push_duration = 0.2;
  double push_lead_in = 1.2;       // s of undisturbed stepping before the push
  double episode_length = 4.0;     // s
  CostWeights weights;
  int jobs = 1;
};

// Stepping-in-place push sweep. Force direction theta maps to the vector
// F * (sin theta, -cos theta): 90 degrees pushes forward (+x), 0 degrees
// pushes to the right (-y). Forces climb from force_step in force_step
// increments; a cell's value is the largest force survived before the first
// failure (0 when even the smallest force fells the robot).
std::vector<PushGridCell> push_grid(const PushGridParams& params, const GaitConfig& gait);

void write_push_grid_csv(const std::string& path, const std::vector<PushGridCell>& grid);

// One randomized push for robustness suites: sagittal and lateral components
// drawn from the given ranges (N), applied together for `duration` starting
// at a uniform time in [t_min, t_max].
struct PushSampler {
  Vec2 sagittal_range{-80.0, 110.0};
  Vec2 lateral_range{-45.0, 35.0};
  double duration = 0.2;
  double t_min = 1.0;
  double t_max = 8.0;
  double scale = 1.0;

  Disturbance sample(Rng& rng) const;
};

}  // namespace wpg
