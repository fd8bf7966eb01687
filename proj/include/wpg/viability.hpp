#pragma once

#include "wpg/gait.hpp"
#include "wpg/types.hpp"

namespace wpg {

// Per-axis admissible interval for the DCM offset xi - stance, evaluated at
// the current phase. Offsets inside the interval can still be captured by
// some admissible footstep sequence; the bounds tighten as touchdown nears.
struct ViabilityBounds {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  bool contains(const Vec2& dcm_offset, double tol = 0.0) const {
    return dcm_offset.x() >= x_min - tol && dcm_offset.x() <= x_max + tol &&
           dcm_offset.y() >= y_min - tol && dcm_offset.y() <= y_max + tol;
  }
};

// Sagittal DCM-offset interval [min, max] relative to the stance foot.
// Accounts for the remaining single-support time, the reach of the swing
// foot under its velocity limit, and unlimited further steps of length
// at most L_max.
Vec2 sagittal_bounds(const GaitConfig& config, const GaitPhase& phase);

// Lateral DCM-offset interval [min, max] relative to the stance foot. The
// alternating stance sides make the recursion geometric rather than uniform;
// the result depends on which foot is on the ground.
Vec2 lateral_bounds(const GaitConfig& config, const GaitPhase& phase);

ViabilityBounds viability_bounds(const GaitConfig& config, const GaitPhase& phase);

// Exhaustive capture check used to validate the closed-form bounds: searches
// over discretized landing sequences (n_steps of them, grid_points candidate
// positions per step and axis) for one that brings the DCM offset back over
// the support foot. Exact interval propagation between landings, so the only
// approximation is the landing grid itself.
bool capturability_oracle(const GaitConfig& config, const GaitPhase& phase,
                          const LipmState& state, int n_steps = 4,
                          int grid_points = 21);

// Minimal state adjustment that returns the DCM to the viable interval.
// Splits the required DCM shift between position and velocity to minimize
// delta_c^2 + w * delta_cdot^2; w = 1 weights both equally.
LipmState project_state(const GaitConfig& config, const GaitPhase& phase,
                        const LipmState& state, double w = 1.0,
                        bool* was_projected = nullptr);

}  // namespace wpg
