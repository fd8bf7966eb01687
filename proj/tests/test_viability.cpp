#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wpg/lipm.hpp"
#include "wpg/rng.hpp"
#include "wpg/viability.hpp"

using namespace wpg;

#define CHECK_NEAR(a, b, tol) CHECK(std::abs((a) - (b)) <= (tol))

namespace {

GaitPhase nominal_right(double t) {
  GaitPhase phase;  // right stance at (0,-0.1), swing at (0,0.1)
  phase.t_in_step = t;
  return phase;
}

LipmState state_with_offset(const GaitPhase& phase, const Vec2& offset,
                            const GaitConfig& config) {
  LipmState s;
  s.c = phase.stance_pos + offset;  // zero velocity: DCM == CoM
  (void)config;
  return s;
}

}  // namespace

TEST_CASE("sagittal bounds match the frozen series fixtures") {
  GaitConfig config;
  const Vec2 b0 = sagittal_bounds(config, nominal_right(0.0));
  CHECK_NEAR(b0[0], -0.226057260699, 1e-9);
  CHECK_NEAR(b0[1], 0.226057260699, 1e-9);
  const Vec2 b3 = sagittal_bounds(config, nominal_right(0.3));
  CHECK_NEAR(b3[0], -0.311498244925, 1e-9);
  CHECK_NEAR(b3[1], 0.311498244925, 1e-9);
}

TEST_CASE("lateral bounds match the frozen series fixtures") {
  GaitConfig config;
  const Vec2 b0 = lateral_bounds(config, nominal_right(0.0));
  CHECK_NEAR(b0[0], -0.040950352679, 1e-9);
  CHECK_NEAR(b0[1], 0.117876368980, 1e-9);
  const Vec2 b25 = lateral_bounds(config, nominal_right(0.25));
  CHECK_NEAR(b25[0], -0.028281333425, 1e-9);
  CHECK_NEAR(b25[1], 0.212899632877, 1e-9);
}

TEST_CASE("left stance mirrors the lateral interval exactly") {
  GaitConfig config;
  for (double t : {0.0, 0.1, 0.25, 0.4, 0.5}) {
    GaitPhase right = nominal_right(t);
    GaitPhase left = right;
    left.stance_foot = Foot::Left;
    left.stance_pos = Vec2(0.0, 0.1);
    left.swing_pos = Vec2(0.0, -0.1);
    left.liftoff_pos = left.swing_pos;

    const Vec2 br = lateral_bounds(config, right);
    const Vec2 bl = lateral_bounds(config, left);
    CHECK_NEAR(bl[0], -br[1], 1e-14);
    CHECK_NEAR(bl[1], -br[0], 1e-14);

    const Vec2 sr = sagittal_bounds(config, right);
    const Vec2 sl = sagittal_bounds(config, left);
    CHECK_NEAR(sl[0], sr[0], 1e-14);
    CHECK_NEAR(sl[1], sr[1], 1e-14);
  }
}

TEST_CASE("reduction: instantaneous stepping with a point foot") {
  // With the swing reach unbounded (huge v_max), a point foot, and t = 0 the
  // bounds collapse to the pure step-recursion values: +/- L_max/(E-1)
  // sagittally, and laterally L_p/(E+1) plus the alternating width series.
  GaitConfig config;
  config.L_f = 1e-30;
  config.W_f = 1e-30;
  config.v_max = Vec2(1e6, 1e6);
  const double E = std::exp(config.omega0 * config.T_ss);

  const Vec2 sx = sagittal_bounds(config, nominal_right(0.0));
  CHECK_NEAR(sx[1], config.L_max / (E - 1.0), 1e-13);
  CHECK_NEAR(sx[0], -config.L_max / (E - 1.0), 1e-13);

  const Vec2 sy = lateral_bounds(config, nominal_right(0.0));
  const double mid = config.L_p / (E + 1.0);
  const double in_series =
      (config.W_min - config.W_max * E) / (1.0 - E * E);
  const double out_series =
      (config.W_max - config.W_min * E) / (1.0 - E * E);
  CHECK_NEAR(sy[1], mid + in_series, 1e-13);
  CHECK_NEAR(sy[0], mid + out_series, 1e-13);
}

TEST_CASE("oracle only depends on the state through its DCM") {
  GaitConfig config;
  const GaitPhase phase = nominal_right(0.1);
  const Vec2 offset(0.12, 0.04);

  LipmState by_pos;
  by_pos.c = phase.stance_pos + offset;

  LipmState by_vel;
  by_vel.c = phase.stance_pos;
  by_vel.cdot = config.omega0 * offset;

  CHECK(capturability_oracle(config, phase, by_pos) ==
        capturability_oracle(config, phase, by_vel));
}

TEST_CASE("oracle agrees with the bounds away from the boundary") {
  GaitConfig config;
  for (double t : {0.0, 0.2, 0.45}) {
    const GaitPhase phase = nominal_right(t);
    const ViabilityBounds b = viability_bounds(config, phase);
    const Vec2 center(0.5 * (b.x_min + b.x_max), 0.5 * (b.y_min + b.y_max));

    CHECK(capturability_oracle(config, phase, state_with_offset(phase, center, config)));
    CHECK_FALSE(capturability_oracle(
        config, phase, state_with_offset(phase, Vec2(b.x_max + 0.05, center.y()), config)));
    CHECK_FALSE(capturability_oracle(
        config, phase, state_with_offset(phase, Vec2(center.x(), b.y_max + 0.05), config)));
    CHECK_FALSE(capturability_oracle(
        config, phase, state_with_offset(phase, Vec2(center.x(), b.y_min - 0.05), config)));
  }
}

TEST_CASE("more allowed steps never shrink the capturable set") {
  GaitConfig config;
  const GaitPhase phase = nominal_right(0.1);
  const ViabilityBounds b = viability_bounds(config, phase);
  const Vec2 center(0.5 * (b.x_min + b.x_max), 0.5 * (b.y_min + b.y_max));
  const LipmState s = state_with_offset(phase, center, config);
  for (int steps = 1; steps <= 4; ++steps) {
    if (capturability_oracle(config, phase, s, steps)) {
      CHECK(capturability_oracle(config, phase, s, steps + 1));
    }
  }
  const LipmState far = state_with_offset(phase, Vec2(1.0, 0.0), config);
  CHECK_FALSE(capturability_oracle(config, phase, far, 5));
}

TEST_CASE("unreachable swing target degrades to capture over the stance foot") {
  GaitConfig config;
  GaitPhase phase = nominal_right(0.49);  // 0.01 s to touchdown
  phase.swing_pos = phase.stance_pos + Vec2(0.0, 0.05);
  phase.liftoff_pos = phase.swing_pos;
  // The lateral landing window [0.035, 0.065] misses the kinematic band
  // [0.12, 0.40]: no admissible first step, so capture means holding the
  // DCM over the current foot.
  CHECK(capturability_oracle(config, phase,
                             state_with_offset(phase, Vec2(0.03, 0.02), config)));
  CHECK_FALSE(capturability_oracle(config, phase,
                                   state_with_offset(phase, Vec2(0.03, 0.08), config)));
  CHECK_FALSE(capturability_oracle(config, phase,
                                   state_with_offset(phase, Vec2(0.15, 0.02), config)));
}

TEST_CASE("projection: a state inside the kernel is returned untouched") {
  GaitConfig config;
  const GaitPhase phase = nominal_right(0.2);
  const ViabilityBounds b = viability_bounds(config, phase);
  LipmState s;
  s.c = phase.stance_pos + Vec2(0.5 * (b.x_min + b.x_max), 0.5 * (b.y_min + b.y_max));
  s.cdot = Vec2(0.01, -0.02);
  bool projected = true;
  const LipmState out = project_state(config, phase, s, 1.0, &projected);
  CHECK_FALSE(projected);
  CHECK(out.c == s.c);
  CHECK(out.cdot == s.cdot);
}

TEST_CASE("projection: frozen split of a pure lateral DCM excess") {
  GaitConfig config;
  const GaitPhase phase = nominal_right(0.0);
  const ViabilityBounds b = viability_bounds(config, phase);

  LipmState s;  // DCM offset exactly 0.02 above the lateral maximum
  s.c = phase.stance_pos + Vec2(0.0, b.y_max + 0.02);
  bool projected = false;
  const LipmState out = project_state(config, phase, s, 1.0, &projected);
  CHECK(projected);
  CHECK_NEAR(s.c.y() - out.c.y(), 0.018491988690, 1e-9);
  CHECK_NEAR(-out.cdot.y(), 0.005280731776, 1e-9);
  CHECK(out.c.x() == s.c.x());
  CHECK(out.cdot.x() == s.cdot.x());

  // The projected DCM offset sits exactly on the bound.
  const Vec2 xi = dcm(out, config);
  CHECK_NEAR(xi.y() - phase.stance_pos.y(), b.y_max, 1e-12);
}

TEST_CASE("projection: minimal among all splits of the required DCM shift") {
  GaitConfig config;
  const GaitPhase phase = nominal_right(0.15);
  const ViabilityBounds b = viability_bounds(config, phase);
  LipmState s;
  s.c = phase.stance_pos + Vec2(b.x_max + 0.04, 0.0);
  const LipmState out = project_state(config, phase, s);
  const double dc = s.c.x() - out.c.x();
  const double dv = s.cdot.x() - out.cdot.x();
  const double shift = dc + dv / config.omega0;
  const double cost = dc * dc + dv * dv;

  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    const double alt_dc = rng.uniform(-2.0 * std::abs(shift), 2.0 * std::abs(shift));
    const double alt_dv = (shift - alt_dc) * config.omega0;
    CHECK(alt_dc * alt_dc + alt_dv * alt_dv >= cost - 1e-12);
  }
}

TEST_CASE("projection: velocity weighting shifts the split as designed") {
  GaitConfig config;
  const GaitPhase phase = nominal_right(0.0);
  const ViabilityBounds b = viability_bounds(config, phase);
  LipmState s;
  s.c = phase.stance_pos + Vec2(0.0, b.y_max + 0.02);

  const double w = 4.0;
  const LipmState out = project_state(config, phase, s, w);
  const double w2 = config.omega0 * config.omega0;
  CHECK_NEAR(s.c.y() - out.c.y(), 0.02 / (1.0 + 1.0 / (w * w2)), 1e-12);
  CHECK_NEAR(-out.cdot.y(), 0.02 * config.omega0 / (1.0 + w * w2), 1e-12);

  CHECK_THROWS_AS(project_state(config, phase, s, 0.0), std::invalid_argument);
}

TEST_CASE("projection: idempotent, and clamps both axes at once") {
  GaitConfig config;
  const GaitPhase phase = nominal_right(0.1);
  const ViabilityBounds b = viability_bounds(config, phase);
  LipmState s;
  s.c = phase.stance_pos + Vec2(b.x_max + 0.1, b.y_min - 0.05);
  s.cdot = Vec2(0.2, -0.3);

  bool projected = false;
  const LipmState once = project_state(config, phase, s, 1.0, &projected);
  CHECK(projected);
  const Vec2 xi = dcm(once, config);
  CHECK_NEAR(xi.x() - phase.stance_pos.x(), b.x_max, 1e-12);
  CHECK_NEAR(xi.y() - phase.stance_pos.y(), b.y_min, 1e-12);

  projected = true;
  const LipmState twice = project_state(config, phase, once, 1.0, &projected);
  CHECK_FALSE(projected);
  CHECK_NEAR(twice.c.x(), once.c.x(), 1e-15);
  CHECK_NEAR(twice.cdot.y(), once.cdot.y(), 1e-15);
}

TEST_CASE("projection: non-finite states pass through unmodified") {
  GaitConfig config;
  const GaitPhase phase = nominal_right(0.1);
  LipmState s;
  s.c = Vec2(std::numeric_limits<double>::quiet_NaN(), 0.0);
  bool projected = true;
  const LipmState out = project_state(config, phase, s, 1.0, &projected);
  CHECK_FALSE(projected);
  CHECK(std::isnan(out.c.x()));
}

TEST_CASE("bounds stay ordered and centered states stay viable across the step") {
  GaitConfig config;
  for (double t = 0.0; t <= 0.5 + 1e-12; t += 0.05) {
    const ViabilityBounds b = viability_bounds(config, nominal_right(t));
    CHECK(b.x_min < b.x_max);
    CHECK(b.y_min < b.y_max);
    CHECK(b.contains(Vec2(0.5 * (b.x_min + b.x_max), 0.5 * (b.y_min + b.y_max))));
  }
}
