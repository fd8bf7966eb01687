#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wpg/gait.hpp"

using namespace wpg;

#define CHECK_NEAR(a, b, tol) CHECK(std::abs((a) - (b)) <= (tol))

TEST_CASE("velocity profile: piecewise-constant lookup with zero before the first knot") {
  ReferenceProfile profile;
  profile.knots = {{1.0, Vec2(0.5, 0.0)}, {3.0, Vec2(1.0, -0.2)}};
  CHECK(profile.vdes(0.0) == Vec2(0.0, 0.0));
  CHECK(profile.vdes(0.999).x() == 0.0);
  CHECK(profile.vdes(1.0).x() == 0.5);
  CHECK(profile.vdes(2.5).x() == 0.5);
  CHECK(profile.vdes(3.0).y() == -0.2);
  CHECK(profile.vdes(99.0).x() == 1.0);
}

TEST_CASE("selection matrices: frozen ownership pattern at t = 0.27") {
  GaitConfig config;
  GaitPhase phase;  // right stance
  phase.t_in_step = 0.27;
  const SelectionMatrices sel = selection_matrices(phase, config, 16, 2);
  const int expect[16] = {0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2};
  for (int i = 0; i < 16; ++i) {
    const int owner = sel.U_c(i) > 0.5 ? 0 : (sel.U(i, 0) > 0.5 ? 1 : 2);
    CHECK(owner == expect[i]);
  }
}

TEST_CASE("selection matrices: rows partition across the whole step") {
  GaitConfig config;
  for (double t : {0.0, 0.15, 0.3, 0.45, 0.5, 0.55, 0.59}) {
    GaitPhase phase;
    phase.t_in_step = t;
    const SelectionMatrices sel = selection_matrices(phase, config, 16, 2);
    for (int i = 0; i < 16; ++i) {
      CHECK(sel.U_c(i) + sel.U.row(i).sum() == 1.0);
    }
    // Ownership is monotone along the horizon: once a row leaves the current
    // stance it never comes back.
    for (int i = 1; i < 16; ++i) CHECK(sel.U_c(i) <= sel.U_c(i - 1));
  }
}

TEST_CASE("selection matrices: late in the step every sample goes to future footsteps") {
  GaitConfig config;
  GaitPhase phase;
  phase.t_in_step = 0.55;
  const SelectionMatrices sel = selection_matrices(phase, config, 16, 2);
  CHECK(sel.U_c(0) == 1.0);  // sample 1 starts before the 0.05 s boundary
  CHECK(sel.U(1, 0) == 1.0);
  CHECK(sel.U(7, 1) == 1.0);  // sample 8 starts 0.7 s out: second footstep
}

TEST_CASE("advance_phase: in-step advance keeps the support unchanged") {
  GaitConfig config;
  GaitPhase phase;
  phase.t_in_step = 0.2;
  const GaitPhase next = advance_phase(phase, 0.1, std::nullopt, config);
  CHECK_NEAR(next.t_in_step, 0.3, 1e-15);
  CHECK(next.stance_foot == Foot::Right);
  CHECK(next.step_index == 0);
  CHECK(next.stance_pos == phase.stance_pos);
}

TEST_CASE("advance_phase: boundary crossing swaps feet and wraps the clock") {
  GaitConfig config;
  GaitPhase phase;
  phase.t_in_step = 0.55;
  const Vec2 landed(0.05, 0.1);
  const GaitPhase next = advance_phase(phase, 0.1, landed, config);
  CHECK(next.stance_foot == Foot::Left);
  CHECK(next.stance_pos == landed);
  CHECK(next.swing_pos == phase.stance_pos);
  CHECK(next.liftoff_pos == phase.stance_pos);
  CHECK_NEAR(next.t_in_step, 0.05, 1e-12);
  CHECK(next.step_index == 1);
  CHECK(next.t_td == config.T_ss);
}

TEST_CASE("advance_phase: crossing without a landed footstep is an error") {
  GaitConfig config;
  GaitPhase phase;
  phase.t_in_step = 0.55;
  CHECK_THROWS_AS(advance_phase(phase, 0.1, std::nullopt, config), std::invalid_argument);
  CHECK_THROWS_AS(advance_phase(phase, 1.5, Vec2(0.0, 0.1), config), std::invalid_argument);
  CHECK_THROWS_AS(advance_phase(phase, -0.1, std::nullopt, config), std::invalid_argument);
}

TEST_CASE("swing_advance: rate-capped, arrives exactly, never overshoots") {
  GaitConfig config;  // v_max = 1.5 per axis
  const Vec2 target(0.3, 0.0);
  Vec2 pos(0.0, 0.0);
  pos = swing_advance(pos, target, 0.2, 0.1, config);
  CHECK_NEAR(pos.x(), 0.15, 1e-12);  // 0.3 m in 0.2 s hits the 1.5 m/s cap
  pos = swing_advance(pos, target, 0.1, 0.1, config);
  CHECK_NEAR(pos.x(), 0.3, 1e-12);
  // Already there: stays put even with time to spare.
  pos = swing_advance(pos, target, 0.05, 0.1, config);
  CHECK(pos.x() == 0.3);
  // No time left: falls back to the velocity cap, still no overshoot.
  const Vec2 close = swing_advance(Vec2(0.29, 0.0), target, 0.0, 0.1, config);
  CHECK_NEAR(close.x(), 0.3, 1e-12);
}

TEST_CASE("swing_position: interpolates liftoff to landing under the velocity cap") {
  GaitConfig config;
  GaitPhase phase;
  phase.liftoff_pos = Vec2(0.0, 0.1);
  phase.swing_pos = phase.liftoff_pos;
  const Vec2 landing(0.45, 0.1);

  phase.t_in_step = 0.0;
  CHECK(swing_position(phase, landing, config) == phase.liftoff_pos);
  phase.t_in_step = 0.25;
  CHECK_NEAR(swing_position(phase, landing, config).x(), 0.225, 1e-12);
  phase.t_in_step = 0.5;
  CHECK_NEAR(swing_position(phase, landing, config).x(), 0.45, 1e-12);

  // A target beyond reach saturates at v_max * t.
  const Vec2 far(2.0, 0.1);
  phase.t_in_step = 0.3;
  CHECK_NEAR(swing_position(phase, far, config).x(), 1.5 * 0.3, 1e-12);
}

TEST_CASE("references: frozen footstep chain and the assembled ZMP centers") {
  GaitConfig config;
  GaitPhase phase;  // right stance
  phase.stance_pos = Vec2(0.1, -0.1);
  ReferenceProfile profile;
  const References refs = references(phase, profile, config, 16, 2, 0.0);

  CHECK_NEAR(refs.Xfref(0, 0), 0.1, 1e-15);
  CHECK_NEAR(refs.Xfref(0, 1), 0.1, 1e-15);
  CHECK_NEAR(refs.Xfref(1, 0), 0.1, 1e-15);
  CHECK_NEAR(refs.Xfref(1, 1), -0.1, 1e-15);

  const SelectionMatrices sel = selection_matrices(phase, config, 16, 2);
  for (int axis = 0; axis < 2; ++axis) {
    const Vec expect =
        sel.U_c * phase.stance_pos[axis] + sel.U * refs.Xfref.col(axis);
    CHECK((refs.Zref.col(axis) - expect).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("references: left stance mirrors the chain") {
  GaitConfig config;
  GaitPhase phase;
  phase.stance_foot = Foot::Left;
  phase.stance_pos = Vec2(0.0, 0.1);
  ReferenceProfile profile;
  const References refs = references(phase, profile, config, 16, 2, 0.0);
  CHECK_NEAR(refs.Xfref(0, 1), -0.1, 1e-15);
  CHECK_NEAR(refs.Xfref(1, 1), 0.1, 1e-15);
}

TEST_CASE("references: velocity rows sample the profile at sample starts") {
  GaitConfig config;
  GaitPhase phase;
  ReferenceProfile profile;
  profile.knots = {{0.0, Vec2(0.0, 0.0)}, {1.0, Vec2(0.8, 0.0)}};
  const References refs = references(phase, profile, config, 16, 2, 0.75);
  // Samples start at 0.75, 0.85, 0.95, 1.05, ...: the fourth row crosses 1 s.
  CHECK(refs.Vref(0, 0) == 0.0);
  CHECK(refs.Vref(2, 0) == 0.0);
  CHECK(refs.Vref(3, 0) == 0.8);
  CHECK(refs.Vref(15, 0) == 0.8);
}
