#include "wpg/config_io.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "wpg/rng.hpp"

namespace wpg {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& ctx, const std::string& what) {
  throw std::runtime_error("config error at " + ctx + ": " + what);
}

void expect_object(const json& j, const std::string& ctx) {
  if (!j.is_object()) fail(ctx, "expected an object");
}

// Strictness: every object must consist solely of keys the loader consumes.
void check_keys(const json& j, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
  expect_object(j, ctx);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!ok.count(key)) fail(ctx, "unknown key '" + key + "'");
  }
}

double get_num(const json& j, const std::string& ctx) {
  if (!j.is_number()) fail(ctx, "expected a number");
  return j.get<double>();
}

double opt_num(const json& j, const char* key, double fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  return get_num(j.at(key), ctx + "." + key);
}

bool opt_bool(const json& j, const char* key, bool fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(ctx + "." + key, "expected a boolean");
  return v.get<bool>();
}

int opt_int(const json& j, const char* key, int fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(ctx + "." + key, "expected an integer");
  return v.get<int>();
}

Vec2 get_vec2(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 2) fail(ctx, "expected an array of two numbers");
  return Vec2(get_num(j[0], ctx + "[0]"), get_num(j[1], ctx + "[1]"));
}

Vec2 opt_vec2(const json& j, const char* key, const Vec2& fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  return get_vec2(j.at(key), ctx + "." + key);
}

GaitConfig parse_gait(const json& j, const std::string& ctx) {
  check_keys(j, ctx,
             {"h", "g", "L_f", "W_f", "L_p", "L_max", "W_max", "W_min", "T_ss", "T_ds",
              "T", "v_max", "robot_mass"});
  GaitConfig g;
  g.h = opt_num(j, "h", g.h, ctx);
  g.g = opt_num(j, "g", g.g, ctx);
  g.L_f = opt_num(j, "L_f", g.L_f, ctx);
  g.W_f = opt_num(j, "W_f", g.W_f, ctx);
  g.L_p = opt_num(j, "L_p", g.L_p, ctx);
  g.L_max = opt_num(j, "L_max", g.L_max, ctx);
  g.W_max = opt_num(j, "W_max", g.W_max, ctx);
  g.W_min = opt_num(j, "W_min", g.W_min, ctx);
  g.T_ss = opt_num(j, "T_ss", g.T_ss, ctx);
  g.T_ds = opt_num(j, "T_ds", g.T_ds, ctx);
  g.T = opt_num(j, "T", g.T, ctx);
  g.v_max = opt_vec2(j, "v_max", g.v_max, ctx);
  g.robot_mass = opt_num(j, "robot_mass", g.robot_mass, ctx);
  g.refresh_omega();
  g.validate();
  return g;
}

json gait_to_json(const GaitConfig& g) {
  return json{{"h", g.h},         {"g", g.g},         {"L_f", g.L_f},
              {"W_f", g.W_f},     {"L_p", g.L_p},     {"L_max", g.L_max},
              {"W_max", g.W_max}, {"W_min", g.W_min}, {"T_ss", g.T_ss},
              {"T_ds", g.T_ds},   {"T", g.T},         {"v_max", {g.v_max.x(), g.v_max.y()}},
              {"robot_mass", g.robot_mass}};
}

CostWeights parse_weights(const json& j, const std::string& ctx) {
  check_keys(j, ctx, {"alpha", "beta", "delta", "eta"});
  CostWeights w;
  w.alpha = opt_vec2(j, "alpha", w.alpha, ctx);
  w.beta = opt_vec2(j, "beta", w.beta, ctx);
  w.delta = opt_vec2(j, "delta", w.delta, ctx);
  w.eta = opt_vec2(j, "eta", w.eta, ctx);
  w.validate();
  return w;
}

json weights_to_json(const CostWeights& w) {
  return json{{"alpha", {w.alpha.x(), w.alpha.y()}},
              {"beta", {w.beta.x(), w.beta.y()}},
              {"delta", {w.delta.x(), w.delta.y()}},
              {"eta", {w.eta.x(), w.eta.y()}}};
}

ReferenceProfile parse_profile(const json& j, const std::string& ctx) {
  check_keys(j, ctx, {"episode_length", "knots"});
  ReferenceProfile p;
  p.episode_length = opt_num(j, "episode_length", p.episode_length, ctx);
  if (j.contains("knots")) {
    const json& knots = j.at("knots");
    if (!knots.is_array()) fail(ctx + ".knots", "expected an array");
    p.knots.clear();
    for (size_t i = 0; i < knots.size(); ++i) {
      const std::string kctx = ctx + ".knots[" + std::to_string(i) + "]";
      const json& k = knots[i];
      if (!k.is_array() || k.size() != 2) fail(kctx, "expected [time, [vx, vy]]");
      p.knots.emplace_back(get_num(k[0], kctx + "[0]"), get_vec2(k[1], kctx + "[1]"));
    }
  }
  return p;
}

json profile_to_json(const ReferenceProfile& p) {
  json knots = json::array();
  for (const auto& [t, v] : p.knots) knots.push_back(json::array({t, {v.x(), v.y()}}));
  return json{{"episode_length", p.episode_length}, {"knots", knots}};
}

Disturbance parse_disturbance(const json& j, const std::string& ctx) {
  check_keys(j, ctx, {"kind", "time", "delta_c", "delta_cdot", "force", "duration"});
  Disturbance d;
  if (!j.contains("kind")) fail(ctx, "missing 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "state_jump") {
    d.kind = Disturbance::Kind::StateJump;
  } else if (kind == "push") {
    d.kind = Disturbance::Kind::Push;
  } else {
    fail(ctx + ".kind", "expected 'state_jump' or 'push', got '" + kind + "'");
  }
  d.time = opt_num(j, "time", 0.0, ctx);
  d.delta_c = opt_vec2(j, "delta_c", d.delta_c, ctx);
  d.delta_cdot = opt_vec2(j, "delta_cdot", d.delta_cdot, ctx);
  d.force = opt_vec2(j, "force", d.force, ctx);
  d.duration = opt_num(j, "duration", d.duration, ctx);
  return d;
}

json disturbance_to_json(const Disturbance& d) {
  json j{{"kind", d.kind == Disturbance::Kind::StateJump ? "state_jump" : "push"},
         {"time", d.time}};
  if (d.kind == Disturbance::Kind::StateJump) {
    j["delta_c"] = {d.delta_c.x(), d.delta_c.y()};
    j["delta_cdot"] = {d.delta_cdot.x(), d.delta_cdot.y()};
  } else {
    j["force"] = {d.force.x(), d.force.y()};
    j["duration"] = d.duration;
  }
  return j;
}

EpisodeConfig parse_episode(const json& j, const std::string& ctx) {
  check_keys(j, ctx,
             {"controller", "theta", "weights", "profile", "disturbances", "sim_dt",
              "mpc_period", "overwrite_measured", "fall_radius", "horizon",
              "n_footsteps"});
  EpisodeConfig e;
  if (j.contains("controller")) {
    const std::string c = j.at("controller").get<std::string>();
    if (c == "projection") e.controller = ControllerKind::Projection;
    else if (c == "no_projection") e.controller = ControllerKind::NoProjection;
    else if (c == "approach_one") e.controller = ControllerKind::ApproachOne;
    else fail(ctx + ".controller", "unknown controller '" + c + "'");
  }
  e.theta = opt_num(j, "theta", e.theta, ctx);
  if (j.contains("weights")) e.weights = parse_weights(j.at("weights"), ctx + ".weights");
  if (j.contains("profile")) e.profile = parse_profile(j.at("profile"), ctx + ".profile");
  if (j.contains("disturbances")) {
    const json& ds = j.at("disturbances");
    if (!ds.is_array()) fail(ctx + ".disturbances", "expected an array");
    for (size_t i = 0; i < ds.size(); ++i)
      e.disturbances.push_back(
          parse_disturbance(ds[i], ctx + ".disturbances[" + std::to_string(i) + "]"));
  }
  e.sim_dt = opt_num(j, "sim_dt", e.sim_dt, ctx);
  e.mpc_period = opt_num(j, "mpc_period", e.mpc_period, ctx);
  e.overwrite_measured = opt_bool(j, "overwrite_measured", e.overwrite_measured, ctx);
  e.fall_radius = opt_num(j, "fall_radius", e.fall_radius, ctx);
  e.horizon = opt_int(j, "horizon", e.horizon, ctx);
  e.n_footsteps = opt_int(j, "n_footsteps", e.n_footsteps, ctx);
  return e;
}

json episode_to_json(const EpisodeConfig& e) {
  const char* controller = e.controller == ControllerKind::Projection ? "projection"
                           : e.controller == ControllerKind::NoProjection
                               ? "no_projection"
                               : "approach_one";
  json ds = json::array();
  for (const auto& d : e.disturbances) ds.push_back(disturbance_to_json(d));
  return json{{"controller", controller},
              {"theta", e.theta},
              {"weights", weights_to_json(e.weights)},
              {"profile", profile_to_json(e.profile)},
              {"disturbances", ds},
              {"sim_dt", e.sim_dt},
              {"mpc_period", e.mpc_period},
              {"overwrite_measured", e.overwrite_measured},
              {"fall_radius", e.fall_radius},
              {"horizon", e.horizon},
              {"n_footsteps", e.n_footsteps}};
}

RandomJumpSpec parse_random_jumps(const json& j, const std::string& ctx) {
  check_keys(j, ctx, {"t_start", "t_end", "scale"});
  RandomJumpSpec s;
  s.enabled = true;
  s.t_start = opt_num(j, "t_start", s.t_start, ctx);
  s.t_end = opt_num(j, "t_end", s.t_end, ctx);
  s.scale = opt_num(j, "scale", s.scale, ctx);
  return s;
}

PushGridParams parse_pushgrid(const json& j, const std::string& ctx) {
  check_keys(j, ctx,
             {"directions_deg", "phases_s", "force_step", "f_max", "push_duration",
              "push_lead_in", "episode_length", "weights"});
  PushGridParams p;
  auto read_list = [&](const char* key, std::vector<double>& out) {
    if (!j.contains(key)) return;
    const json& arr = j.at(key);
    if (!arr.is_array()) fail(ctx + "." + key, "expected an array");
    out.clear();
    for (size_t i = 0; i < arr.size(); ++i)
      out.push_back(get_num(arr[i], ctx + "." + key + "[" + std::to_string(i) + "]"));
  };
  read_list("directions_deg", p.directions_deg);
  read_list("phases_s", p.phases_s);
  p.force_step = opt_num(j, "force_step", p.force_step, ctx);
  p.f_max = opt_num(j, "f_max", p.f_max, ctx);
  p.push_duration = opt_num(j, "push_duration", p.push_duration, ctx);
  p.push_lead_in = opt_num(j, "push_lead_in", p.push_lead_in, ctx);
  p.episode_length = opt_num(j, "episode_length", p.episode_length, ctx);
  if (j.contains("weights")) p.weights = parse_weights(j.at("weights"), ctx + ".weights");
  return p;
}

json pushgrid_to_json(const PushGridParams& p) {
  return json{{"directions_deg", p.directions_deg},
              {"phases_s", p.phases_s},
              {"force_step", p.force_step},
              {"f_max", p.f_max},
              {"push_duration", p.push_duration},
              {"push_lead_in", p.push_lead_in},
              {"episode_length", p.episode_length},
              {"weights", weights_to_json(p.weights)}};
}

PushSampler parse_sampler(const json& j, const std::string& ctx) {
  check_keys(j, ctx, {"sagittal_range", "lateral_range", "duration", "t_min", "t_max", "scale"});
  PushSampler s;
  s.sagittal_range = opt_vec2(j, "sagittal_range", s.sagittal_range, ctx);
  s.lateral_range = opt_vec2(j, "lateral_range", s.lateral_range, ctx);
  s.duration = opt_num(j, "duration", s.duration, ctx);
  s.t_min = opt_num(j, "t_min", s.t_min, ctx);
  s.t_max = opt_num(j, "t_max", s.t_max, ctx);
  s.scale = opt_num(j, "scale", s.scale, ctx);
  return s;
}

json sampler_to_json(const PushSampler& s) {
  return json{{"sagittal_range", {s.sagittal_range.x(), s.sagittal_range.y()}},
              {"lateral_range", {s.lateral_range.x(), s.lateral_range.y()}},
              {"duration", s.duration},
              {"t_min", s.t_min},
              {"t_max", s.t_max},
              {"scale", s.scale}};
}

TunerConfig parse_tuner(const json& j, const std::string& ctx) {
  check_keys(j, ctx,
             {"n_iterations", "batch_size", "profile", "sampler", "space_lo", "space_hi",
              "init"});
  TunerConfig t;
  t.settings.n_iterations = opt_int(j, "n_iterations", t.settings.n_iterations, ctx);
  t.batch_size = opt_int(j, "batch_size", t.batch_size, ctx);
  if (j.contains("profile")) t.profile = parse_profile(j.at("profile"), ctx + ".profile");
  if (j.contains("sampler")) t.sampler = parse_sampler(j.at("sampler"), ctx + ".sampler");
  auto read8 = [&](const char* key, Vec8& out) {
    if (!j.contains(key)) return;
    const json& arr = j.at(key);
    if (!arr.is_array() || arr.size() != 8)
      fail(ctx + "." + key, "expected an array of eight numbers");
    for (int i = 0; i < 8; ++i)
      out[i] = get_num(arr[i], ctx + "." + key + "[" + std::to_string(i) + "]");
  };
  read8("space_lo", t.space.lo);
  read8("space_hi", t.space.hi);
  t.space.validate();
  if (j.contains("init")) t.init = parse_weights(j.at("init"), ctx + ".init");
  return t;
}

json tuner_to_json(const TunerConfig& t) {
  json lo = json::array(), hi = json::array();
  for (int i = 0; i < 8; ++i) {
    lo.push_back(t.space.lo[i]);
    hi.push_back(t.space.hi[i]);
  }
  return json{{"n_iterations", t.settings.n_iterations},
              {"batch_size", t.batch_size},
              {"profile", profile_to_json(t.profile)},
              {"sampler", sampler_to_json(t.sampler)},
              {"space_lo", lo},
              {"space_hi", hi},
              {"init", weights_to_json(t.init)}};
}

}  // namespace

std::vector<Disturbance> random_state_jumps(const RandomJumpSpec& spec, double period,
                                            std::uint64_t seed) {
  std::vector<Disturbance> jumps;
  if (!spec.enabled) return jumps;
  Rng rng(Rng::substream(seed, 0x4a756d70ULL));
  for (double t = spec.t_start; t < spec.t_end - 1e-9; t += period) {
    Disturbance d;
    d.kind = Disturbance::Kind::StateJump;
    d.time = t;
    d.delta_c = Vec2(rng.uniform(0.0, 0.5), rng.uniform(0.0, 0.5)) * spec.scale;
    d.delta_cdot = Vec2(rng.uniform(0.0, 0.1), rng.uniform(0.0, 0.1));
    jumps.push_back(d);
  }
  return jumps;
}

RunConfig config_from_json(const nlohmann::json& j) {
  const std::string ctx = "$";
  check_keys(j, ctx,
             {"scenario", "out_dir", "seed", "gait", "episode", "random_jumps",
              "viability_t_step", "pushgrid", "tuner"});
  RunConfig c;
  if (j.contains("scenario")) c.scenario = j.at("scenario").get<std::string>();
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    const bool ok = s.is_number_unsigned() ||
                    (s.is_number_integer() && s.get<long long>() >= 0);
    if (!ok) fail(ctx + ".seed", "expected an unsigned integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("gait")) c.gait = parse_gait(j.at("gait"), ctx + ".gait");
  if (j.contains("episode")) c.episode = parse_episode(j.at("episode"), ctx + ".episode");
  if (j.contains("random_jumps"))
    c.random_jumps = parse_random_jumps(j.at("random_jumps"), ctx + ".random_jumps");
  c.viability_t_step = opt_num(j, "viability_t_step", c.viability_t_step, ctx);
  if (j.contains("pushgrid")) c.pushgrid = parse_pushgrid(j.at("pushgrid"), ctx + ".pushgrid");
  if (j.contains("tuner")) c.tuner = parse_tuner(j.at("tuner"), ctx + ".tuner");
  c.episode.seed = c.seed;
  c.tuner.settings.seed = c.seed;
  return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j{{"scenario", c.scenario},
                   {"out_dir", c.out_dir},
                   {"seed", c.seed},
                   {"gait", gait_to_json(c.gait)},
                   {"episode", episode_to_json(c.episode)},
                   {"viability_t_step", c.viability_t_step},
                   {"pushgrid", pushgrid_to_json(c.pushgrid)},
                   {"tuner", tuner_to_json(c.tuner)}};
  if (c.random_jumps.enabled) {
    j["random_jumps"] = nlohmann::json{{"t_start", c.random_jumps.t_start},
                                       {"t_end", c.random_jumps.t_end},
                                       {"scale", c.random_jumps.scale}};
  }
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace wpg
