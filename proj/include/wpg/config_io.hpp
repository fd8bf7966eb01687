#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "wpg/bayesopt.hpp"
#include "wpg/sim.hpp"
#include "wpg/types.hpp"

namespace wpg {

// Generator for the random state-jump scenario: at every MPC boundary in
// [t_start, t_end), position jumps drawn from (0, 0.5) * scale and velocity
// jumps from (0, 0.1) on both axes.
struct RandomJumpSpec {
  bool enabled = false;
  double t_start = 5.0;
  double t_end = 6.0;
  double scale = 0.02;
};

std::vector<Disturbance> random_state_jumps(const RandomJumpSpec& spec, double period,
                                            std::uint64_t seed);

struct TunerConfig {
  TuneSettings settings;
  int batch_size = 50;
  ReferenceProfile profile;
  PushSampler sampler;
  SearchSpace space;
  CostWeights init;  // defaults to the standard initialization below

  TunerConfig() {
    init.alpha = {1.0, 1.0};
    init.beta = {1000.0, 1000.0};
    init.delta = {1000.0, 1000.0};
    init.eta = {1000.0, 1000.0};
  }
};

// Everything a CLI run needs: which scenario, where to write, and the
// per-subcommand parameter blocks. Parsing is strict; unknown keys are
// rejected with a path diagnostic.
struct RunConfig {
  std::string scenario = "unnamed";
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  GaitConfig gait;
  EpisodeConfig episode;
  RandomJumpSpec random_jumps;
  double viability_t_step = 0.01;
  PushGridParams pushgrid;
  TunerConfig tuner;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);

// Reads and strictly parses a JSON config file; error messages name the file
// and the offending key or value.
RunConfig load_config(const std::string& path);

}  // namespace wpg
