// Command-line driver: scenario configs in, CSV artifacts out.
#include <cstdio>
#include <filesystem>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "wpg/bayesopt.hpp"
#include "wpg/config_io.hpp"
#include "wpg/csv.hpp"
#include "wpg/sim.hpp"
#include "wpg/viability.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int jobs = std::max(1u, std::thread::hardware_concurrency());
};

wpg::RunConfig load_with_overrides(const GlobalArgs& args) {
  wpg::RunConfig config = wpg::load_config(args.config_path);
  if (!args.out_override.empty()) config.out_dir = args.out_override;
  if (args.seed_set) {
    config.seed = args.seed_override;
    config.episode.seed = args.seed_override;
    config.tuner.settings.seed = args.seed_override;
  }
  std::filesystem::create_directories(config.out_dir);
  return config;
}

int cmd_simulate(const GlobalArgs& args) {
  wpg::RunConfig config = load_with_overrides(args);
  auto jumps = wpg::random_state_jumps(config.random_jumps, config.episode.mpc_period,
                                       config.seed);
  config.episode.disturbances.insert(config.episode.disturbances.end(), jumps.begin(),
                                     jumps.end());
  const wpg::EpisodeResult result = wpg::run_episode(config.episode, config.gait);
  const std::string trace_path = config.out_dir + "/trace.csv";
  wpg::write_trace_csv(trace_path, result);
  std::printf("scenario=%s fell=%d t_fall=%s cost=%s projections=%d infeasible=%d trace=%s\n",
              config.scenario.c_str(), result.fell ? 1 : 0,
              wpg::format_num(result.t_fall).c_str(),
              wpg::format_num(result.tracking_cost).c_str(), result.n_projections,
              result.n_infeasible, trace_path.c_str());
  return 0;
}

int cmd_viability(const GlobalArgs& args) {
  wpg::RunConfig config = load_with_overrides(args);
  const double step = config.viability_t_step;

  auto emit = [&](wpg::Foot stance, const std::string& path) {
    wpg::GaitPhase phase;
    phase.stance_foot = stance;
    const double side = stance == wpg::Foot::Right ? -1.0 : 1.0;
    phase.stance_pos = wpg::Vec2(0.0, side * 0.5 * config.gait.L_p);
    phase.swing_pos = wpg::Vec2(0.0, -side * 0.5 * config.gait.L_p);
    phase.liftoff_pos = phase.swing_pos;
    phase.t_td = config.gait.T_ss;

    wpg::Csv csv(path);
    csv.row({"t", "bx_min", "bx_max", "by_min", "by_max"});
    for (double t = 0.0; t <= config.gait.T_ss + 1e-12; t += step) {
      phase.t_in_step = t;
      const wpg::ViabilityBounds b = wpg::viability_bounds(config.gait, phase);
      csv.row({wpg::format_num(t), wpg::format_num(b.x_min), wpg::format_num(b.x_max),
               wpg::format_num(b.y_min), wpg::format_num(b.y_max)});
    }
  };
  emit(wpg::Foot::Right, config.out_dir + "/viability_right.csv");
  emit(wpg::Foot::Left, config.out_dir + "/viability_left.csv");
  std::printf("scenario=%s wrote %s/viability_{right,left}.csv\n", config.scenario.c_str(),
              config.out_dir.c_str());
  return 0;
}

int cmd_pushgrid(const GlobalArgs& args) {
  wpg::RunConfig config = load_with_overrides(args);
  wpg::PushGridParams params = config.pushgrid;
  params.jobs = args.jobs;
  const auto grid = wpg::push_grid(params, config.gait);
  const std::string path = config.out_dir + "/pushgrid.csv";
  wpg::write_push_grid_csv(path, grid);
  std::printf("scenario=%s cells=%zu grid=%s\n", config.scenario.c_str(), grid.size(),
              path.c_str());
  return 0;
}

int cmd_tune(const GlobalArgs& args) {
  wpg::RunConfig config = load_with_overrides(args);
  wpg::TunerProblem problem;
  problem.gait = config.gait;
  problem.profile = config.tuner.profile;
  problem.episode = config.episode;
  problem.sampler = config.tuner.sampler;
  problem.batch_size = config.tuner.batch_size;

  wpg::TuneSettings settings = config.tuner.settings;
  settings.jobs = args.jobs;
  const wpg::BoHistory history =
      wpg::tune(problem, config.tuner.space, settings, config.tuner.init);
  const std::string path = config.out_dir + "/history.csv";
  wpg::write_history_csv(path, history);
  std::printf("scenario=%s iterations=%zu initial=%s best=%s history=%s\n",
              config.scenario.c_str(), history.queries.size(),
              wpg::format_num(history.queries.front().cost).c_str(),
              wpg::format_num(history.best_cost()).c_str(), path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viability-aware walking pattern generation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs args;
  app.add_option("--config", args.config_path, "scenario JSON file")->required();
  app.add_option("--out", args.out_override, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", args.seed_override, "seed override");
  app.add_option("--jobs", args.jobs, "worker threads for batch evaluation");

  auto* simulate = app.add_subcommand("simulate", "run one closed-loop episode");
  auto* viability = app.add_subcommand("viability", "emit DCM-offset bounds over a phase grid");
  auto* pushgrid = app.add_subcommand("pushgrid", "sweep push directions and phases");
  auto* tune = app.add_subcommand("tune", "Bayesian optimization of the cost weights");

  CLI11_PARSE(app, argc, argv);
  args.seed_set = seed_opt->count() > 0;

  try {
    if (simulate->parsed()) return cmd_simulate(args);
    if (viability->parsed()) return cmd_viability(args);
    if (pushgrid->parsed()) return cmd_pushgrid(args);
    if (tune->parsed()) return cmd_tune(args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
