#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wpg/gp.hpp"
#include "wpg/rng.hpp"
#include "wpg/sim.hpp"
#include "wpg/types.hpp"

namespace wpg {

using Vec8 = Eigen::Matrix<double, 8, 1>;

// Box of cost weights in the order (alpha_x, alpha_y, beta_x, beta_y,
// delta_x, delta_y, eta_x, eta_y). The search itself runs in a log-warped
// unit cube: three orders of magnitude in the box make linear coordinates
// useless.
struct SearchSpace {
  Vec8 lo = (Vec8() << 1, 1, 0, 0, 0, 0, 0, 0).finished();
  Vec8 hi = Vec8::Constant(1000.0);

  void validate() const;

  // Warped coordinate z in [0,1] per dimension; weights below the warp floor
  // of max(lo, 1e-3) clamp to 0.
  Vec to_unit(const Vec8& w) const;
  Vec8 from_unit(const Vec& z) const;
};

// gp-hedge over the three acquisitions (LCB, EI, PI). Gains accrue lazily:
// each acquire first credits the previous round's candidates with the
// refitted model's negated posterior mean, then selects.
struct HedgePortfolio {
  Eigen::Vector3d gains = Eigen::Vector3d::Zero();
  double eta = 1.0;
  Mat prev_candidates;  // 3 x d, rows from the previous acquire (empty at start)

  Eigen::Vector3d probabilities() const;
};

struct AcquisitionParams {
  double kappa = 1.96;  // LCB
  double xi = 0.01;     // PI
  int n_seeds = 256;    // quasi-random multistart seeds
  int polish_iters = 60;
};

struct AcquireResult {
  Vec point;       // unit-cube coordinates
  int chosen = 0;  // 0 LCB, 1 EI, 2 PI
  Mat candidates;  // 3 x d
};

// Maximizes each acquisition over the unit cube (Halton multistart plus
// gradient polish) and lets gp-hedge pick among the three candidates.
AcquireResult acquire_next(const GpModel& model, HedgePortfolio& portfolio,
                           const AcquisitionParams& params, Rng& rng);

struct BoQuery {
  CostWeights weights;
  double cost = 0.0;
  std::vector<double> episode_costs;
  int falls = 0;
  int acquisition = -1;  // -1 for initialization queries
};

struct BoHistory {
  std::vector<BoQuery> queries;
  std::vector<double> best_so_far;
  FallPenalty penalty;

  double best_cost() const { return best_so_far.empty() ? 0.0 : best_so_far.back(); }
};

struct TuneSettings {
  int n_iterations = 40;  // total queries, including initialization
  std::uint64_t seed = 0;
  int jobs = 1;
  AcquisitionParams acq;
  int n_quasi_random = 4;  // space-filling queries after the initial point
};

// Core loop against an arbitrary objective (used directly by the synthetic
// benchmark). The objective must be deterministic.
BoHistory tune_with_objective(const SearchSpace& space,
                              const std::function<double(const CostWeights&)>& objective,
                              const CostWeights& init, const TuneSettings& settings);

// Episode-driven tuning problem: one pre-sampled disturbance batch reused
// for every query so that re-evaluating a weight vector is noise-free.
struct TunerProblem {
  GaitConfig gait;
  ReferenceProfile profile;
  EpisodeConfig episode;  // template; weights/controller/disturbances overwritten
  PushSampler sampler;
  int batch_size = 50;
};

std::vector<std::vector<Disturbance>> presample_batches(const TunerProblem& problem,
                                                        std::uint64_t seed);

// Mean penalized cost over the batch; per-episode costs and the fall count
// are optional outputs.
double episode_batch_cost(const CostWeights& weights,
                          const std::vector<std::vector<Disturbance>>& batches,
                          const TunerProblem& problem, const FallPenalty& penalty,
                          std::vector<double>* per_episode, int* falls, int jobs);

// Full pipeline: evaluates the initial query, freezes the fall penalty from
// its worst surviving episode (10x rule, falling back to 1), then runs the
// BO loop over the batch objective.
BoHistory tune(const TunerProblem& problem, const SearchSpace& space,
               const TuneSettings& settings, const CostWeights& init);

void write_history_csv(const std::string& path, const BoHistory& history);

}  // namespace wpg
