#include "wpg/bayesopt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wpg/csv.hpp"
#include "wpg/optim.hpp"
#include "wpg/parallel.hpp"

namespace wpg {

namespace {

constexpr double kWarpFloor = 1e-3;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }
double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// Acquisition value and gradient at x from the posterior pieces. Higher is
// better for all three; the portfolio index selects which one.
double acquisition_eval(const GpModel& model, const AcquisitionParams& params,
                        double f_best, int which, const Vec& x, Vec* grad) {
  double mean, var;
  Vec dmean, dvar;
  model.posterior_with_gradients(x, mean, dmean, var, dvar);
  const double sigma = std::sqrt(std::max(var, 0.0));
  const int d = static_cast<int>(x.size());

  if (sigma < 1e-12) {
    if (grad) *grad = which == 0 ? Vec(-dmean) : Vec::Zero(d);
    return which == 0 ? -mean : 0.0;
  }
  const Vec dsigma = dvar / (2.0 * sigma);

  switch (which) {
    case 0: {  // negated lower confidence bound
      if (grad) *grad = params.kappa * dsigma - dmean;
      return params.kappa * sigma - mean;
    }
    case 1: {  // expected improvement (minimization form)
      const double z = (f_best - mean) / sigma;
      if (grad) *grad = -norm_cdf(z) * dmean + norm_pdf(z) * dsigma;
      return (f_best - mean) * norm_cdf(z) + sigma * norm_pdf(z);
    }
    default: {  // probability of improvement with margin xi
      const double z = (f_best - params.xi - mean) / sigma;
      if (grad) *grad = norm_pdf(z) * (-dmean - z * dsigma) / sigma;
      return norm_cdf(z);
    }
  }
}

Vec maximize_acquisition(const GpModel& model, const AcquisitionParams& params,
                         double f_best, int which) {
  const int d = model.dim();
  auto value = [&](const Vec& x) {
    return acquisition_eval(model, params, f_best, which, x, nullptr);
  };

  // Halton multistart (skipping a short burn-in), keep the best few seeds.
  struct Seed {
    double val;
    Vec x;
  };
  std::vector<Seed> top;
  for (int i = 0; i < params.n_seeds; ++i) {
    Vec x = halton_point(i + 20, d);
    top.push_back({value(x), std::move(x)});
  }
  std::sort(top.begin(), top.end(), [](const Seed& a, const Seed& b) { return a.val > b.val; });
  top.resize(std::min<size_t>(4, top.size()));

  auto fg = [&](const Vec& x, Vec& g) {
    return acquisition_eval(model, params, f_best, which, x, &g);
  };
  Vec best = top[0].x;
  double best_val = top[0].val;
  for (const auto& seed : top) {
    const Vec polished = ascend_box(fg, seed.x, params.polish_iters);
    const double val = value(polished);
    if (val > best_val) {
      best_val = val;
      best = polished;
    }
  }
  return best;
}

}  // namespace

void SearchSpace::validate() const {
  for (int k = 0; k < 8; ++k) {
    if (!(lo[k] < hi[k]))
      throw std::invalid_argument("SearchSpace: lo must be below hi in every dimension");
    if (lo[k] < 0.0) throw std::invalid_argument("SearchSpace: weights cannot be negative");
  }
}

Vec SearchSpace::to_unit(const Vec8& w) const {
  Vec z(8);
  for (int k = 0; k < 8; ++k) {
    const double floor_k = std::max(lo[k], kWarpFloor);
    const double clamped = std::clamp(w[k], floor_k, hi[k]);
    z[k] = (std::log(clamped) - std::log(floor_k)) / (std::log(hi[k]) - std::log(floor_k));
  }
  return z;
}

Vec8 SearchSpace::from_unit(const Vec& z) const {
  Vec8 w;
  for (int k = 0; k < 8; ++k) {
    const double floor_k = std::max(lo[k], kWarpFloor);
    const double zk = std::clamp(z[k], 0.0, 1.0);
    w[k] = std::exp(std::log(floor_k) + zk * (std::log(hi[k]) - std::log(floor_k)));
  }
  return w;
}

Eigen::Vector3d HedgePortfolio::probabilities() const {
  const Eigen::Vector3d scaled = eta * (gains.array() - gains.maxCoeff()).matrix();
  Eigen::Vector3d p = scaled.array().exp();
  return p / p.sum();
}

AcquireResult acquire_next(const GpModel& model, HedgePortfolio& portfolio,
                           const AcquisitionParams& params, Rng& rng) {
  // Credit the previous round's recommendations under the refitted model
  // before selecting anew (the delayed hedge reward).
  if (portfolio.prev_candidates.rows() == 3) {
    for (int i = 0; i < 3; ++i) {
      const Vec x = portfolio.prev_candidates.row(i).transpose();
      const double mean_std =
          (model.posterior_mean(x) - model.y_mean) / model.y_scale;
      portfolio.gains[i] += -mean_std;
    }
  }

  const double f_best = model.y.minCoeff();
  AcquireResult res;
  res.candidates.resize(3, model.dim());
  for (int i = 0; i < 3; ++i)
    res.candidates.row(i) = maximize_acquisition(model, params, f_best, i).transpose();

  const Eigen::Vector3d p = portfolio.probabilities();
  const double roll = rng.uniform();
  res.chosen = roll < p[0] ? 0 : (roll < p[0] + p[1] ? 1 : 2);
  res.point = res.candidates.row(res.chosen).transpose();
  portfolio.prev_candidates = res.candidates;
  return res;
}

namespace {

BoHistory bo_loop(const SearchSpace& space,
                  const std::function<BoQuery(const CostWeights&)>& evaluate,
                  const CostWeights& init, const TuneSettings& settings) {
  space.validate();
  if (settings.n_iterations < 1)
    throw std::invalid_argument("tune: n_iterations must be >= 1");

  BoHistory history;
  Rng rng(settings.seed);
  Mat Z(0, 8);
  Vec costs(0);

  auto record = [&](const Vec& z, BoQuery q) {
    Z.conservativeResize(Z.rows() + 1, 8);
    Z.row(Z.rows() - 1) = z.transpose();
    costs.conservativeResize(costs.size() + 1);
    costs[costs.size() - 1] = q.cost;
    const double best =
        history.best_so_far.empty() ? q.cost : std::min(history.best_so_far.back(), q.cost);
    history.best_so_far.push_back(best);
    history.queries.push_back(std::move(q));
  };

  // Query 1: the caller's initialization point.
  {
    const Vec z = space.to_unit(init.flat());
    record(z, evaluate(CostWeights::from_flat(space.from_unit(z))));
  }

  // Space-filling queries keep the first GP fit honest.
  for (int i = 0; i < settings.n_quasi_random &&
                  static_cast<int>(history.queries.size()) < settings.n_iterations;
       ++i) {
    const Vec z = halton_point(i + 5, 8);
    record(z, evaluate(CostWeights::from_flat(space.from_unit(z))));
  }

  HedgePortfolio portfolio;
  portfolio.eta = 1.0;
  while (static_cast<int>(history.queries.size()) < settings.n_iterations) {
    const GpModel model = gp_fit(Z, costs);
    AcquireResult acq = acquire_next(model, portfolio, settings.acq, rng);
    BoQuery q = evaluate(CostWeights::from_flat(space.from_unit(acq.point)));
    q.acquisition = acq.chosen;
    record(acq.point, std::move(q));
  }
  return history;
}

}  // namespace

BoHistory tune_with_objective(const SearchSpace& space,
                              const std::function<double(const CostWeights&)>& objective,
                              const CostWeights& init, const TuneSettings& settings) {
  auto evaluate = [&](const CostWeights& w) {
    BoQuery q;
    q.weights = w;
    q.cost = objective(w);
    return q;
  };
  return bo_loop(space, evaluate, init, settings);
}

std::vector<std::vector<Disturbance>> presample_batches(const TunerProblem& problem,
                                                        std::uint64_t seed) {
  std::vector<std::vector<Disturbance>> batches(problem.batch_size);
  for (int i = 0; i < problem.batch_size; ++i) {
    Rng rng(Rng::substream(seed, static_cast<std::uint64_t>(i)));
    batches[i] = {problem.sampler.sample(rng)};
  }
  return batches;
}

double episode_batch_cost(const CostWeights& weights,
                          const std::vector<std::vector<Disturbance>>& batches,
                          const TunerProblem& problem, const FallPenalty& penalty,
                          std::vector<double>* per_episode, int* falls, int jobs) {
  const int n = static_cast<int>(batches.size());
  if (n == 0) throw std::invalid_argument("episode_batch_cost: empty batch");

  std::vector<double> costs(n);
  std::vector<char> fell(n, 0);
  parallel_for(n, jobs, [&](int i) {
    EpisodeConfig ep = problem.episode;
    ep.weights = weights;
    ep.profile = problem.profile;
    ep.disturbances = batches[i];
    const EpisodeResult r = run_episode(ep, problem.gait);
    costs[i] = tracking_cost(r, problem.profile, penalty);
    fell[i] = r.fell ? 1 : 0;
  });

  double mean = 0.0;
  int n_falls = 0;
  for (int i = 0; i < n; ++i) {
    mean += costs[i];
    n_falls += fell[i];
  }
  mean /= n;
  if (per_episode) *per_episode = costs;
  if (falls) *falls = n_falls;
  return mean;
}

BoHistory tune(const TunerProblem& problem, const SearchSpace& space,
               const TuneSettings& settings, const CostWeights& init) {
  const auto batches = presample_batches(problem, settings.seed);

  // Calibrate the fall penalty on the initial query: C_base is 10x the worst
  // surviving episode's cost (1 when every episode falls), C_fail = 9x that,
  // so any fall outranks any survival.
  FallPenalty penalty;
  {
    const int n = static_cast<int>(batches.size());
    std::vector<double> raw(n);
    std::vector<char> fell(n, 0);
    parallel_for(n, settings.jobs, [&](int i) {
      EpisodeConfig ep = problem.episode;
      ep.weights = init;
      ep.profile = problem.profile;
      ep.disturbances = batches[i];
      const EpisodeResult r = run_episode(ep, problem.gait);
      raw[i] = r.fell ? -1.0 : tracking_cost(r, problem.profile, FallPenalty{});
      fell[i] = r.fell ? 1 : 0;
    });
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      if (!fell[i]) worst = std::max(worst, raw[i]);
    penalty.c_base = worst > 0.0 ? 10.0 * worst : 1.0;
    penalty.c_fail = 9.0 * penalty.c_base;
  }

  auto evaluate = [&](const CostWeights& w) {
    BoQuery q;
    q.weights = w;
    q.cost = episode_batch_cost(w, batches, problem, penalty, &q.episode_costs,
                                &q.falls, settings.jobs);
    return q;
  };
  BoHistory history = bo_loop(space, evaluate, init, settings);
  history.penalty = penalty;
  return history;
}

void write_history_csv(const std::string& path, const BoHistory& history) {
  Csv csv(path);
  csv.row({"iter", "cost", "best_so_far", "alpha_x", "alpha_y", "beta_x", "beta_y",
           "delta_x", "delta_y", "eta_x", "eta_y", "falls"});
  for (size_t i = 0; i < history.queries.size(); ++i) {
    const BoQuery& q = history.queries[i];
    const Vec8 w = q.weights.flat();
    csv.row({format_num(static_cast<int>(i) + 1), format_num(q.cost),
             format_num(history.best_so_far[i]), format_num(w[0]), format_num(w[1]),
             format_num(w[2]), format_num(w[3]), format_num(w[4]), format_num(w[5]),
             format_num(w[6]), format_num(w[7]), format_num(q.falls)});
  }
}

}  // namespace wpg
