#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wpg/bayesopt.hpp"
#include "wpg/gp.hpp"
#include "wpg/optim.hpp"
#include "wpg/rng.hpp"

using namespace wpg;

#define CHECK_NEAR(a, b, tol) CHECK(std::abs((a) - (b)) <= (tol))

TEST_CASE("halton: radical-inverse values in bases 2 and 3") {
  CHECK_NEAR(halton(1, 2), 0.5, 1e-15);
  CHECK_NEAR(halton(2, 2), 0.25, 1e-15);
  CHECK_NEAR(halton(3, 2), 0.75, 1e-15);
  CHECK_NEAR(halton(4, 2), 0.125, 1e-15);
  CHECK_NEAR(halton(1, 3), 1.0 / 3.0, 1e-15);
  CHECK_NEAR(halton(2, 3), 2.0 / 3.0, 1e-15);
  CHECK_NEAR(halton(3, 3), 1.0 / 9.0, 1e-15);
  const Vec p = halton_point(5, 3);
  CHECK_NEAR(p[0], halton(5, 2), 1e-15);
  CHECK_NEAR(p[1], halton(5, 3), 1e-15);
  CHECK_NEAR(p[2], halton(5, 5), 1e-15);
}

TEST_CASE("nelder_mead minimizes a shifted quadratic") {
  auto f = [](const Vec& x) {
    return (x[0] - 2.0) * (x[0] - 2.0) + (x[1] + 1.0) * (x[1] + 1.0);
  };
  Vec x0 = Vec::Zero(2);
  const Vec best = nelder_mead(f, x0, 0.5, 300);
  CHECK_NEAR(best[0], 2.0, 1e-5);
  CHECK_NEAR(best[1], -1.0, 1e-5);
}

TEST_CASE("ascend_box climbs to interior maxima and clamps at the walls") {
  auto fg = [](const Vec& x, Vec& grad) {
    grad = -2.0 * (x.array() - 0.3).matrix();
    return -(x.array() - 0.3).matrix().squaredNorm();
  };
  Vec x0 = Vec::Constant(3, 0.9);
  const Vec top = ascend_box(fg, x0, 200);
  CHECK((top.array() - 0.3).abs().maxCoeff() < 1e-5);

  auto edge = [](const Vec& x, Vec& grad) {
    grad = Vec::Ones(x.size());
    return x.sum();
  };
  const Vec corner = ascend_box(edge, Vec::Constant(2, 0.5), 200);
  CHECK_NEAR(corner[0], 1.0, 1e-12);
  CHECK_NEAR(corner[1], 1.0, 1e-12);
}

namespace {

GpModel fit_1d(const std::vector<double>& xs, const std::vector<double>& ys) {
  Mat X(static_cast<int>(xs.size()), 1);
  Vec y(static_cast<int>(ys.size()));
  for (size_t i = 0; i < xs.size(); ++i) {
    X(static_cast<int>(i), 0) = xs[i];
    y[static_cast<int>(i)] = ys[i];
  }
  return gp_fit(X, y);
}

}  // namespace

TEST_CASE("GP: near-interpolation of a smooth function at the training points") {
  std::vector<double> xs, ys;
  for (int i = 0; i <= 8; ++i) {
    const double x = i / 8.0;
    xs.push_back(x);
    ys.push_back(std::sin(3.0 * x) + 0.5 * x);
  }
  const GpModel model = fit_1d(xs, ys);
  CHECK_FALSE(model.degenerate);
  for (size_t i = 0; i < xs.size(); ++i) {
    CHECK_NEAR(model.posterior_mean(Vec::Constant(1, xs[i])), ys[i], 1e-3);
    CHECK(model.posterior_var(Vec::Constant(1, xs[i])) >= 0.0);
  }
  // Interpolation between knots stays sane (no wild oscillation).
  CHECK_NEAR(model.posterior_mean(Vec::Constant(1, 0.4375)),
             std::sin(3.0 * 0.4375) + 0.5 * 0.4375, 5e-2);
}

TEST_CASE("GP: duplicated inputs do not break the factorization") {
  const GpModel model = fit_1d({0.1, 0.1, 0.5, 0.9}, {1.0, 1.0, 2.0, 0.5});
  CHECK(std::isfinite(model.posterior_mean(Vec::Constant(1, 0.3))));
  CHECK(std::isfinite(model.posterior_var(Vec::Constant(1, 0.3))));
  CHECK_NEAR(model.posterior_mean(Vec::Constant(1, 0.1)), 1.0, 5e-2);
}

TEST_CASE("GP: predictive variance recovers toward the prior far from data") {
  std::vector<double> xs, ys;
  for (int i = 0; i < 6; ++i) {
    xs.push_back(0.30 + 0.02 * i);
    ys.push_back(std::cos(8.0 * xs.back()));
  }
  const GpModel model = fit_1d(xs, ys);
  const double prior_var = std::exp(model.log_sf2) * model.y_scale * model.y_scale;
  const double near = model.posterior_var(Vec::Constant(1, 0.32));
  const double far = model.posterior_var(Vec::Constant(1, 12.0));
  CHECK(near < 0.5 * prior_var);
  CHECK(far > 0.5 * prior_var);
  CHECK(far <= prior_var * (1.0 + 1e-6));
}

TEST_CASE("GP: analytic posterior gradients match finite differences") {
  Rng rng(77);
  const int n = 12, d = 3;
  Mat X(n, d);
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) X(i, j) = rng.uniform();
    y[i] = std::sin(2.0 * X(i, 0)) + X(i, 1) * X(i, 1) - 0.3 * X(i, 2);
  }
  const GpModel model = gp_fit(X, y);

  Vec x(d);
  x << 0.31, 0.62, 0.45;
  double mean, var;
  Vec dmean(d), dvar(d);
  model.posterior_with_gradients(x, mean, dmean, var, dvar);
  CHECK_NEAR(mean, model.posterior_mean(x), 1e-12);
  CHECK_NEAR(var, model.posterior_var(x), 1e-12);

  const double h = 1e-6;
  for (int j = 0; j < d; ++j) {
    Vec hi = x, lo = x;
    hi[j] += h;
    lo[j] -= h;
    const double dm = (model.posterior_mean(hi) - model.posterior_mean(lo)) / (2.0 * h);
    const double dv = (model.posterior_var(hi) - model.posterior_var(lo)) / (2.0 * h);
    CHECK_NEAR(dmean[j], dm, 1e-4 * std::max(1.0, std::abs(dm)));
    CHECK_NEAR(dvar[j], dv, 1e-4 * std::max(1.0, std::abs(dv)));
  }
}

TEST_CASE("GP: constant targets degrade to the flagged prior-only model") {
  const GpModel model = fit_1d({0.1, 0.4, 0.8}, {2.5, 2.5, 2.5});
  CHECK(model.degenerate);
  CHECK_NEAR(model.posterior_mean(Vec::Constant(1, 0.6)), 2.5, 1e-12);
  CHECK_NEAR(model.posterior_var(Vec::Constant(1, 0.6)), 1.0, 1e-12);
}

TEST_CASE("GP: too little data is rejected") {
  Mat X(1, 1);
  X << 0.5;
  Vec y(1);
  y << 1.0;
  CHECK_THROWS_AS(gp_fit(X, y), std::invalid_argument);
}

TEST_CASE("search space: log-warp round trip and floor behavior") {
  SearchSpace space;
  Vec8 w;
  w << 1.0, 7.0, 0.5, 120.0, 1000.0, 0.001, 33.3, 0.02;
  const Vec8 back = space.from_unit(space.to_unit(w));
  for (int k = 0; k < 8; ++k) CHECK_NEAR(back[k], w[k], 1e-12 * w[k]);

  // Weights at or below the floor warp to z = 0 and come back as the floor.
  Vec8 zero = Vec8::Zero();
  zero[0] = 1.0;  // alpha dims have lo = 1
  zero[1] = 1.0;
  const Vec z = space.to_unit(zero);
  for (int k = 0; k < 8; ++k) CHECK(z[k] == 0.0);
  const Vec8 floor_back = space.from_unit(z);
  CHECK_NEAR(floor_back[0], 1.0, 1e-15);
  CHECK_NEAR(floor_back[2], 1e-3, 1e-18);

  SearchSpace bad;
  bad.hi[3] = bad.lo[3] - 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("hedge portfolio: softmax probabilities and dominance") {
  HedgePortfolio hedge;
  const Eigen::Vector3d uniform = hedge.probabilities();
  CHECK_NEAR(uniform.sum(), 1.0, 1e-12);
  CHECK_NEAR(uniform[0], 1.0 / 3.0, 1e-12);

  hedge.gains << 5.0, 0.0, 0.0;
  const Eigen::Vector3d skewed = hedge.probabilities();
  CHECK_NEAR(skewed.sum(), 1.0, 1e-12);
  CHECK(skewed[0] > 0.95);
  CHECK(skewed[1] > 0.0);
}

TEST_CASE("acquire_next: deterministic unit-cube proposals with three candidates") {
  Rng data_rng(5);
  const int n = 10;
  Mat X(n, 8);
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 8; ++j) X(i, j) = data_rng.uniform();
    y[i] = (X.row(i).transpose() - Vec::Constant(8, 0.5)).squaredNorm();
  }
  const GpModel model = gp_fit(X, y);

  HedgePortfolio h1, h2;
  AcquisitionParams params;
  params.n_seeds = 64;  // keep the test fast
  Rng r1(123), r2(123);
  const AcquireResult a = acquire_next(model, h1, params, r1);
  const AcquireResult b = acquire_next(model, h2, params, r2);
  CHECK(a.chosen == b.chosen);
  CHECK((a.point - b.point).lpNorm<Eigen::Infinity>() == 0.0);
  REQUIRE(a.candidates.rows() == 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 8; ++j) {
      CHECK(a.candidates(i, j) >= 0.0);
      CHECK(a.candidates(i, j) <= 1.0);
    }
}

TEST_CASE("tune_with_objective: deterministic, monotone incumbent, exact bookkeeping") {
  SearchSpace space;
  auto objective = [&](const CostWeights& w) {
    const Vec z = space.to_unit(w.flat());
    return 1.0 + (z.array() - 0.5).matrix().squaredNorm();
  };
  CostWeights init;
  init.beta = Vec2(1000.0, 1000.0);

  TuneSettings settings;
  settings.n_iterations = 12;
  settings.seed = 7;
  settings.acq.n_seeds = 64;
  settings.acq.polish_iters = 20;

  const BoHistory a = tune_with_objective(space, objective, init, settings);
  const BoHistory b = tune_with_objective(space, objective, init, settings);
  REQUIRE(a.queries.size() == 12);
  REQUIRE(a.best_so_far.size() == 12);
  CHECK(a.queries[0].acquisition == -1);

  for (size_t i = 0; i < a.queries.size(); ++i) {
    CHECK(a.queries[i].cost == b.queries[i].cost);
    CHECK(a.queries[i].weights.flat() == b.queries[i].weights.flat());
  }
  for (size_t i = 1; i < a.best_so_far.size(); ++i) {
    CHECK(a.best_so_far[i] <= a.best_so_far[i - 1] + 1e-15);
  }
  CHECK(a.best_so_far.back() < a.queries[0].cost);
  // The incumbent matches the recorded costs.
  double best = a.queries[0].cost;
  for (size_t i = 0; i < a.queries.size(); ++i) {
    best = std::min(best, a.queries[i].cost);
    CHECK(a.best_so_far[i] == best);
  }
}

TEST_CASE("tune_with_objective: a single iteration is just the initial query") {
  SearchSpace space;
  auto objective = [](const CostWeights& w) { return w.flat().sum(); };
  TuneSettings settings;
  settings.n_iterations = 1;
  const BoHistory h = tune_with_objective(space, objective, CostWeights{}, settings);
  REQUIRE(h.queries.size() == 1);
  CHECK(h.queries[0].acquisition == -1);
  CHECK(h.best_so_far[0] == h.queries[0].cost);
}

TEST_CASE("history CSV: exact header and one line per query") {
  SearchSpace space;
  auto objective = [](const CostWeights& w) { return w.flat().sum(); };
  TuneSettings settings;
  settings.n_iterations = 3;
  settings.acq.n_seeds = 32;
  settings.acq.polish_iters = 10;
  const BoHistory h = tune_with_objective(space, objective, CostWeights{}, settings);
  write_history_csv("history_t.csv", h);

  std::ifstream in("history_t.csv", std::ios::binary);
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "iter,cost,best_so_far,alpha_x,alpha_y,beta_x,beta_y,delta_x,delta_y,eta_x,"
        "eta_y,falls");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 3);
  in.close();
  std::remove("history_t.csv");
}

TEST_CASE("presampled disturbance batches: deterministic, one push per episode") {
  TunerProblem problem;
  problem.batch_size = 6;
  const auto a = presample_batches(problem, 42);
  const auto b = presample_batches(problem, 42);
  REQUIRE(a.size() == 6);
  for (size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].size() == 1);
    CHECK(a[i][0].kind == Disturbance::Kind::Push);
    CHECK(a[i][0].force == b[i][0].force);
    CHECK(a[i][0].time == b[i][0].time);
  }
  // Different seeds give different draws.
  const auto c = presample_batches(problem, 43);
  CHECK(c[0][0].force != a[0][0].force);
}

TEST_CASE("episode batch cost: mean of per-episode penalized costs") {
  TunerProblem problem;
  problem.batch_size = 3;
  problem.profile.knots = {{0.0, Vec2(0.0, 0.0)}};
  problem.profile.episode_length = 2.0;
  problem.episode.profile = problem.profile;
  problem.sampler.t_min = 0.5;
  problem.sampler.t_max = 1.5;
  problem.sampler.scale = 0.3;  // keep the pushes survivable

  const auto batches = presample_batches(problem, 9);
  CostWeights w;
  w.beta = Vec2(10.0, 10.0);

  FallPenalty penalty;
  std::vector<double> per_episode;
  int falls = -1;
  const double mean = episode_batch_cost(w, batches, problem, penalty, &per_episode,
                                         &falls, 1);
  REQUIRE(per_episode.size() == 3);
  CHECK(falls >= 0);
  double acc = 0.0;
  for (double c : per_episode) acc += c;
  CHECK_NEAR(mean, acc / 3.0, 1e-12);

  // Recompute one episode by hand with the same template and disturbances.
  EpisodeConfig episode = problem.episode;
  episode.weights = w;
  episode.profile = problem.profile;
  episode.disturbances = batches[1];
  const EpisodeResult manual = run_episode(episode, problem.gait);
  CHECK_NEAR(per_episode[1], tracking_cost(manual, problem.profile, penalty), 1e-12);
}
