// Small derivative-free and first-order search routines used by the GP
// hyperparameter fit and the acquisition maximizers. Nothing here is aware
// of the model; everything operates on plain objective callbacks and is
// fully deterministic.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "wpg/types.hpp"

namespace wpg {

// Classic Nelder-Mead simplex minimization (reflection 1, expansion 2,
// contraction 0.5, shrink 0.5). Returns the best vertex found.
inline Vec nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                       double step, int max_iters) {
  const int d = static_cast<int>(x0.size());
  std::vector<Vec> xs(d + 1, x0);
  std::vector<double> fs(d + 1);
  for (int i = 0; i < d; ++i) xs[i + 1][i] += step;
  for (int i = 0; i <= d; ++i) fs[i] = f(xs[i]);

  std::vector<int> order(d + 1);
  for (int it = 0; it < max_iters; ++it) {
    for (int i = 0; i <= d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    const int best = order[0], worst = order[d], second = order[d - 1];
    if (fs[worst] - fs[best] < 1e-12 * (1.0 + std::abs(fs[best]))) break;

    Vec centroid = Vec::Zero(d);
    for (int i = 0; i <= d; ++i)
      if (i != worst) centroid += xs[i];
    centroid /= d;

    const Vec xr = centroid + (centroid - xs[worst]);
    const double fr = f(xr);
    if (fr < fs[order[0]]) {
      const Vec xe = centroid + 2.0 * (centroid - xs[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
    } else if (fr < fs[second]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      const Vec xc = centroid + 0.5 * (xs[worst] - centroid);
      const double fc = f(xc);
      if (fc < fs[worst]) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {
        for (int i = 0; i <= d; ++i) {
          if (i == best) continue;
          xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
          fs[i] = f(xs[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= d; ++i)
    if (fs[i] < fs[best]) best = i;
  return xs[best];
}

// Radical-inverse Halton sequence; the first few points are skipped by the
// caller when a burn-in is wanted.
inline double halton(int index, int base) {
  double result = 0.0, f = 1.0;
  int i = index;
  while (i > 0) {
    f /= base;
    result += f * (i % base);
    i /= base;
  }
  return result;
}

inline Vec halton_point(int index, int dim) {
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  Vec x(dim);
  for (int k = 0; k < dim; ++k) x[k] = halton(index, primes[k]);
  return x;
}

// Projected gradient ascent on the unit box with backtracking; `fg` returns
// the value and writes the gradient. Used to polish acquisition maximizers.
inline Vec ascend_box(const std::function<double(const Vec&, Vec&)>& fg, Vec x,
                      int max_iters) {
  const int d = static_cast<int>(x.size());
  Vec grad(d);
  double fx = fg(x, grad);
  double step = 0.1;
  for (int it = 0; it < max_iters; ++it) {
    Vec cand = (x + step * grad).cwiseMax(0.0).cwiseMin(1.0);
    Vec cand_grad(d);
    const double fc = fg(cand, cand_grad);
    if (fc > fx + 1e-14) {
      x = cand;
      fx = fc;
      grad = cand_grad;
      step *= 1.6;
    } else {
      step *= 0.5;
      if (step < 1e-7) break;
    }
  }
  return x;
}

}  // namespace wpg
