#include "wpg/gp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wpg/optim.hpp"
#include "wpg/rng.hpp"

namespace wpg {

namespace {

constexpr double kJitter = 1e-10;
constexpr double kSqrt5 = 2.2360679774997896;

// Hyperparameter box in log space: (signal variance, noise variance, then
// one length scale per input dimension).
struct HyperBounds {
  double sf2_lo = std::log(1e-4), sf2_hi = std::log(1e2);
  double sn2_lo = std::log(1e-12), sn2_hi = std::log(1.0);
  double len_lo = std::log(1e-2), len_hi = std::log(1e2);
};

double matern52(double u) { return (1.0 + u + u * u / 3.0) * std::exp(-u); }

// Scaled distance u = sqrt(5) * ||(a-b)/len||.
double scaled_u(const Vec& a, const Vec& b, const Vec& inv_len) {
  double r2 = 0.0;
  for (int k = 0; k < a.size(); ++k) {
    const double d = (a[k] - b[k]) * inv_len[k];
    r2 += d * d;
  }
  return kSqrt5 * std::sqrt(r2);
}

Mat gram(const Mat& X, double sf2, double sn2, const Vec& inv_len) {
  const int n = static_cast<int>(X.rows());
  Mat K(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = sf2 + sn2 + kJitter;
    for (int j = 0; j < i; ++j) {
      const double k = sf2 * matern52(scaled_u(X.row(i).transpose(),
                                               X.row(j).transpose(), inv_len));
      K(i, j) = k;
      K(j, i) = k;
    }
  }
  return K;
}

// Negative log marginal likelihood of standardized targets for packed
// log-parameters theta = (log sf2, log sn2, log len...). Out-of-box values
// are clamped with a quadratic penalty so the simplex stays honest.
double neg_lml(const Vec& theta, const Mat& X, const Vec& y, const HyperBounds& hb) {
  const int d = static_cast<int>(X.cols());
  Vec clamped = theta;
  clamped[0] = std::clamp(theta[0], hb.sf2_lo, hb.sf2_hi);
  clamped[1] = std::clamp(theta[1], hb.sn2_lo, hb.sn2_hi);
  for (int k = 0; k < d; ++k)
    clamped[2 + k] = std::clamp(theta[2 + k], hb.len_lo, hb.len_hi);
  const double penalty = 1e2 * (theta - clamped).squaredNorm();

  const double sf2 = std::exp(clamped[0]);
  const double sn2 = std::exp(clamped[1]);
  const Vec inv_len = (-clamped.segment(2, d)).array().exp();

  const Mat K = gram(X, sf2, sn2, inv_len);
  Eigen::LLT<Mat> llt(K);
  if (llt.info() != Eigen::Success) return 1e12 + penalty;

  const Vec a = llt.solve(y);
  double log_det = 0.0;
  for (int i = 0; i < K.rows(); ++i) log_det += std::log(llt.matrixL()(i, i));
  const double n = static_cast<double>(K.rows());
  const double lml =
      -0.5 * y.dot(a) - log_det - 0.5 * n * std::log(2.0 * 3.14159265358979323846);
  return -lml + penalty;
}

}  // namespace

double GpModel::posterior_mean(const Vec& x) const {
  if (degenerate) return y_mean;
  const Vec inv_len = (-log_len).array().exp();
  const double sf2 = std::exp(log_sf2);
  double m = 0.0;
  for (int i = 0; i < size(); ++i)
    m += alpha[i] * sf2 * matern52(scaled_u(x, X.row(i).transpose(), inv_len));
  return y_mean + y_scale * m;
}

double GpModel::posterior_var(const Vec& x) const {
  if (degenerate) return 1.0;
  const Vec inv_len = (-log_len).array().exp();
  const double sf2 = std::exp(log_sf2);
  Vec k(size());
  for (int i = 0; i < size(); ++i)
    k[i] = sf2 * matern52(scaled_u(x, X.row(i).transpose(), inv_len));
  const Vec v = chol.triangularView<Eigen::Lower>().solve(k);
  const double var = sf2 - v.squaredNorm();
  return y_scale * y_scale * std::max(0.0, var);
}

void GpModel::posterior_with_gradients(const Vec& x, double& mean, Vec& dmean,
                                       double& var, Vec& dvar) const {
  const int d = dim();
  if (degenerate) {
    mean = y_mean;
    var = 1.0;
    dmean = Vec::Zero(d);
    dvar = Vec::Zero(d);
    return;
  }
  const Vec inv_len = (-log_len).array().exp();
  const Vec inv_len2 = inv_len.array().square();
  const double sf2 = std::exp(log_sf2);

  const int n = size();
  Vec k(n);
  Mat dk(n, d);  // dk(i, :) = gradient of k(x, X_i) with respect to x
  for (int i = 0; i < n; ++i) {
    const Vec diff = x - X.row(i).transpose();
    const double u = scaled_u(x, X.row(i).transpose(), inv_len);
    k[i] = sf2 * matern52(u);
    // d/du of the Matern-5/2 profile is -(u/3)(1+u)e^{-u}; combined with
    // du/dx it collapses to a smooth factor with no division by the radius.
    const double factor = -sf2 * (5.0 / 3.0) * (1.0 + u) * std::exp(-u);
    dk.row(i) = factor * diff.cwiseProduct(inv_len2).transpose();
  }

  mean = y_mean + y_scale * k.dot(alpha);
  dmean = y_scale * dk.transpose() * alpha;

  const Vec kinv_k =
      chol.triangularView<Eigen::Lower>().transpose().solve(
          chol.triangularView<Eigen::Lower>().solve(k));
  const double raw = sf2 - k.dot(kinv_k);
  var = y_scale * y_scale * std::max(0.0, raw);
  dvar = raw <= 0.0 ? Vec::Zero(d)
                    : Vec(-2.0 * y_scale * y_scale * dk.transpose() * kinv_k);
}

double GpModel::log_marginal_likelihood() const {
  if (degenerate) return 0.0;
  Vec theta(2 + dim());
  theta[0] = log_sf2;
  theta[1] = log_sn2;
  theta.segment(2, dim()) = log_len;
  const Vec ys = (y.array() - y_mean) / y_scale;
  return -neg_lml(theta, X, ys, HyperBounds{});
}

GpModel gp_fit(const Mat& X, const Vec& y) {
  if (X.rows() < 2) throw std::invalid_argument("gp_fit: need at least two observations");
  if (X.rows() != y.size()) throw std::invalid_argument("gp_fit: X/y size mismatch");
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());

  GpModel model;
  model.X = X;
  model.y = y;
  model.y_mean = y.mean();
  const double var = (y.array() - model.y_mean).square().sum() / n;
  if (var < 1e-24) {
    model.degenerate = true;
    model.y_scale = 1.0;
    model.log_len = Vec::Zero(d);
    return model;
  }
  model.y_scale = std::sqrt(var);
  const Vec ys = (y.array() - model.y_mean) / model.y_scale;

  const HyperBounds hb;
  auto objective = [&](const Vec& theta) { return neg_lml(theta, X, ys, hb); };

  // Multi-start: one canonical start plus quasi-random draws in the box.
  // The generator seed is a constant, so the fit is a pure function of the
  // data.
  Rng rng(0x9d2c5680u);
  Vec best_theta;
  double best_val = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < 8; ++restart) {
    Vec theta0(2 + d);
    if (restart == 0) {
      theta0[0] = 0.0;
      theta0[1] = std::log(1e-6);
      for (int k = 0; k < d; ++k) theta0[2 + k] = std::log(0.5);
    } else {
      theta0[0] = rng.uniform(hb.sf2_lo, hb.sf2_hi);
      theta0[1] = rng.uniform(hb.sn2_lo, hb.sn2_hi);
      for (int k = 0; k < d; ++k) theta0[2 + k] = rng.uniform(hb.len_lo, hb.len_hi);
    }
    const Vec theta = nelder_mead(objective, theta0, 0.5, 200);
    const double val = objective(theta);
    if (val < best_val) {
      best_val = val;
      best_theta = theta;
    }
  }

  model.log_sf2 = std::clamp(best_theta[0], hb.sf2_lo, hb.sf2_hi);
  model.log_sn2 = std::clamp(best_theta[1], hb.sn2_lo, hb.sn2_hi);
  model.log_len = best_theta.segment(2, d)
                      .cwiseMax(Vec::Constant(d, hb.len_lo))
                      .cwiseMin(Vec::Constant(d, hb.len_hi));

  const Vec inv_len = (-model.log_len).array().exp();
  const Mat K = gram(X, std::exp(model.log_sf2), std::exp(model.log_sn2), inv_len);
  Eigen::LLT<Mat> llt(K);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("gp_fit: Gram matrix not positive definite");
  model.chol = llt.matrixL();
  model.alpha = llt.solve(ys);
  return model;
}

}  // namespace wpg
