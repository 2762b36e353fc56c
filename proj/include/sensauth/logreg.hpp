#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "sensauth/matrix.hpp"
#include "sensauth/types.hpp"

namespace sensauth {

struct LogregModel {
  std::vector<double> weights;
  double intercept = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;

  double probability(std::span<const double> x) const {
    double z = intercept;
    for (std::size_t i = 0; i < weights.size(); ++i) z += weights[i] * x[i];
    return 1.0 / (1.0 + std::exp(-z));
  }

  int predict(std::span<const double> x) const { return probability(x) >= 0.5 ? 1 : 0; }
};

namespace detail {

inline double softplus(double u) {
  if (u > 30.0) return u;
  if (u < -30.0) return std::exp(u);
  return std::log1p(std::exp(u));
}

struct LogregObjective {
  const RowMatrix& x;
  std::span<const int> y;
  double lambda;

  // J = mean log-loss + lambda/(2n) * ||w||^2; the intercept is unpenalized.
  double value(std::span<const double> w, double b) const {
    const double n = static_cast<double>(x.rows);
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      double z = b;
      const auto row = x.row(i);
      for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * row[j];
      const double s = y[i] == 1 ? 1.0 : -1.0;
      loss += softplus(-s * z);
    }
    double reg = 0.0;
    for (double v : w) reg += v * v;
    return loss / n + lambda * reg / (2.0 * n);
  }

  void gradient(std::span<const double> w, double b, std::span<double> gw, double& gb) const {
    const double n = static_cast<double>(x.rows);
    for (double& g : gw) g = 0.0;
    gb = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      double z = b;
      const auto row = x.row(i);
      for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * row[j];
      const double s = y[i] == 1 ? 1.0 : -1.0;
      const double sig = 1.0 / (1.0 + std::exp(s * z));  // sigma(-s z)
      const double coeff = -s * sig;
      for (std::size_t j = 0; j < w.size(); ++j) gw[j] += coeff * row[j];
      gb += coeff;
    }
    for (std::size_t j = 0; j < w.size(); ++j) gw[j] = gw[j] / n + lambda * w[j] / n;
    gb /= n;
  }
};

}  // namespace detail

// L2-regularized logistic regression fit by batch gradient descent with
// Armijo backtracking; deterministic, runs to gradient norm < tol or the
// iteration cap. Score is the victim-class probability.
inline LogregModel train_logreg(const RowMatrix& x, std::span<const int> y, double lambda = 1.0,
                                double tol = 1e-6, int max_iters = 10000) {
  bool has0 = false, has1 = false;
  for (std::size_t i = 0; i < x.rows; ++i) {
    (y[i] == 1 ? has1 : has0) = true;
  }
  if (!has0 || !has1) throw TrainingError("train_logreg: single-class training set");

  detail::LogregObjective obj{x, y, lambda};
  std::vector<double> w(x.cols, 0.0);
  double b = 0.0;
  std::vector<double> gw(x.cols, 0.0);
  double gb = 0.0;
  std::vector<double> w_try(x.cols, 0.0);
  double step = 1.0;
  double current = obj.value(w, b);

  LogregModel model;
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    obj.gradient(w, b, gw, gb);
    double norm_sq = gb * gb;
    for (double g : gw) norm_sq += g * g;
    model.gradient_norm = std::sqrt(norm_sq);
    if (model.gradient_norm < tol) break;

    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      for (std::size_t j = 0; j < w.size(); ++j) w_try[j] = w[j] - step * gw[j];
      const double b_try = b - step * gb;
      const double value = obj.value(w_try, b_try);
      if (value <= current - 0.5 * step * norm_sq) {
        w.swap(w_try);
        b = b_try;
        current = value;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow; gradient is numerically flat
    step = std::min(step * 2.0, 1e6);
  }

  model.weights = std::move(w);
  model.intercept = b;
  model.iterations = iter;
  return model;
}

}  // namespace sensauth
