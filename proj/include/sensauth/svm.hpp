#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sensauth/matrix.hpp"
#include "sensauth/rng.hpp"
#include "sensauth/types.hpp"

namespace sensauth {

enum class SvmKernel : std::uint8_t { kLinear = 0, kPolynomial = 1, kRbf = 2, kSigmoid = 3 };

inline const char* svm_kernel_name(SvmKernel k) {
  switch (k) {
    case SvmKernel::kLinear: return "linear";
    case SvmKernel::kPolynomial: return "polynomial";
    case SvmKernel::kRbf: return "rbf";
    case SvmKernel::kSigmoid: return "sigmoid";
  }
  return "?";
}

struct SvmParams {
  double c = 1.0;
  double gamma = 0.1;
  SvmKernel kernel = SvmKernel::kRbf;
};

inline double kernel_eval(const SvmParams& params, std::span<const double> a,
                          std::span<const double> b) {
  switch (params.kernel) {
    case SvmKernel::kLinear:
    case SvmKernel::kPolynomial:
    case SvmKernel::kSigmoid: {
      double dot = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
      if (params.kernel == SvmKernel::kLinear) return dot;
      if (params.kernel == SvmKernel::kSigmoid) return std::tanh(params.gamma * dot);
      const double base = params.gamma * dot + 1.0;
      return base * base * base;
    }
    case SvmKernel::kRbf: {
      double dist = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        dist += d * d;
      }
      return std::exp(-params.gamma * dist);
    }
  }
  return 0.0;
}

// Support vectors live in the (already standardized) training space; the
// caller owns any scaling applied before training and scoring.
struct SvmModel {
  SvmParams params;
  std::size_t dim = 0;
  std::vector<double> support;   // n_sv x dim, row-major
  std::vector<double> alpha_y;   // alpha_i * y_i
  double bias = 0.0;             // decision(x) = sum_i alpha_y_i K(sv_i, x) - bias
  int iterations = 0;

  std::size_t support_count() const { return alpha_y.size(); }

  double decision(std::span<const double> x) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < alpha_y.size(); ++i) {
      sum += alpha_y[i] * kernel_eval(params, {support.data() + i * dim, dim}, x);
    }
    return sum - bias;
  }

  int predict(std::span<const double> x) const { return decision(x) >= 0.0 ? 1 : 0; }
};

namespace detail {

// Platt's SMO with an error cache and the usual second-choice heuristics.
// Eta >= 0 (possible for the indefinite sigmoid kernel) falls back to
// evaluating the objective at both clip ends.
class SmoSolver {
 public:
  SmoSolver(const RowMatrix& x, std::span<const int> y01, SvmParams params, std::uint64_t seed)
      : x_(x), params_(params), n_(x.rows), rng_(seed) {
    y_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) y_[i] = y01[i] == 1 ? 1.0 : -1.0;
    alpha_.assign(n_, 0.0);
    errors_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) errors_[i] = -y_[i];
    kernel_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double k = kernel_eval(params_, x_.row(i), x_.row(j));
        kernel_[i * n_ + j] = k;
        kernel_[j * n_ + i] = k;
      }
    }
  }

  static constexpr double kKktTolerance = 1e-3;
  static constexpr double kEps = 1e-12;
  static constexpr int kMaxPasses = 200;

  void solve() {
    int num_changed = 0;
    bool examine_all = true;
    int passes = 0;
    while (num_changed > 0 || examine_all) {
      if (++passes > kMaxPasses) {
        throw TrainingError("train_svm: SMO did not converge within " +
                            std::to_string(kMaxPasses) + " passes (n=" + std::to_string(n_) +
                            ", C=" + std::to_string(params_.c) +
                            ", gamma=" + std::to_string(params_.gamma) + ", kernel=" +
                            svm_kernel_name(params_.kernel) +
                            ", last pass changed " + std::to_string(num_changed) + " multipliers)");
      }
      num_changed = 0;
      if (examine_all) {
        for (std::size_t i = 0; i < n_; ++i) num_changed += examine(i);
      } else {
        for (std::size_t i = 0; i < n_; ++i) {
          if (alpha_[i] > 0.0 && alpha_[i] < params_.c) num_changed += examine(i);
        }
      }
      if (examine_all) {
        examine_all = false;
      } else if (num_changed == 0) {
        examine_all = true;
      }
    }
    passes_used_ = passes;
  }

  std::span<const double> alpha() const { return alpha_; }
  std::span<const double> labels() const { return y_; }
  double bias() const { return b_; }
  int passes_used() const { return passes_used_; }

 private:
  double k(std::size_t i, std::size_t j) const { return kernel_[i * n_ + j]; }

  int examine(std::size_t i2) {
    const double y2 = y_[i2];
    const double a2 = alpha_[i2];
    const double e2 = errors_[i2];
    const double r2 = e2 * y2;
    if (!((r2 < -kKktTolerance && a2 < params_.c) || (r2 > kKktTolerance && a2 > 0.0))) return 0;

    // 1: maximize |E1 - E2| over non-bound multipliers
    std::size_t best = n_;
    double best_gap = -1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (alpha_[i] <= 0.0 || alpha_[i] >= params_.c) continue;
      const double gap = std::fabs(errors_[i] - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best < n_ && take_step(best, i2)) return 1;

    // 2: all non-bound, random start
    const std::size_t start1 = rng_.next_below(static_cast<std::uint32_t>(n_));
    for (std::size_t off = 0; off < n_; ++off) {
      const std::size_t i1 = (start1 + off) % n_;
      if (alpha_[i1] <= 0.0 || alpha_[i1] >= params_.c) continue;
      if (take_step(i1, i2)) return 1;
    }
    // 3: everything, random start
    const std::size_t start2 = rng_.next_below(static_cast<std::uint32_t>(n_));
    for (std::size_t off = 0; off < n_; ++off) {
      const std::size_t i1 = (start2 + off) % n_;
      if (take_step(i1, i2)) return 1;
    }
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1 = alpha_[i1];
    const double a2 = alpha_[i2];
    const double y1 = y_[i1];
    const double y2 = y_[i2];
    const double e1 = errors_[i1];
    const double e2 = errors_[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (y1 == y2) {
      lo = std::max(0.0, a1 + a2 - params_.c);
      hi = std::min(params_.c, a1 + a2);
    } else {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(params_.c, params_.c + a2 - a1);
    }
    if (lo >= hi) return false;

    const double k11 = k(i1, i1);
    const double k12 = k(i1, i2);
    const double k22 = k(i2, i2);
    const double eta = 2.0 * k12 - k11 - k22;

    double a2_new;
    if (eta < 0.0) {
      a2_new = a2 - y2 * (e1 - e2) / eta;
      a2_new = std::clamp(a2_new, lo, hi);
    } else {
      const double v1 = e1 + y1 - y1 * a1 * k11 - y2 * a2 * k12 + b_;
      const double v2 = e2 + y2 - y1 * a1 * k12 - y2 * a2 * k22 + b_;
      const double gamma = a1 + s * a2;
      auto objective = [&](double a) {
        const double a1_t = gamma - s * a;
        return a1_t + a - 0.5 * k11 * a1_t * a1_t - 0.5 * k22 * a * a - s * k12 * a1_t * a -
               y1 * a1_t * v1 - y2 * a * v2;
      };
      const double obj_lo = objective(lo);
      const double obj_hi = objective(hi);
      if (obj_lo > obj_hi + kEps) {
        a2_new = lo;
      } else if (obj_hi > obj_lo + kEps) {
        a2_new = hi;
      } else {
        return false;
      }
    }
    if (a2_new < kEps) a2_new = 0.0;
    if (a2_new > params_.c - kEps) a2_new = params_.c;
    if (std::fabs(a2_new - a2) < kEps * (a2_new + a2 + kEps)) return false;

    double a1_new = a1 + s * (a2 - a2_new);
    if (a1_new < kEps) a1_new = 0.0;
    if (a1_new > params_.c - kEps) a1_new = params_.c;

    const double b1 = e1 + y1 * (a1_new - a1) * k11 + y2 * (a2_new - a2) * k12 + b_;
    const double b2 = e2 + y1 * (a1_new - a1) * k12 + y2 * (a2_new - a2) * k22 + b_;
    double b_new;
    const bool in1 = a1_new > 0.0 && a1_new < params_.c;
    const bool in2 = a2_new > 0.0 && a2_new < params_.c;
    if (in1) {
      b_new = b1;
    } else if (in2) {
      b_new = b2;
    } else {
      b_new = 0.5 * (b1 + b2);
    }

    for (std::size_t i = 0; i < n_; ++i) {
      errors_[i] += y1 * (a1_new - a1) * k(i1, i) + y2 * (a2_new - a2) * k(i2, i) + b_ - b_new;
    }
    alpha_[i1] = a1_new;
    alpha_[i2] = a2_new;
    b_ = b_new;
    return true;
  }

  const RowMatrix& x_;
  SvmParams params_;
  std::size_t n_;
  Rng rng_;
  std::vector<double> y_;
  std::vector<double> alpha_;
  std::vector<double> errors_;
  std::vector<double> kernel_;
  double b_ = 0.0;
  int passes_used_ = 0;
};

}  // namespace detail

// Soft-margin binary C-SVM. Expects standardized inputs; score is the signed
// decision value, positive towards the victim class.
inline SvmModel train_svm(const RowMatrix& x, std::span<const int> y01, SvmParams params,
                          std::uint64_t seed) {
  if (x.rows < 2) throw TrainingError("train_svm: need at least 2 samples");
  bool has0 = false, has1 = false;
  for (std::size_t i = 0; i < x.rows; ++i) {
    (y01[i] == 1 ? has1 : has0) = true;
  }
  if (!has0 || !has1) throw TrainingError("train_svm: single-class training set");

  detail::SmoSolver solver(x, y01, params, seed);
  solver.solve();

  const auto alpha = solver.alpha();
  const auto y = solver.labels();
  double balance = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) balance += alpha[i] * y[i];
  if (std::fabs(balance) >= 1e-6) {
    throw TrainingError("train_svm: dual constraint violated, sum(alpha*y) = " +
                        std::to_string(balance));
  }

  SvmModel model;
  model.params = params;
  model.dim = x.cols;
  model.bias = solver.bias();
  model.iterations = solver.passes_used();
  for (std::size_t i = 0; i < x.rows; ++i) {
    if (alpha[i] <= 0.0) continue;
    model.alpha_y.push_back(alpha[i] * y[i]);
    const auto row = x.row(i);
    model.support.insert(model.support.end(), row.begin(), row.end());
  }
  return model;
}

}  // namespace sensauth
