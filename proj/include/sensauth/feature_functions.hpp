#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sensauth/fft.hpp"

namespace sensauth {

// Fixed battery applied to every sensor-component column. Order is the
// canonical function order used when sorting feature names.
enum class FeatureFn : std::uint8_t {
  kMin = 0,
  kMax,
  kMean,
  kMedian,
  kStd,
  kVar,
  kKurtosis,
  kSkewness,
  kShapeFactor,
  kAbsEnergy,
  kMeanSecondDerivativeCentral,
  kMeanAbsChange,
  kSumAbsChange,
  kPeakCount,
  kFourierEntropy,
};

constexpr int kFeatureFnCount = 15;

inline const char* feature_fn_name(FeatureFn fn) {
  static constexpr const char* kNames[] = {
      "min",
      "max",
      "mean",
      "median",
      "std",
      "var",
      "kurtosis",
      "skewness",
      "shape_factor",
      "abs_energy",
      "mean_second_derivative_central",
      "mean_abs_change",
      "sum_abs_change",
      "peak_count",
      "fourier_entropy",
  };
  return kNames[static_cast<int>(fn)];
}

inline std::optional<FeatureFn> feature_fn_from(const std::string& name) {
  for (int i = 0; i < kFeatureFnCount; ++i) {
    if (name == feature_fn_name(static_cast<FeatureFn>(i))) return static_cast<FeatureFn>(i);
  }
  return std::nullopt;
}

// All functions are total: lengths below a function's minimum yield its
// degenerate value (0 unless noted) so feature vectors stay fixed-length and
// finite. An empty column yields 0 for every function.
namespace fns {

inline double minimum(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return *std::min_element(x.begin(), x.end());
}

inline double maximum(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return *std::max_element(x.begin(), x.end());
}

inline double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double median(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return 0.0;
  std::vector<double> tmp(x.begin(), x.end());
  std::sort(tmp.begin(), tmp.end());
  if (n % 2 == 1) return tmp[n / 2];
  return 0.5 * (tmp[n / 2 - 1] + tmp[n / 2]);
}

// Population central moments, two-pass.
inline double central_moment(std::span<const double> x, int order, double mu) {
  double s = 0.0;
  for (double v : x) s += std::pow(v - mu, order);
  return s / static_cast<double>(x.size());
}

inline double variance(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double mu = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return s / static_cast<double>(x.size());
}

inline double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

// Adjusted Fisher-Pearson: G1 = g1 * sqrt(n(n-1)) / (n-2).
inline double skewness(std::span<const double> x) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 3) return 0.0;
  const double mu = mean(x);
  const double m2 = central_moment(x, 2, mu);
  if (m2 <= 0.0) return 0.0;
  const double m3 = central_moment(x, 3, mu);
  const double g1 = m3 / std::pow(m2, 1.5);
  return g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
}

// Adjusted Fisher excess: G2 = ((n+1) g2 + 6) (n-1) / ((n-2)(n-3)).
inline double kurtosis(std::span<const double> x) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 4) return 0.0;
  const double mu = mean(x);
  const double m2 = central_moment(x, 2, mu);
  if (m2 <= 0.0) return 0.0;
  const double m4 = central_moment(x, 4, mu);
  const double g2 = m4 / (m2 * m2) - 3.0;
  return ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
}

// RMS over mean absolute value; 0 when the series is identically zero.
inline double shape_factor(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double sum_sq = 0.0;
  double sum_abs = 0.0;
  for (double v : x) {
    sum_sq += v * v;
    sum_abs += std::fabs(v);
  }
  const auto n = static_cast<double>(x.size());
  const double mean_abs = sum_abs / n;
  if (mean_abs == 0.0) return 0.0;
  return std::sqrt(sum_sq / n) / mean_abs;
}

inline double abs_energy(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

inline double mean_second_derivative_central(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i + 2 < n; ++i) s += x[i + 2] - 2.0 * x[i + 1] + x[i];
  return s / (2.0 * static_cast<double>(n - 2));
}

inline double sum_abs_change(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) s += std::fabs(x[i + 1] - x[i]);
  return s;
}

inline double mean_abs_change(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  return sum_abs_change(x) / static_cast<double>(x.size() - 1);
}

// Strict one-neighbor support; plateaus are not peaks.
inline double peak_count(std::span<const double> x) {
  if (x.size() < 3) return 0.0;
  int count = 0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    if (x[i - 1] < x[i] && x[i] > x[i + 1]) ++count;
  }
  return static_cast<double>(count);
}

// Shannon entropy (nats) of the normalized positive-frequency periodogram of
// the mean-removed series. Spectral power below the double-precision noise
// floor of the raw energy counts as zero, so constant (and shifted-constant)
// series map to 0 exactly.
inline double fourier_entropy(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const double mu = mean(x);
  double raw_energy = 0.0;
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) {
    centered[i] = x[i] - mu;
    raw_energy += x[i] * x[i];
  }
  const auto spectrum = dft(centered);
  const std::size_t k_max = n / 2;
  std::vector<double> power(k_max);
  double total = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double p = std::norm(spectrum[k]);
    power[k - 1] = p;
    total += p;
  }
  if (total <= 0.0 || total <= raw_energy * 1e-24) return 0.0;
  double entropy = 0.0;
  for (double p : power) {
    if (p <= 0.0) continue;
    const double q = p / total;
    entropy -= q * std::log(q);
  }
  return entropy;
}

}  // namespace fns

inline double apply_feature_fn(FeatureFn fn, std::span<const double> x) {
  switch (fn) {
    case FeatureFn::kMin: return fns::minimum(x);
    case FeatureFn::kMax: return fns::maximum(x);
    case FeatureFn::kMean: return fns::mean(x);
    case FeatureFn::kMedian: return fns::median(x);
    case FeatureFn::kStd: return fns::stddev(x);
    case FeatureFn::kVar: return fns::variance(x);
    case FeatureFn::kKurtosis: return fns::kurtosis(x);
    case FeatureFn::kSkewness: return fns::skewness(x);
    case FeatureFn::kShapeFactor: return fns::shape_factor(x);
    case FeatureFn::kAbsEnergy: return fns::abs_energy(x);
    case FeatureFn::kMeanSecondDerivativeCentral: return fns::mean_second_derivative_central(x);
    case FeatureFn::kMeanAbsChange: return fns::mean_abs_change(x);
    case FeatureFn::kSumAbsChange: return fns::sum_abs_change(x);
    case FeatureFn::kPeakCount: return fns::peak_count(x);
    case FeatureFn::kFourierEntropy: return fns::fourier_entropy(x);
  }
  return 0.0;
}

}  // namespace sensauth
