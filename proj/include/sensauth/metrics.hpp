#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "sensauth/types.hpp"

namespace sensauth {

// Acceptance rule: accept when score >= threshold. Points are stored in
// ascending threshold order, so FAR is non-increasing and FRR non-decreasing
// along the list; the +inf sentinel pins the (FAR=0, FRR=1) end.
struct RocPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
};

inline RocCurve roc(std::span<const double> genuine, std::span<const double> impostor) {
  if (genuine.empty() || impostor.empty()) {
    throw ValidationError("roc: empty score list");
  }
  std::vector<double> thresholds;
  thresholds.reserve(genuine.size() + impostor.size() + 1);
  thresholds.insert(thresholds.end(), genuine.begin(), genuine.end());
  thresholds.insert(thresholds.end(), impostor.begin(), impostor.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::vector<double> gen_sorted(genuine.begin(), genuine.end());
  std::vector<double> imp_sorted(impostor.begin(), impostor.end());
  std::sort(gen_sorted.begin(), gen_sorted.end());
  std::sort(imp_sorted.begin(), imp_sorted.end());

  const double n_gen = static_cast<double>(gen_sorted.size());
  const double n_imp = static_cast<double>(imp_sorted.size());
  RocCurve curve;
  curve.points.reserve(thresholds.size() + 1);
  for (double t : thresholds) {
    const auto imp_below = std::lower_bound(imp_sorted.begin(), imp_sorted.end(), t) -
                           imp_sorted.begin();
    const auto gen_below = std::lower_bound(gen_sorted.begin(), gen_sorted.end(), t) -
                           gen_sorted.begin();
    curve.points.push_back({t, (n_imp - static_cast<double>(imp_below)) / n_imp,
                            static_cast<double>(gen_below) / n_gen});
  }
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
  return curve;
}

// Conservative step rule: the FRR of the most permissive threshold whose
// achieved FAR is still <= the target, so the operating point never exceeds
// the target FAR.
inline double frr_at_far(const RocCurve& curve, double target_far) {
  if (!(target_far > 0.0 && target_far <= 1.0)) {
    throw ValidationError("frr_at_far: target must be in (0, 1]");
  }
  for (const auto& p : curve.points) {
    if (p.far <= target_far) return p.frr;
  }
  throw ValidationError("frr_at_far: no threshold reaches the target");
}

inline double threshold_at_far(const RocCurve& curve, double target_far) {
  if (!(target_far > 0.0 && target_far <= 1.0)) {
    throw ValidationError("threshold_at_far: target must be in (0, 1]");
  }
  for (const auto& p : curve.points) {
    if (p.far <= target_far) return p.threshold;
  }
  throw ValidationError("threshold_at_far: no threshold reaches the target");
}

// Mann-Whitney AUC of genuine-over-impostor ranking; ties count half.
inline double auc(std::span<const double> genuine, std::span<const double> impostor) {
  std::vector<double> imp_sorted(impostor.begin(), impostor.end());
  std::sort(imp_sorted.begin(), imp_sorted.end());
  double wins = 0.0;
  for (double g : genuine) {
    const auto lo = std::lower_bound(imp_sorted.begin(), imp_sorted.end(), g) - imp_sorted.begin();
    const auto hi = std::upper_bound(imp_sorted.begin(), imp_sorted.end(), g) - imp_sorted.begin();
    wins += static_cast<double>(lo) + 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(genuine.size()) * static_cast<double>(imp_sorted.size()));
}

}  // namespace sensauth
