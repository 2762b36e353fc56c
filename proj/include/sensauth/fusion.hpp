#pragma once

#include <algorithm>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensauth/logreg.hpp"
#include "sensauth/matrix.hpp"
#include "sensauth/types.hpp"

namespace sensauth {

enum class EnsembleKind : std::uint8_t { kVoting = 0, kStacking = 1 };

inline const char* ensemble_kind_name(EnsembleKind k) {
  return k == EnsembleKind::kVoting ? "voting" : "stacking";
}

// Min-max normalization with constants fitted on training scores. A constant
// training score distribution maps everything to the neutral 0.5.
struct ScoreNormalizer {
  double lo = 0.0;
  double hi = 1.0;

  static ScoreNormalizer fit(std::span<const double> scores) {
    ScoreNormalizer n;
    if (scores.empty()) return n;
    n.lo = *std::min_element(scores.begin(), scores.end());
    n.hi = *std::max_element(scores.begin(), scores.end());
    return n;
  }

  double apply(double s) const { return hi > lo ? (s - lo) / (hi - lo) : 0.5; }
};

// One first-level prediction. hard_label is 1 exactly when score >= threshold.
struct BasePrediction {
  std::string object_id;
  double score = 0.0;      // min-max normalized
  double threshold = 0.5;  // in the same normalized space
  int hard_label = 0;
};

inline BasePrediction make_base_prediction(std::string object_id, double normalized_score,
                                           double normalized_threshold) {
  return {std::move(object_id), normalized_score, normalized_threshold,
          normalized_score >= normalized_threshold ? 1 : 0};
}

struct VoteOutcome {
  int label = 0;       // 1 = victim; ties reject
  double score = 0.0;  // mean of member scores, used for ROC sweeps
};

// Uniform-weight hard vote; the mode of the member labels wins and a tie
// rejects (falls back to phone approval).
inline VoteOutcome predict_vote(std::span<const BasePrediction> members) {
  if (members.empty()) throw ValidationError("predict_vote: no member predictions");
  int victim_votes = 0;
  double score_sum = 0.0;
  for (const auto& m : members) {
    victim_votes += m.hard_label;
    score_sum += m.score;
  }
  VoteOutcome out;
  const int other_votes = static_cast<int>(members.size()) - victim_votes;
  out.label = victim_votes > other_votes ? 1 : 0;
  out.score = score_sum / static_cast<double>(members.size());
  return out;
}

// Second-level logistic combiner over member scores. Member order is the
// canonical object order; the meta-model input arity equals member count.
struct StackingModel {
  std::vector<std::string> members;
  LogregModel meta;

  double score(std::span<const double> member_scores) const {
    return meta.probability(member_scores);
  }
};

// Fits the meta-classifier on an out-of-fold score matrix (rows = training
// samples, columns = members in canonical order).
inline StackingModel fit_stacking_meta(const RowMatrix& oof_scores, std::span<const int> labels,
                                       std::vector<std::string> members) {
  if (oof_scores.cols != members.size()) {
    throw ValidationError("fit_stacking_meta: member/score arity mismatch");
  }
  StackingModel model;
  model.members = std::move(members);
  model.meta = train_logreg(oof_scores, labels);
  return model;
}

// Serialized ensemble description stored beside the model bundles.
struct EnsembleManifest {
  EnsembleKind kind = EnsembleKind::kVoting;
  std::vector<std::string> members;
  std::vector<double> far_targets;
  // voting: thresholds[t][m] is member m's raw-score threshold at far_targets[t]
  std::vector<std::vector<double>> thresholds;
  // stacking
  std::vector<double> meta_weights;
  double meta_intercept = 0.0;
};

inline nlohmann::json ensemble_manifest_to_json(const EnsembleManifest& m) {
  nlohmann::json j;
  j["format"] = "sensauth-ensemble";
  j["version"] = 1;
  j["kind"] = ensemble_kind_name(m.kind);
  j["members"] = m.members;
  j["far_targets"] = m.far_targets;
  if (m.kind == EnsembleKind::kVoting) {
    j["thresholds"] = m.thresholds;
  } else {
    j["meta_weights"] = m.meta_weights;
    j["meta_intercept"] = m.meta_intercept;
  }
  return j;
}

inline void save_ensemble_manifest(const EnsembleManifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << ensemble_manifest_to_json(m).dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace sensauth
