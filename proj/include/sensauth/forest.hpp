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

enum class FeatureSubsample : std::uint8_t { kSqrt = 0, kLog2 = 1 };

inline const char* feature_subsample_name(FeatureSubsample s) {
  return s == FeatureSubsample::kSqrt ? "sqrt" : "log2";
}

struct ForestParams {
  int n_estimators = 100;
  int max_depth = 7;
  FeatureSubsample subsample = FeatureSubsample::kSqrt;
};

// Binary CART node. feature == -1 marks a leaf carrying the bootstrap class
// counts.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::int32_t count0 = 0;
  std::int32_t count1 = 0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  const TreeNode& leaf_for(std::span<const double> x) const {
    int n = 0;
    while (nodes[static_cast<std::size_t>(n)].feature >= 0) {
      const TreeNode& node = nodes[static_cast<std::size_t>(n)];
      n = x[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(n)];
  }

  // Majority vote at the leaf; ties vote non-victim.
  int vote(std::span<const double> x) const {
    const TreeNode& leaf = leaf_for(x);
    return leaf.count1 > leaf.count0 ? 1 : 0;
  }
};

struct ForestModel {
  ForestParams params;
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  std::vector<DecisionTree> trees;

  // Fraction of trees voting victim.
  double score(std::span<const double> x) const {
    int votes = 0;
    for (const auto& tree : trees) votes += tree.vote(x);
    return static_cast<double>(votes) / static_cast<double>(trees.size());
  }

  int predict(std::span<const double> x) const { return score(x) >= 0.5 ? 1 : 0; }
};

namespace detail {

inline int candidate_feature_count(std::size_t n_features, FeatureSubsample mode) {
  const double d = static_cast<double>(n_features);
  double k = mode == FeatureSubsample::kSqrt ? std::sqrt(d) : std::log2(d);
  int out = static_cast<int>(std::ceil(k));
  if (out < 1) out = 1;
  if (out > static_cast<int>(n_features)) out = static_cast<int>(n_features);
  return out;
}

class TreeBuilder {
 public:
  TreeBuilder(const RowMatrix& x, std::span<const int> y, int max_depth, int n_candidates, Rng& rng)
      : x_(x), y_(y), max_depth_(max_depth), n_candidates_(n_candidates), rng_(rng) {
    scratch_.resize(x.rows);
    partition_buf_.resize(x.rows);
  }

  DecisionTree build(std::vector<int>& samples) {
    tree_.nodes.clear();
    samples_ = &samples;
    build_node(0, samples.size(), 0);
    return std::move(tree_);
  }

 private:
  struct ValueLabel {
    double value;
    int label;
  };

  int build_node(std::size_t lo, std::size_t hi, int depth) {
    auto& samples = *samples_;
    std::int32_t c0 = 0, c1 = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      if (y_[static_cast<std::size_t>(samples[i])] == 1) {
        ++c1;
      } else {
        ++c0;
      }
    }
    const int node_index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back({});
    tree_.nodes.back().count0 = c0;
    tree_.nodes.back().count1 = c1;
    if (depth >= max_depth_ || c0 == 0 || c1 == 0 || hi - lo < 2) return node_index;

    const auto candidates = sample_indices(static_cast<int>(x_.cols), n_candidates_, rng_);

    // Maximize sum over sides of (count0^2 + count1^2) / n_side, which is
    // equivalent to minimizing weighted Gini impurity.
    const double n_node = static_cast<double>(hi - lo);
    const double parent_metric =
        (static_cast<double>(c0) * c0 + static_cast<double>(c1) * c1) / n_node;
    double best_metric = parent_metric + 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;

    for (int f : candidates) {
      ValueLabel* vals = scratch_.data();
      const std::size_t n = hi - lo;
      for (std::size_t i = 0; i < n; ++i) {
        const int s = samples[lo + i];
        vals[i] = {x_.at(static_cast<std::size_t>(s), static_cast<std::size_t>(f)),
                   y_[static_cast<std::size_t>(s)]};
      }
      std::sort(vals, vals + n, [](const ValueLabel& a, const ValueLabel& b) {
        return a.value < b.value;
      });
      double l0 = 0.0, l1 = 0.0;
      for (std::size_t i = 1; i < n; ++i) {
        if (vals[i - 1].label == 1) {
          l1 += 1.0;
        } else {
          l0 += 1.0;
        }
        if (vals[i].value == vals[i - 1].value) continue;
        const double r0 = static_cast<double>(c0) - l0;
        const double r1 = static_cast<double>(c1) - l1;
        const double nl = static_cast<double>(i);
        const double nr = n_node - nl;
        const double metric = (l0 * l0 + l1 * l1) / nl + (r0 * r0 + r1 * r1) / nr;
        if (metric > best_metric) {
          best_metric = metric;
          best_feature = f;
          best_threshold = 0.5 * (vals[i - 1].value + vals[i].value);
        }
      }
    }
    if (best_feature < 0) return node_index;

    // Stable partition into [lo, mid) < threshold <= [mid, hi).
    std::size_t left_n = 0;
    std::size_t right_n = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const int s = samples[i];
      if (x_.at(static_cast<std::size_t>(s), static_cast<std::size_t>(best_feature)) <
          best_threshold) {
        samples[lo + left_n++] = s;
      } else {
        partition_buf_[right_n++] = s;
      }
    }
    for (std::size_t i = 0; i < right_n; ++i) samples[lo + left_n + i] = partition_buf_[i];

    tree_.nodes[static_cast<std::size_t>(node_index)].feature = best_feature;
    tree_.nodes[static_cast<std::size_t>(node_index)].threshold = best_threshold;
    const int left = build_node(lo, lo + left_n, depth + 1);
    const int right = build_node(lo + left_n, hi, depth + 1);
    tree_.nodes[static_cast<std::size_t>(node_index)].left = left;
    tree_.nodes[static_cast<std::size_t>(node_index)].right = right;
    return node_index;
  }

  const RowMatrix& x_;
  std::span<const int> y_;
  int max_depth_;
  int n_candidates_;
  Rng& rng_;
  DecisionTree tree_;
  std::vector<int>* samples_ = nullptr;
  std::vector<ValueLabel> scratch_;
  std::vector<int> partition_buf_;
};

}  // namespace detail

// Bootstrap-aggregated CART trees with Gini splits and per-split feature
// subsampling. Tree t draws all randomness from derive_seed(seed, t).
inline ForestModel train_forest(const RowMatrix& x, std::span<const int> y, ForestParams params,
                                std::uint64_t seed) {
  if (x.rows < 2) throw TrainingError("train_forest: need at least 2 samples");
  bool has0 = false, has1 = false;
  for (std::size_t i = 0; i < x.rows; ++i) {
    (y[i] == 1 ? has1 : has0) = true;
  }
  if (!has0 || !has1) throw TrainingError("train_forest: single-class training set");

  ForestModel model;
  model.params = params;
  model.seed = seed;
  model.dim = x.cols;
  model.trees.reserve(static_cast<std::size_t>(params.n_estimators));
  const int k = detail::candidate_feature_count(x.cols, params.subsample);
  std::vector<int> bootstrap(x.rows);
  for (int t = 0; t < params.n_estimators; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    for (std::size_t i = 0; i < x.rows; ++i) {
      bootstrap[i] = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(x.rows)));
    }
    detail::TreeBuilder builder(x, y, params.max_depth, k, rng);
    model.trees.push_back(builder.build(bootstrap));
  }
  return model;
}

}  // namespace sensauth
