#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sensauth/forest.hpp"
#include "sensauth/kfold.hpp"
#include "sensauth/logging.hpp"
#include "sensauth/matrix.hpp"
#include "sensauth/rng.hpp"
#include "sensauth/svm.hpp"
#include "sensauth/types.hpp"

namespace sensauth {

enum class ModelFamily : std::uint8_t { kForest = 0, kSvm = 1 };

inline const char* model_family_name(ModelFamily f) {
  return f == ModelFamily::kForest ? "forest" : "svm";
}

// Search spaces, enumerated row-major in declaration order; the first point
// wins ties.
inline const std::vector<ForestParams>& forest_grid() {
  static const std::vector<ForestParams> grid = [] {
    std::vector<ForestParams> g;
    for (int n : {10, 50, 100, 200}) {
      for (int depth : {2, 4, 5, 6, 7, 8}) {
        for (FeatureSubsample sub : {FeatureSubsample::kSqrt, FeatureSubsample::kLog2}) {
          g.push_back({n, depth, sub});
        }
      }
    }
    return g;
  }();
  return grid;
}

inline const std::vector<SvmParams>& svm_grid() {
  static const std::vector<SvmParams> grid = [] {
    std::vector<SvmParams> g;
    for (double c : {0.1, 1.0, 10.0, 100.0}) {
      for (double gamma : {1.0, 0.1, 0.01, 0.001}) {
        for (SvmKernel k : {SvmKernel::kLinear, SvmKernel::kPolynomial, SvmKernel::kRbf,
                            SvmKernel::kSigmoid}) {
          g.push_back({c, gamma, k});
        }
      }
    }
    return g;
  }();
  return grid;
}

constexpr int kInnerGridFolds = 5;

namespace detail {

struct InnerSplit {
  RowMatrix train_x;
  std::vector<int> train_y;
  RowMatrix test_x;
  std::vector<int> test_y;
};

inline std::vector<InnerSplit> make_inner_splits(const RowMatrix& x, std::span<const int> y,
                                                 std::uint64_t seed, int folds) {
  const auto assignment = stratified_kfold(y, folds, seed);
  int k = 0;
  for (int f : assignment) k = std::max(k, f + 1);
  std::vector<InnerSplit> splits(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    auto& split = splits[static_cast<std::size_t>(f)];
    std::size_t n_train = 0, n_test = 0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      (assignment[i] == f ? n_test : n_train) += 1;
    }
    split.train_x = RowMatrix::zeros(n_train, x.cols);
    split.test_x = RowMatrix::zeros(n_test, x.cols);
    split.train_y.reserve(n_train);
    split.test_y.reserve(n_test);
    std::size_t ti = 0, vi = 0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      if (assignment[i] == f) {
        std::copy(x.row(i).begin(), x.row(i).end(), split.test_x.data.begin() + vi * x.cols);
        split.test_y.push_back(y[i]);
        ++vi;
      } else {
        std::copy(x.row(i).begin(), x.row(i).end(), split.train_x.data.begin() + ti * x.cols);
        split.train_y.push_back(y[i]);
        ++ti;
      }
    }
  }
  return splits;
}

}  // namespace detail

template <typename Params>
struct GridSearchResult {
  Params params;
  double mean_accuracy = 0.0;
  int evaluated = 0;
  int failed = 0;
};

// Exhaustive sweep scored by mean accuracy over an inner stratified k-fold of
// the given training partition. Grid points whose trainer fails are skipped
// with a warning; ties keep the earlier point.
inline GridSearchResult<ForestParams> grid_search_forest(const RowMatrix& x, std::span<const int> y,
                                                         std::uint64_t seed,
                                                         int folds = kInnerGridFolds) {
  const auto splits = detail::make_inner_splits(x, y, derive_seed(seed, "grid-folds"), folds);
  GridSearchResult<ForestParams> result;
  double best = -1.0;
  int index = 0;
  for (const auto& params : forest_grid()) {
    double acc_sum = 0.0;
    bool ok = true;
    for (std::size_t f = 0; f < splits.size(); ++f) {
      try {
        const auto model = train_forest(splits[f].train_x, splits[f].train_y, params,
                                        derive_seed(seed, static_cast<std::uint64_t>(index * 64 + static_cast<int>(f))));
        std::size_t correct = 0;
        for (std::size_t i = 0; i < splits[f].test_x.rows; ++i) {
          if (model.predict(splits[f].test_x.row(i)) == splits[f].test_y[i]) ++correct;
        }
        acc_sum += static_cast<double>(correct) / static_cast<double>(splits[f].test_x.rows);
      } catch (const TrainingError& e) {
        log_warning("grid point skipped (" + std::to_string(params.n_estimators) + "/" +
                    std::to_string(params.max_depth) + "/" + feature_subsample_name(params.subsample) +
                    "): " + e.what());
        ok = false;
        break;
      }
    }
    if (ok) {
      ++result.evaluated;
      const double mean = acc_sum / static_cast<double>(splits.size());
      if (mean > best) {
        best = mean;
        result.params = params;
        result.mean_accuracy = mean;
      }
    } else {
      ++result.failed;
    }
    ++index;
  }
  if (result.evaluated == 0) throw TrainingError("grid_search_forest: every grid point failed");
  return result;
}

inline GridSearchResult<SvmParams> grid_search_svm(const RowMatrix& x, std::span<const int> y,
                                                   std::uint64_t seed, int folds = kInnerGridFolds) {
  const auto splits = detail::make_inner_splits(x, y, derive_seed(seed, "grid-folds"), folds);
  GridSearchResult<SvmParams> result;
  double best = -1.0;
  int index = 0;
  for (const auto& params : svm_grid()) {
    double acc_sum = 0.0;
    bool ok = true;
    for (std::size_t f = 0; f < splits.size(); ++f) {
      try {
        RowMatrix train = splits[f].train_x;
        const Standardizer scaler = Standardizer::fit(train);
        scaler.transform(train);
        const auto model = train_svm(train, splits[f].train_y, params,
                                     derive_seed(seed, static_cast<std::uint64_t>(index * 64 + static_cast<int>(f))));
        std::size_t correct = 0;
        for (std::size_t i = 0; i < splits[f].test_x.rows; ++i) {
          const auto row = scaler.transform_row(splits[f].test_x.row(i));
          if (model.predict(row) == splits[f].test_y[i]) ++correct;
        }
        acc_sum += static_cast<double>(correct) / static_cast<double>(splits[f].test_x.rows);
      } catch (const TrainingError& e) {
        log_warning(std::string("grid point skipped (C=") + std::to_string(params.c) + ", gamma=" +
                    std::to_string(params.gamma) + ", " + svm_kernel_name(params.kernel) + "): " +
                    e.what());
        ok = false;
        break;
      }
    }
    if (ok) {
      ++result.evaluated;
      const double mean = acc_sum / static_cast<double>(splits.size());
      if (mean > best) {
        best = mean;
        result.params = params;
        result.mean_accuracy = mean;
      }
    } else {
      ++result.failed;
    }
    ++index;
  }
  if (result.evaluated == 0) throw TrainingError("grid_search_svm: every grid point failed");
  return result;
}

}  // namespace sensauth
