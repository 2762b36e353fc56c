#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sensauth/logging.hpp"
#include "sensauth/rng.hpp"
#include "sensauth/types.hpp"

namespace sensauth {

// Stratified fold assignment: per class, indices are shuffled and dealt out
// cyclically from a seeded offset, so fold class counts differ by at most one
// sample. k is reduced (with a warning) when the smallest class has fewer
// than k members.
inline std::vector<int> stratified_kfold(std::span<const int> y, int k, std::uint64_t seed,
                                         int* effective_k = nullptr) {
  if (k < 2) throw ValidationError("stratified_kfold: k must be >= 2");
  if (y.empty()) throw ValidationError("stratified_kfold: empty label vector");

  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(static_cast<int>(i));
  if (by_class.size() < 2) {
    throw ValidationError("stratified_kfold: need at least 2 classes");
  }

  std::size_t min_count = y.size();
  for (const auto& [cls, idx] : by_class) min_count = std::min(min_count, idx.size());
  if (static_cast<int>(min_count) < k) {
    k = static_cast<int>(min_count);
    log_warning("stratified_kfold: smallest class has " + std::to_string(min_count) +
                " members, reducing k to " + std::to_string(k));
    if (k < 2) throw ValidationError("stratified_kfold: a class has fewer than 2 members");
  }
  if (effective_k != nullptr) *effective_k = k;

  Rng rng(seed);
  std::vector<int> folds(y.size(), 0);
  for (auto& [cls, idx] : by_class) {
    rng.shuffle(idx);
    const int offset = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(k)));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      folds[static_cast<std::size_t>(idx[i])] = static_cast<int>((i + static_cast<std::size_t>(offset)) % static_cast<std::size_t>(k));
    }
  }
  return folds;
}

}  // namespace sensauth
