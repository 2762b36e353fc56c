#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sensauth/features.hpp"
#include "sensauth/types.hpp"

namespace sensauth {

constexpr int kMiBins = 10;
constexpr int kTopKFeatures = 20;

// Equal-frequency discretization into at most max_bins bins. Purely
// rank-based: any strictly increasing transform of the values produces the
// same bin assignment. Fewer than max_bins distinct values get one bin per
// distinct value.
inline std::vector<int> equal_frequency_bins(std::span<const double> values, int max_bins = kMiBins) {
  const std::size_t n = values.size();
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<int> bins(n);
  if (static_cast<int>(sorted.size()) <= max_bins) {
    for (std::size_t i = 0; i < n; ++i) {
      bins[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), values[i]) -
                                 sorted.begin());
    }
    return bins;
  }

  // Bin edges at the equal-count quantile positions; an edge is the first
  // value of its bin, duplicates merged.
  std::vector<double> all(values.begin(), values.end());
  std::sort(all.begin(), all.end());
  std::vector<double> edges;
  for (int q = 1; q < max_bins; ++q) {
    const std::size_t pos = n * static_cast<std::size_t>(q) / static_cast<std::size_t>(max_bins);
    const double e = all[pos];
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }
  for (std::size_t i = 0; i < n; ++i) {
    bins[i] = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), values[i]) -
                               edges.begin());
  }
  return bins;
}

namespace detail {

// Remaps arbitrary int labels to dense 0..k-1 ids (order of first occurrence
// in sorted label value order).
inline std::vector<int> dense_ids(std::span<const int> labels, int& count) {
  std::vector<int> uniq(labels.begin(), labels.end());
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  count = static_cast<int>(uniq.size());
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = static_cast<int>(std::lower_bound(uniq.begin(), uniq.end(), labels[i]) - uniq.begin());
  }
  return out;
}

}  // namespace detail

inline double entropy_nats(std::span<const int> labels) {
  int classes = 0;
  const auto ids = detail::dense_ids(labels, classes);
  std::vector<std::size_t> counts(static_cast<std::size_t>(classes), 0);
  for (int id : ids) ++counts[static_cast<std::size_t>(id)];
  const double n = static_cast<double>(labels.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

// Plug-in mutual information (nats) between the label and the feature
// discretized into equal-frequency bins.
inline double mutual_information(std::span<const double> feature, std::span<const int> labels,
                                 int max_bins = kMiBins) {
  if (feature.size() != labels.size()) {
    throw ValidationError("mutual_information: length mismatch");
  }
  if (feature.size() < 2) {
    throw ValidationError("mutual_information: need at least 2 samples");
  }
  const auto bins = equal_frequency_bins(feature, max_bins);
  int n_classes = 0;
  const auto ids = detail::dense_ids(labels, n_classes);
  const int n_bins = 1 + *std::max_element(bins.begin(), bins.end());

  std::vector<std::size_t> joint(static_cast<std::size_t>(n_bins) * static_cast<std::size_t>(n_classes), 0);
  std::vector<std::size_t> bin_tot(static_cast<std::size_t>(n_bins), 0);
  std::vector<std::size_t> cls_tot(static_cast<std::size_t>(n_classes), 0);
  for (std::size_t i = 0; i < bins.size(); ++i) {
    ++joint[static_cast<std::size_t>(bins[i]) * static_cast<std::size_t>(n_classes) +
            static_cast<std::size_t>(ids[i])];
    ++bin_tot[static_cast<std::size_t>(bins[i])];
    ++cls_tot[static_cast<std::size_t>(ids[i])];
  }
  const double n = static_cast<double>(feature.size());
  double mi = 0.0;
  for (int b = 0; b < n_bins; ++b) {
    for (int c = 0; c < n_classes; ++c) {
      const std::size_t cnt = joint[static_cast<std::size_t>(b) * static_cast<std::size_t>(n_classes) +
                                    static_cast<std::size_t>(c)];
      if (cnt == 0) continue;
      const double p = static_cast<double>(cnt) / n;
      mi += p * std::log(static_cast<double>(cnt) * n /
                         (static_cast<double>(bin_tot[static_cast<std::size_t>(b)]) *
                          static_cast<double>(cls_tot[static_cast<std::size_t>(c)])));
    }
  }
  return std::max(mi, 0.0);
}

// Relative mutual information: the fraction of label entropy explained by the
// binned feature, clamped to [0, 1].
inline double rmi(std::span<const double> feature, std::span<const int> labels,
                  int max_bins = kMiBins) {
  const double h = entropy_nats(labels);
  if (h <= 0.0) throw ValidationError("rmi: zero label entropy");
  return std::clamp(mutual_information(feature, labels, max_bins) / h, 0.0, 1.0);
}

struct MIScore {
  FeatureName feature;
  double mi_nats = 0.0;
  double rmi = 0.0;
};

struct SelectedFeatureSet {
  std::string object_id;
  Config config = Config::kOnObject;
  std::vector<FeatureName> features;        // descending MI, ties by name
  std::vector<std::size_t> table_columns;   // matching indices into the ObjectTable schema
};

// Top-k MI ranking over the config's columns of `table`, computed on the
// given row subset (the training partition).
inline SelectedFeatureSet select_top_k(const ObjectTable& table, Config config,
                                       std::span<const std::size_t> row_indices,
                                       std::span<const int> labels, int k = kTopKFeatures) {
  const auto cols = table.column_indices(config);
  if (cols.empty()) {
    throw ValidationError("select_top_k: no feature columns for " + table.object_id);
  }
  std::vector<double> scratch(row_indices.size());
  std::vector<std::pair<double, std::size_t>> ranked;  // (mi, schema column)
  ranked.reserve(cols.size());
  for (std::size_t c : cols) {
    for (std::size_t i = 0; i < row_indices.size(); ++i) scratch[i] = table.at(row_indices[i], c);
    ranked.emplace_back(mutual_information(scratch, labels), c);
  }
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return table.schema[a.second] < table.schema[b.second];
  });
  SelectedFeatureSet out;
  out.object_id = table.object_id;
  out.config = config;
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
  for (std::size_t i = 0; i < take; ++i) {
    out.features.push_back(table.schema[ranked[i].second]);
    out.table_columns.push_back(ranked[i].second);
  }
  return out;
}

// Report column order follows the usual table layout.
constexpr std::array<SensorKind, 4> kRmiReportOrder = {SensorKind::kAcc, SensorKind::kMag,
                                                       SensorKind::kGyro, SensorKind::kMicSpl};

// Per (object, sensor kind): max RMI over that sensor's features, in percent.
// Uses all non-attack rows; labels are user ids.
inline std::map<std::string, std::array<double, 4>> rmi_report(
    const std::map<std::string, ObjectTable>& tables, Config config) {
  std::map<std::string, std::array<double, 4>> report;
  for (const auto& [object_id, table] : tables) {
    std::vector<std::size_t> rows;
    std::vector<std::string> users;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      if (table.rows[r].attack != AttackKind::kNone) continue;
      rows.push_back(r);
      users.push_back(table.rows[r].user_id);
    }
    std::vector<std::string> uniq = users;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    std::vector<int> labels(users.size());
    for (std::size_t i = 0; i < users.size(); ++i) {
      labels[i] = static_cast<int>(std::lower_bound(uniq.begin(), uniq.end(), users[i]) - uniq.begin());
    }

    std::array<double, 4> best = {0.0, 0.0, 0.0, 0.0};
    std::vector<double> scratch(rows.size());
    for (std::size_t c : table.column_indices(config)) {
      for (std::size_t i = 0; i < rows.size(); ++i) scratch[i] = table.at(rows[i], c);
      const double score = rmi(scratch, labels);
      for (std::size_t k = 0; k < kRmiReportOrder.size(); ++k) {
        if (table.schema[c].kind == kRmiReportOrder[k]) best[k] = std::max(best[k], score);
      }
    }
    for (double& v : best) v *= 100.0;
    report[object_id] = best;
  }
  return report;
}

inline void write_rmi_csv(const std::map<std::string, std::array<double, 4>>& report,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "object,ACC,MAG,GYRO,MIC\n";
  char buf[64];
  for (const auto& [object_id, values] : report) {
    out << object_id;
    for (double v : values) {
      const int len = std::snprintf(buf, sizeof buf, ",%.2f", v);
      out.write(buf, len);
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace sensauth
