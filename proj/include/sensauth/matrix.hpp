#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sensauth/features.hpp"
#include "sensauth/types.hpp"

namespace sensauth {

// Plain row-major matrix used by the learners.
struct RowMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  static RowMatrix zeros(std::size_t r, std::size_t c) { return {r, c, std::vector<double>(r * c, 0.0)}; }

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

// Materializes selected (row, column) entries of an object table.
inline RowMatrix gather(const ObjectTable& table, std::span<const std::size_t> row_indices,
                        std::span<const std::size_t> columns) {
  RowMatrix m = RowMatrix::zeros(row_indices.size(), columns.size());
  for (std::size_t r = 0; r < row_indices.size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      m.at(r, c) = table.at(row_indices[r], columns[c]);
    }
  }
  return m;
}

// Per-feature centering and scaling by the population std; features with
// zero spread keep scale 1 so transformed values stay finite.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const RowMatrix& x) {
    Standardizer s;
    s.mean.assign(x.cols, 0.0);
    s.scale.assign(x.cols, 1.0);
    if (x.rows == 0) return s;
    for (std::size_t r = 0; r < x.rows; ++r) {
      for (std::size_t c = 0; c < x.cols; ++c) s.mean[c] += x.at(r, c);
    }
    for (double& m : s.mean) m /= static_cast<double>(x.rows);
    std::vector<double> var(x.cols, 0.0);
    for (std::size_t r = 0; r < x.rows; ++r) {
      for (std::size_t c = 0; c < x.cols; ++c) {
        const double d = x.at(r, c) - s.mean[c];
        var[c] += d * d;
      }
    }
    for (std::size_t c = 0; c < x.cols; ++c) {
      const double sd = std::sqrt(var[c] / static_cast<double>(x.rows));
      if (sd > 0.0) s.scale[c] = sd;
    }
    return s;
  }

  void transform(RowMatrix& x) const {
    for (std::size_t r = 0; r < x.rows; ++r) {
      for (std::size_t c = 0; c < x.cols; ++c) x.at(r, c) = (x.at(r, c) - mean[c]) / scale[c];
    }
  }

  std::vector<double> transform_row(std::span<const double> row) const {
    std::vector<double> out(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) out[c] = (row[c] - mean[c]) / scale[c];
    return out;
  }
};

}  // namespace sensauth
