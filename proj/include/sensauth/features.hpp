#pragma once

#include <algorithm>
#include <charconv>
#include <compare>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sensauth/feature_functions.hpp"
#include "sensauth/segment.hpp"
#include "sensauth/types.hpp"

namespace sensauth {

// Identity of one extracted value: which device, which sensor component,
// which function. Ordering is the canonical feature order everywhere.
struct FeatureName {
  std::string device_id;
  SensorKind kind = SensorKind::kAcc;
  int component = 0;
  FeatureFn fn = FeatureFn::kMin;

  friend bool operator==(const FeatureName&, const FeatureName&) = default;
  friend auto operator<=>(const FeatureName&, const FeatureName&) = default;

  std::string str() const {
    std::string s = device_id;
    s += '/';
    s += sensor_kind_name(kind);
    s += '/';
    s += std::to_string(component);
    s += '/';
    s += feature_fn_name(fn);
    return s;
  }

  static std::optional<FeatureName> parse(const std::string& text) {
    const auto a = text.find('/');
    if (a == std::string::npos) return std::nullopt;
    const auto b = text.find('/', a + 1);
    if (b == std::string::npos) return std::nullopt;
    const auto c = text.find('/', b + 1);
    if (c == std::string::npos) return std::nullopt;
    FeatureName name;
    name.device_id = text.substr(0, a);
    const auto kind = sensor_kind_from(text.substr(a + 1, b - a - 1));
    if (!kind) return std::nullopt;
    name.kind = *kind;
    const std::string comp = text.substr(b + 1, c - b - 1);
    auto [ptr, ec] = std::from_chars(comp.data(), comp.data() + comp.size(), name.component);
    if (ec != std::errc() || ptr != comp.data() + comp.size()) return std::nullopt;
    if (name.component < 0 || name.component >= component_count(name.kind)) return std::nullopt;
    const auto fn = feature_fn_from(text.substr(c + 1));
    if (!fn) return std::nullopt;
    name.fn = *fn;
    return name;
  }
};

using SensorInventory = std::map<std::string, std::vector<SensorKind>>;

// The ordered feature-name list for (object, config). Derived from the
// dataset-wide sensor inventory so every segment of an object produces the
// same fixed-length vector.
inline std::vector<FeatureName> build_schema(const std::string& object_id, Config config,
                                             const SensorInventory& inventory,
                                             const CoLocationMap& colocation) {
  std::vector<std::string> devices;
  if (config != Config::kOffObject) devices.push_back(object_id);
  if (config != Config::kOnObject) {
    if (auto it = colocation.find(object_id); it != colocation.end()) {
      for (const auto& dev : it->second) devices.push_back(dev);
    }
  }
  std::vector<FeatureName> names;
  for (const auto& dev : devices) {
    auto it = inventory.find(dev);
    if (it == inventory.end()) continue;
    for (SensorKind kind : it->second) {
      for (int comp = 0; comp < component_count(kind); ++comp) {
        for (int f = 0; f < kFeatureFnCount; ++f) {
          names.push_back({dev, kind, comp, static_cast<FeatureFn>(f)});
        }
      }
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

namespace detail {

inline const Matrix* find_matrix(const InteractionSegment& seg, const std::string& device_id,
                                 SensorKind kind) {
  if (device_id == seg.object_id) {
    auto it = seg.on_object.find(kind);
    return it == seg.on_object.end() ? nullptr : &it->second;
  }
  auto dev = seg.co_located.find(device_id);
  if (dev == seg.co_located.end()) return nullptr;
  auto it = dev->second.find(kind);
  return it == dev->second.end() ? nullptr : &it->second;
}

}  // namespace detail

// Values for `names` (which must be canonically sorted, as build_schema
// returns). Columns absent from the segment yield the degenerate value 0 for
// every function so row width never varies.
inline std::vector<double> extract_row(const InteractionSegment& seg,
                                       std::span<const FeatureName> names) {
  std::vector<double> out(names.size(), 0.0);
  std::size_t i = 0;
  while (i < names.size()) {
    // names sharing (device, kind, component) are contiguous
    std::size_t j = i;
    while (j < names.size() && names[j].device_id == names[i].device_id &&
           names[j].kind == names[i].kind && names[j].component == names[i].component) {
      ++j;
    }
    const Matrix* m = detail::find_matrix(seg, names[i].device_id, names[i].kind);
    if (m != nullptr && m->rows > 0 && names[i].component < m->cols) {
      const auto col = m->column(names[i].component);
      for (std::size_t k = i; k < j; ++k) out[k] = apply_feature_fn(names[k].fn, col);
    }
    i = j;
  }
  return out;
}

struct FeatureVector {
  Config config = Config::kOnObject;
  std::vector<FeatureName> names;
  std::vector<double> values;
};

// Schema is derived from the segment's own sources; use build_schema +
// extract_row when rows must align across segments.
inline FeatureVector extract(const InteractionSegment& seg, Config config) {
  SensorInventory inventory;
  for (const auto& [kind, m] : seg.on_object) inventory[seg.object_id].push_back(kind);
  CoLocationMap colocation;
  auto& co = colocation[seg.object_id];
  for (const auto& [dev, kinds] : seg.co_located) {
    co.push_back(dev);
    for (const auto& [kind, m] : kinds) inventory[dev].push_back(kind);
  }
  FeatureVector fv;
  fv.config = config;
  fv.names = build_schema(seg.object_id, config, inventory, colocation);
  if (fv.names.empty()) {
    throw ValidationError("segment of " + seg.object_id + " has no sources in scope for config " +
                          config_name(config));
  }
  fv.values = extract_row(seg, fv.names);
  return fv;
}

struct SegmentKey {
  std::string run_id;
  std::string user_id;
  AttackKind attack = AttackKind::kNone;
  std::string victim_id;
  double t0 = 0.0;
  double t1 = 0.0;
};

// All feature values for one object's segments over the combined (on + off)
// schema; the per-config views are column subsets.
struct ObjectTable {
  std::string object_id;
  std::vector<FeatureName> schema;
  std::vector<std::size_t> on_columns;
  std::vector<std::size_t> off_columns;
  std::vector<SegmentKey> rows;
  std::vector<double> values;  // rows.size() x schema.size(), row-major

  std::size_t width() const { return schema.size(); }
  double at(std::size_t row, std::size_t col) const { return values[row * width() + col]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * width(), width()}; }

  std::vector<std::size_t> column_indices(Config config) const {
    if (config == Config::kOnObject) return on_columns;
    if (config == Config::kOffObject) return off_columns;
    std::vector<std::size_t> all(width());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
};

inline std::map<std::string, ObjectTable> build_object_tables(const SegmentationResult& segmented,
                                                              const Dataset& dataset) {
  const SensorInventory inventory = dataset.sensor_inventory();
  std::map<std::string, ObjectTable> tables;
  for (const auto& seg : segmented.segments) {
    auto [it, inserted] = tables.try_emplace(seg.object_id);
    ObjectTable& table = it->second;
    if (inserted) {
      table.object_id = seg.object_id;
      table.schema = build_schema(seg.object_id, Config::kCombined, inventory, dataset.colocation);
      for (std::size_t c = 0; c < table.schema.size(); ++c) {
        if (table.schema[c].device_id == seg.object_id) {
          table.on_columns.push_back(c);
        } else {
          table.off_columns.push_back(c);
        }
      }
    }
    table.rows.push_back({seg.run_id, seg.user_id, seg.attack, seg.victim_id, seg.t0, seg.t1});
    auto row = extract_row(seg, table.schema);
    table.values.insert(table.values.end(), row.begin(), row.end());
  }
  return tables;
}

inline void write_feature_csv(const ObjectTable& table, Config config, const std::string& path) {
  const auto cols = table.column_indices(config);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  std::string buf = "run_id,user_id,object_id,label";
  for (std::size_t c : cols) {
    buf += ',';
    buf += table.schema[c].str();
  }
  buf += '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const SegmentKey& key = table.rows[r];
    buf += key.run_id;
    buf += ',';
    buf += key.user_id;
    buf += ',';
    buf += table.object_id;
    buf += ',';
    if (key.attack == AttackKind::kNone) {
      buf += key.user_id;
    } else {
      buf += "attack:";
      buf += attack_kind_name(key.attack);
      buf += ':';
      buf += key.victim_id;
    }
    for (std::size_t c : cols) {
      buf += ',';
      char tmp[32];
      auto res = std::to_chars(tmp, tmp + sizeof tmp, table.at(r, c));
      buf.append(tmp, res.ptr);
    }
    buf += '\n';
    if (buf.size() > (1 << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace sensauth
