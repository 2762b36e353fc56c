#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensauth/logging.hpp"
#include "sensauth/types.hpp"

namespace sensauth {

// Column-major sample window: one column per sensor component, shared row
// timestamps.
struct Matrix {
  std::size_t rows = 0;
  int cols = 0;
  std::vector<double> t;
  std::vector<double> data;  // data[col * rows + row]

  std::span<const double> column(int c) const {
    return {data.data() + static_cast<std::size_t>(c) * rows, rows};
  }
};

// Window half-width added on each side of [t0, t1]; samples exactly on the
// boundary are included.
constexpr double kWindowPadSeconds = 1.0;

struct InteractionSegment {
  std::string object_id;
  std::string run_id;
  std::string user_id;
  AttackKind attack = AttackKind::kNone;
  std::string victim_id;
  double t0 = 0.0;
  double t1 = 0.0;
  std::map<SensorKind, Matrix> on_object;
  std::map<std::string, std::map<SensorKind, Matrix>> co_located;
};

struct SegmentationResult {
  std::vector<InteractionSegment> segments;  // sorted by (object_id, t0)
  int dropped = 0;                           // pairs whose on-object window was empty
};

namespace detail {

inline Matrix clip_window(const SensorRecording& rec, double lo, double hi) {
  Matrix m;
  m.cols = component_count(rec.kind);
  const auto begin = std::lower_bound(rec.t.begin(), rec.t.end(), lo);
  const auto end = std::upper_bound(rec.t.begin(), rec.t.end(), hi);
  const std::size_t first = static_cast<std::size_t>(begin - rec.t.begin());
  const std::size_t count = static_cast<std::size_t>(end - begin);
  m.rows = count;
  m.t.assign(rec.t.begin() + static_cast<std::ptrdiff_t>(first),
             rec.t.begin() + static_cast<std::ptrdiff_t>(first + count));
  m.data.resize(count * static_cast<std::size_t>(m.cols));
  for (int c = 0; c < m.cols; ++c) {
    for (std::size_t r = 0; r < count; ++r) {
      m.data[static_cast<std::size_t>(c) * count + r] = rec.value(first + r, c);
    }
  }
  return m;
}

inline std::map<SensorKind, Matrix> clip_device(const Dataset& ds, const std::string& device_id,
                                                double lo, double hi) {
  std::map<SensorKind, Matrix> out;
  for (const auto& rec : ds.recordings) {
    if (rec.device_id != device_id) continue;
    out[rec.kind] = clip_window(rec, lo, hi);
  }
  return out;
}

}  // namespace detail

// One segment per OPEN/CLOSE pair, carrying the padded window from the
// object's own sensors and from every co-located device. Pairs with an
// entirely empty on-object window are dropped and counted.
inline SegmentationResult segment(const Dataset& dataset) {
  SegmentationResult result;
  for (std::size_t i = 0; i < dataset.events.size();) {
    const std::string& dev = dataset.events[i].device_id;
    std::size_t j = i;
    for (; j + 1 < dataset.events.size() && dataset.events[j + 1].device_id == dev; ++j) {
    }
    ++j;  // [i, j) is this device's event range, time-sorted, validated
    for (std::size_t k = i; k + 1 < j + 0; k += 2) {
      const ContactEvent& open = dataset.events[k];
      const ContactEvent& close = dataset.events[k + 1];
      InteractionSegment seg;
      seg.object_id = dev;
      seg.t0 = open.t;
      seg.t1 = close.t;
      seg.run_id = open.run_id;
      if (const RunMetadata* run = dataset.find_run(open.run_id)) {
        seg.user_id = run->user_id;
        seg.attack = run->attack;
        seg.victim_id = run->victim_id;
      }
      const double lo = seg.t0 - kWindowPadSeconds;
      const double hi = seg.t1 + kWindowPadSeconds;
      seg.on_object = detail::clip_device(dataset, dev, lo, hi);

      std::size_t on_rows = 0;
      for (const auto& [kind, m] : seg.on_object) on_rows += m.rows;
      if (on_rows == 0) {
        log_warning("dropping interaction on " + dev + " at t0=" + std::to_string(open.t) +
                    ": empty on-object window");
        ++result.dropped;
        continue;
      }
      if (auto it = dataset.colocation.find(dev); it != dataset.colocation.end()) {
        for (const auto& other : it->second) {
          seg.co_located[other] = detail::clip_device(dataset, other, lo, hi);
        }
      }
      result.segments.push_back(std::move(seg));
    }
    i = j;
  }
  std::stable_sort(result.segments.begin(), result.segments.end(),
                   [](const InteractionSegment& a, const InteractionSegment& b) {
                     if (a.object_id != b.object_id) return a.object_id < b.object_id;
                     return a.t0 < b.t0;
                   });
  return result;
}

// Binary labeling for one victim: positives are the victim's regular
// segments, negatives every other user's regular segments, and attack
// segments targeting the victim come back separately per kind.
struct VictimSegments {
  std::vector<const InteractionSegment*> positives;
  std::vector<const InteractionSegment*> negatives;
  std::map<AttackKind, std::vector<const InteractionSegment*>> attacks;
};

inline VictimSegments segments_by_victim(const std::vector<InteractionSegment>& segments,
                                         const std::string& victim_id) {
  bool known = false;
  VictimSegments out;
  for (const auto& seg : segments) {
    if (seg.user_id == victim_id) known = true;
    if (seg.attack == AttackKind::kNone) {
      if (seg.user_id == victim_id) {
        out.positives.push_back(&seg);
      } else {
        out.negatives.push_back(&seg);
      }
    } else if (seg.victim_id == victim_id) {
      known = true;
      out.attacks[seg.attack].push_back(&seg);
    }
  }
  if (!known) throw ValidationError("unknown victim " + victim_id);
  return out;
}

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json j;
  j["t"] = m.t;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(m.data[static_cast<std::size_t>(c) * m.rows + r]);
    rows.push_back(std::move(row));
  }
  j["values"] = std::move(rows);
  return j;
}

}  // namespace detail

// Debug dump, one segment per line.
inline void write_segments(const std::vector<InteractionSegment>& segments,
                           const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& seg : segments) {
    nlohmann::json j;
    j["object"] = seg.object_id;
    j["run"] = seg.run_id;
    j["user"] = seg.user_id;
    j["attack"] = attack_kind_name(seg.attack);
    if (!seg.victim_id.empty()) j["victim"] = seg.victim_id;
    j["t0"] = seg.t0;
    j["t1"] = seg.t1;
    nlohmann::json on = nlohmann::json::object();
    for (const auto& [kind, m] : seg.on_object) on[sensor_kind_name(kind)] = detail::matrix_to_json(m);
    j["on_object"] = std::move(on);
    nlohmann::json co = nlohmann::json::object();
    for (const auto& [dev, kinds] : seg.co_located) {
      nlohmann::json per = nlohmann::json::object();
      for (const auto& [kind, m] : kinds) per[sensor_kind_name(kind)] = detail::matrix_to_json(m);
      co[dev] = std::move(per);
    }
    j["co_located"] = std::move(co);
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace sensauth
