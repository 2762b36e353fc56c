#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sensauth/types.hpp"

namespace sensauth {

namespace detail {

// Scanner for the canonical single-line JSON emitted by this project. Any
// deviation (reordered keys, whitespace, escapes) falls back to a full JSON
// parse, so the fast path is purely an optimization for multi-million-line
// recordings.
class LineCursor {
 public:
  explicit LineCursor(std::string_view s) : p_(s.data()), end_(s.data() + s.size()) {}

  bool lit(std::string_view l) {
    if (static_cast<std::size_t>(end_ - p_) < l.size()) return false;
    if (std::memcmp(p_, l.data(), l.size()) != 0) return false;
    p_ += l.size();
    return true;
  }

  bool number(double& out) {
    auto [ptr, ec] = std::from_chars(p_, end_, out);
    if (ec != std::errc()) return false;
    p_ = ptr;
    return true;
  }

  // String content up to the closing quote; fails on escapes.
  bool bare_string(std::string& out) {
    const char* q = p_;
    while (q < end_ && *q != '"' && *q != '\\') ++q;
    if (q >= end_ || *q != '"') return false;
    out.assign(p_, q);
    p_ = q + 1;
    return true;
  }

  bool peek(char c) const { return p_ < end_ && *p_ == c; }
  bool done() const { return p_ == end_; }

 private:
  const char* p_;
  const char* end_;
};

inline void append_json_string(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

inline void append_double(std::string& out, double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

// Sensor values are carried at float precision: shorter lines, and the
// quantization applied at load time makes serialize(load(x)) an exact
// fixed point.
inline void append_value(std::string& out, double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, static_cast<float>(v));
  out.append(buf, r.ptr);
}

struct StreamAccumulator {
  SensorRecording rec;
  void append(double t, const double* v, int comps, const char* file, std::size_t line_no) {
    if (!rec.t.empty() && t <= rec.t.back()) {
      throw ValidationError(std::string(file) + ":" + std::to_string(line_no) +
                            ": non-monotonic timestamps for device " + rec.device_id);
    }
    for (int c = 0; c < comps; ++c) {
      if (!std::isfinite(v[c])) {
        throw ValidationError(std::string(file) + ":" + std::to_string(line_no) +
                              ": non-finite sample");
      }
    }
    rec.t.push_back(t);
    for (int c = 0; c < comps; ++c) rec.values.push_back(static_cast<double>(static_cast<float>(v[c])));
  }
};

}  // namespace detail

inline CoLocationMap default_colocation(const Dataset& dataset) {
  const auto devices = dataset.device_ids();
  if (devices.size() < 2) {
    throw ValidationError("default co-location needs at least 2 devices, have " +
                          std::to_string(devices.size()));
  }
  CoLocationMap map;
  for (const auto& obj : devices) {
    std::vector<std::string> others;
    for (const auto& dev : devices) {
      if (dev != obj) others.push_back(dev);
    }
    map[obj] = std::move(others);
  }
  return map;
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string content;
  in.seekg(0, std::ios::end);
  content.resize(static_cast<std::size_t>(in.tellg()));
  in.seekg(0);
  in.read(content.data(), static_cast<std::streamsize>(content.size()));
  return content;
}

inline std::vector<RunMetadata> parse_runs(const std::string& path) {
  const std::string content = read_file(path);
  std::map<std::string, RunMetadata> runs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": malformed line: " + e.what());
    }
    RunMetadata run;
    try {
      run.run_id = j.at("run").get<std::string>();
      run.user_id = j.at("user").get<std::string>();
      const auto attack = attack_kind_from(j.at("attack").get<std::string>());
      if (!attack) throw ValidationError("unknown attack kind");
      run.attack = *attack;
      if (j.contains("victim")) run.victim_id = j.at("victim").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": malformed line: " + e.what());
    }
    if (run.attack != AttackKind::kNone) {
      if (run.victim_id.empty()) {
        throw ValidationError(path + ":" + std::to_string(line_no) + ": attack run " + run.run_id +
                              " missing victim");
      }
      if (run.victim_id == run.user_id) {
        throw ValidationError(path + ":" + std::to_string(line_no) + ": attack run " + run.run_id +
                              " victim equals user");
      }
    }
    if (!runs.emplace(run.run_id, run).second) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": duplicate run id " + run.run_id);
    }
  }
  std::vector<RunMetadata> out;
  out.reserve(runs.size());
  for (auto& [id, run] : runs) out.push_back(std::move(run));
  return out;
}

}  // namespace detail

// Parses and validates the three input files into an immutable dataset.
// colocation_path may be empty; the full pairwise map is derived then.
inline Dataset load_dataset(const std::string& recordings_path, const std::string& metadata_path,
                            const std::string& colocation_path = {}) {
  Dataset ds;
  ds.runs = detail::parse_runs(metadata_path);

  const std::string content = detail::read_file(recordings_path);
  std::map<std::pair<std::string, SensorKind>, detail::StreamAccumulator> streams;
  std::vector<ContactEvent> events;
  const char* fname = recordings_path.c_str();

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_content = false;
  std::string device, token;
  double vbuf[3];
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    detail::LineCursor cur(line);
    if (cur.lit("{\"device\":\"") && cur.bare_string(device)) {
      if (cur.lit(",\"sensor\":\"")) {
        double t = 0.0;
        if (cur.bare_string(token) && cur.lit(",\"t\":") && cur.number(t) && cur.lit(",\"v\":[")) {
          const auto kind = sensor_kind_from(token);
          if (kind) {
            const int comps = component_count(*kind);
            int got = 0;
            bool ok = true;
            while (ok && got < comps) {
              if (!cur.number(vbuf[got])) {
                ok = false;
                break;
              }
              ++got;
              if (got < comps) ok = cur.lit(",");
            }
            if (ok && cur.lit("]}") && cur.done()) {
              auto& acc = streams[{device, *kind}];
              if (acc.rec.t.empty()) {
                acc.rec.device_id = device;
                acc.rec.kind = *kind;
              }
              acc.append(t, vbuf, comps, fname, line_no);
              saw_content = true;
              continue;
            }
          }
        }
      } else if (cur.lit(",\"event\":\"")) {
        double t = 0.0;
        if (cur.bare_string(token) && cur.lit(",\"t\":") && cur.number(t)) {
          ContactEvent ev;
          ev.device_id = device;
          ev.t = t;
          bool ok = token == "open" || token == "close";
          ev.kind = token == "open" ? ContactKind::kOpen : ContactKind::kClose;
          if (ok && cur.lit(",\"run\":\"")) ok = cur.bare_string(ev.run_id) && cur.lit("}") && cur.done();
          else if (ok) ok = cur.lit("}") && cur.done();
          if (ok) {
            events.push_back(std::move(ev));
            saw_content = true;
            continue;
          }
        }
      }
    }

    // Fallback: full JSON parse of this line.
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(recordings_path + ":" + std::to_string(line_no) +
                            ": malformed line: " + e.what());
    }
    try {
      if (j.contains("epoch") || j.contains("session")) {
        if (saw_content) {
          throw ValidationError(recordings_path + ":" + std::to_string(line_no) +
                                ": header after content");
        }
        ds.epoch = j.value("epoch", 0.0);
        ds.session_id = j.value("session", std::string{});
        continue;
      }
      if (j.contains("sensor")) {
        const auto kind = sensor_kind_from(j.at("sensor").get<std::string>());
        if (!kind) {
          throw ValidationError(recordings_path + ":" + std::to_string(line_no) +
                                ": unknown sensor kind");
        }
        const auto& arr = j.at("v");
        const int comps = component_count(*kind);
        if (!arr.is_array() || static_cast<int>(arr.size()) != comps) {
          throw ValidationError(recordings_path + ":" + std::to_string(line_no) +
                                ": wrong component count for " + sensor_kind_name(*kind));
        }
        double vals[3];
        for (int c = 0; c < comps; ++c) vals[c] = arr[static_cast<std::size_t>(c)].get<double>();
        const std::string dev = j.at("device").get<std::string>();
        auto& acc = streams[{dev, *kind}];
        if (acc.rec.t.empty()) {
          acc.rec.device_id = dev;
          acc.rec.kind = *kind;
        }
        acc.append(j.at("t").get<double>(), vals, comps, fname, line_no);
        saw_content = true;
        continue;
      }
      if (j.contains("event")) {
        ContactEvent ev;
        ev.device_id = j.at("device").get<std::string>();
        const std::string kind_str = j.at("event").get<std::string>();
        if (kind_str != "open" && kind_str != "close") {
          throw ValidationError(recordings_path + ":" + std::to_string(line_no) +
                                ": unknown event kind " + kind_str);
        }
        ev.kind = kind_str == "open" ? ContactKind::kOpen : ContactKind::kClose;
        ev.t = j.at("t").get<double>();
        if (j.contains("run")) ev.run_id = j.at("run").get<std::string>();
        events.push_back(std::move(ev));
        saw_content = true;
        continue;
      }
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(recordings_path + ":" + std::to_string(line_no) +
                            ": malformed line: " + e.what());
    }
    throw ValidationError(recordings_path + ":" + std::to_string(line_no) + ": malformed line");
  }

  for (auto& [key, acc] : streams) ds.recordings.push_back(std::move(acc.rec));

  // Resolve run references. A dataset with exactly one run may omit the run
  // field on events.
  for (auto& ev : events) {
    if (ev.run_id.empty()) {
      if (ds.runs.size() == 1) {
        ev.run_id = ds.runs.front().run_id;
      } else {
        throw ValidationError(recordings_path + ": contact event on " + ev.device_id + " at t=" +
                              std::to_string(ev.t) + " missing run reference");
      }
    } else if (!ds.find_run(ev.run_id)) {
      throw ValidationError(recordings_path + ": unknown run reference " + ev.run_id);
    }
  }

  std::stable_sort(events.begin(), events.end(), [](const ContactEvent& a, const ContactEvent& b) {
    if (a.device_id != b.device_id) return a.device_id < b.device_id;
    return a.t < b.t;
  });
  // OPEN/CLOSE must alternate per device, starting with OPEN and ending with
  // CLOSE.
  for (std::size_t i = 0; i < events.size();) {
    const std::string& dev = events[i].device_id;
    bool expect_open = true;
    std::size_t j = i;
    for (; j < events.size() && events[j].device_id == dev; ++j) {
      const bool is_open = events[j].kind == ContactKind::kOpen;
      if (is_open != expect_open) {
        throw ValidationError("unmatched contact event on device " + dev + " at t=" +
                              std::to_string(events[j].t));
      }
      expect_open = !expect_open;
    }
    if (!expect_open) {
      throw ValidationError("unmatched contact event on device " + dev + ": OPEN without CLOSE");
    }
    i = j;
  }
  ds.events = std::move(events);

  if (!colocation_path.empty() && std::filesystem::exists(colocation_path)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(detail::read_file(colocation_path));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(colocation_path + ": malformed JSON: " + e.what());
    }
    const auto devices = ds.device_ids();
    auto known = [&](const std::string& id) {
      return std::binary_search(devices.begin(), devices.end(), id);
    };
    for (const auto& [obj, list] : j.items()) {
      if (!known(obj)) throw ValidationError(colocation_path + ": unknown device reference " + obj);
      std::vector<std::string> ids;
      for (const auto& d : list) {
        const std::string id = d.get<std::string>();
        if (id == obj) throw ValidationError(colocation_path + ": " + obj + " co-located with itself");
        if (!known(id)) throw ValidationError(colocation_path + ": unknown device reference " + id);
        ids.push_back(id);
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      ds.colocation[obj] = std::move(ids);
    }
  } else {
    ds.colocation = default_colocation(ds);
  }
  return ds;
}

// Writes the dataset back out in the canonical on-disk layout. Streams are
// grouped by (device, sensor); events come right after the header so small
// fixtures stay readable.
inline void write_recordings(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  std::string buf;
  buf.reserve(1 << 22);
  auto flush_if_large = [&] {
    if (buf.size() > (1 << 22)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  };

  buf += "{\"session\":";
  detail::append_json_string(buf, ds.session_id);
  buf += ",\"epoch\":";
  detail::append_double(buf, ds.epoch);
  buf += "}\n";

  for (const auto& ev : ds.events) {
    buf += "{\"device\":";
    detail::append_json_string(buf, ev.device_id);
    buf += ev.kind == ContactKind::kOpen ? ",\"event\":\"open\"" : ",\"event\":\"close\"";
    buf += ",\"t\":";
    detail::append_double(buf, ev.t);
    if (!ev.run_id.empty()) {
      buf += ",\"run\":";
      detail::append_json_string(buf, ev.run_id);
    }
    buf += "}\n";
  }

  for (const auto& rec : ds.recordings) {
    const int comps = component_count(rec.kind);
    std::string prefix = "{\"device\":";
    detail::append_json_string(prefix, rec.device_id);
    prefix += ",\"sensor\":\"";
    prefix += sensor_kind_name(rec.kind);
    prefix += "\",\"t\":";
    for (std::size_t i = 0; i < rec.t.size(); ++i) {
      buf += prefix;
      detail::append_double(buf, rec.t[i]);
      buf += ",\"v\":[";
      for (int c = 0; c < comps; ++c) {
        if (c) buf.push_back(',');
        detail::append_value(buf, rec.value(i, c));
      }
      buf += "]}\n";
      flush_if_large();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing " + path);
}

inline void write_runs(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  std::string buf;
  for (const auto& run : ds.runs) {
    buf += "{\"run\":";
    detail::append_json_string(buf, run.run_id);
    buf += ",\"user\":";
    detail::append_json_string(buf, run.user_id);
    buf += ",\"attack\":\"";
    buf += attack_kind_name(run.attack);
    buf += "\"";
    if (!run.victim_id.empty()) {
      buf += ",\"victim\":";
      detail::append_json_string(buf, run.victim_id);
    }
    buf += "}\n";
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing " + path);
}

inline void write_colocation(const CoLocationMap& map, const std::string& path) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [obj, list] : map) j[obj] = list;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path);
}

inline void write_dataset(const Dataset& ds, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir);
  write_recordings(ds, (base / "recordings.jsonl").string());
  write_runs(ds, (base / "runs.jsonl").string());
  write_colocation(ds.colocation, (base / "colocation.json").string());
}

}  // namespace sensauth
