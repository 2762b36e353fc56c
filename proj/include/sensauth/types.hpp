#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sensauth {

// Error taxonomy maps onto the CLI exit codes: validation 2, training 3, io 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct TrainingError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

enum class SensorKind : std::uint8_t { kAcc = 0, kGyro = 1, kMag = 2, kMicSpl = 3 };
constexpr int kSensorKindCount = 4;

constexpr int component_count(SensorKind kind) {
  return kind == SensorKind::kMicSpl ? 1 : 3;
}

inline const char* sensor_kind_name(SensorKind kind) {
  switch (kind) {
    case SensorKind::kAcc: return "ACC";
    case SensorKind::kGyro: return "GYRO";
    case SensorKind::kMag: return "MAG";
    case SensorKind::kMicSpl: return "MIC_SPL";
  }
  return "?";
}

inline std::optional<SensorKind> sensor_kind_from(const std::string& name) {
  if (name == "ACC") return SensorKind::kAcc;
  if (name == "GYRO") return SensorKind::kGyro;
  if (name == "MAG") return SensorKind::kMag;
  if (name == "MIC_SPL") return SensorKind::kMicSpl;
  return std::nullopt;
}

enum class AttackKind : std::uint8_t { kNone = 0, kZeroEffort = 1, kVideo = 2, kInPerson = 3 };

inline const char* attack_kind_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::kNone: return "none";
    case AttackKind::kZeroEffort: return "zero_effort";
    case AttackKind::kVideo: return "video";
    case AttackKind::kInPerson: return "in_person";
  }
  return "?";
}

inline std::optional<AttackKind> attack_kind_from(const std::string& name) {
  if (name == "none") return AttackKind::kNone;
  if (name == "zero_effort") return AttackKind::kZeroEffort;
  if (name == "video") return AttackKind::kVideo;
  if (name == "in_person") return AttackKind::kInPerson;
  return std::nullopt;
}

enum class Config : std::uint8_t { kOnObject = 0, kOffObject = 1, kCombined = 2 };

inline const char* config_name(Config config) {
  switch (config) {
    case Config::kOnObject: return "onobject";
    case Config::kOffObject: return "offobject";
    case Config::kCombined: return "combined";
  }
  return "?";
}

inline std::optional<Config> config_from(const std::string& name) {
  if (name == "onobject") return Config::kOnObject;
  if (name == "offobject") return Config::kOffObject;
  if (name == "combined") return Config::kCombined;
  return std::nullopt;
}

// One sensor stream of one device. Timestamps are seconds since the session
// epoch, strictly increasing; values are row-major, component_count(kind)
// entries per timestamp.
struct SensorRecording {
  std::string device_id;
  SensorKind kind = SensorKind::kAcc;
  std::vector<double> t;
  std::vector<double> values;

  std::size_t sample_count() const { return t.size(); }
  double value(std::size_t row, int comp) const {
    return values[row * static_cast<std::size_t>(component_count(kind)) +
                  static_cast<std::size_t>(comp)];
  }
};

enum class ContactKind : std::uint8_t { kOpen = 0, kClose = 1 };

struct ContactEvent {
  std::string device_id;
  ContactKind kind = ContactKind::kOpen;
  double t = 0.0;
  std::string run_id;  // required unless the dataset declares exactly one run
};

struct RunMetadata {
  std::string run_id;
  std::string user_id;
  AttackKind attack = AttackKind::kNone;
  std::string victim_id;  // set iff attack != kNone
};

// object_id -> sorted device ids whose sensors count as co-located.
using CoLocationMap = std::map<std::string, std::vector<std::string>>;

struct Dataset {
  double epoch = 0.0;
  std::string session_id;
  std::vector<SensorRecording> recordings;  // sorted by (device_id, kind)
  std::vector<ContactEvent> events;         // sorted by (device_id, t)
  std::vector<RunMetadata> runs;            // sorted by run_id
  CoLocationMap colocation;

  std::vector<std::string> device_ids() const {
    std::set<std::string> ids;
    for (const auto& r : recordings) ids.insert(r.device_id);
    for (const auto& e : events) ids.insert(e.device_id);
    return {ids.begin(), ids.end()};
  }

  // Devices that have contact events, i.e. objects users interact with.
  std::vector<std::string> object_ids() const {
    std::set<std::string> ids;
    for (const auto& e : events) ids.insert(e.device_id);
    return {ids.begin(), ids.end()};
  }

  const SensorRecording* find_recording(const std::string& device_id, SensorKind kind) const {
    for (const auto& r : recordings) {
      if (r.device_id == device_id && r.kind == kind) return &r;
    }
    return nullptr;
  }

  const RunMetadata* find_run(const std::string& run_id) const {
    for (const auto& r : runs) {
      if (r.run_id == run_id) return &r;
    }
    return nullptr;
  }

  // Sensor kinds each device records anywhere in the dataset; fixes the
  // feature schema so every segment of an object yields the same vector.
  std::map<std::string, std::vector<SensorKind>> sensor_inventory() const {
    std::map<std::string, std::vector<SensorKind>> inv;
    for (const auto& r : recordings) {
      auto& kinds = inv[r.device_id];
      bool seen = false;
      for (SensorKind k : kinds) seen = seen || k == r.kind;
      if (!seen) kinds.push_back(r.kind);
    }
    for (auto& [id, kinds] : inv) {
      std::sort(kinds.begin(), kinds.end());
    }
    return inv;
  }
};

}  // namespace sensauth
