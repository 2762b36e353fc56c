#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensauth/rng.hpp"
#include "sensauth/types.hpp"

namespace sensauth {

constexpr double kImuRateHz = 100.0;
constexpr double kSplRateHz = 20.0;
constexpr double kSplFloorDb = 35.0;
constexpr double kEmitPadSeconds = 1.1;  // emitted margin around [t0, t1]

// How one user handles one object.
struct ObjectBehavior {
  double duration_mean = 3.0;
  double duration_std = 0.1;
  double gyro_amp = 1.5;                          // rad/s
  std::array<double, 3> gyro_axis_mix = {1, 0, 0};
  double accel_amp = 1.5;                         // m/s^2
  double spl_peak_db = 65.0;
  double spl_decay = 4.0;                         // 1/s
  double gap_mean = 3.0;                          // pause before the interaction
};

struct UserProfile {
  std::string user_id;
  double handedness = 0.0;  // [-1, 1]
  std::vector<ObjectBehavior> per_object;
};

struct AttackSpec {
  UserProfile attacker;
  UserProfile victim;
  double fidelity = 0.7;  // alpha: 0 = pure attacker, 1 = perfect imitation
  AttackKind kind = AttackKind::kVideo;
  double jitter = 0.05;  // sigma_a, multiplicative on every profile parameter
};

constexpr double kVideoFidelity = 0.7;
constexpr double kInPersonFidelity = 0.6;
constexpr double kVideoJitter = 0.05;
constexpr double kInPersonJitter = 0.10;  // doubled relative to video

// Parameter spreads scale with `spread` around the range midpoints, which is
// the calibration knob for inter-user separability.
inline std::vector<UserProfile> sample_profiles(int n_users, int n_objects, std::uint64_t seed,
                                                double spread = 1.0) {
  Rng rng(derive_seed(seed, "profiles"));
  auto draw = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo) * spread;
    return mid + rng.uniform(-half, half);
  };
  std::vector<UserProfile> profiles;
  profiles.reserve(static_cast<std::size_t>(n_users));
  for (int u = 0; u < n_users; ++u) {
    UserProfile p;
    char buf[16];
    std::snprintf(buf, sizeof buf, "U%02d", u + 1);
    p.user_id = buf;
    p.handedness = draw(-1.0, 1.0);
    for (int o = 0; o < n_objects; ++o) {
      ObjectBehavior b;
      b.duration_mean = draw(2.3, 4.2);
      b.duration_std = draw(0.06, 0.16);
      b.gyro_amp = draw(0.6, 3.0);
      double norm = 0.0;
      for (double& m : b.gyro_axis_mix) {
        m = 0.15 + rng.next_double();
        norm += m * m;
      }
      norm = std::sqrt(norm);
      for (double& m : b.gyro_axis_mix) m /= norm;
      b.accel_amp = draw(0.5, 3.5);
      b.spl_peak_db = draw(55.0, 82.0);
      b.spl_decay = draw(2.0, 7.0);
      b.gap_mean = draw(2.6, 4.0);
      p.per_object.push_back(b);
    }
    profiles.push_back(std::move(p));
  }
  return profiles;
}

// alpha * victim + (1 - alpha) * attacker, parameter-wise; exact copies at
// the endpoints.
inline UserProfile blend_profiles(double alpha, const UserProfile& victim,
                                  const UserProfile& attacker) {
  if (victim.per_object.size() != attacker.per_object.size()) {
    throw ValidationError("blend_profiles: object count mismatch");
  }
  auto mix = [alpha](double v, double a) { return alpha * v + (1.0 - alpha) * a; };
  UserProfile out;
  out.user_id = attacker.user_id;
  out.handedness = mix(victim.handedness, attacker.handedness);
  out.per_object.resize(attacker.per_object.size());
  for (std::size_t o = 0; o < out.per_object.size(); ++o) {
    const ObjectBehavior& v = victim.per_object[o];
    const ObjectBehavior& a = attacker.per_object[o];
    ObjectBehavior& b = out.per_object[o];
    b.duration_mean = mix(v.duration_mean, a.duration_mean);
    b.duration_std = mix(v.duration_std, a.duration_std);
    b.gyro_amp = mix(v.gyro_amp, a.gyro_amp);
    for (int i = 0; i < 3; ++i) b.gyro_axis_mix[i] = mix(v.gyro_axis_mix[i], a.gyro_axis_mix[i]);
    b.accel_amp = mix(v.accel_amp, a.accel_amp);
    b.spl_peak_db = mix(v.spl_peak_db, a.spl_peak_db);
    b.spl_decay = mix(v.spl_decay, a.spl_decay);
    b.gap_mean = mix(v.gap_mean, a.gap_mean);
  }
  return out;
}

inline UserProfile jitter_profile(const UserProfile& profile, double sigma, Rng& rng) {
  UserProfile out = profile;
  if (sigma <= 0.0) return out;
  auto wobble = [&](double v) { return v * (1.0 + rng.gaussian(0.0, sigma)); };
  out.handedness = wobble(out.handedness);
  for (auto& b : out.per_object) {
    b.duration_mean = std::max(2.1, wobble(b.duration_mean));
    b.duration_std = std::fabs(wobble(b.duration_std));
    b.gyro_amp = std::fabs(wobble(b.gyro_amp));
    for (double& m : b.gyro_axis_mix) m = wobble(m);
    b.accel_amp = std::fabs(wobble(b.accel_amp));
    b.spl_peak_db = std::clamp(wobble(b.spl_peak_db), 45.0, 95.0);
    b.spl_decay = std::clamp(wobble(b.spl_decay), 1.0, 10.0);
    b.gap_mean = std::max(2.4, wobble(b.gap_mean));
  }
  return out;
}

// Session builder: deterministic timeline, streams accumulated per
// (device, sensor) and flushed into a Dataset.
class SynthSession {
 public:
  SynthSession(int n_objects, std::uint64_t seed) : seed_(seed) {
    Rng rng(derive_seed(seed, "session"));
    for (int o = 0; o < n_objects; ++o) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "O%d", o + 1);
      objects_.push_back(buf);
    }
    // Directional ring: each object leaks into its next two neighbours, which
    // bounds the co-located fan-out while leaving every device in use.
    const int fanout = std::min(2, n_objects - 1);
    for (int o = 0; o < n_objects; ++o) {
      std::vector<std::string> neighbors;
      for (int r = 1; r <= fanout; ++r) neighbors.push_back(objects_[static_cast<std::size_t>((o + r) % n_objects)]);
      std::sort(neighbors.begin(), neighbors.end());
      colocation_[objects_[static_cast<std::size_t>(o)]] = neighbors;
      for (int r = 1; r <= fanout; ++r) {
        const std::string& d = objects_[static_cast<std::size_t>((o + r) % n_objects)];
        pair_atten_[{objects_[static_cast<std::size_t>(o)], d}] =
            rng.uniform(0.30, 0.55) * (r == 1 ? 1.0 : 0.65);
        pair_rank_[{objects_[static_cast<std::size_t>(o)], d}] = r - 1;
      }
    }
    for (const auto& obj : objects_) {
      mag_base_[obj] = {rng.uniform(15.0, 30.0), rng.uniform(-10.0, 10.0),
                        rng.uniform(-45.0, -30.0)};
    }
    cursor_ = 5.0;
  }

  const std::vector<std::string>& objects() const { return objects_; }
  const CoLocationMap& colocation() const { return colocation_; }

  void add_run(const UserProfile& profile, const std::string& run_id, AttackKind attack,
               const std::string& victim_id) {
    if (profile.per_object.size() != objects_.size()) {
      throw ValidationError("add_run: profile object count mismatch");
    }
    RunMetadata run;
    run.run_id = run_id;
    run.user_id = profile.user_id;
    run.attack = attack;
    run.victim_id = victim_id;
    runs_.push_back(run);

    Rng rng(derive_seed(derive_seed(seed_, "run"), run_id));
    std::vector<int> order(objects_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    rng.shuffle(order);
    for (int o : order) {
      const ObjectBehavior& b = profile.per_object[static_cast<std::size_t>(o)];
      const double gap = std::max(2.3, rng.gaussian(b.gap_mean, 0.25));
      const double t0 = cursor_ + gap;
      const double duration = std::max(2.05, rng.gaussian(b.duration_mean, b.duration_std));
      const double t1 = t0 + duration;
      add_interaction(static_cast<std::size_t>(o), b, profile.handedness, run_id, t0, t1, rng);
      cursor_ = t1;
    }
    cursor_ += 4.0;
  }

  Dataset finish() {
    Dataset ds;
    ds.session_id = "synth-" + std::to_string(seed_);
    ds.epoch = 0.0;
    for (auto& [key, rec] : streams_) ds.recordings.push_back(std::move(rec));
    streams_.clear();
    ds.events = std::move(events_);
    std::stable_sort(ds.events.begin(), ds.events.end(),
                     [](const ContactEvent& a, const ContactEvent& b) {
                       if (a.device_id != b.device_id) return a.device_id < b.device_id;
                       return a.t < b.t;
                     });
    ds.runs = std::move(runs_);
    std::sort(ds.runs.begin(), ds.runs.end(),
              [](const RunMetadata& a, const RunMetadata& b) { return a.run_id < b.run_id; });
    ds.colocation = colocation_;
    return ds;
  }

 private:
  static double smoothstep(double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x * x * (3.0 - 2.0 * x);
  }

  static double pulse(double t, double center, double width, double amp) {
    const double d = t - center;
    if (std::fabs(d) >= 0.5 * width) return 0.0;
    return amp * 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * d / width));
  }

  SensorRecording& stream(const std::string& device, SensorKind kind) {
    auto [it, inserted] = streams_.try_emplace({device, kind});
    if (inserted) {
      it->second.device_id = device;
      it->second.kind = kind;
    }
    return it->second;
  }

  void append_sample(SensorRecording& rec, double t, const double* v, int comps) {
    if (!rec.t.empty() && t <= rec.t.back()) return;  // overlap guard
    rec.t.push_back(t);
    for (int c = 0; c < comps; ++c) {
      rec.values.push_back(static_cast<double>(static_cast<float>(v[c])));
    }
  }

  void add_interaction(std::size_t object, const ObjectBehavior& b, double handedness,
                       const std::string& run_id, double t0, double t1, Rng& rng) {
    const std::string& device = objects_[object];
    events_.push_back({device, ContactKind::kOpen, t0, run_id});
    events_.push_back({device, ContactKind::kClose, t1, run_id});

    const double open_center = t0 + 0.3;
    const double close_center = t1 - 0.3;
    const double amp_jitter = 1.0 + rng.gaussian(0.0, 0.05);

    struct Emitter {
      std::string device;
      double atten;
      int rank;  // -1 for the on-object device
    };
    std::vector<Emitter> emitters;
    emitters.push_back({device, 1.0, -1});
    if (auto it = colocation_.find(device); it != colocation_.end()) {
      for (const auto& other : it->second) {
        emitters.push_back({other, pair_atten_.at({device, other}), pair_rank_.at({device, other})});
      }
    }

    const double lo = t0 - kEmitPadSeconds;
    const double hi = t1 + kEmitPadSeconds;
    auto door = [&](double t) {
      return smoothstep((t - t0) / 0.9) * smoothstep((t1 - t) / 0.9);
    };

    for (const auto& e : emitters) {
      const bool on_object = e.rank < 0;
      // IMU grid
      const long k_lo = static_cast<long>(std::ceil(lo * kImuRateHz));
      const long k_hi = static_cast<long>(std::floor(hi * kImuRateHz));
      SensorRecording& gyro = stream(e.device, SensorKind::kGyro);
      SensorRecording& acc = stream(e.device, SensorKind::kAcc);
      SensorRecording* mag = on_object ? &stream(e.device, SensorKind::kMag) : nullptr;
      const auto& base = mag_base_.at(e.device);
      for (long k = k_lo; k <= k_hi; ++k) {
        const double t = static_cast<double>(k) / kImuRateHz;
        const double open_p = pulse(t, open_center, 0.8, 1.0);
        const double close_p = pulse(t, close_center, 0.8, 0.85);
        const double motion = (open_p + close_p) * amp_jitter * e.atten;
        double g[3], a[3];
        for (int c = 0; c < 3; ++c) {
          g[c] = b.gyro_amp * b.gyro_axis_mix[static_cast<std::size_t>(c)] * motion +
                 rng.gaussian(0.0, 0.02);
          const double acc_mix = b.gyro_axis_mix[static_cast<std::size_t>((c + 1) % 3)];
          a[c] = b.accel_amp * acc_mix * motion * 0.9 + (c == 2 ? 9.81 : 0.0) +
                 rng.gaussian(0.0, 0.03);
        }
        append_sample(gyro, t, g, 3);
        append_sample(acc, t, a, 3);
        if (mag != nullptr) {
          const double open_frac = door(t);
          double m[3];
          for (int c = 0; c < 3; ++c) {
            const double delta =
                (7.0 * handedness * b.gyro_axis_mix[static_cast<std::size_t>((c + 2) % 3)] + 1.5) *
                (0.5 + 0.25 * b.duration_mean);
            m[c] = base[static_cast<std::size_t>(c)] + delta * open_frac + rng.gaussian(0.0, 0.15);
          }
          append_sample(*mag, t, m, 3);
        }
      }
      // SPL grid
      const long s_lo = static_cast<long>(std::ceil(lo * kSplRateHz));
      const long s_hi = static_cast<long>(std::floor(hi * kSplRateHz));
      SensorRecording& mic = stream(e.device, SensorKind::kMicSpl);
      const double drop = on_object ? 0.0 : 7.0 * static_cast<double>(e.rank + 1);
      const double peak = std::max(0.0, (b.spl_peak_db - kSplFloorDb) * amp_jitter - drop);
      for (long k = s_lo; k <= s_hi; ++k) {
        const double t = static_cast<double>(k) / kSplRateHz;
        double level = kSplFloorDb + rng.gaussian(0.0, 0.6);
        if (t >= t0) level += peak * std::exp(-b.spl_decay * (t - t0));
        if (t >= t1) level += 0.9 * peak * std::exp(-b.spl_decay * (t - t1));
        level = std::max(20.0, level);
        append_sample(mic, t, &level, 1);
      }
    }
  }

  std::uint64_t seed_;
  std::vector<std::string> objects_;
  CoLocationMap colocation_;
  std::map<std::pair<std::string, std::string>, double> pair_atten_;
  std::map<std::pair<std::string, std::string>, int> pair_rank_;
  std::map<std::string, std::array<double, 3>> mag_base_;
  std::map<std::pair<std::string, SensorKind>, SensorRecording> streams_;
  std::vector<ContactEvent> events_;
  std::vector<RunMetadata> runs_;
  double cursor_ = 0.0;
};

// Regular sessions: every user performs runs_per_user runs, each visiting all
// objects once in a shuffled order. Fully deterministic under the seed.
inline SynthSession generate_session(const std::vector<UserProfile>& profiles, int n_objects,
                                     int runs_per_user, std::uint64_t seed) {
  if (profiles.size() < 2) throw ValidationError("generate_session: need at least 2 profiles");
  SynthSession session(n_objects, seed);
  int run_counter = 0;
  for (const auto& profile : profiles) {
    for (int k = 0; k < runs_per_user; ++k) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "r%04d", ++run_counter);
      session.add_run(profile, buf, AttackKind::kNone, "");
    }
  }
  return session;
}

// Appends mimicry runs drawn from the alpha-blended profile with per-run
// jitter. Attack run ids continue independently of the regular runs.
inline void generate_attacks(SynthSession& session, const AttackSpec& spec, int runs,
                             std::uint64_t seed, int* run_counter) {
  if (!(spec.fidelity >= 0.0 && spec.fidelity <= 1.0)) {
    throw ValidationError("generate_attacks: fidelity must be in [0, 1]");
  }
  const UserProfile blended = blend_profiles(spec.fidelity, spec.victim, spec.attacker);
  for (int k = 0; k < runs; ++k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "a%04d", ++*run_counter);
    Rng rng(derive_seed(derive_seed(seed, "attack-jitter"), buf));
    const UserProfile run_profile = jitter_profile(blended, spec.jitter, rng);
    session.add_run(run_profile, buf, spec.kind, spec.victim.user_id);
  }
}

inline nlohmann::json profile_to_json(const UserProfile& p) {
  nlohmann::json j;
  j["user"] = p.user_id;
  j["handedness"] = p.handedness;
  nlohmann::json objs = nlohmann::json::array();
  for (const auto& b : p.per_object) {
    objs.push_back({{"duration_mean", b.duration_mean},
                    {"duration_std", b.duration_std},
                    {"gyro_amp", b.gyro_amp},
                    {"gyro_axis_mix", b.gyro_axis_mix},
                    {"accel_amp", b.accel_amp},
                    {"spl_peak_db", b.spl_peak_db},
                    {"spl_decay", b.spl_decay},
                    {"gap_mean", b.gap_mean}});
  }
  j["objects"] = std::move(objs);
  return j;
}

}  // namespace sensauth
