#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sensauth/features.hpp"
#include "sensauth/forest.hpp"
#include "sensauth/ingest.hpp"
#include "sensauth/kfold.hpp"
#include "sensauth/mutual_info.hpp"
#include "sensauth/segment.hpp"
#include "sensauth/synth.hpp"
#include "test_util.hpp"

using namespace sensauth;
using Catch::Approx;

TEST_CASE("same seed produces byte-identical session files", "[synth]") {
  testutil::TempDir a("synth_a"), b("synth_b");
  for (const auto& dir : {a.path, b.path}) {
    const auto profiles = sample_profiles(4, 3, 77);
    auto session = generate_session(profiles, 3, 2, 77);
    write_dataset(session.finish(), dir.string());
  }
  CHECK(testutil::read_file(a.file("recordings.jsonl")) ==
        testutil::read_file(b.file("recordings.jsonl")));
  CHECK(testutil::read_file(a.file("runs.jsonl")) == testutil::read_file(b.file("runs.jsonl")));
  CHECK(testutil::read_file(a.file("colocation.json")) ==
        testutil::read_file(b.file("colocation.json")));
}

TEST_CASE("generated sessions pass ingestion and segment cleanly", "[synth]") {
  testutil::TempDir dir("synth_ingest");
  const int users = 4, objects = 3, runs = 2;
  auto session = generate_session(sample_profiles(users, objects, 5), objects, runs, 5);
  write_dataset(session.finish(), dir.path.string());

  const Dataset ds = load_dataset(dir.file("recordings.jsonl"), dir.file("runs.jsonl"),
                                  dir.file("colocation.json"));
  int open_events = 0;
  for (const auto& ev : ds.events) open_events += ev.kind == ContactKind::kOpen ? 1 : 0;
  CHECK(ds.events.size() == static_cast<std::size_t>(2 * users * objects * runs));
  CHECK(open_events == users * objects * runs);

  const auto segmented = segment(ds);
  CHECK(segmented.dropped == 0);
  CHECK(segmented.segments.size() == static_cast<std::size_t>(users * objects * runs));

  // every segment window is populated on all on-object sensor kinds
  for (const auto& seg : segmented.segments) {
    REQUIRE(seg.on_object.size() == 4);
    for (const auto& [kind, m] : seg.on_object) CHECK(m.rows > 0);
    // ring topology: two co-located devices; MAG does not leak, so its
    // window is empty while ACC/GYRO/SPL carry the attenuated signal
    CHECK(seg.co_located.size() == 2);
    for (const auto& [dev, kinds] : seg.co_located) {
      CHECK(kinds.at(SensorKind::kMag).rows == 0);
      CHECK(kinds.at(SensorKind::kAcc).rows > 0);
      CHECK(kinds.at(SensorKind::kGyro).rows > 0);
      CHECK(kinds.at(SensorKind::kMicSpl).rows > 0);
    }
  }
}

TEST_CASE("profile blending endpoints are exact", "[synth]") {
  const auto profiles = sample_profiles(2, 3, 9);
  const UserProfile& victim = profiles[0];
  const UserProfile& attacker = profiles[1];

  const UserProfile zero = blend_profiles(0.0, victim, attacker);
  for (std::size_t o = 0; o < zero.per_object.size(); ++o) {
    CHECK(zero.per_object[o].duration_mean == attacker.per_object[o].duration_mean);
    CHECK(zero.per_object[o].gyro_amp == attacker.per_object[o].gyro_amp);
    CHECK(zero.per_object[o].spl_peak_db == attacker.per_object[o].spl_peak_db);
    CHECK(zero.per_object[o].gyro_axis_mix == attacker.per_object[o].gyro_axis_mix);
  }
  CHECK(zero.handedness == attacker.handedness);

  const UserProfile one = blend_profiles(1.0, victim, attacker);
  for (std::size_t o = 0; o < one.per_object.size(); ++o) {
    CHECK(one.per_object[o].duration_mean == victim.per_object[o].duration_mean);
    CHECK(one.per_object[o].gyro_amp == victim.per_object[o].gyro_amp);
    CHECK(one.per_object[o].accel_amp == victim.per_object[o].accel_amp);
  }
  // alpha = 1 with zero jitter: runs are generated from the victim's exact
  // parameters
  Rng rng(1);
  const UserProfile jittered = jitter_profile(one, 0.0, rng);
  for (std::size_t o = 0; o < one.per_object.size(); ++o) {
    CHECK(jittered.per_object[o].duration_mean == victim.per_object[o].duration_mean);
  }
}

TEST_CASE("attack runs carry kind and victim", "[synth]") {
  const auto profiles = sample_profiles(3, 2, 11);
  auto session = generate_session(profiles, 2, 2, 11);
  AttackSpec spec;
  spec.attacker = profiles[1];
  spec.victim = profiles[0];
  spec.kind = AttackKind::kVideo;
  spec.fidelity = 0.7;
  int counter = 0;
  generate_attacks(session, spec, 3, 12, &counter);
  CHECK(counter == 3);
  const Dataset ds = session.finish();

  int attack_runs = 0;
  for (const auto& run : ds.runs) {
    if (run.attack == AttackKind::kVideo) {
      ++attack_runs;
      CHECK(run.user_id == profiles[1].user_id);
      CHECK(run.victim_id == profiles[0].user_id);
    }
  }
  CHECK(attack_runs == 3);
  CHECK_THROWS_AS(generate_attacks(session, [&] {
                    auto bad = spec;
                    bad.fidelity = 1.5;
                    return bad;
                  }(), 1, 13, &counter),
                  ValidationError);
}

TEST_CASE("fewer than two profiles is an error", "[synth]") {
  const auto profiles = sample_profiles(1, 2, 3);
  CHECK_THROWS_AS(generate_session(profiles, 2, 1, 3), ValidationError);
}

namespace {

// Pinned calibration regression: two hand-built extreme profiles must be
// nearly perfectly separable by a single on-object base classifier.
UserProfile extreme_profile(const std::string& id, bool high, int objects) {
  UserProfile p;
  p.user_id = id;
  p.handedness = high ? 0.9 : -0.9;
  for (int o = 0; o < objects; ++o) {
    ObjectBehavior b;
    b.duration_mean = high ? 4.1 : 2.4;
    b.duration_std = 0.08;
    b.gyro_amp = high ? 2.8 : 0.7;
    b.gyro_axis_mix = high ? std::array<double, 3>{0.8, 0.5, 0.33}
                           : std::array<double, 3>{0.2, 0.7, 0.68};
    b.accel_amp = high ? 3.2 : 0.6;
    b.spl_peak_db = high ? 80.0 : 57.0;
    b.spl_decay = high ? 6.5 : 2.2;
    b.gap_mean = 3.0;
    p.per_object.push_back(b);
  }
  return p;
}

}  // namespace

TEST_CASE("maximally separated profiles give near-perfect CV accuracy", "[synth][slow]") {
  auto session = generate_session(
      {extreme_profile("U01", false, 1), extreme_profile("U02", true, 1)}, 1, 20, 21);
  const Dataset ds = session.finish();
  const auto tables = build_object_tables(segment(ds), ds);
  REQUIRE(tables.size() == 1);
  const ObjectTable& table = tables.begin()->second;
  REQUIRE(table.rows.size() == 40);

  std::vector<int> labels(table.rows.size());
  std::vector<std::size_t> all_rows(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    labels[r] = table.rows[r].user_id == "U01" ? 1 : 0;
    all_rows[r] = r;
  }
  const auto folds = stratified_kfold(labels, 10, 22);
  int correct = 0, total = 0;
  for (int f = 0; f < 10; ++f) {
    std::vector<std::size_t> train_rows;
    std::vector<int> train_labels;
    for (std::size_t r = 0; r < all_rows.size(); ++r) {
      if (folds[r] != f) {
        train_rows.push_back(r);
        train_labels.push_back(labels[r]);
      }
    }
    const auto selected = select_top_k(table, Config::kOnObject, train_rows, train_labels);
    const RowMatrix x = gather(table, train_rows, selected.table_columns);
    const auto model = train_forest(x, train_labels, {100, 5, FeatureSubsample::kSqrt},
                                    derive_seed(23, static_cast<std::uint64_t>(f)));
    for (std::size_t r = 0; r < all_rows.size(); ++r) {
      if (folds[r] != f) continue;
      std::vector<double> feats(selected.table_columns.size());
      for (std::size_t c = 0; c < feats.size(); ++c) feats[c] = table.at(r, selected.table_columns[c]);
      correct += model.predict(feats) == labels[r] ? 1 : 0;
      ++total;
    }
  }
  const double accuracy = static_cast<double>(correct) / static_cast<double>(total);
  CHECK(accuracy >= 0.95);
}
