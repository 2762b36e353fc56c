#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "sensauth/evaluate.hpp"
#include "sensauth/production.hpp"
#include "sensauth/report_io.hpp"
#include "sensauth/synth.hpp"
#include "test_util.hpp"

using namespace sensauth;
using Catch::Approx;

namespace {

struct SmallWorld {
  Dataset ds;
  std::map<std::string, ObjectTable> tables;
};

// 4 users x 4 objects x 8 runs, one victim attacked on video; kept small so
// the full grid-searched pipeline stays fast enough for a unit test.
SmallWorld make_world(std::uint64_t seed, bool with_attacks) {
  const int users = 4, objects = 4, runs = 8;
  const auto profiles = sample_profiles(users, objects, seed);
  auto session = generate_session(profiles, objects, runs, seed);
  if (with_attacks) {
    int counter = 0;
    for (int a : {1, 2}) {
      AttackSpec spec;
      spec.attacker = profiles[static_cast<std::size_t>(a)];
      spec.victim = profiles[0];
      spec.kind = AttackKind::kVideo;
      spec.fidelity = 0.7;
      spec.jitter = kVideoJitter;
      generate_attacks(session, spec, 3, derive_seed(seed, "atk"), &counter);
    }
  }
  SmallWorld world;
  world.ds = session.finish();
  world.tables = build_object_tables(segment(world.ds), world.ds);
  return world;
}

EvalOptions small_opts(std::uint64_t seed) {
  EvalOptions opts;
  opts.config = Config::kOffObject;
  opts.family = ModelFamily::kForest;
  opts.far_targets = {0.05, 0.25};
  opts.seed = seed;
  opts.outer_folds = 4;  // the victim has 8 runs
  return opts;
}

}  // namespace

TEST_CASE("feature arity matches the configuration scopes", "[pipeline]") {
  const auto world = make_world(301, false);
  REQUIRE(world.tables.size() == 4);
  for (const auto& [object_id, table] : world.tables) {
    // on-object: ACC+GYRO+MAG+MIC = 10 components x 15 functions
    CHECK(table.on_columns.size() == 150);
    // off-object: 2 co-located devices x the same 10-component battery (the
    // schema follows what each device records anywhere in the dataset; MAG
    // windows are empty off-object and contribute degenerate zeros)
    CHECK(table.off_columns.size() == 300);
    CHECK(table.width() == 450);

    // spot-check extract() against the table rows
    const auto segmented = segment(world.ds);
    for (const auto& seg : segmented.segments) {
      if (seg.object_id != object_id) continue;
      const auto fv = extract(seg, Config::kCombined);
      CHECK(fv.values.size() == table.width());
      const auto on = extract(seg, Config::kOnObject);
      const auto off = extract(seg, Config::kOffObject);
      CHECK(on.values.size() + off.values.size() == fv.values.size());
      break;
    }
  }
}

TEST_CASE("build_configuration yields one bank per object per fold", "[pipeline][slow]") {
  const auto world = make_world(302, false);
  auto opts = small_opts(302);
  const auto bank = build_configuration(world.tables, world.ds.runs, "U01", opts);

  CHECK(bank.folds == 4);
  CHECK(bank.objects.size() == 4);
  for (const auto& [object_id, ob] : bank.objects) {
    CHECK(ob.folds.size() == 4);
    for (const auto& fold : ob.folds) {
      CHECK(fold.selected.features.size() == 20);
      CHECK(fold.thresholds.size() == opts.far_targets.size());
    }
    // out-of-fold score exists for every row
    for (double s : ob.oof_score) CHECK(std::isfinite(s));
  }
  CHECK_THROWS_AS(build_configuration(world.tables, world.ds.runs, "U99", opts), ValidationError);
}

TEST_CASE("objects without sensors in scope are skipped", "[pipeline][slow]") {
  auto world = make_world(303, false);
  // strip co-location for one object: nothing in scope for OFF_OBJECT
  world.ds.colocation["O1"].clear();
  world.tables = build_object_tables(segment(world.ds), world.ds);
  auto opts = small_opts(303);
  set_warnings_enabled(false);
  const auto bank = build_configuration(world.tables, world.ds.runs, "U01", opts);
  set_warnings_enabled(true);
  CHECK(bank.skipped_objects == 1);
  CHECK(bank.objects.count("O1") == 0);
  CHECK(bank.objects.size() == 3);
}

TEST_CASE("evaluation report shape and determinism", "[pipeline][slow]") {
  const auto world = make_world(304, true);
  auto opts = small_opts(304);
  const auto report_a = evaluate_victim(world.tables, world.ds.runs, "U01", opts);
  const auto report_b = evaluate_victim(world.tables, world.ds.runs, "U01", opts);

  CHECK(report_a.objects.size() == 4);
  for (const auto& obj : report_a.objects) {
    REQUIRE(obj.zero_effort.frr.size() == 2);
    for (const auto& row : obj.zero_effort.frr) {
      CHECK(row.frr >= 0.0);
      CHECK(row.frr <= 1.0);
    }
    REQUIRE(obj.attacks.count(AttackKind::kVideo) == 1);
  }
  CHECK(report_a.averaged_attacks.count(AttackKind::kVideo) == 1);

  // byte-identical serialized reports under the same seed
  CHECK(report_to_json(report_a).dump() == report_to_json(report_b).dump());

  // no attacks -> zero-effort only
  const auto world_clean = make_world(304, false);
  const auto clean = evaluate_victim(world_clean.tables, world_clean.ds.runs, "U01", opts);
  CHECK(clean.averaged_attacks.empty());
  for (const auto& obj : clean.objects) CHECK(obj.attacks.empty());
}

TEST_CASE("ensemble study subsets, baselines and run alignment", "[pipeline][slow]") {
  const auto world = make_world(305, true);
  auto opts = small_opts(305);
  opts.stacking_oof = true;
  const auto bank = build_configuration(world.tables, world.ds.runs, "U01", opts);
  EnsembleOptions ens;
  ens.max_size = 4;
  const auto study = ensemble_study(bank, ens);

  // subset counts: C(4,1..4) = 4, 6, 4, 1
  std::map<int, int> by_size;
  for (const auto& subset : study.subsets.at(EnsembleKind::kVoting)) {
    ++by_size[static_cast<int>(subset.members.size())];
  }
  CHECK(by_size[1] == 4);
  CHECK(by_size[2] == 6);
  CHECK(by_size[3] == 4);
  CHECK(by_size[4] == 1);

  // a size-1 voting ensemble reproduces the member's per-object result
  // exactly (computed through the independent metric path)
  for (const auto& subset : study.subsets.at(EnsembleKind::kVoting)) {
    if (subset.members.size() != 1) continue;
    const auto& baseline = study.member_baseline.at(subset.members.front());
    REQUIRE(baseline.size() == subset.zero_effort.size());
    for (std::size_t t = 0; t < baseline.size(); ++t) {
      CHECK(subset.zero_effort[t].frr == baseline[t].frr);
    }
    CHECK(subset.dropped_runs == 0);
  }

  // attack sections exist for the video attack
  for (const auto& subset : study.subsets.at(EnsembleKind::kStacking)) {
    CHECK(subset.attacks.count(AttackKind::kVideo) == 1);
  }

  // means exist for every size
  for (EnsembleKind kind : {EnsembleKind::kVoting, EnsembleKind::kStacking}) {
    REQUIRE(study.mean_by_size.count(kind) == 1);
    CHECK(study.mean_by_size.at(kind).size() == 4);
  }

  // asking for more members than objects is an error
  EnsembleOptions too_big;
  too_big.max_size = 5;
  CHECK_THROWS_AS(ensemble_study(bank, too_big), ValidationError);
}

TEST_CASE("stacking requires a bank built with internal OOF scores", "[pipeline][slow]") {
  const auto world = make_world(306, false);
  auto opts = small_opts(306);
  opts.stacking_oof = false;
  const auto bank = build_configuration(world.tables, world.ds.runs, "U01", opts);
  EnsembleOptions ens;
  ens.kinds = {EnsembleKind::kStacking};
  ens.max_size = 2;
  CHECK_THROWS_AS(ensemble_study(bank, ens), ValidationError);
}

TEST_CASE("production training writes loadable bundles", "[pipeline][slow]") {
  const auto world = make_world(307, false);
  auto opts = small_opts(307);
  const auto production = train_production(world.tables, world.ds.runs, "U01", opts);
  REQUIRE(production.models.size() == 4);

  testutil::TempDir dir("bundles");
  const auto& [object_id, model] = *production.models.begin();
  save_model_bundle(model, dir.file("model.json"));
  auto loaded = load_model_bundle(dir.file("model.json"));
  CHECK(loaded.object_id == model.object_id);
  CHECK(loaded.family == model.family);
  REQUIRE(loaded.selected.features.size() == model.selected.features.size());

  rebind_columns(loaded, world.tables.at(object_id));
  // reloaded bundle reproduces training scores exactly
  for (std::size_t r = 0; r < 5; ++r) {
    CHECK(loaded.score_row(world.tables.at(object_id), r) ==
          model.score_row(world.tables.at(object_id), r));
  }

  const auto voting = make_voting_manifest(production, opts.far_targets);
  CHECK(voting.members.size() == 4);
  CHECK(voting.thresholds.size() == opts.far_targets.size());
  const auto stacking = train_stacking(world.tables, world.ds.runs, production, opts);
  CHECK(stacking.meta_weights.size() == 4);
  testutil::TempDir ens_dir("manifests");
  save_ensemble_manifest(voting, ens_dir.file("voting.json"));
  save_ensemble_manifest(stacking, ens_dir.file("stacking.json"));
  CHECK(testutil::read_file(ens_dir.file("voting.json")).find("\"voting\"") != std::string::npos);
}

TEST_CASE("victims with too few runs are rejected", "[pipeline]") {
  auto world = make_world(309, false);
  // keep a single run for U01: evaluating it cannot stratify
  std::vector<RunMetadata> runs;
  bool kept_one = false;
  for (const auto& run : world.ds.runs) {
    if (run.user_id == "U01") {
      if (kept_one) continue;
      kept_one = true;
    }
    runs.push_back(run);
  }
  auto opts = small_opts(309);
  set_warnings_enabled(false);
  CHECK_THROWS_AS(build_configuration(world.tables, runs, "U01", opts), ValidationError);
  set_warnings_enabled(true);
}

TEST_CASE("runs missing a member's interaction are dropped and counted", "[pipeline][slow]") {
  auto world = make_world(310, false);
  // remove one run's segment from O1's table
  ObjectTable& table = world.tables.at("O1");
  const std::string removed_run = table.rows.front().run_id;
  table.values.erase(table.values.begin(),
                     table.values.begin() + static_cast<std::ptrdiff_t>(table.width()));
  table.rows.erase(table.rows.begin());

  auto opts = small_opts(310);
  const auto bank = build_configuration(world.tables, world.ds.runs, "U01", opts);
  EnsembleOptions ens;
  ens.kinds = {EnsembleKind::kVoting};
  ens.max_size = 2;
  const auto study = ensemble_study(bank, ens);
  for (const auto& subset : study.subsets.at(EnsembleKind::kVoting)) {
    const bool has_o1 = std::find(subset.members.begin(), subset.members.end(), "O1") !=
                        subset.members.end();
    CHECK(subset.dropped_runs == (has_o1 ? 1 : 0));
  }
}

TEST_CASE("gyro-only user differences dominate the RMI table", "[pipeline]") {
  // identical behavior everywhere except the gyro pulse amplitude
  const int users = 5, objects = 2, runs = 10;
  std::vector<UserProfile> profiles;
  for (int u = 0; u < users; ++u) {
    UserProfile p;
    char buf[8];
    std::snprintf(buf, sizeof buf, "U%02d", u + 1);
    p.user_id = buf;
    p.handedness = 0.2;
    for (int o = 0; o < objects; ++o) {
      ObjectBehavior b;
      b.duration_mean = 2.8;
      b.duration_std = 0.05;
      b.gyro_amp = 0.6 + 0.55 * u;  // the only user-dependent knob
      b.gyro_axis_mix = {0.7, 0.5, 0.51};
      b.accel_amp = 1.4;
      b.spl_peak_db = 66.0;
      b.spl_decay = 4.0;
      b.gap_mean = 3.0;
      p.per_object.push_back(b);
    }
    profiles.push_back(std::move(p));
  }
  auto session = generate_session(profiles, objects, runs, 311);
  const Dataset ds = session.finish();
  const auto tables = build_object_tables(segment(ds), ds);
  const auto report = rmi_report(tables, Config::kOnObject);
  for (const auto& [object_id, values] : report) {
    const double gyro = values[2];
    CHECK(gyro > values[0]);  // ACC
    CHECK(gyro > values[1]);  // MAG
    CHECK(gyro > values[3]);  // MIC
  }

  // a single-user dataset propagates the zero-label-entropy error
  auto solo = generate_session({profiles[0], profiles[0]}, objects, 2, 312);
  Dataset solo_ds = solo.finish();
  for (auto& run : solo_ds.runs) run.user_id = "U01";
  const auto solo_tables = build_object_tables(segment(solo_ds), solo_ds);
  CHECK_THROWS_AS(rmi_report(solo_tables, Config::kOnObject), ValidationError);
}

TEST_CASE("wider profile spreads never hurt zero-effort error rates", "[pipeline][slow]") {
  // pinned from a calibration run: doubling every inter-user parameter gap
  // (spread 0.25 -> 0.5) keeps the averaged zero-effort FRR from rising
  auto frr_at_spread = [](double spread) {
    const int users = 4, objects = 2, runs = 8;
    const auto profiles = sample_profiles(users, objects, 313, spread);
    auto session = generate_session(profiles, objects, runs, 313);
    const Dataset ds = session.finish();
    const auto tables = build_object_tables(segment(ds), ds);
    EvalOptions opts;
    opts.config = Config::kOffObject;
    opts.family = ModelFamily::kForest;
    opts.far_targets = {0.05};
    opts.seed = 313;
    opts.outer_folds = 4;
    const auto report = evaluate_victim(tables, ds.runs, "U01", opts);
    return report.averaged_zero_effort[0].frr;
  };
  const double narrow = frr_at_spread(0.25);
  const double wide = frr_at_spread(0.5);
  CHECK(wide <= narrow);
}

TEST_CASE("rmi report covers each object and sensor column", "[pipeline]") {
  const auto world = make_world(308, false);
  const auto report = rmi_report(world.tables, Config::kOnObject);
  REQUIRE(report.size() == 4);
  for (const auto& [object_id, values] : report) {
    for (double v : values) {
      CHECK(v >= 0.0);
      CHECK(v <= 100.0);
    }
  }
  // off-object has no MAG leakage, so its column reports 0
  const auto off = rmi_report(world.tables, Config::kOffObject);
  for (const auto& [object_id, values] : off) {
    CHECK(values[1] == 0.0);  // MAG column
    CHECK(values[0] > 0.0);   // ACC column carries signal
  }
  testutil::TempDir dir("rmi");
  write_rmi_csv(report, dir.file("rmi_report.csv"));
  const auto content = testutil::read_file(dir.file("rmi_report.csv"));
  CHECK(content.rfind("object,ACC,MAG,GYRO,MIC\n", 0) == 0);
  CHECK(std::count(content.begin(), content.end(), '\n') == 5);
}
