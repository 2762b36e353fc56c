// Command-line front door: synth, ingest, features, rmi, train, evaluate,
// ensemble, report. Every command writes its artifacts plus a manifest into
// the run directory so outputs can be reproduced exactly.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sensauth/sensauth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitTraining = 3;
constexpr int kExitIo = 4;

std::string default_run_dir() {
  if (const char* env = std::getenv("SENSAUTH_RUN_DIR")) return env;
  return "run";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sensauth::IoError("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

void write_manifest(const std::string& out_dir, const std::string& command, const json& params,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  json m;
  m["command"] = command;
  m["version"] = sensauth::kVersion;
  m["params"] = params;
  char hash_buf[32];
  std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(params.dump())));
  m["config_hash"] = hash_buf;
  json in = json::object();
  for (const auto& path : inputs) {
    std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                  static_cast<unsigned long long>(hash_file(path)));
    in[path] = hash_buf;
  }
  m["inputs"] = std::move(in);
  m["outputs"] = outputs;
  std::ofstream out(fs::path(out_dir) / ("manifest_" + command + ".json"), std::ios::binary);
  if (!out) throw sensauth::IoError("cannot write manifest in " + out_dir);
  out << m.dump(2) << "\n";
}

struct DataPaths {
  std::string recordings;
  std::string runs;
  std::string colocation;
};

DataPaths data_paths(const std::string& dir) {
  DataPaths p;
  p.recordings = (fs::path(dir) / "recordings.jsonl").string();
  p.runs = (fs::path(dir) / "runs.jsonl").string();
  const auto coloc = fs::path(dir) / "colocation.json";
  if (fs::exists(coloc)) p.colocation = coloc.string();
  return p;
}

sensauth::Dataset load(const DataPaths& p) {
  return sensauth::load_dataset(p.recordings, p.runs, p.colocation);
}

sensauth::Config parse_config(const std::string& name) {
  const auto config = sensauth::config_from(name);
  if (!config) throw sensauth::ValidationError("unknown config " + name);
  return *config;
}

sensauth::ModelFamily parse_family(const std::string& name) {
  if (name == "forest") return sensauth::ModelFamily::kForest;
  if (name == "svm") return sensauth::ModelFamily::kSvm;
  throw sensauth::ValidationError("unknown model family " + name);
}

void validate_far_targets(const std::vector<double>& targets) {
  if (targets.empty()) throw sensauth::ValidationError("need at least one FAR target");
  for (double t : targets) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw sensauth::ValidationError("FAR target must be in (0, 1]");
    }
  }
}

struct SynthArgs {
  std::string out = default_run_dir();
  std::uint64_t seed = 1;
  int users = 13;
  int objects = 8;
  int runs = 20;
  double spread = 1.0;
  std::string attack_victim;
  std::vector<std::string> attack_kinds = {"video", "in_person"};
  int attackers = 6;
  int attack_runs = 5;
  double alpha_video = sensauth::kVideoFidelity;
  double alpha_in_person = sensauth::kInPersonFidelity;
  double alpha_override = -1.0;
};

void run_synth(const SynthArgs& args) {
  using namespace sensauth;
  if (args.users < 2) throw ValidationError("need at least 2 users");
  fs::create_directories(args.out);

  const auto profiles = sample_profiles(args.users, args.objects, args.seed, args.spread);
  SynthSession session = generate_session(profiles, args.objects, args.runs, args.seed);

  json attack_log = json::array();
  if (!args.attack_victim.empty()) {
    int victim_index = -1;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      if (profiles[i].user_id == args.attack_victim) victim_index = static_cast<int>(i);
    }
    if (victim_index < 0) throw ValidationError("unknown victim " + args.attack_victim);
    int run_counter = 0;
    for (const std::string& kind_name : args.attack_kinds) {
      const auto kind = attack_kind_from(kind_name);
      if (!kind || *kind == AttackKind::kNone) {
        throw ValidationError("unknown attack kind " + kind_name);
      }
      double alpha = *kind == AttackKind::kInPerson ? args.alpha_in_person : args.alpha_video;
      double jitter = *kind == AttackKind::kInPerson ? kInPersonJitter : kVideoJitter;
      if (*kind == AttackKind::kZeroEffort) {
        alpha = 0.0;
        jitter = 0.0;
      }
      if (args.alpha_override >= 0.0) alpha = args.alpha_override;
      // first --attackers users other than the victim, in id order
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < profiles.size(); ++i) {
        if (static_cast<int>(i) != victim_index) pool.push_back(i);
      }
      if (static_cast<int>(pool.size()) > args.attackers) {
        pool.resize(static_cast<std::size_t>(args.attackers));
      }
      for (std::size_t idx : pool) {
        AttackSpec spec;
        spec.attacker = profiles[idx];
        spec.victim = profiles[static_cast<std::size_t>(victim_index)];
        spec.fidelity = alpha;
        spec.kind = *kind;
        spec.jitter = jitter;
        generate_attacks(session, spec, args.attack_runs,
                         derive_seed(args.seed, "attacks:" + kind_name), &run_counter);
        attack_log.push_back({{"kind", kind_name},
                              {"attacker", spec.attacker.user_id},
                              {"alpha", alpha},
                              {"jitter", jitter},
                              {"runs", args.attack_runs}});
      }
    }
  }

  const Dataset ds = session.finish();
  write_dataset(ds, args.out);

  json config;
  config["seed"] = args.seed;
  config["users"] = args.users;
  config["objects"] = args.objects;
  config["runs_per_user"] = args.runs;
  config["spread"] = args.spread;
  config["imu_rate_hz"] = kImuRateHz;
  config["spl_rate_hz"] = kSplRateHz;
  json prof = json::array();
  for (const auto& p : profiles) prof.push_back(profile_to_json(p));
  config["profiles"] = std::move(prof);
  config["attacks"] = std::move(attack_log);
  std::ofstream cfg(fs::path(args.out) / "synth-config.json", std::ios::binary);
  if (!cfg) throw IoError("cannot write synth-config.json");
  cfg << config.dump(2) << "\n";
  cfg.close();

  json params;
  params["seed"] = args.seed;
  params["users"] = args.users;
  params["objects"] = args.objects;
  params["runs"] = args.runs;
  params["spread"] = args.spread;
  params["attack_victim"] = args.attack_victim;
  params["attackers"] = args.attackers;
  params["attack_runs"] = args.attack_runs;
  write_manifest(args.out, "synth", params, {},
                 {"recordings.jsonl", "runs.jsonl", "colocation.json", "synth-config.json"});
  std::printf("synth: %d users, %d objects, %d runs/user -> %s\n", args.users, args.objects,
              args.runs, args.out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"behavioral biometric pipeline for instrumented household objects"};
  app.require_subcommand(1);

  // ---- synth ----
  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic multi-user session");
  synth->add_option("--out", synth_args.out, "output directory");
  synth->add_option("--seed", synth_args.seed, "root seed")->required();
  synth->add_option("--users", synth_args.users, "number of users");
  synth->add_option("--objects", synth_args.objects, "number of objects");
  synth->add_option("--runs", synth_args.runs, "runs per user");
  synth->add_option("--spread", synth_args.spread, "inter-user parameter spread");
  synth->add_option("--attack-victim", synth_args.attack_victim, "victim user id for attacks");
  synth->add_option("--attack-kinds", synth_args.attack_kinds, "attack kinds to generate");
  synth->add_option("--attackers", synth_args.attackers, "attackers per kind");
  synth->add_option("--attack-runs", synth_args.attack_runs, "runs per attacker");
  synth->add_option("--alpha-video", synth_args.alpha_video, "video imitation fidelity");
  synth->add_option("--alpha-inperson", synth_args.alpha_in_person, "in-person imitation fidelity");
  synth->add_option("--alpha", synth_args.alpha_override, "override fidelity for all kinds");

  // ---- ingest ----
  std::string ingest_data;
  std::string ingest_out = default_run_dir();
  std::string dump_segments;
  auto* ingest = app.add_subcommand("ingest", "validate a dataset and report its shape");
  ingest->add_option("--data", ingest_data, "dataset directory")->required();
  ingest->add_option("--out", ingest_out, "output directory");
  ingest->add_option("--dump-segments", dump_segments, "write segments.jsonl to this path");

  // ---- features ----
  std::string features_data, features_config = "combined";
  std::string features_out = default_run_dir();
  auto* features_cmd = app.add_subcommand("features", "export per-object feature matrices as CSV");
  features_cmd->add_option("--data", features_data, "dataset directory")->required();
  features_cmd->add_option("--config", features_config, "onobject|offobject|combined");
  features_cmd->add_option("--out", features_out, "output directory");

  // ---- rmi ----
  std::string rmi_data, rmi_config = "onobject";
  std::string rmi_out = default_run_dir();
  auto* rmi_cmd = app.add_subcommand("rmi", "write the per-sensor max-RMI table");
  rmi_cmd->add_option("--data", rmi_data, "dataset directory")->required();
  rmi_cmd->add_option("--config", rmi_config, "onobject|offobject|combined");
  rmi_cmd->add_option("--out", rmi_out, "output directory");

  // ---- train ----
  std::string train_data, train_victim, train_config = "offobject", train_family = "forest";
  std::string train_out = default_run_dir();
  std::uint64_t train_seed = 0;
  bool train_seed_set = false;
  auto* train_cmd = app.add_subcommand("train", "fit per-object base models on the full pool");
  train_cmd->add_option("--data", train_data, "dataset directory")->required();
  train_cmd->add_option("--victim", train_victim, "victim user id")->required();
  train_cmd->add_option("--config", train_config, "onobject|offobject|combined");
  train_cmd->add_option("--family", train_family, "forest|svm");
  train_cmd->add_option("--seed", train_seed, "root seed")->required()
      ->each([&](const std::string&) { train_seed_set = true; });
  train_cmd->add_option("--out", train_out, "output directory");

  // ---- evaluate ----
  std::string eval_data, eval_victim, eval_config = "offobject", eval_family = "forest";
  std::string eval_out = default_run_dir();
  std::uint64_t eval_seed = 0;
  std::vector<double> eval_far = {0.01, 0.10};
  int eval_jobs = static_cast<int>(std::thread::hardware_concurrency());
  auto* eval_cmd = app.add_subcommand("evaluate", "cross-validated FRR@FAR evaluation");
  eval_cmd->add_option("--data", eval_data, "dataset directory")->required();
  eval_cmd->add_option("--victim", eval_victim, "victim user id")->required();
  eval_cmd->add_option("--config", eval_config, "onobject|offobject|combined");
  eval_cmd->add_option("--family", eval_family, "forest|svm");
  eval_cmd->add_option("--seed", eval_seed, "root seed")->required();
  eval_cmd->add_option("--far", eval_far, "FAR targets");
  eval_cmd->add_option("--jobs", eval_jobs, "worker threads");
  eval_cmd->add_option("--out", eval_out, "output directory");

  // ---- ensemble ----
  std::string ens_data, ens_victim, ens_config = "offobject", ens_family = "forest";
  std::string ens_out = default_run_dir();
  std::uint64_t ens_seed = 0;
  std::vector<double> ens_far = {0.01, 0.10};
  std::vector<std::string> ens_kinds = {"voting", "stacking"};
  int ens_max_size = 4;
  int ens_jobs = static_cast<int>(std::thread::hardware_concurrency());
  auto* ens_cmd = app.add_subcommand("ensemble", "ensemble-subset study and fitted meta-models");
  ens_cmd->add_option("--data", ens_data, "dataset directory")->required();
  ens_cmd->add_option("--victim", ens_victim, "victim user id")->required();
  ens_cmd->add_option("--config", ens_config, "onobject|offobject|combined");
  ens_cmd->add_option("--family", ens_family, "forest|svm");
  ens_cmd->add_option("--seed", ens_seed, "root seed")->required();
  ens_cmd->add_option("--far", ens_far, "FAR targets");
  ens_cmd->add_option("--kinds", ens_kinds, "voting, stacking");
  ens_cmd->add_option("--max-size", ens_max_size, "largest ensemble size");
  ens_cmd->add_option("--jobs", ens_jobs, "worker threads");
  ens_cmd->add_option("--out", ens_out, "output directory");

  // ---- report ----
  std::vector<std::string> report_inputs;
  std::string report_out = default_run_dir();
  auto* report_cmd = app.add_subcommand("report", "merge evaluation reports into flat tables");
  report_cmd->add_option("--in", report_inputs, "report.json files")->required();
  report_cmd->add_option("--out", report_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    json err = {{"error", {{"code", kExitValidation}, {"kind", "usage"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return kExitValidation;
  }

  try {
    using namespace sensauth;
    if (synth->parsed()) {
      run_synth(synth_args);
    } else if (ingest->parsed()) {
      fs::create_directories(ingest_out);
      const auto paths = data_paths(ingest_data);
      const Dataset ds = load(paths);
      const auto segmented = segment(ds);
      int open_events = 0;
      for (const auto& ev : ds.events) open_events += ev.kind == ContactKind::kOpen ? 1 : 0;
      std::printf("devices: %zu\nruns: %zu\ncontact pairs: %d\nsegments: %zu\ndropped: %d\n",
                  ds.device_ids().size(), ds.runs.size(), open_events, segmented.segments.size(),
                  segmented.dropped);
      std::vector<std::string> outputs;
      if (!dump_segments.empty()) {
        write_segments(segmented.segments, dump_segments);
        outputs.push_back(dump_segments);
      }
      json params = {{"data", ingest_data}};
      write_manifest(ingest_out, "ingest", params,
                     {paths.recordings, paths.runs}, outputs);
    } else if (features_cmd->parsed()) {
      fs::create_directories(features_out);
      const auto paths = data_paths(features_data);
      const Dataset ds = load(paths);
      const auto tables = build_object_tables(segment(ds), ds);
      const Config config = parse_config(features_config);
      std::vector<std::string> outputs;
      for (const auto& [object_id, table] : tables) {
        const std::string name = "features_" + object_id + ".csv";
        write_feature_csv(table, config, (fs::path(features_out) / name).string());
        outputs.push_back(name);
      }
      json params = {{"data", features_data}, {"config", features_config}};
      write_manifest(features_out, "features", params, {paths.recordings, paths.runs}, outputs);
      std::printf("features: %zu objects -> %s\n", tables.size(), features_out.c_str());
    } else if (rmi_cmd->parsed()) {
      fs::create_directories(rmi_out);
      const auto paths = data_paths(rmi_data);
      const Dataset ds = load(paths);
      const auto tables = build_object_tables(segment(ds), ds);
      const auto report = rmi_report(tables, parse_config(rmi_config));
      const std::string out_path = (fs::path(rmi_out) / "rmi_report.csv").string();
      write_rmi_csv(report, out_path);
      json params = {{"data", rmi_data}, {"config", rmi_config}};
      write_manifest(rmi_out, "rmi", params, {paths.recordings, paths.runs}, {"rmi_report.csv"});
      std::printf("rmi: %zu objects -> %s\n", report.size(), out_path.c_str());
    } else if (train_cmd->parsed()) {
      fs::create_directories(train_out);
      const auto paths = data_paths(train_data);
      const Dataset ds = load(paths);
      const auto tables = build_object_tables(segment(ds), ds);
      EvalOptions opts;
      opts.config = parse_config(train_config);
      opts.family = parse_family(train_family);
      opts.seed = train_seed;
      const auto production = train_production(tables, ds.runs, train_victim, opts);
      std::vector<std::string> outputs;
      for (const auto& [object_id, model] : production.models) {
        const std::string name = "model_" + object_id + ".json";
        save_model_bundle(model, (fs::path(train_out) / name).string());
        outputs.push_back(name);
      }
      json params = {{"data", train_data},
                     {"victim", train_victim},
                     {"config", train_config},
                     {"family", train_family},
                     {"seed", train_seed}};
      write_manifest(train_out, "train", params, {paths.recordings, paths.runs}, outputs);
      std::printf("train: %zu model bundles -> %s\n", production.models.size(), train_out.c_str());
    } else if (eval_cmd->parsed()) {
      fs::create_directories(eval_out);
      validate_far_targets(eval_far);
      const auto paths = data_paths(eval_data);
      const Dataset ds = load(paths);
      const auto tables = build_object_tables(segment(ds), ds);
      EvalOptions opts;
      opts.config = parse_config(eval_config);
      opts.family = parse_family(eval_family);
      opts.far_targets = eval_far;
      opts.seed = eval_seed;
      opts.jobs = std::max(1, eval_jobs);
      const auto report = evaluate_victim(tables, ds.runs, eval_victim, opts);
      json extra;
      extra["rmi"] = json::object();
      for (const auto& [object_id, values] : rmi_report(tables, opts.config)) {
        extra["rmi"][object_id] = {{"ACC", values[0]}, {"MAG", values[1]}, {"GYRO", values[2]},
                                   {"MIC", values[3]}};
      }
      write_report_json(report, (fs::path(eval_out) / "report.json").string(), &extra);
      write_roc_points_csv(report, (fs::path(eval_out) / "roc_points.csv").string());
      write_frr_at_far_csv({&report, 1}, (fs::path(eval_out) / "frr_at_far.csv").string());
      json params = {{"data", eval_data},   {"victim", eval_victim}, {"config", eval_config},
                     {"family", eval_family}, {"seed", eval_seed},     {"far", eval_far}};
      write_manifest(eval_out, "evaluate", params, {paths.recordings, paths.runs},
                     {"report.json", "roc_points.csv", "frr_at_far.csv"});
      for (const auto& row : report.averaged_zero_effort) {
        std::printf("zero-effort FRR@FAR=%g: %.4f\n", row.far_target, row.frr);
      }
      for (const auto& [kind, rows] : report.averaged_attacks) {
        for (const auto& row : rows) {
          std::printf("%s FRR@FAR=%g: %.4f\n", attack_kind_name(kind), row.far_target, row.frr);
        }
      }
    } else if (ens_cmd->parsed()) {
      fs::create_directories(ens_out);
      validate_far_targets(ens_far);
      const auto paths = data_paths(ens_data);
      const Dataset ds = load(paths);
      const auto tables = build_object_tables(segment(ds), ds);
      EvalOptions opts;
      opts.config = parse_config(ens_config);
      opts.family = parse_family(ens_family);
      opts.far_targets = ens_far;
      opts.seed = ens_seed;
      opts.jobs = std::max(1, ens_jobs);
      EnsembleOptions ens_options;
      ens_options.kinds.clear();
      for (const auto& kind : ens_kinds) {
        if (kind == "voting") {
          ens_options.kinds.push_back(EnsembleKind::kVoting);
        } else if (kind == "stacking") {
          ens_options.kinds.push_back(EnsembleKind::kStacking);
        } else {
          throw ValidationError("unknown ensemble kind " + kind);
        }
      }
      ens_options.max_size = ens_max_size;
      opts.stacking_oof = std::find(ens_options.kinds.begin(), ens_options.kinds.end(),
                                    EnsembleKind::kStacking) != ens_options.kinds.end();
      const auto bank = build_configuration(tables, ds.runs, ens_victim, opts);
      const auto study = ensemble_study(bank, ens_options);
      write_ensemble_report_json(study, (fs::path(ens_out) / "ensemble_report.json").string());
      std::vector<std::string> outputs = {"ensemble_report.json"};

      const auto production = train_production(tables, ds.runs, ens_victim, opts);
      for (EnsembleKind kind : ens_options.kinds) {
        if (kind == EnsembleKind::kVoting) {
          save_ensemble_manifest(make_voting_manifest(production, opts.far_targets),
                                 (fs::path(ens_out) / "ensemble_voting.json").string());
          outputs.push_back("ensemble_voting.json");
        } else {
          save_ensemble_manifest(train_stacking(tables, ds.runs, production, opts),
                                 (fs::path(ens_out) / "ensemble_stacking.json").string());
          outputs.push_back("ensemble_stacking.json");
        }
      }
      json params = {{"data", ens_data},     {"victim", ens_victim}, {"config", ens_config},
                     {"family", ens_family}, {"seed", ens_seed},     {"far", ens_far},
                     {"max_size", ens_max_size}};
      write_manifest(ens_out, "ensemble", params, {paths.recordings, paths.runs}, outputs);
      for (const auto& [kind, by_size] : study.mean_by_size) {
        for (const auto& [size, rows] : by_size) {
          for (const auto& row : rows) {
            std::printf("%s size=%d zero-effort FRR@FAR=%g: %.4f\n", ensemble_kind_name(kind),
                        size, row.far_target, row.frr);
          }
        }
      }
    } else if (report_cmd->parsed()) {
      fs::create_directories(report_out);
      // merge frr tables of previously written reports; configs become columns
      std::vector<json> loaded;
      for (const auto& path : report_inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open " + path);
        json j;
        in >> j;
        loaded.push_back(std::move(j));
      }
      json merged;
      merged["reports"] = json::array();
      std::vector<double> targets;
      for (const auto& j : loaded) {
        merged["reports"].push_back(j);
        if (targets.empty()) {
          for (const auto& t : j.at("far_targets")) targets.push_back(t.get<double>());
        }
      }
      std::ofstream out(fs::path(report_out) / "report.json", std::ios::binary);
      if (!out) throw IoError("cannot write merged report.json");
      out << merged.dump(2) << "\n";
      out.close();

      std::ofstream csv(fs::path(report_out) / "frr_at_far.csv", std::ios::binary);
      if (!csv) throw IoError("cannot write frr_at_far.csv");
      csv << "far";
      std::vector<std::pair<std::string, const json*>> columns;
      for (const auto& j : loaded) {
        const std::string prefix = j.at("config").get<std::string>();
        for (const auto& [key, value] : j.at("averaged").items()) {
          columns.emplace_back(prefix + "_" + key, &value);
          csv << "," << prefix << "_" << key;
        }
      }
      csv << "\n";
      char buf[64];
      for (double t : targets) {
        int len = std::snprintf(buf, sizeof buf, "%g", t);
        csv.write(buf, len);
        std::snprintf(buf, sizeof buf, "%g", t);
        const std::string key = buf;
        for (const auto& [name, value] : columns) {
          len = std::snprintf(buf, sizeof buf, ",%.4f", value->at(key).get<double>());
          csv.write(buf, len);
        }
        csv << "\n";
      }
      json params = {{"inputs", report_inputs}};
      write_manifest(report_out, "report", params, report_inputs,
                     {"report.json", "frr_at_far.csv"});
      std::printf("report: merged %zu inputs -> %s\n", loaded.size(), report_out.c_str());
    }
  } catch (const sensauth::ValidationError& e) {
    json err = {{"error", {{"code", kExitValidation}, {"kind", "validation"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return kExitValidation;
  } catch (const sensauth::TrainingError& e) {
    json err = {{"error", {{"code", kExitTraining}, {"kind", "training"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return kExitTraining;
  } catch (const sensauth::IoError& e) {
    json err = {{"error", {{"code", kExitIo}, {"kind", "io"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    json err = {{"error", {{"code", kExitValidation}, {"kind", "internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
