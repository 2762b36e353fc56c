#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensauth/fusion.hpp"
#include "sensauth/kfold.hpp"
#include "sensauth/logging.hpp"
#include "sensauth/metrics.hpp"
#include "sensauth/model.hpp"
#include "sensauth/mutual_info.hpp"
#include "sensauth/threadpool.hpp"

namespace sensauth {

struct EvalOptions {
  Config config = Config::kOffObject;
  ModelFamily family = ModelFamily::kForest;
  std::vector<double> far_targets = {0.01, 0.10};
  int outer_folds = 10;
  int top_k = kTopKFeatures;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool stacking_oof = false;  // also produce internal out-of-fold scores for stacking ensembles
  bool keep_models = false;   // retain fold models so extra attack sets can be scored later
};

// What survives of one fold's base model once its scores are banked: enough
// to refit (for stacking's internal folds) and to calibrate ensembles.
struct FoldModelInfo {
  SelectedFeatureSet selected;
  ForestParams forest_params;
  SvmParams svm_params;
  double grid_accuracy = 0.0;
  ScoreNormalizer normalizer;        // fitted on this fold's training scores
  std::vector<double> thresholds;    // raw-score thresholds, aligned with far_targets
  std::uint64_t seed = 0;
};

struct ObjectBank {
  std::string object_id;
  std::vector<std::size_t> rows;   // table rows of regular (non-attack) segments
  std::vector<int> row_run;        // index into ModelBank::run_ids
  std::vector<int> row_label;      // 1 = victim
  std::vector<double> oof_score;   // out-of-fold score per row
  std::vector<FoldModelInfo> folds;

  struct AttackRows {
    std::vector<std::size_t> rows;
    std::vector<std::string> run_ids;
  };
  std::map<AttackKind, AttackRows> attack_rows;
  // kind -> fold -> score per attack row (every fold model scores every
  // attack segment, pooled downstream)
  std::map<AttackKind, std::vector<std::vector<double>>> attack_scores;

  // fold -> per row: out-of-fold score within that fold's training partition
  // (NaN on the fold's own test rows); filled only when stacking_oof is set
  std::vector<std::vector<double>> stack_oof;

  // populated only when keep_models is set
  std::vector<TrainedBaseModel> fold_models;
};

// The full bank of base models per outer fold, for every object that
// qualifies under the configuration.
struct ModelBank {
  std::string victim;
  EvalOptions opts;
  std::vector<std::string> run_ids;  // regular runs, sorted
  std::vector<int> run_labels;
  std::vector<int> run_fold;
  int folds = 0;
  std::map<std::string, ObjectBank> objects;
  int skipped_objects = 0;
};

namespace detail {

inline int run_index(const std::vector<std::string>& run_ids, const std::string& id) {
  const auto it = std::lower_bound(run_ids.begin(), run_ids.end(), id);
  if (it == run_ids.end() || *it != id) return -1;
  return static_cast<int>(it - run_ids.begin());
}

struct FoldTask {
  const ObjectTable* table;
  ObjectBank* bank;
  int fold;
};

inline void run_fold_task(const FoldTask& task, const ModelBank& bank, const EvalOptions& opts) {
  ObjectBank& ob = *task.bank;
  const ObjectTable& table = *task.table;
  const int f = task.fold;

  std::vector<std::size_t> train_rows, train_pos, test_pos;
  std::vector<int> train_labels;
  for (std::size_t p = 0; p < ob.rows.size(); ++p) {
    if (bank.run_fold[static_cast<std::size_t>(ob.row_run[p])] == f) {
      test_pos.push_back(p);
    } else {
      train_rows.push_back(ob.rows[p]);
      train_pos.push_back(p);
      train_labels.push_back(ob.row_label[p]);
    }
  }

  const std::uint64_t model_seed =
      derive_seed(derive_seed(derive_seed(opts.seed, "base"), bank.victim + "/" + ob.object_id +
                              "/" + config_name(opts.config) + "/" + model_family_name(opts.family)),
                  static_cast<std::uint64_t>(f));
  TrainedBaseModel model = train_base_model(table, train_rows, train_labels, opts.config,
                                            opts.family, model_seed, opts.top_k);

  FoldModelInfo info;
  info.selected = model.selected;
  if (opts.family == ModelFamily::kForest) {
    info.forest_params = std::get<ForestModel>(model.model).params;
  } else {
    info.svm_params = std::get<SvmModel>(model.model).params;
  }
  info.grid_accuracy = model.grid_accuracy;
  info.seed = model_seed;

  std::vector<double> train_scores(train_rows.size());
  std::vector<double> genuine, impostor;
  for (std::size_t i = 0; i < train_rows.size(); ++i) {
    train_scores[i] = model.score_row(table, train_rows[i]);
    (train_labels[i] == 1 ? genuine : impostor).push_back(train_scores[i]);
  }
  info.normalizer = ScoreNormalizer::fit(train_scores);
  const RocCurve train_curve = roc(genuine, impostor);
  for (double target : opts.far_targets) {
    info.thresholds.push_back(threshold_at_far(train_curve, target));
  }

  for (std::size_t p : test_pos) ob.oof_score[p] = model.score_row(table, ob.rows[p]);

  for (auto& [kind, rows] : ob.attack_rows) {
    auto& per_fold = ob.attack_scores[kind];
    auto& scores = per_fold[static_cast<std::size_t>(f)];
    scores.resize(rows.rows.size());
    for (std::size_t i = 0; i < rows.rows.size(); ++i) {
      scores[i] = model.score_row(table, rows.rows[i]);
    }
  }

  if (opts.stacking_oof) {
    auto& oof = ob.stack_oof[static_cast<std::size_t>(f)];
    oof.assign(ob.rows.size(), std::numeric_limits<double>::quiet_NaN());
    const auto inner = stratified_kfold(train_labels, kInnerGridFolds,
                                        derive_seed(info.seed, "stack-folds"));
    int inner_k = 0;
    for (int g : inner) inner_k = std::max(inner_k, g + 1);
    for (int g = 0; g < inner_k; ++g) {
      std::vector<std::size_t> sub_rows;
      std::vector<int> sub_labels;
      std::vector<std::size_t> held_pos;
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        if (inner[i] == g) {
          held_pos.push_back(i);
        } else {
          sub_rows.push_back(train_rows[i]);
          sub_labels.push_back(train_labels[i]);
        }
      }
      const RowMatrix x_sub = gather(table, sub_rows, info.selected.table_columns);
      const std::uint64_t sub_seed = derive_seed(info.seed, static_cast<std::uint64_t>(1000 + g));
      if (opts.family == ModelFamily::kForest) {
        const auto sub_model = train_forest(x_sub, sub_labels, info.forest_params, sub_seed);
        for (std::size_t i : held_pos) {
          const auto feats = gather(table, {&train_rows[i], 1}, info.selected.table_columns);
          oof[train_pos[i]] = sub_model.score(feats.row(0));
        }
      } else {
        RowMatrix x_std = x_sub;
        const Standardizer scaler = Standardizer::fit(x_std);
        scaler.transform(x_std);
        const auto sub_model = train_svm(x_std, sub_labels, info.svm_params, sub_seed);
        for (std::size_t i : held_pos) {
          const auto feats = gather(table, {&train_rows[i], 1}, info.selected.table_columns);
          oof[train_pos[i]] = sub_model.decision(scaler.transform_row(feats.row(0)));
        }
      }
    }
  }

  ob.folds[static_cast<std::size_t>(f)] = std::move(info);
  if (opts.keep_models) ob.fold_models[static_cast<std::size_t>(f)] = std::move(model);
}

}  // namespace detail

// Trains the per-object base-model bank for one victim and configuration:
// features are selected and hyperparameters grid-searched independently per
// outer fold, then out-of-fold and attack scores are recorded. Folds are
// assigned at run granularity so they stay aligned across objects.
inline ModelBank build_configuration(const std::map<std::string, ObjectTable>& tables,
                                     const std::vector<RunMetadata>& runs,
                                     const std::string& victim, const EvalOptions& opts) {
  ModelBank bank;
  bank.victim = victim;
  bank.opts = opts;

  bool victim_known = false;
  for (const auto& run : runs) {
    victim_known = victim_known || run.user_id == victim ||
                   (run.attack != AttackKind::kNone && run.victim_id == victim);
    if (run.attack != AttackKind::kNone) continue;
    bank.run_ids.push_back(run.run_id);
    bank.run_labels.push_back(run.user_id == victim ? 1 : 0);
  }
  if (!victim_known) throw ValidationError("unknown victim " + victim);
  // runs come sorted from ingestion; enforce anyway for direct callers
  std::vector<std::size_t> order(bank.run_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return bank.run_ids[a] < bank.run_ids[b]; });
  {
    std::vector<std::string> ids(order.size());
    std::vector<int> labels(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      ids[i] = bank.run_ids[order[i]];
      labels[i] = bank.run_labels[order[i]];
    }
    bank.run_ids = std::move(ids);
    bank.run_labels = std::move(labels);
  }

  bank.run_fold = stratified_kfold(bank.run_labels, opts.outer_folds,
                                   derive_seed(opts.seed, "outer-folds:" + victim), &bank.folds);

  std::vector<detail::FoldTask> tasks;
  for (const auto& [object_id, table] : tables) {
    if (table.column_indices(opts.config).empty()) {
      log_warning("object " + object_id + " has no sensors in scope for " +
                  config_name(opts.config) + ", skipped");
      ++bank.skipped_objects;
      continue;
    }
    ObjectBank ob;
    ob.object_id = object_id;
    bool has_victim = false;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const SegmentKey& key = table.rows[r];
      if (key.attack == AttackKind::kNone) {
        const int run = detail::run_index(bank.run_ids, key.run_id);
        if (run < 0) continue;
        ob.rows.push_back(r);
        ob.row_run.push_back(run);
        ob.row_label.push_back(bank.run_labels[static_cast<std::size_t>(run)]);
        has_victim = has_victim || ob.row_label.back() == 1;
      } else if (key.victim_id == victim) {
        auto& ar = ob.attack_rows[key.attack];
        ar.rows.push_back(r);
        ar.run_ids.push_back(key.run_id);
      }
    }
    if (ob.rows.empty() || !has_victim) {
      log_warning("object " + object_id + " has no usable victim data, skipped");
      ++bank.skipped_objects;
      continue;
    }
    ob.oof_score.assign(ob.rows.size(), std::numeric_limits<double>::quiet_NaN());
    ob.folds.resize(static_cast<std::size_t>(bank.folds));
    for (auto& [kind, ar] : ob.attack_rows) {
      ob.attack_scores[kind].resize(static_cast<std::size_t>(bank.folds));
    }
    if (opts.stacking_oof) ob.stack_oof.resize(static_cast<std::size_t>(bank.folds));
    if (opts.keep_models) ob.fold_models.resize(static_cast<std::size_t>(bank.folds));
    bank.objects.emplace(object_id, std::move(ob));
  }

  for (auto& [object_id, ob] : bank.objects) {
    for (int f = 0; f < bank.folds; ++f) {
      tasks.push_back({&tables.at(object_id), &ob, f});
    }
  }
  parallel_for(tasks.size(), opts.jobs,
               [&](std::size_t i) { detail::run_fold_task(tasks[i], bank, opts); });
  return bank;
}

struct FrrRow {
  double far_target = 0.0;
  double frr = 0.0;
};

struct AttackResult {
  RocCurve curve;
  std::vector<FrrRow> frr;
};

struct ObjectReport {
  std::string object_id;
  AttackResult zero_effort;
  std::map<AttackKind, AttackResult> attacks;
};

struct EvaluationReport {
  std::string victim;
  Config config = Config::kOffObject;
  ModelFamily family = ModelFamily::kForest;
  std::uint64_t seed = 0;
  std::vector<double> far_targets;
  std::vector<ObjectReport> objects;
  std::vector<FrrRow> averaged_zero_effort;
  std::map<AttackKind, std::vector<FrrRow>> averaged_attacks;
  int skipped_objects = 0;
};

namespace detail {

inline AttackResult make_attack_result(std::span<const double> genuine,
                                       std::span<const double> impostor,
                                       std::span<const double> far_targets) {
  AttackResult out;
  out.curve = roc(genuine, impostor);
  for (double t : far_targets) out.frr.push_back({t, frr_at_far(out.curve, t)});
  return out;
}

}  // namespace detail

// Pools out-of-fold scores per object into the zero-effort protocol and
// scores attack segments against the same genuine pool.
inline EvaluationReport evaluate_victim(const ModelBank& bank) {
  const EvalOptions& opts = bank.opts;
  EvaluationReport report;
  report.victim = bank.victim;
  report.config = opts.config;
  report.family = opts.family;
  report.seed = opts.seed;
  report.far_targets = opts.far_targets;
  report.skipped_objects = bank.skipped_objects;

  std::vector<double> zero_sum(opts.far_targets.size(), 0.0);
  std::map<AttackKind, std::pair<std::vector<double>, int>> attack_sums;

  for (const auto& [object_id, ob] : bank.objects) {
    ObjectReport obj;
    obj.object_id = object_id;
    std::vector<double> genuine, impostor;
    for (std::size_t p = 0; p < ob.rows.size(); ++p) {
      (ob.row_label[p] == 1 ? genuine : impostor).push_back(ob.oof_score[p]);
    }
    obj.zero_effort = detail::make_attack_result(genuine, impostor, opts.far_targets);
    for (std::size_t t = 0; t < opts.far_targets.size(); ++t) {
      zero_sum[t] += obj.zero_effort.frr[t].frr;
    }
    for (const auto& [kind, per_fold] : ob.attack_scores) {
      std::vector<double> pooled;
      for (const auto& fold_scores : per_fold) {
        pooled.insert(pooled.end(), fold_scores.begin(), fold_scores.end());
      }
      if (pooled.empty()) continue;
      auto result = detail::make_attack_result(genuine, pooled, opts.far_targets);
      auto& [sums, count] = attack_sums[kind];
      if (sums.empty()) sums.assign(opts.far_targets.size(), 0.0);
      for (std::size_t t = 0; t < opts.far_targets.size(); ++t) sums[t] += result.frr[t].frr;
      ++count;
      obj.attacks.emplace(kind, std::move(result));
    }
    report.objects.push_back(std::move(obj));
  }
  if (report.objects.empty()) throw ValidationError("no objects evaluated");

  const double n_objects = static_cast<double>(report.objects.size());
  for (std::size_t t = 0; t < opts.far_targets.size(); ++t) {
    report.averaged_zero_effort.push_back({opts.far_targets[t], zero_sum[t] / n_objects});
  }
  for (const auto& [kind, sums] : attack_sums) {
    std::vector<FrrRow> rows;
    for (std::size_t t = 0; t < opts.far_targets.size(); ++t) {
      rows.push_back({opts.far_targets[t], sums.first[t] / static_cast<double>(sums.second)});
    }
    report.averaged_attacks.emplace(kind, std::move(rows));
  }
  return report;
}

inline EvaluationReport evaluate_victim(const std::map<std::string, ObjectTable>& tables,
                                        const std::vector<RunMetadata>& runs,
                                        const std::string& victim, const EvalOptions& opts) {
  return evaluate_victim(build_configuration(tables, runs, victim, opts));
}

struct EnsembleOptions {
  std::vector<EnsembleKind> kinds = {EnsembleKind::kVoting, EnsembleKind::kStacking};
  int max_size = 4;
};

struct SubsetResult {
  std::vector<std::string> members;
  std::vector<FrrRow> zero_effort;  // mean-score route
  // voting only: achieved (FAR, FRR) of the hard-vote rule per target
  std::vector<std::pair<double, double>> hard_points;
  std::map<AttackKind, std::vector<FrrRow>> attacks;
  int dropped_runs = 0;
};

struct EnsembleStudyReport {
  std::string victim;
  Config config = Config::kOffObject;
  ModelFamily family = ModelFamily::kForest;
  std::uint64_t seed = 0;
  std::vector<double> far_targets;
  std::map<EnsembleKind, std::vector<SubsetResult>> subsets;
  // kind -> ensemble size -> mean FRR rows (zero-effort)
  std::map<EnsembleKind, std::map<int, std::vector<FrrRow>>> mean_by_size;
  std::map<EnsembleKind, std::map<int, std::map<AttackKind, std::vector<FrrRow>>>> mean_attack_by_size;
  // independently computed per-object baseline (pooled normalized OOF scores)
  std::map<std::string, std::vector<FrrRow>> member_baseline;
};

namespace detail {

inline std::vector<std::vector<int>> combinations(int n, int size) {
  std::vector<std::vector<int>> out;
  std::vector<int> pick(static_cast<std::size_t>(size));
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == size) {
      out.push_back(pick);
      return;
    }
    for (int i = start; i < n; ++i) {
      pick[static_cast<std::size_t>(depth)] = i;
      self(self, i + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return out;
}

}  // namespace detail

// Every subset of unique objects up to max_size is evaluated on run-aligned
// samples: one segment per member from the same run, members scoring
// out-of-fold under the shared fold assignment. Runs missing any member's
// interaction are dropped and counted.
inline EnsembleStudyReport ensemble_study(const ModelBank& bank, const EnsembleOptions& ens_opts) {
  const EvalOptions& opts = bank.opts;
  EnsembleStudyReport report;
  report.victim = bank.victim;
  report.config = opts.config;
  report.family = opts.family;
  report.seed = opts.seed;
  report.far_targets = opts.far_targets;

  std::vector<const ObjectBank*> members;
  std::vector<std::string> member_ids;
  for (const auto& [object_id, ob] : bank.objects) {
    members.push_back(&ob);
    member_ids.push_back(object_id);
  }
  const int n_members = static_cast<int>(members.size());
  if (n_members < ens_opts.max_size) {
    throw ValidationError("ensemble_study: need at least " + std::to_string(ens_opts.max_size) +
                          " objects, have " + std::to_string(n_members));
  }

  // run -> first row position per member (-1 when the member misses the run)
  const std::size_t n_runs = bank.run_ids.size();
  std::vector<std::vector<int>> run_pos(members.size(), std::vector<int>(n_runs, -1));
  for (std::size_t m = 0; m < members.size(); ++m) {
    for (std::size_t p = 0; p < members[m]->rows.size(); ++p) {
      int& slot = run_pos[m][static_cast<std::size_t>(members[m]->row_run[p])];
      if (slot < 0) slot = static_cast<int>(p);
    }
  }

  // attack runs per kind: sorted ids, per member first matching row
  std::map<AttackKind, std::vector<std::string>> attack_runs;
  for (std::size_t m = 0; m < members.size(); ++m) {
    for (const auto& [kind, ar] : members[m]->attack_rows) {
      auto& ids = attack_runs[kind];
      ids.insert(ids.end(), ar.run_ids.begin(), ar.run_ids.end());
    }
  }
  for (auto& [kind, ids] : attack_runs) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  std::map<AttackKind, std::vector<std::vector<int>>> attack_pos;  // kind -> member -> run -> row
  for (const auto& [kind, ids] : attack_runs) {
    auto& per_member = attack_pos[kind];
    per_member.assign(members.size(), std::vector<int>(ids.size(), -1));
    for (std::size_t m = 0; m < members.size(); ++m) {
      const auto it = members[m]->attack_rows.find(kind);
      if (it == members[m]->attack_rows.end()) continue;
      for (std::size_t i = 0; i < it->second.run_ids.size(); ++i) {
        const auto pos = std::lower_bound(ids.begin(), ids.end(), it->second.run_ids[i]);
        if (pos != ids.end() && *pos == it->second.run_ids[i]) {
          int& slot = per_member[m][static_cast<std::size_t>(pos - ids.begin())];
          if (slot < 0) slot = static_cast<int>(i);
        }
      }
    }
  }

  // member per-object baseline through the plain metric path
  for (std::size_t m = 0; m < members.size(); ++m) {
    std::vector<double> genuine, impostor;
    for (std::size_t p = 0; p < members[m]->rows.size(); ++p) {
      const int f = bank.run_fold[static_cast<std::size_t>(members[m]->row_run[p])];
      const double s = members[m]->folds[static_cast<std::size_t>(f)].normalizer.apply(
          members[m]->oof_score[p]);
      (members[m]->row_label[p] == 1 ? genuine : impostor).push_back(s);
    }
    const RocCurve curve = roc(genuine, impostor);
    std::vector<FrrRow> rows;
    for (double t : opts.far_targets) rows.push_back({t, frr_at_far(curve, t)});
    report.member_baseline.emplace(member_ids[m], std::move(rows));
  }

  for (EnsembleKind kind : ens_opts.kinds) {
    auto& subset_results = report.subsets[kind];
    for (int size = 1; size <= ens_opts.max_size; ++size) {
      for (const auto& combo : detail::combinations(n_members, size)) {
        SubsetResult result;
        for (int m : combo) result.members.push_back(member_ids[static_cast<std::size_t>(m)]);

        // stacking: per-fold meta models over internal OOF member scores
        std::vector<StackingModel> meta(static_cast<std::size_t>(bank.folds));
        if (kind == EnsembleKind::kStacking) {
          for (int f = 0; f < bank.folds; ++f) {
            std::vector<double> rows_buf;
            std::vector<int> labels_buf;
            for (std::size_t r = 0; r < n_runs; ++r) {
              if (bank.run_fold[r] == f) continue;
              bool ok = true;
              for (int m : combo) ok = ok && run_pos[static_cast<std::size_t>(m)][r] >= 0;
              if (!ok) continue;
              bool finite = true;
              std::vector<double> feats;
              for (int m : combo) {
                const auto& ob = *members[static_cast<std::size_t>(m)];
                const double v = ob.stack_oof.empty()
                                     ? std::numeric_limits<double>::quiet_NaN()
                                     : ob.stack_oof[static_cast<std::size_t>(f)]
                                                  [static_cast<std::size_t>(
                                                       run_pos[static_cast<std::size_t>(m)][r])];
                finite = finite && std::isfinite(v);
                feats.push_back(v);
              }
              if (!finite) {
                throw ValidationError(
                    "ensemble_study: stacking requires a bank built with stacking_oof");
              }
              rows_buf.insert(rows_buf.end(), feats.begin(), feats.end());
              labels_buf.push_back(bank.run_labels[r]);
            }
            RowMatrix x;
            x.rows = labels_buf.size();
            x.cols = static_cast<std::size_t>(size);
            x.data = std::move(rows_buf);
            meta[static_cast<std::size_t>(f)] =
                fit_stacking_meta(x, labels_buf, result.members);
          }
        }

        std::vector<double> genuine, impostor;
        // hard-vote counters per target: accepted impostors, rejected genuine
        std::vector<std::array<int, 2>> hard(opts.far_targets.size(), {0, 0});
        int n_genuine = 0, n_impostor = 0;
        for (std::size_t r = 0; r < n_runs; ++r) {
          bool ok = true;
          for (int m : combo) ok = ok && run_pos[static_cast<std::size_t>(m)][r] >= 0;
          if (!ok) {
            ++result.dropped_runs;
            continue;
          }
          const int f = bank.run_fold[r];
          double ensemble_score = 0.0;
          if (kind == EnsembleKind::kVoting) {
            double sum = 0.0;
            for (int m : combo) {
              const auto& ob = *members[static_cast<std::size_t>(m)];
              const int p = run_pos[static_cast<std::size_t>(m)][r];
              sum += ob.folds[static_cast<std::size_t>(f)].normalizer.apply(
                  ob.oof_score[static_cast<std::size_t>(p)]);
            }
            ensemble_score = sum / static_cast<double>(size);
            for (std::size_t t = 0; t < opts.far_targets.size(); ++t) {
              int votes = 0;
              for (int m : combo) {
                const auto& ob = *members[static_cast<std::size_t>(m)];
                const int p = run_pos[static_cast<std::size_t>(m)][r];
                const auto& fm = ob.folds[static_cast<std::size_t>(f)];
                if (ob.oof_score[static_cast<std::size_t>(p)] >= fm.thresholds[t]) ++votes;
              }
              const int label = votes > size - votes ? 1 : 0;
              if (bank.run_labels[r] == 1 && label == 0) ++hard[t][1];
              if (bank.run_labels[r] == 0 && label == 1) ++hard[t][0];
            }
          } else {
            std::vector<double> feats;
            for (int m : combo) {
              const auto& ob = *members[static_cast<std::size_t>(m)];
              const int p = run_pos[static_cast<std::size_t>(m)][r];
              feats.push_back(ob.oof_score[static_cast<std::size_t>(p)]);
            }
            ensemble_score = meta[static_cast<std::size_t>(f)].score(feats);
          }
          if (bank.run_labels[r] == 1) {
            genuine.push_back(ensemble_score);
            ++n_genuine;
          } else {
            impostor.push_back(ensemble_score);
            ++n_impostor;
          }
        }

        const RocCurve curve = roc(genuine, impostor);
        for (double t : opts.far_targets) result.zero_effort.push_back({t, frr_at_far(curve, t)});
        if (kind == EnsembleKind::kVoting) {
          for (std::size_t t = 0; t < opts.far_targets.size(); ++t) {
            result.hard_points.push_back(
                {static_cast<double>(hard[t][0]) / std::max(1, n_impostor),
                 static_cast<double>(hard[t][1]) / std::max(1, n_genuine)});
          }
        }

        for (const auto& [akind, ids] : attack_runs) {
          const auto& per_member = attack_pos.at(akind);
          std::vector<double> attack_ensemble;
          for (std::size_t r = 0; r < ids.size(); ++r) {
            bool ok = true;
            for (int m : combo) ok = ok && per_member[static_cast<std::size_t>(m)][r] >= 0;
            if (!ok) continue;
            for (int f = 0; f < bank.folds; ++f) {
              if (kind == EnsembleKind::kVoting) {
                double sum = 0.0;
                for (int m : combo) {
                  const auto& ob = *members[static_cast<std::size_t>(m)];
                  const int p = per_member[static_cast<std::size_t>(m)][r];
                  sum += ob.folds[static_cast<std::size_t>(f)].normalizer.apply(
                      ob.attack_scores.at(akind)[static_cast<std::size_t>(f)]
                                                [static_cast<std::size_t>(p)]);
                }
                attack_ensemble.push_back(sum / static_cast<double>(size));
              } else {
                std::vector<double> feats;
                for (int m : combo) {
                  const auto& ob = *members[static_cast<std::size_t>(m)];
                  const int p = per_member[static_cast<std::size_t>(m)][r];
                  feats.push_back(ob.attack_scores.at(akind)[static_cast<std::size_t>(f)]
                                                            [static_cast<std::size_t>(p)]);
                }
                attack_ensemble.push_back(meta[static_cast<std::size_t>(f)].score(feats));
              }
            }
          }
          if (attack_ensemble.empty()) continue;
          const RocCurve acurve = roc(genuine, attack_ensemble);
          std::vector<FrrRow> rows;
          for (double t : opts.far_targets) rows.push_back({t, frr_at_far(acurve, t)});
          result.attacks.emplace(akind, std::move(rows));
        }

        subset_results.push_back(std::move(result));
      }
    }

    // means per size
    auto& by_size = report.mean_by_size[kind];
    auto& attack_by_size = report.mean_attack_by_size[kind];
    for (int size = 1; size <= ens_opts.max_size; ++size) {
      std::vector<double> sums(opts.far_targets.size(), 0.0);
      std::map<AttackKind, std::pair<std::vector<double>, int>> attack_sums;
      int count = 0;
      for (const auto& result : subset_results) {
        if (static_cast<int>(result.members.size()) != size) continue;
        ++count;
        for (std::size_t t = 0; t < sums.size(); ++t) sums[t] += result.zero_effort[t].frr;
        for (const auto& [akind, rows] : result.attacks) {
          auto& [asums, acount] = attack_sums[akind];
          if (asums.empty()) asums.assign(opts.far_targets.size(), 0.0);
          for (std::size_t t = 0; t < rows.size(); ++t) asums[t] += rows[t].frr;
          ++acount;
        }
      }
      std::vector<FrrRow> mean_rows;
      for (std::size_t t = 0; t < sums.size(); ++t) {
        mean_rows.push_back({opts.far_targets[t], sums[t] / std::max(1, count)});
      }
      by_size.emplace(size, std::move(mean_rows));
      for (const auto& [akind, pair] : attack_sums) {
        std::vector<FrrRow> rows;
        for (std::size_t t = 0; t < pair.first.size(); ++t) {
          rows.push_back({opts.far_targets[t], pair.first[t] / std::max(1, pair.second)});
        }
        attack_by_size[size].emplace(akind, std::move(rows));
      }
    }
  }
  return report;
}

// Scores an extra set of attack segments (same devices, same schema) with
// every retained fold model and reports FRR@FAR against the bank's pooled
// genuine scores, per object and averaged.
struct ExtraAttackResult {
  std::map<std::string, std::vector<FrrRow>> per_object;
  std::vector<FrrRow> averaged;
};

inline ExtraAttackResult score_attack_tables(const ModelBank& bank,
                                             const std::map<std::string, ObjectTable>& attack_tables,
                                             AttackKind kind) {
  const EvalOptions& opts = bank.opts;
  ExtraAttackResult out;
  std::vector<double> sums(opts.far_targets.size(), 0.0);
  int counted = 0;
  for (const auto& [object_id, ob] : bank.objects) {
    if (ob.fold_models.empty()) {
      throw ValidationError("score_attack_tables: bank was built without keep_models");
    }
    const auto it = attack_tables.find(object_id);
    if (it == attack_tables.end()) continue;
    const ObjectTable& table = it->second;
    // retained models index columns of the training schema; the attack table
    // must agree exactly
    if (!ob.fold_models.front().selected.table_columns.empty()) {
      for (std::size_t i = 0; i < ob.fold_models.front().selected.features.size(); ++i) {
        const auto& name = ob.fold_models.front().selected.features[i];
        const std::size_t col = ob.fold_models.front().selected.table_columns[i];
        if (col >= table.schema.size() || !(table.schema[col] == name)) {
          throw ValidationError("score_attack_tables: schema mismatch for " + object_id);
        }
      }
    }
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      if (table.rows[r].attack == kind && table.rows[r].victim_id == bank.victim) rows.push_back(r);
    }
    if (rows.empty()) continue;

    std::vector<double> genuine;
    for (std::size_t p = 0; p < ob.rows.size(); ++p) {
      if (ob.row_label[p] == 1) genuine.push_back(ob.oof_score[p]);
    }
    std::vector<double> pooled;
    pooled.reserve(rows.size() * static_cast<std::size_t>(bank.folds));
    for (int f = 0; f < bank.folds; ++f) {
      const TrainedBaseModel& model = ob.fold_models[static_cast<std::size_t>(f)];
      for (std::size_t r : rows) pooled.push_back(model.score_row(table, r));
    }
    const RocCurve curve = roc(genuine, pooled);
    std::vector<FrrRow> frr;
    for (std::size_t t = 0; t < opts.far_targets.size(); ++t) {
      frr.push_back({opts.far_targets[t], frr_at_far(curve, opts.far_targets[t])});
      sums[t] += frr.back().frr;
    }
    out.per_object.emplace(object_id, std::move(frr));
    ++counted;
  }
  if (counted == 0) throw ValidationError("score_attack_tables: no matching attack segments");
  for (std::size_t t = 0; t < opts.far_targets.size(); ++t) {
    out.averaged.push_back({opts.far_targets[t], sums[t] / counted});
  }
  return out;
}

}  // namespace sensauth
