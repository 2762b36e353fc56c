#pragma once

#include <map>
#include <string>
#include <vector>

#include "sensauth/evaluate.hpp"
#include "sensauth/fusion.hpp"
#include "sensauth/model.hpp"

namespace sensauth {

// Deployment-style training: one model per object fitted on the whole
// regular pool, with the calibration data ensembles need at decision time.
struct ProductionModels {
  std::string victim;
  std::map<std::string, TrainedBaseModel> models;
  std::map<std::string, ScoreNormalizer> normalizers;
  std::map<std::string, std::vector<double>> thresholds;  // aligned with far_targets
};

inline ProductionModels train_production(const std::map<std::string, ObjectTable>& tables,
                                         const std::vector<RunMetadata>& runs,
                                         const std::string& victim, const EvalOptions& opts) {
  ProductionModels out;
  out.victim = victim;
  bool victim_known = false;
  for (const auto& run : runs) victim_known = victim_known || run.user_id == victim;
  if (!victim_known) throw ValidationError("unknown victim " + victim);

  for (const auto& [object_id, table] : tables) {
    if (table.column_indices(opts.config).empty()) {
      log_warning("object " + object_id + " has no sensors in scope for " +
                  config_name(opts.config) + ", skipped");
      continue;
    }
    std::vector<std::size_t> rows;
    std::vector<int> labels;
    bool has_victim = false;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      if (table.rows[r].attack != AttackKind::kNone) continue;
      rows.push_back(r);
      labels.push_back(table.rows[r].user_id == victim ? 1 : 0);
      has_victim = has_victim || labels.back() == 1;
    }
    if (rows.empty() || !has_victim) {
      log_warning("object " + object_id + " has no usable victim data, skipped");
      continue;
    }
    const std::uint64_t seed = derive_seed(
        derive_seed(opts.seed, "production"),
        victim + "/" + object_id + "/" + config_name(opts.config) + "/" +
            model_family_name(opts.family));
    TrainedBaseModel model =
        train_base_model(table, rows, labels, opts.config, opts.family, seed, opts.top_k);

    std::vector<double> scores(rows.size());
    std::vector<double> genuine, impostor;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      scores[i] = model.score_row(table, rows[i]);
      (labels[i] == 1 ? genuine : impostor).push_back(scores[i]);
    }
    out.normalizers[object_id] = ScoreNormalizer::fit(scores);
    const RocCurve curve = roc(genuine, impostor);
    std::vector<double> thresholds;
    for (double t : opts.far_targets) thresholds.push_back(threshold_at_far(curve, t));
    out.thresholds[object_id] = std::move(thresholds);
    out.models.emplace(object_id, std::move(model));
  }
  if (out.models.empty()) throw ValidationError("train_production: no trainable objects");
  return out;
}

inline EnsembleManifest make_voting_manifest(const ProductionModels& production,
                                             const std::vector<double>& far_targets) {
  EnsembleManifest m;
  m.kind = EnsembleKind::kVoting;
  m.far_targets = far_targets;
  for (const auto& [object_id, model] : production.models) m.members.push_back(object_id);
  m.thresholds.resize(far_targets.size());
  for (std::size_t t = 0; t < far_targets.size(); ++t) {
    for (const auto& object_id : m.members) {
      m.thresholds[t].push_back(production.thresholds.at(object_id)[t]);
    }
  }
  return m;
}

// Stacked logistic meta-classifier over the production members, trained on
// out-of-fold member scores from an internal run-level split.
inline EnsembleManifest train_stacking(const std::map<std::string, ObjectTable>& tables,
                                       const std::vector<RunMetadata>& runs,
                                       const ProductionModels& production,
                                       const EvalOptions& opts) {
  std::vector<std::pair<std::string, int>> run_list;
  for (const auto& run : runs) {
    if (run.attack != AttackKind::kNone) continue;
    run_list.emplace_back(run.run_id, run.user_id == production.victim ? 1 : 0);
  }
  std::sort(run_list.begin(), run_list.end());
  std::vector<std::string> run_ids;
  std::vector<int> run_labels;
  for (auto& [id, label] : run_list) {
    run_ids.push_back(id);
    run_labels.push_back(label);
  }

  std::vector<std::string> members;
  for (const auto& [object_id, model] : production.models) members.push_back(object_id);
  const std::size_t n_members = members.size();
  const std::size_t n_runs = run_ids.size();

  const auto folds = stratified_kfold(run_labels, kInnerGridFolds,
                                      derive_seed(opts.seed, "stacking:" + production.victim));
  int n_folds = 0;
  for (int f : folds) n_folds = std::max(n_folds, f + 1);

  std::vector<double> oof(n_runs * n_members, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t m = 0; m < n_members; ++m) {
    const ObjectTable& table = tables.at(members[m]);
    const TrainedBaseModel& base = production.models.at(members[m]);
    // rows per run
    std::vector<int> run_row(n_runs, -1);
    std::vector<std::size_t> rows;
    std::vector<int> labels;
    std::vector<int> row_run;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      if (table.rows[r].attack != AttackKind::kNone) continue;
      const int idx = detail::run_index(run_ids, table.rows[r].run_id);
      if (idx < 0) continue;
      if (run_row[static_cast<std::size_t>(idx)] < 0) {
        run_row[static_cast<std::size_t>(idx)] = static_cast<int>(rows.size());
      }
      rows.push_back(r);
      labels.push_back(run_labels[static_cast<std::size_t>(idx)]);
      row_run.push_back(idx);
    }
    for (int f = 0; f < n_folds; ++f) {
      std::vector<std::size_t> train_rows;
      std::vector<int> train_labels;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (folds[static_cast<std::size_t>(row_run[i])] != f) {
          train_rows.push_back(rows[i]);
          train_labels.push_back(labels[i]);
        }
      }
      const RowMatrix x = gather(table, train_rows, base.selected.table_columns);
      const std::uint64_t sub_seed =
          derive_seed(derive_seed(opts.seed, "stacking-fit:" + members[m]),
                      static_cast<std::uint64_t>(f));
      if (opts.family == ModelFamily::kForest) {
        const auto sub = train_forest(x, train_labels, std::get<ForestModel>(base.model).params,
                                      sub_seed);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (folds[static_cast<std::size_t>(row_run[i])] != f) continue;
          const auto feats = gather(table, {&rows[i], 1}, base.selected.table_columns);
          oof[static_cast<std::size_t>(row_run[i]) * n_members + m] = sub.score(feats.row(0));
        }
      } else {
        RowMatrix x_std = x;
        const Standardizer scaler = Standardizer::fit(x_std);
        scaler.transform(x_std);
        const auto sub = train_svm(x_std, train_labels, std::get<SvmModel>(base.model).params,
                                   sub_seed);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (folds[static_cast<std::size_t>(row_run[i])] != f) continue;
          const auto feats = gather(table, {&rows[i], 1}, base.selected.table_columns);
          oof[static_cast<std::size_t>(row_run[i]) * n_members + m] =
              sub.decision(scaler.transform_row(feats.row(0)));
        }
      }
    }
  }

  // keep runs where every member produced a score
  std::vector<double> data;
  std::vector<int> labels;
  for (std::size_t r = 0; r < n_runs; ++r) {
    bool ok = true;
    for (std::size_t m = 0; m < n_members; ++m) ok = ok && std::isfinite(oof[r * n_members + m]);
    if (!ok) continue;
    for (std::size_t m = 0; m < n_members; ++m) data.push_back(oof[r * n_members + m]);
    labels.push_back(run_labels[r]);
  }
  RowMatrix x;
  x.rows = labels.size();
  x.cols = n_members;
  x.data = std::move(data);
  const StackingModel meta = fit_stacking_meta(x, labels, members);

  EnsembleManifest manifest;
  manifest.kind = EnsembleKind::kStacking;
  manifest.members = members;
  manifest.far_targets = opts.far_targets;
  manifest.meta_weights = meta.meta.weights;
  manifest.meta_intercept = meta.meta.intercept;
  return manifest;
}

}  // namespace sensauth
