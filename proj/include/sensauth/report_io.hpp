#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensauth/evaluate.hpp"
#include "sensauth/types.hpp"

namespace sensauth {

namespace detail {

inline std::string far_key(double target) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", target);
  return buf;
}

inline nlohmann::json frr_rows_to_json(const std::vector<FrrRow>& rows) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& row : rows) j[far_key(row.far_target)] = row.frr;
  return j;
}

inline nlohmann::json curve_to_json(const RocCurve& curve) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : curve.points) {
    j.push_back({std::isinf(p.threshold) ? nlohmann::json("inf") : nlohmann::json(p.threshold),
                 p.far, p.frr});
  }
  return j;
}

inline nlohmann::json attack_result_to_json(const AttackResult& r, bool with_curve) {
  nlohmann::json j;
  j["frr_at_far"] = frr_rows_to_json(r.frr);
  if (with_curve) j["roc"] = curve_to_json(r.curve);
  return j;
}

}  // namespace detail

inline nlohmann::json report_to_json(const EvaluationReport& report, bool with_curves = true) {
  nlohmann::json j;
  j["victim"] = report.victim;
  j["config"] = config_name(report.config);
  j["family"] = model_family_name(report.family);
  j["seed"] = report.seed;
  nlohmann::json targets = nlohmann::json::array();
  for (double t : report.far_targets) targets.push_back(t);
  j["far_targets"] = std::move(targets);
  j["skipped_objects"] = report.skipped_objects;

  nlohmann::json objects = nlohmann::json::object();
  for (const auto& obj : report.objects) {
    nlohmann::json o;
    o["zero_effort"] = detail::attack_result_to_json(obj.zero_effort, with_curves);
    nlohmann::json attacks = nlohmann::json::object();
    for (const auto& [kind, result] : obj.attacks) {
      attacks[attack_kind_name(kind)] = detail::attack_result_to_json(result, with_curves);
    }
    o["attacks"] = std::move(attacks);
    objects[obj.object_id] = std::move(o);
  }
  j["objects"] = std::move(objects);

  nlohmann::json averaged;
  averaged["zero_effort"] = detail::frr_rows_to_json(report.averaged_zero_effort);
  for (const auto& [kind, rows] : report.averaged_attacks) {
    averaged[attack_kind_name(kind)] = detail::frr_rows_to_json(rows);
  }
  j["averaged"] = std::move(averaged);
  return j;
}

inline void write_report_json(const EvaluationReport& report, const std::string& path,
                              const nlohmann::json* extra = nullptr) {
  nlohmann::json j = report_to_json(report);
  if (extra != nullptr) {
    for (const auto& [key, value] : extra->items()) j[key] = value;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path);
}

// Long-format ROC dump: object "all" rows pool scores across objects.
inline void write_roc_points_csv(const EvaluationReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "object,attack,threshold,far,frr\n";
  char buf[160];
  auto emit = [&](const std::string& object, const std::string& attack, const RocCurve& curve) {
    for (const auto& p : curve.points) {
      if (std::isinf(p.threshold)) {
        const int len = std::snprintf(buf, sizeof buf, "%s,%s,inf,%.17g,%.17g\n", object.c_str(),
                                      attack.c_str(), p.far, p.frr);
        out.write(buf, len);
      } else {
        const int len = std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g\n", object.c_str(),
                                      attack.c_str(), p.threshold, p.far, p.frr);
        out.write(buf, len);
      }
    }
  };
  for (const auto& obj : report.objects) {
    emit(obj.object_id, "zero_effort", obj.zero_effort.curve);
    for (const auto& [kind, result] : obj.attacks) emit(obj.object_id, attack_kind_name(kind), result.curve);
  }
  if (!out) throw IoError("failed writing " + path);
}

// Rows = FAR targets, columns = config x attack kind, averaged across
// objects; reports for different configs merge into one sheet.
inline void write_frr_at_far_csv(std::span<const EvaluationReport> reports,
                                 const std::string& path) {
  if (reports.empty()) throw ValidationError("write_frr_at_far_csv: no reports");
  const auto& targets = reports.front().far_targets;

  std::vector<std::pair<std::string, const std::vector<FrrRow>*>> columns;
  for (const auto& report : reports) {
    const std::string prefix = config_name(report.config);
    columns.emplace_back(prefix + "_zero_effort", &report.averaged_zero_effort);
    for (const auto& [kind, rows] : report.averaged_attacks) {
      columns.emplace_back(prefix + "_" + attack_kind_name(kind), &rows);
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "far";
  for (const auto& [name, rows] : columns) out << "," << name;
  out << "\n";
  char buf[64];
  for (std::size_t t = 0; t < targets.size(); ++t) {
    int len = std::snprintf(buf, sizeof buf, "%g", targets[t]);
    out.write(buf, len);
    for (const auto& [name, rows] : columns) {
      len = std::snprintf(buf, sizeof buf, ",%.4f", (*rows)[t].frr);
      out.write(buf, len);
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path);
}

inline nlohmann::json ensemble_report_to_json(const EnsembleStudyReport& report) {
  nlohmann::json j;
  j["victim"] = report.victim;
  j["config"] = config_name(report.config);
  j["family"] = model_family_name(report.family);
  j["seed"] = report.seed;
  nlohmann::json targets = nlohmann::json::array();
  for (double t : report.far_targets) targets.push_back(t);
  j["far_targets"] = std::move(targets);

  nlohmann::json baseline = nlohmann::json::object();
  for (const auto& [object_id, rows] : report.member_baseline) {
    baseline[object_id] = detail::frr_rows_to_json(rows);
  }
  j["member_baseline"] = std::move(baseline);

  nlohmann::json kinds = nlohmann::json::object();
  for (const auto& [kind, subsets] : report.subsets) {
    nlohmann::json k;
    nlohmann::json subsets_json = nlohmann::json::array();
    for (const auto& subset : subsets) {
      nlohmann::json s;
      s["members"] = subset.members;
      s["zero_effort"] = detail::frr_rows_to_json(subset.zero_effort);
      if (!subset.hard_points.empty()) {
        nlohmann::json hard = nlohmann::json::object();
        for (std::size_t t = 0; t < subset.hard_points.size(); ++t) {
          hard[detail::far_key(report.far_targets[t])] = {{"far", subset.hard_points[t].first},
                                                          {"frr", subset.hard_points[t].second}};
        }
        s["hard_vote"] = std::move(hard);
      }
      if (!subset.attacks.empty()) {
        nlohmann::json attacks = nlohmann::json::object();
        for (const auto& [akind, rows] : subset.attacks) {
          attacks[attack_kind_name(akind)] = detail::frr_rows_to_json(rows);
        }
        s["attacks"] = std::move(attacks);
      }
      if (subset.dropped_runs > 0) s["dropped_runs"] = subset.dropped_runs;
      subsets_json.push_back(std::move(s));
    }
    k["subsets"] = std::move(subsets_json);

    nlohmann::json means = nlohmann::json::object();
    for (const auto& [size, rows] : report.mean_by_size.at(kind)) {
      means[std::to_string(size)] = detail::frr_rows_to_json(rows);
    }
    k["mean_zero_effort_by_size"] = std::move(means);
    if (auto it = report.mean_attack_by_size.find(kind); it != report.mean_attack_by_size.end()) {
      nlohmann::json ameans = nlohmann::json::object();
      for (const auto& [size, per_kind] : it->second) {
        nlohmann::json row = nlohmann::json::object();
        for (const auto& [akind, rows] : per_kind) {
          row[attack_kind_name(akind)] = detail::frr_rows_to_json(rows);
        }
        ameans[std::to_string(size)] = std::move(row);
      }
      k["mean_attacks_by_size"] = std::move(ameans);
    }
    kinds[ensemble_kind_name(kind)] = std::move(k);
  }
  j["ensembles"] = std::move(kinds);
  return j;
}

inline void write_ensemble_report_json(const EnsembleStudyReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << ensemble_report_to_json(report).dump(2) << "\n";
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace sensauth
