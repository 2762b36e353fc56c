#pragma once

#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sensauth/grid.hpp"
#include "sensauth/mutual_info.hpp"
#include "sensauth/types.hpp"

namespace sensauth {

// One object's fitted base classifier: selected features, the scaler on the
// SVM path, and the model itself. score() is oriented so that higher means
// more victim-like for both families.
struct TrainedBaseModel {
  std::string object_id;
  Config config = Config::kOnObject;
  ModelFamily family = ModelFamily::kForest;
  std::uint64_t seed = 0;
  SelectedFeatureSet selected;
  std::optional<Standardizer> scaler;
  std::variant<ForestModel, SvmModel> model;
  double grid_accuracy = 0.0;

  double score_features(std::span<const double> features) const {
    if (family == ModelFamily::kForest) return std::get<ForestModel>(model).score(features);
    const auto row = scaler->transform_row(features);
    return std::get<SvmModel>(model).decision(row);
  }

  std::vector<double> gather_features(const ObjectTable& table, std::size_t row) const {
    std::vector<double> out(selected.table_columns.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = table.at(row, selected.table_columns[i]);
    return out;
  }

  double score_row(const ObjectTable& table, std::size_t row) const {
    return score_features(gather_features(table, row));
  }
};

// Full base-learner pipeline on one training partition: select the top-k
// features by MI, grid-search hyperparameters on an inner stratified 5-fold
// split, then fit on the whole partition.
inline TrainedBaseModel train_base_model(const ObjectTable& table,
                                         std::span<const std::size_t> rows,
                                         std::span<const int> labels, Config config,
                                         ModelFamily family, std::uint64_t seed,
                                         int top_k = kTopKFeatures) {
  TrainedBaseModel out;
  out.object_id = table.object_id;
  out.config = config;
  out.family = family;
  out.seed = seed;
  out.selected = select_top_k(table, config, rows, labels, top_k);

  const RowMatrix x = gather(table, rows, out.selected.table_columns);
  if (family == ModelFamily::kForest) {
    const auto search = grid_search_forest(x, labels, derive_seed(seed, "grid"));
    out.grid_accuracy = search.mean_accuracy;
    out.model = train_forest(x, labels, search.params, derive_seed(seed, "fit"));
  } else {
    const auto search = grid_search_svm(x, labels, derive_seed(seed, "grid"));
    out.grid_accuracy = search.mean_accuracy;
    out.scaler = Standardizer::fit(x);
    RowMatrix x_std = x;
    out.scaler->transform(x_std);
    out.model = train_svm(x_std, labels, search.params, derive_seed(seed, "fit"));
  }
  return out;
}

namespace detail {

inline nlohmann::json forest_to_json(const ForestModel& m) {
  nlohmann::json j;
  j["n_estimators"] = m.params.n_estimators;
  j["max_depth"] = m.params.max_depth;
  j["subsample"] = feature_subsample_name(m.params.subsample);
  j["seed"] = m.seed;
  j["dim"] = m.dim;
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : m.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.count0, n.count1});
    }
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j;
}

inline ForestModel forest_from_json(const nlohmann::json& j) {
  ForestModel m;
  m.params.n_estimators = j.at("n_estimators").get<int>();
  m.params.max_depth = j.at("max_depth").get<int>();
  m.params.subsample = j.at("subsample").get<std::string>() == "sqrt" ? FeatureSubsample::kSqrt
                                                                      : FeatureSubsample::kLog2;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.dim = j.at("dim").get<std::size_t>();
  for (const auto& tree_json : j.at("trees")) {
    DecisionTree tree;
    for (const auto& n : tree_json) {
      tree.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                            n.at(3).get<int>(), n.at(4).get<std::int32_t>(),
                            n.at(5).get<std::int32_t>()});
    }
    m.trees.push_back(std::move(tree));
  }
  return m;
}

inline nlohmann::json svm_to_json(const SvmModel& m) {
  nlohmann::json j;
  j["c"] = m.params.c;
  j["gamma"] = m.params.gamma;
  j["kernel"] = svm_kernel_name(m.params.kernel);
  j["dim"] = m.dim;
  j["bias"] = m.bias;
  j["alpha_y"] = m.alpha_y;
  j["support"] = m.support;
  return j;
}

inline SvmModel svm_from_json(const nlohmann::json& j) {
  SvmModel m;
  m.params.c = j.at("c").get<double>();
  m.params.gamma = j.at("gamma").get<double>();
  const std::string kernel = j.at("kernel").get<std::string>();
  for (SvmKernel k : {SvmKernel::kLinear, SvmKernel::kPolynomial, SvmKernel::kRbf,
                      SvmKernel::kSigmoid}) {
    if (kernel == svm_kernel_name(k)) m.params.kernel = k;
  }
  m.dim = j.at("dim").get<std::size_t>();
  m.bias = j.at("bias").get<double>();
  m.alpha_y = j.at("alpha_y").get<std::vector<double>>();
  m.support = j.at("support").get<std::vector<double>>();
  return m;
}

}  // namespace detail

constexpr int kModelBundleVersion = 1;

// Self-describing JSON container: manifest (identity, params, feature list,
// seed) plus the fitted model payload.
inline nlohmann::json model_bundle_to_json(const TrainedBaseModel& m) {
  nlohmann::json manifest;
  manifest["object"] = m.object_id;
  manifest["config"] = config_name(m.config);
  manifest["family"] = model_family_name(m.family);
  manifest["seed"] = m.seed;
  manifest["grid_accuracy"] = m.grid_accuracy;
  nlohmann::json feats = nlohmann::json::array();
  for (const auto& f : m.selected.features) feats.push_back(f.str());
  manifest["features"] = std::move(feats);
  if (m.family == ModelFamily::kForest) {
    const auto& fm = std::get<ForestModel>(m.model);
    manifest["params"] = {{"n_estimators", fm.params.n_estimators},
                          {"max_depth", fm.params.max_depth},
                          {"subsample", feature_subsample_name(fm.params.subsample)}};
  } else {
    const auto& sm = std::get<SvmModel>(m.model);
    manifest["params"] = {{"C", sm.params.c},
                          {"gamma", sm.params.gamma},
                          {"kernel", svm_kernel_name(sm.params.kernel)}};
  }

  nlohmann::json j;
  j["format"] = "sensauth-model-bundle";
  j["version"] = kModelBundleVersion;
  j["manifest"] = std::move(manifest);
  if (m.scaler) {
    j["scaler"] = {{"mean", m.scaler->mean}, {"scale", m.scaler->scale}};
  }
  j["model"] = m.family == ModelFamily::kForest
                   ? detail::forest_to_json(std::get<ForestModel>(m.model))
                   : detail::svm_to_json(std::get<SvmModel>(m.model));
  return j;
}

inline TrainedBaseModel model_bundle_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != "sensauth-model-bundle") {
    throw ValidationError("not a model bundle");
  }
  if (j.at("version").get<int>() != kModelBundleVersion) {
    throw ValidationError("unsupported model bundle version");
  }
  TrainedBaseModel m;
  const auto& manifest = j.at("manifest");
  m.object_id = manifest.at("object").get<std::string>();
  const auto config = config_from(manifest.at("config").get<std::string>());
  if (!config) throw ValidationError("bad config in model bundle");
  m.config = *config;
  m.family = manifest.at("family").get<std::string>() == "forest" ? ModelFamily::kForest
                                                                  : ModelFamily::kSvm;
  m.seed = manifest.at("seed").get<std::uint64_t>();
  m.grid_accuracy = manifest.value("grid_accuracy", 0.0);
  m.selected.object_id = m.object_id;
  m.selected.config = m.config;
  for (const auto& f : manifest.at("features")) {
    const auto name = FeatureName::parse(f.get<std::string>());
    if (!name) throw ValidationError("bad feature name in model bundle: " + f.get<std::string>());
    m.selected.features.push_back(*name);
  }
  if (j.contains("scaler")) {
    Standardizer s;
    s.mean = j.at("scaler").at("mean").get<std::vector<double>>();
    s.scale = j.at("scaler").at("scale").get<std::vector<double>>();
    m.scaler = std::move(s);
  }
  if (m.family == ModelFamily::kForest) {
    m.model = detail::forest_from_json(j.at("model"));
  } else {
    m.model = detail::svm_from_json(j.at("model"));
  }
  return m;
}

inline void save_model_bundle(const TrainedBaseModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << model_bundle_to_json(m).dump() << "\n";
  if (!out) throw IoError("failed writing " + path);
}

inline TrainedBaseModel load_model_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": malformed model bundle: " + e.what());
  }
  return model_bundle_from_json(j);
}

// Maps the bundle's feature names back onto a table's schema columns so
// score_row works on freshly extracted data.
inline void rebind_columns(TrainedBaseModel& m, const ObjectTable& table) {
  m.selected.table_columns.clear();
  for (const auto& name : m.selected.features) {
    const auto it = std::lower_bound(table.schema.begin(), table.schema.end(), name);
    if (it == table.schema.end() || !(*it == name)) {
      throw ValidationError("feature " + name.str() + " missing from table of " + table.object_id);
    }
    m.selected.table_columns.push_back(static_cast<std::size_t>(it - table.schema.begin()));
  }
}

}  // namespace sensauth
