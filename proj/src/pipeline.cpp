// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include "sarvi/pipeline.hpp"

#include <set>
#include <string>

#include "sarvi/error.hpp"

namespace sarvi {

using nlohmann::json;

ModelKind kind_of(const ModelSpec& spec) {
  switch (spec.index()) {
    case 0: return ModelKind::tree;
    case 1: return ModelKind::forest;
    default: return ModelKind::gbt;
  }
}

namespace {

void reject_unknown(const json& config, const std::set<std::string>& allowed) {
  if (!config.is_object()) throw ValueError("model config must be a JSON object");
  for (const auto& [key, _] : config.items())
    if (!allowed.count(key)) throw ValueError("unknown hyperparameter '" + key + "'");
}

int get_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() && !(v.is_number() && v.get<double>() == static_cast<int>(v.get<double>())))
    throw ValueError(std::string(key) + " must be an integer");
  return static_cast<int>(v.get<double>());
}

double get_double(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ValueError(std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

MaxFeatures get_max_features(const json& j) {
  if (!j.contains("max_features") || j.at("max_features").is_null()) return MaxFeatures::all();
  const auto& v = j.at("max_features");
  if (v.is_string()) return MaxFeatures::parse(v.get<std::string>());
  if (v.is_number_integer()) {
    const int n = v.get<int>();
    if (n < 1) throw ValueError("max_features must be >= 1");
    return MaxFeatures::fixed(n);
  }
  throw ValueError("max_features must be a string or an integer");
}

TreeParams tree_from(const json& c, std::uint64_t seed) {
  TreeParams p;
  p.max_features = get_max_features(c);
  if (c.contains("criterion")) {
    const auto s = c.at("criterion").get<std::string>();
    if (s == "mae" || s == "absolute_error")
      p.criterion = Criterion::mae;
    else if (s == "mse" || s == "squared_error")
      p.criterion = Criterion::mse;
    else
      throw ValueError("unknown criterion '" + s + "'");
  }
  if (c.contains("max_depth") && !c.at("max_depth").is_null()) {
    p.max_depth = get_int(c, "max_depth", 0);
    if (*p.max_depth < 0) throw ValueError("max_depth must be >= 0");
  }
  p.min_samples_leaf = get_int(c, "min_samples_leaf", 1);
  if (p.min_samples_leaf < 1) throw ValueError("min_samples_leaf must be >= 1");
  p.seed = seed;
  return p;
}

}  // namespace

ModelSpec spec_from_config(ModelKind kind, const json& config, std::uint64_t seed) {
  const json c = config.is_null() ? json::object() : config;
  switch (kind) {
    case ModelKind::tree:
      reject_unknown(c, {"max_features", "criterion", "max_depth", "min_samples_leaf", "seed"});
      return tree_from(c, seed);
    case ModelKind::forest: {
      reject_unknown(c, {"n_estimators", "max_features", "criterion", "max_depth",
                         "min_samples_leaf", "bootstrap", "seed"});
      ForestParams p;
      p.tree = tree_from(c, seed);
      p.n_estimators = get_int(c, "n_estimators", p.n_estimators);
      if (p.n_estimators < 1) throw ValueError("n_estimators must be >= 1");
      if (c.contains("bootstrap")) p.bootstrap = c.at("bootstrap").get<bool>();
      return p;
    }
    case ModelKind::gbt: {
      reject_unknown(c, {"learning_rate", "max_depth", "n_estimators_cap", "n_estimators",
                         "early_stopping_rounds", "loss", "min_samples_leaf", "subsample",
                         "colsample_bytree", "seed"});
      GbtParams p;
      p.learning_rate = get_double(c, "learning_rate", p.learning_rate);
      p.max_depth = get_int(c, "max_depth", p.max_depth);
      p.n_estimators_cap = get_int(c, "n_estimators", p.n_estimators_cap);
      p.n_estimators_cap = get_int(c, "n_estimators_cap", p.n_estimators_cap);
      p.early_stopping_rounds = get_int(c, "early_stopping_rounds", p.early_stopping_rounds);
      p.min_samples_leaf = get_int(c, "min_samples_leaf", p.min_samples_leaf);
      p.subsample = get_double(c, "subsample", p.subsample);
      p.colsample_bytree = get_double(c, "colsample_bytree", p.colsample_bytree);
      if (c.contains("loss") && c.at("loss") != "absolute_error" && c.at("loss") != "mae")
        throw ValueError("only the absolute_error loss is supported");
      if (!(p.learning_rate > 0)) throw ValueError("learning_rate must be positive");
      if (p.max_depth < 1) throw ValueError("max_depth must be >= 1");
      if (p.n_estimators_cap < 1) throw ValueError("n_estimators_cap must be >= 1");
      if (p.early_stopping_rounds < 1) throw ValueError("early_stopping_rounds must be >= 1");
      p.seed = seed;
      return p;
    }
    case ModelKind::weighted_ensemble: break;
  }
  throw ValueError("weighted ensembles are built by ensemble selection, not from a config");
}

json spec_to_json(const ModelSpec& spec) {
  json j = std::visit([](const auto& p) { return to_json(p); }, spec);
  j["model"] = std::string(to_string(kind_of(spec)));
  return j;
}

Model train_model(const ModelSpec& spec, const Dataset& train, const Dataset* val, Target target,
                  const Deadline& deadline) {
  if (train.empty()) throw ValueError("training set is empty");
  Model m;
  if (const auto* tp = std::get_if<TreeParams>(&spec)) {
    const auto X = feature_matrix(train);
    const auto y = target_vector(train, target);
    m = fit_tree(X, y, *tp);
  } else if (const auto* fp = std::get_if<ForestParams>(&spec)) {
    const auto X = feature_matrix(train);
    const auto y = target_vector(train, target);
    m = fit_random_forest(X, y, *fp, deadline);
  } else {
    const auto& gp = std::get<GbtParams>(spec);
    if (val) {
      if (val->features != train.features)
        throw SchemaError("validation set uses different feature columns");
      m = fit_gbt(feature_matrix(train), target_vector(train, target), feature_matrix(*val),
                  target_vector(*val, target), gp, deadline);
    } else {
      auto [fit_part, stop_part] = split_by_area(train, kDefaultValidationFraction, gp.seed);
      m = fit_gbt(feature_matrix(fit_part), target_vector(fit_part, target),
                  feature_matrix(stop_part), target_vector(stop_part, target), gp, deadline);
    }
  }
  m.target_name = std::string(to_string(target));
  return m;
}

}  // namespace sarvi
