// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sarvi/datamodel.hpp"

namespace sarvi {

/// Cooperative wall-clock limit checked between trees and boosting rounds.
class Deadline {
 public:
  Deadline() = default;
  static Deadline after(std::chrono::duration<double> d);
  static Deadline at(std::chrono::steady_clock::time_point t) { return Deadline(t); }

  bool expired() const;
  /// Throws TimeoutError when expired.
  void check() const;
  bool unlimited() const noexcept { return !at_; }

 private:
  explicit Deadline(std::chrono::steady_clock::time_point t) : at_(t) {}
  std::optional<std::chrono::steady_clock::time_point> at_;
};

/// Number of features drawn at each split.
struct MaxFeatures {
  enum class Mode { all, sqrt, log2, count };
  Mode mode = Mode::all;
  int count = 0;

  static MaxFeatures all() { return {}; }
  static MaxFeatures sqrt() { return {Mode::sqrt, 0}; }
  static MaxFeatures log2() { return {Mode::log2, 0}; }
  static MaxFeatures fixed(int n) { return {Mode::count, n}; }

  /// Throws ValueError when a fixed count is outside [1, n_features].
  int resolve(std::size_t n_features) const;
  std::string to_string() const;
  static MaxFeatures parse(std::string_view s);
};

enum class Criterion { mae, mse };

struct TreeParams {
  MaxFeatures max_features;
  Criterion criterion = Criterion::mae;
  std::optional<int> max_depth;  // unlimited when empty
  int min_samples_leaf = 1;
  std::uint64_t seed = 0;
};

struct ForestParams {
  int n_estimators = 100;
  TreeParams tree;
  bool bootstrap = true;
};

enum class GbtLoss { absolute_error };

struct GbtParams {
  double learning_rate = 0.1;
  int max_depth = 6;
  int n_estimators_cap = 5000;
  int early_stopping_rounds = 5;
  GbtLoss loss = GbtLoss::absolute_error;
  std::uint64_t seed = 0;
  int min_samples_leaf = 1;
  double subsample = 1.0;         // row fraction per round, without replacement
  double colsample_bytree = 1.0;  // feature fraction per round
};

/// Flattened binary tree. Node 0 is the root; leaves have feature == -1.
/// Numeric nodes send x <= threshold left; categorical nodes send x left
/// when bit `x` of `left_categories` is set.
struct Tree {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<std::uint8_t> categorical;
  std::vector<std::uint32_t> left_categories;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> value;

  std::size_t size() const noexcept { return feature.size(); }
  std::size_t leaf_index(std::span<const double> x) const;
  double predict(std::span<const double> x) const { return value[leaf_index(x)]; }
  int depth() const;

  friend bool operator==(const Tree&, const Tree&) = default;
};

enum class ModelKind { tree, forest, gbt, weighted_ensemble };
std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view s);

struct Model {
  ModelKind kind = ModelKind::tree;
  std::vector<std::string> feature_names;
  std::string target_name;
  nlohmann::json params = nlohmann::json::object();

  std::vector<Tree> trees;

  // gbt
  double base_prediction = 0;
  double learning_rate = 1;
  std::size_t best_round = 0;           // rounds kept after truncation
  std::vector<double> validation_mae;   // one entry per round trained

  // weighted_ensemble
  std::vector<Model> members;
  std::vector<double> weights;

  /// Prediction for a row whose columns follow `feature_names`.
  double predict_row(std::span<const double> x) const;
};

/// Validation-metric patience rule: training continues while the metric
/// strictly improves on the best-so-far at least once every `patience`
/// rounds. Rounds are 1-based.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience);
  /// Records one round; returns true when training must stop.
  bool update(double metric);
  int best_round() const noexcept { return best_round_; }
  double best_metric() const noexcept { return best_; }
  int rounds() const noexcept { return rounds_; }

 private:
  int patience_;
  int rounds_ = 0;
  int best_round_ = 0;
  int since_best_ = 0;
  double best_;
};

Model fit_tree(const FeatureMatrix& X, std::span<const double> y, const TreeParams& p);
Model fit_random_forest(const FeatureMatrix& X, std::span<const double> y, const ForestParams& p,
                        const Deadline& deadline = {});
Model fit_gbt(const FeatureMatrix& X_train, std::span<const double> y_train,
              const FeatureMatrix& X_val, std::span<const double> y_val, const GbtParams& p,
              const Deadline& deadline = {});

/// Columns are matched by name; any missing or extra column is an error.
std::vector<double> predict(const Model& m, const FeatureMatrix& X);

namespace serial {
std::vector<double> predict(const Model& m, const FeatureMatrix& X);
}  // namespace serial

/// Versioned JSON document. Loaders reject any other version.
inline constexpr int kModelFormatVersion = 1;
nlohmann::json model_to_json(const Model& m);
Model model_from_json(const nlohmann::json& j);
void save_model(const Model& m, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

nlohmann::json to_json(const TreeParams& p);
nlohmann::json to_json(const ForestParams& p);
nlohmann::json to_json(const GbtParams& p);

}  // namespace sarvi
