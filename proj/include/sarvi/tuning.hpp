// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sarvi/datamodel.hpp"
#include "sarvi/learners.hpp"
#include "sarvi/pipeline.hpp"

namespace sarvi {

struct GridAxis {
  std::string name;
  std::vector<nlohmann::json> values;
};

struct GridSpec {
  ModelKind model_kind = ModelKind::forest;
  std::vector<GridAxis> axes;
};

/// n_estimators 50..500 step 50 x max_features {sqrt, log2, 1..14}, MAE.
GridSpec paper_rfr_grid();
/// learning_rate x max_depth with the 5000-round cap and 5-round patience.
GridSpec paper_xgb_grid();
/// Resolves "paper-rfr" / "paper-xgb", otherwise reads a JSON grid file.
GridSpec load_grid(const std::string& name_or_path);
GridSpec grid_from_json(const nlohmann::json& j);
nlohmann::json grid_to_json(const GridSpec& g);

/// Cartesian product; the last axis varies fastest.
std::vector<nlohmann::json> expand_grid(const GridSpec& spec);

enum class RunStatus { success, failure, timeout };
std::string_view to_string(RunStatus s);

struct TuningRow {
  std::size_t config_index = 0;
  nlohmann::json config;
  RunStatus status = RunStatus::success;
  std::optional<double> val_mae;
  double seconds = 0;
  std::string message;
};

struct TuningReport {
  ModelKind model_kind = ModelKind::forest;
  std::string target;
  std::vector<TuningRow> rows;  // successes ascending by MAE, then failures
  double total_seconds = 0;

  const TuningRow& best() const;
};

/// Trains every grid config on `train` and scores MAE on `val`. A config
/// that throws is recorded as a failure.
TuningReport grid_search(const GridSpec& grid, const Dataset& train, const Dataset& val,
                         Target target, std::uint64_t seed);

void write_tuning_csv(const TuningReport& r, std::ostream& out);
nlohmann::json tuning_summary_json(const TuningReport& r);

/// Sampling distribution for the budgeted search.
struct SearchSpace {
  double forest_probability = 0.5;
  int forest_trees_min = 10;
  int forest_trees_max = 150;
  int min_samples_leaf_max = 8;
  double gbt_lr_min = 0.01;
  double gbt_lr_max = 0.3;
  int gbt_depth_min = 2;
  int gbt_depth_max = 12;

  /// Draws one (kind, config) pair; `n_features` bounds integer max_features.
  std::pair<ModelKind, nlohmann::json> sample(std::mt19937_64& rng, std::size_t n_features) const;
};

struct SearchEntry {
  ModelKind kind = ModelKind::forest;
  nlohmann::json config;
  RunStatus status = RunStatus::success;
  std::optional<double> val_mae;
  double seconds = 0;
  std::string message;
};

struct SearchTrace {
  std::vector<SearchEntry> entries;
  double budget_seconds = 0;
  double per_config_cap_seconds = 0;
};

struct SearchResult {
  SearchTrace trace;
  std::vector<std::optional<Model>> models;  // aligned with trace.entries
};

/// Seeded random search under a wall-clock budget. Each config gets at most
/// `per_config_cap` seconds (budget/10 when unset); the config sequence
/// depends only on `seed`.
SearchResult budget_search(const SearchSpace& space, const Dataset& train, const Dataset& val,
                           Target target, double budget_seconds, std::uint64_t seed,
                           std::optional<double> per_config_cap = std::nullopt);

void write_trace_csv(const SearchTrace& t, std::ostream& out);
nlohmann::json trace_summary_json(const SearchTrace& t);

struct EnsembleSelection {
  std::vector<std::size_t> counts;  // selections per candidate
  std::vector<double> weights;      // counts / total
  double mae = 0;                   // ensemble MAE on the selection data
  std::vector<double> history;      // MAE after each selection step
};

/// Greedy forward selection with replacement over candidate prediction
/// vectors, starting from the best single candidate. Stops when no addition
/// strictly improves MAE or `max_members` selections are made.
EnsembleSelection greedy_ensemble(const std::vector<std::vector<double>>& candidate_preds,
                                  std::span<const double> y, std::size_t max_members = 50);

/// Builds a weighted_ensemble model from the successful entries of a search.
Model ensemble_select(const SearchResult& result, const Dataset& val, Target target,
                      std::size_t max_members = 50);

struct RepeatSummary {
  std::vector<std::map<std::string, double>> runs;
  std::map<std::string, double> mean;
  std::map<std::string, double> variance;  // sample variance, 0 for one run
};

/// Runs `experiment` once per seed and averages every reported metric.
RepeatSummary repeat_and_average(
    std::span<const std::uint64_t> seeds,
    const std::function<std::map<std::string, double>(std::uint64_t)>& experiment);

}  // namespace sarvi
