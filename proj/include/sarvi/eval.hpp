// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sarvi/datamodel.hpp"
#include "sarvi/learners.hpp"
#include "sarvi/pipeline.hpp"

namespace sarvi {

// Accuracy metrics. All throw ValueError on length mismatch or empty input.
double mae(std::span<const double> y, std::span<const double> p);

struct MseRmse {
  double mse;
  double rmse;
};
MseRmse mse_rmse(std::span<const double> y, std::span<const double> p);

/// 1 - SS_res / SS_tot. Throws ValueError for n < 2 or constant y.
double r2(std::span<const double> y, std::span<const double> p);

struct Metrics {
  std::size_t n = 0;
  double mae = 0;
  double mse = 0;
  double rmse = 0;
  double r2 = 0;  // NaN when undefined (constant truth)
};

struct EvalReport {
  std::string target;
  Metrics overall;
  std::map<std::string, Metrics> per_class;
};

Metrics compute_metrics(std::span<const double> y, std::span<const double> p);

/// Throws ValueError on an empty test set or constant targets.
EvalReport evaluate(const Model& m, const Dataset& test, Target target);

nlohmann::json to_json(const Metrics& m);
nlohmann::json to_json(const EvalReport& r);
void write_eval_csv(const EvalReport& r, std::ostream& out);

struct ImportanceReport {
  std::vector<std::string> features;
  std::vector<double> mean;   // raw: metric after shuffling - baseline
  std::vector<double> std;    // population std over repeats
  std::vector<double> share;  // max(mean, 0) normalised to sum 1
  std::vector<std::vector<double>> raw;  // [feature][repeat]
  double baseline = 0;
  int repeats = 0;

  double share_of(std::span<const std::string_view> names) const;
};

/// MAE permutation importance; one fresh seeded shuffle per feature and
/// repeat. Independent of the number of worker threads.
ImportanceReport permutation_importance(const Model& m, const FeatureMatrix& X,
                                        std::span<const double> y, int repeats,
                                        std::uint64_t seed);

nlohmann::json to_json(const ImportanceReport& r);
void write_importance_csv(const ImportanceReport& r, std::ostream& out);

using TimeValue = std::pair<Timestamp, double>;

/// Centred moving mean; the window shrinks symmetrically at the ends.
std::vector<TimeValue> moving_average(std::span<const TimeValue> ts, int window = 5);

struct FeatureSetResult {
  FeatureSet set;
  std::size_t n_features = 0;
  EvalReport report;
};

/// Trains and evaluates `spec` on each of sar_only, sar_dem, all.
std::vector<FeatureSetResult> ablation_feature_sets(const Dataset& train, const Dataset& test,
                                                    Target target, const ModelSpec& spec);

struct RegimeResult {
  std::string regime;
  EvalReport report;
  ImportanceReport importance;
};

/// Trains `spec` on each regime's training set and reports test metrics and
/// permutation importances side by side.
std::vector<RegimeResult> ablation_robustness(const Dataset& healthy_train,
                                              const Dataset& healthy_test,
                                              const Dataset& disturbed_train,
                                              const Dataset& disturbed_test, Target target,
                                              const ModelSpec& spec, int repeats,
                                              std::uint64_t seed);

/// SAR-only input columns, used for the SAR importance share.
inline constexpr std::array<std::string_view, 5> kSarFeatures = {"vv", "vh", "angle", "vvvh",
                                                                 "vhvv"};

namespace serial {
ImportanceReport permutation_importance(const Model& m, const FeatureMatrix& X,
                                        std::span<const double> y, int repeats,
                                        std::uint64_t seed);
}  // namespace serial

}  // namespace sarvi
