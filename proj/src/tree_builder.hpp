// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "sarvi/datamodel.hpp"
#include "sarvi/learners.hpp"

namespace sarvi::detail {

/// Row ids of the full matrix, sorted per feature by (value, row id).
struct Presorted {
  std::vector<std::vector<std::uint32_t>> order;
};

Presorted presort(const FeatureMatrix& X);

struct BuildConfig {
  Criterion criterion = Criterion::mse;
  std::optional<int> max_depth;
  int min_samples_leaf = 1;
  /// Non-constant features examined per node; >= candidates.size() means all.
  int features_per_split = 0;
  /// Columns eligible for splitting, ascending.
  std::vector<int> candidates;
  /// Evaluate candidate features concurrently when every candidate is used.
  bool parallel = false;
};

/// Greedy depth-first CART growth. `counts[row]` is the multiplicity of each
/// training row (bootstrap draws, 0 = not in the sample). Leaf values are the
/// median (MAE) or mean (MSE) of the leaf targets.
Tree build_tree(const FeatureMatrix& X, std::span<const double> y, const Presorted& presorted,
                std::span<const std::uint32_t> counts, const BuildConfig& cfg,
                std::mt19937_64& rng);

/// Median of a multiset, midpoint of the two central values for even sizes.
double median_of(std::vector<double> v);

/// Running median of a growing multiset with its sum of absolute deviations.
class RunningMedian {
 public:
  void reserve(std::size_t n);
  void clear();
  void push(double v);
  double median() const;
  /// Sum of |v - median| over the pushed values.
  double abs_deviation() const;
  std::size_t size() const noexcept { return low_.size() + high_.size(); }

 private:
  std::vector<double> low_;   // max-heap
  std::vector<double> high_;  // min-heap
  double low_sum_ = 0;
  double high_sum_ = 0;
};

}  // namespace sarvi::detail
