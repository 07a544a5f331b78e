// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sarvi/timeutil.hpp"

namespace sarvi {

enum class ClassLabel { healthy_coniferous, healthy_broadleaved, disturbed_coniferous };
enum class ForestType { coniferous = 0, broadleaved = 1 };
enum class Target { ndvi, evi, lai, fapar };
enum class FeatureSet { sar_only, sar_dem, all };

std::string_view to_string(ClassLabel c);
std::string_view to_string(ForestType f);
std::string_view to_string(Target t);
std::string_view to_string(FeatureSet f);

ClassLabel parse_class_label(std::string_view s);
ForestType parse_forest_type(std::string_view s);
Target parse_target(std::string_view s);
FeatureSet parse_feature_set(std::string_view s);

inline constexpr std::array<ClassLabel, 3> kAllClasses = {
    ClassLabel::healthy_coniferous, ClassLabel::healthy_broadleaved,
    ClassLabel::disturbed_coniferous};
inline constexpr std::array<Target, 4> kAllTargets = {Target::ndvi, Target::evi, Target::lai,
                                                      Target::fapar};

/// Canonical CSV header, in file order.
inline constexpr std::array<std::string_view, 20> kCsvColumns = {
    "area_id", "class_label", "timestamp", "vv",        "vh",      "angle",   "vvvh",
    "vhvv",    "lia",         "elevation", "slope",     "prec_12h", "temp",   "forest_type",
    "doy_sin", "doy_cos",     "ndvi",      "evi",       "lai",     "fapar"};

/// Every model input column, in canonical order.
inline constexpr std::array<std::string_view, 13> kAllFeatures = {
    "vv",       "vh",   "angle",       "vvvh",    "vhvv",   "lia",    "elevation",
    "slope",    "prec_12h", "temp",    "forest_type", "doy_sin", "doy_cos"};

/// Input columns fed to the learners for a feature set (canonical order).
std::vector<std::string> feature_columns(FeatureSet set);

/// Categorical columns get their cardinality, numeric columns 0.
int feature_cardinality(std::string_view name);

/// One paired SAR/optical observation of a forest area.
struct SampleRecord {
  std::string area_id;
  ClassLabel class_label = ClassLabel::healthy_coniferous;
  Timestamp timestamp{};

  double vv = 0;         // dB
  double vh = 0;         // dB
  double angle = 0;      // ellipsoid incidence, degrees
  double vvvh = 1;       // linear power ratio
  double vhvv = 1;       // linear power ratio
  double lia = 0;        // degrees
  double elevation = 0;  // m
  double slope = 0;      // degrees
  double prec_12h = 0;   // m
  double temp = 0;       // K
  ForestType forest_type = ForestType::coniferous;
  double doy_sin = 0;
  double doy_cos = 1;

  std::optional<double> ndvi;
  std::optional<double> evi;
  std::optional<double> lai;
  std::optional<double> fapar;

  /// Value of a model input column; forest_type maps to its enum ordinal.
  double feature(std::string_view name) const;
  std::optional<double> target(Target t) const;
  std::optional<double>& target(Target t);

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

/// Returns an empty string when `r` satisfies the record invariants,
/// otherwise a short description of the first violation.
std::string check_record(const SampleRecord& r);

struct Dataset {
  static constexpr int kSchemaVersion = 1;

  std::vector<SampleRecord> records;
  int schema_version = kSchemaVersion;
  std::string source;
  /// Active input columns; `select_features` narrows this list.
  std::vector<std::string> features = feature_columns(FeatureSet::all);

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
  /// Targets present on every record (dataset-level invariant).
  std::vector<Target> present_targets() const;
  bool has_target(Target t) const;
};

struct LoadResult {
  Dataset dataset;
  std::size_t dropped = 0;
};

/// Reads the canonical CSV. Rows with an empty feature cell, or an empty
/// cell in a target column that is populated elsewhere in the file, are
/// dropped. In strict mode an unparseable or out-of-range cell raises
/// ParseError with its line number; otherwise that row is dropped too.
LoadResult load_dataset(const std::filesystem::path& path, bool strict = true);
LoadResult read_dataset(std::istream& in, bool strict = true, std::string source = {});

/// Writes all canonical columns with 17 significant digits.
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
void write_dataset(const Dataset& ds, std::ostream& out);

/// Per-class, area-level holdout split. For each class the sorted distinct
/// area ids are shuffled with `seed` and round-half-up(test_fraction * n)
/// areas go to test.
std::pair<Dataset, Dataset> split_by_area(const Dataset& ds, double test_fraction,
                                          std::uint64_t seed);

Dataset select_features(const Dataset& ds, FeatureSet set);

/// Records whose class is in `classes`; keeps the active feature list.
Dataset filter_classes(const Dataset& ds, std::span<const ClassLabel> classes);

/// Dense row-major design matrix over the dataset's active features.
struct FeatureMatrix {
  std::vector<std::string> names;
  std::vector<int> cardinality;  // 0 numeric, >0 categorical
  std::size_t rows = 0;
  std::vector<double> values;

  std::size_t cols() const noexcept { return names.size(); }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols(), cols()};
  }
};

FeatureMatrix feature_matrix(const Dataset& ds);
FeatureMatrix feature_matrix(std::span<const SampleRecord> records,
                             std::span<const std::string> names);
/// Throws SchemaError when a record lacks the target.
std::vector<double> target_vector(const Dataset& ds, Target t);

}  // namespace sarvi
