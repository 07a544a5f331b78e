// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sarvi/datamodel.hpp"
#include "sarvi/eval.hpp"
#include "sarvi/learners.hpp"
#include "sarvi/terrain.hpp"

namespace sarvi {

enum class SeriesSource { optical_label, sar_estimated };
std::string_view to_string(SeriesSource s);

struct TimeSeries {
  std::string area_id;
  std::vector<TimeValue> samples;
  SeriesSource source = SeriesSource::sar_estimated;
};

/// One estimate per SAR acquisition. Records must share one area id and be
/// strictly increasing in time.
TimeSeries estimate_timeseries(const Model& m, std::span<const SampleRecord> sar_stream);

/// Label series of one area, for comparison with the estimate.
TimeSeries label_timeseries(std::span<const SampleRecord> records, Target target);

/// Raster values for the forest_type layer.
inline constexpr double kConiferousCode = 1;
inline constexpr double kBroadleavedCode = 2;

struct SpatialCase {
  std::map<std::string, Raster> feature_rasters;
  Raster forest_type;
  Raster mask;
  std::optional<Raster> truth;
  std::map<std::string, double> scalars;

  /// Throws ValueError on any grid mismatch.
  void check() const;
};

/// Case manifest: {"rasters": {name: path}, "forest_type": path,
/// "mask": path, "truth": path?, "scalars": {name: value}}. Relative paths
/// resolve against the manifest directory.
SpatialCase load_spatial_case(const std::filesystem::path& manifest);

/// Predicts every pixel where mask == 1 and the forest type code is known.
/// Other pixels, or pixels with a nodata input, become nodata.
Raster infer_raster(const Model& m, const SpatialCase& c);

struct ErrorSummary {
  double mae = 0;
  double std = 0;  // population standard deviation of the absolute error
  std::size_t n = 0;
};

struct ErrorMap {
  Raster ae;
  ErrorSummary summary;
};

ErrorMap error_map(const Raster& pred, const Raster& truth, const Raster& mask);

nlohmann::json to_json(const ErrorSummary& s);

namespace serial {
Raster infer_raster(const Model& m, const SpatialCase& c);
}  // namespace serial

}  // namespace sarvi
