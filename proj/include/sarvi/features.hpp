// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sarvi/datamodel.hpp"
#include "sarvi/timeutil.hpp"

namespace sarvi {

// Vegetation indices from surface reflectance. Both throw ValueError when
// the denominator vanishes.
double compute_ndvi(double nir, double red);
double compute_evi(double nir, double red, double blue);

struct SarRatios {
  double vvvh;
  double vhvv;
};

/// Linear-power cross-polarisation ratios from dB backscatter.
SarRatios sar_ratios(double vv_db, double vh_db);

struct DoyEncoding {
  double sin_val;
  double cos_val;
};

/// Maps day-of-year onto the unit circle; day 1 sits at angle 0.
DoyEncoding encode_doy(int doy, int days_in_year);
DoyEncoding encode_doy(Timestamp t);

struct WeatherSample {
  Timestamp time;
  double total_precipitation = 0;  // m, accumulated over the hour
  double temperature_2m = 0;       // K
};

/// Hourly reanalysis samples, sorted by time.
class WeatherSeries {
 public:
  WeatherSeries() = default;
  /// Sorts by time; throws ValueError on duplicate hours, off-hour stamps or
  /// negative precipitation.
  explicit WeatherSeries(std::vector<WeatherSample> samples);

  std::span<const WeatherSample> samples() const noexcept { return samples_; }
  const WeatherSample* at(Timestamp hour) const;

 private:
  std::vector<WeatherSample> samples_;
};

struct WeatherAggregate {
  double prec_12h;  // m
  double temp;      // K
};

/// Precipitation summed over hourly samples in (t - 12 h, t]; temperature of
/// the nearest hourly sample, earlier one on ties. Throws ValueError listing
/// the missing hours when the window is not fully covered.
WeatherAggregate aggregate_weather(const WeatherSeries& ws, Timestamp t_acq);

enum class Sensor { sar, optical };

struct AcquisitionEvent {
  Sensor sensor = Sensor::sar;
  Timestamp timestamp{};
  std::map<std::string, double> payload;
};

struct EventPair {
  const AcquisitionEvent* sar;
  const AcquisitionEvent* optical;
};

/// Nearest-in-time optical partner for each SAR event within `max_dt`
/// (earlier optical wins ties). An optical event may serve several SAR
/// events. Output follows SAR time order.
std::vector<EventPair> pair_records(std::span<const AcquisitionEvent> sar,
                                    std::span<const AcquisitionEvent> optical,
                                    std::chrono::seconds max_dt = std::chrono::hours(24));

/// Area-level attributes that the event streams do not carry.
struct AreaInfo {
  std::string area_id;
  ClassLabel class_label = ClassLabel::healthy_coniferous;
  ForestType forest_type = ForestType::coniferous;
};

/// Builds dataset rows from paired events. SAR payload keys: vv, vh, angle,
/// lia, elevation, slope, prec_12h, temp. Optical payload supplies ndvi/evi
/// directly or nir/red(/blue) to derive them, plus optional lai/fapar.
/// Ratios and the day-of-year encoding are derived here.
std::vector<SampleRecord> assemble_records(const AreaInfo& area,
                                           std::span<const EventPair> pairs);

}  // namespace sarvi
