// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "sarvi/datamodel.hpp"

namespace sarvi {

/// Seasonal NDVI curve: mean + amplitude * cos(2 pi (doy - peak_doy) / days).
struct SeasonalCurve {
  double mean = 0.55;
  double amplitude = 0.3;
  double peak_doy = 200;
};

struct SynthConfig {
  int areas_healthy_coniferous = 600;
  int areas_healthy_broadleaved = 600;
  int areas_disturbed_coniferous = 600;
  int acquisitions_min = 175;
  int acquisitions_max = 236;
  int year = 2021;
  std::uint64_t seed = 0;

  double sar_noise_db = 0.5;            // per-acquisition backscatter noise
  double disturbed_extra_noise_db = 0.25;  // added after a disturbance
  double label_noise = 0.05;            // NDVI units; other targets scale it

  SeasonalCurve broadleaved{0.55, 0.30, 200};
  SeasonalCurve coniferous{0.78, 0.03, 200};
  double elevation_effect = 0.12;  // NDVI per km above the reference height
  double disturbance_drop = 0.40;
  int disturbance_doy_min = 150;
  int disturbance_doy_max = 250;

  /// Throws ValueError on negative counts or noise levels.
  void check() const;
};

nlohmann::json to_json(const SynthConfig& c);
SynthConfig synth_config_from_json(const nlohmann::json& j);

struct AreaTruth {
  ClassLabel class_label = ClassLabel::healthy_coniferous;
  int disturbance_doy = 0;  // disturbed class only
};

/// Everything needed to recompute the noiseless targets of a generated
/// dataset.
struct OracleDescriptor {
  SynthConfig config;
  std::map<std::string, AreaTruth> areas;
};

nlohmann::json to_json(const OracleDescriptor& o);
OracleDescriptor oracle_from_json(const nlohmann::json& j);

struct SynthResult {
  Dataset dataset;
  OracleDescriptor oracle;
};

/// Deterministic per seed and independent of the worker count.
SynthResult generate(const SynthConfig& cfg);

/// Noiseless latent NDVI for a record of a generated area.
double oracle_latent_ndvi(const OracleDescriptor& o, const SampleRecord& r);
/// Noiseless target value. Throws ValueError for an unknown area, a class
/// mismatch or a timestamp outside the generated year.
double oracle_predict(const OracleDescriptor& o, const SampleRecord& r, Target t);

/// The fixed monotone maps from latent NDVI to each target.
double target_from_ndvi(Target t, double ndvi);
/// Label noise standard deviation for a target.
double target_noise(const SynthConfig& c, Target t);

}  // namespace sarvi
