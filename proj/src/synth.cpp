// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include "sarvi/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>

#include "rng.hpp"
#include "sarvi/error.hpp"
#include "sarvi/features.hpp"
#include "sarvi/terrain.hpp"

namespace sarvi {

using nlohmann::json;

namespace {

constexpr double kReferenceElevation = 700.0;  // m
constexpr double kLapseRate = 6.5;              // K per km
constexpr int kAscendingHour = 16, kAscendingMinute = 50;
constexpr int kDescendingHour = 5, kDescendingMinute = 10;

// Stream identifiers for derive_seed.
enum Stream : std::uint64_t { kWeatherStream = 1, kAreaStream = 2 };

double curve_value(const SeasonalCurve& c, int doy, int days) {
  return c.mean + c.amplitude * std::cos(2.0 * std::numbers::pi * (doy - c.peak_doy) / days);
}

std::string area_name(ClassLabel c, int i) {
  static constexpr const char* prefix[] = {"hc", "hb", "dc"};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04d", prefix[static_cast<int>(c)], i);
  return buf;
}

double latent(const SynthConfig& cfg, const AreaTruth& a, double elevation, int doy, int days) {
  double v;
  if (a.class_label == ClassLabel::healthy_broadleaved) {
    v = curve_value(cfg.broadleaved, doy, days);
  } else {
    v = curve_value(cfg.coniferous, doy, days);
    if (a.class_label == ClassLabel::disturbed_coniferous && doy >= a.disturbance_doy)
      v -= cfg.disturbance_drop;
  }
  v += cfg.elevation_effect * (elevation - kReferenceElevation) / 1000.0;
  return std::clamp(v, -1.0, 1.0);
}

/// Regional hourly weather for the whole year plus a day of margin on
/// either side.
WeatherSeries regional_weather(const SynthConfig& cfg) {
  std::mt19937_64 rng(detail::derive_seed(cfg.seed, {kWeatherStream}));
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> rain(1000.0);  // mean 1 mm, in m
  const Timestamp start = make_timestamp(cfg.year, 1) - std::chrono::hours(24);
  const int hours = (days_in_year(cfg.year) + 2) * 24;
  const int days = days_in_year(cfg.year);
  std::vector<WeatherSample> samples;
  samples.reserve(static_cast<std::size_t>(hours));
  bool wet = false;
  double anomaly = 0;
  for (int h = 0; h < hours; ++h) {
    const Timestamp t = start + std::chrono::hours(h);
    const double doy = (h - 24) / 24.0 + 1.0;
    const double hour_of_day = h % 24;
    anomaly = 0.98 * anomaly + 0.3 * noise(rng);
    const double temp = 281.0 + 10.0 * std::cos(2.0 * std::numbers::pi * (doy - 200.0) / days) +
                        3.0 * std::cos(2.0 * std::numbers::pi * (hour_of_day - 15.0) / 24.0) +
                        anomaly;
    wet = wet ? unit(rng) < 0.8 : unit(rng) < 0.03;
    samples.push_back({t, wet ? rain(rng) : 0.0, temp});
  }
  return WeatherSeries(std::move(samples));
}

struct Slot {
  int doy;
  bool ascending;
};

}  // namespace

void SynthConfig::check() const {
  if (areas_healthy_coniferous < 0 || areas_healthy_broadleaved < 0 || areas_disturbed_coniferous < 0)
    throw ValueError("area counts must be non-negative");
  if (areas_healthy_coniferous + areas_healthy_broadleaved + areas_disturbed_coniferous == 0)
    throw ValueError("at least one area is required");
  if (acquisitions_min < 1 || acquisitions_max < acquisitions_min)
    throw ValueError("acquisition range must satisfy 1 <= min <= max");
  if (acquisitions_max > 2 * 365) throw ValueError("at most two acquisitions per day are simulated");
  if (year < 1970 || year > 2200) throw ValueError("year out of range");
  if (sar_noise_db < 0 || disturbed_extra_noise_db < 0 || label_noise < 0)
    throw ValueError("noise levels must be non-negative");
  if (disturbance_drop < 0) throw ValueError("disturbance drop must be non-negative");
  if (disturbance_doy_min < 1 || disturbance_doy_max < disturbance_doy_min ||
      disturbance_doy_max > 365)
    throw ValueError("disturbance window must lie within the year");
}

json to_json(const SynthConfig& c) {
  auto curve = [](const SeasonalCurve& s) {
    return json{{"mean", s.mean}, {"amplitude", s.amplitude}, {"peak_doy", s.peak_doy}};
  };
  return {{"areas_healthy_coniferous", c.areas_healthy_coniferous},
          {"areas_healthy_broadleaved", c.areas_healthy_broadleaved},
          {"areas_disturbed_coniferous", c.areas_disturbed_coniferous},
          {"acquisitions_min", c.acquisitions_min},
          {"acquisitions_max", c.acquisitions_max},
          {"year", c.year},
          {"seed", c.seed},
          {"sar_noise_db", c.sar_noise_db},
          {"disturbed_extra_noise_db", c.disturbed_extra_noise_db},
          {"label_noise", c.label_noise},
          {"broadleaved", curve(c.broadleaved)},
          {"coniferous", curve(c.coniferous)},
          {"elevation_effect", c.elevation_effect},
          {"disturbance_drop", c.disturbance_drop},
          {"disturbance_doy_min", c.disturbance_doy_min},
          {"disturbance_doy_max", c.disturbance_doy_max}};
}

SynthConfig synth_config_from_json(const json& j) {
  SynthConfig c;
  if (!j.is_object()) throw ValueError("synth config must be a JSON object");
  const json defaults = to_json(c);
  for (const auto& [key, _] : j.items())
    if (!defaults.contains(key)) throw ValueError("unknown synth config key '" + key + "'");
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    auto curve = [&](const char* key, SeasonalCurve& s) {
      if (!j.contains(key)) return;
      const auto& o = j.at(key);
      s.mean = o.value("mean", s.mean);
      s.amplitude = o.value("amplitude", s.amplitude);
      s.peak_doy = o.value("peak_doy", s.peak_doy);
    };
    get("areas_healthy_coniferous", c.areas_healthy_coniferous);
    get("areas_healthy_broadleaved", c.areas_healthy_broadleaved);
    get("areas_disturbed_coniferous", c.areas_disturbed_coniferous);
    get("acquisitions_min", c.acquisitions_min);
    get("acquisitions_max", c.acquisitions_max);
    get("year", c.year);
    get("seed", c.seed);
    get("sar_noise_db", c.sar_noise_db);
    get("disturbed_extra_noise_db", c.disturbed_extra_noise_db);
    get("label_noise", c.label_noise);
    curve("broadleaved", c.broadleaved);
    curve("coniferous", c.coniferous);
    get("elevation_effect", c.elevation_effect);
    get("disturbance_drop", c.disturbance_drop);
    get("disturbance_doy_min", c.disturbance_doy_min);
    get("disturbance_doy_max", c.disturbance_doy_max);
  } catch (const json::exception& e) {
    throw ValueError(std::string("malformed synth config: ") + e.what());
  }
  c.check();
  return c;
}

json to_json(const OracleDescriptor& o) {
  json areas = json::object();
  for (const auto& [id, a] : o.areas)
    areas[id] = {{"class_label", std::string(to_string(a.class_label))},
                 {"disturbance_doy", a.disturbance_doy}};
  return {{"format", "sarvi.oracle"}, {"version", 1}, {"config", to_json(o.config)}, {"areas", areas}};
}

OracleDescriptor oracle_from_json(const json& j) {
  OracleDescriptor o;
  try {
    if (j.at("version").get<int>() != 1) throw SchemaError("unsupported oracle version");
    o.config = synth_config_from_json(j.at("config"));
    for (const auto& [id, a] : j.at("areas").items())
      o.areas[id] = {parse_class_label(a.at("class_label").get<std::string>()),
                     a.at("disturbance_doy").get<int>()};
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed oracle descriptor: ") + e.what());
  }
  return o;
}

double target_from_ndvi(Target t, double ndvi) {
  switch (t) {
    case Target::ndvi: return ndvi;
    case Target::evi: return 0.05 + 0.6 * ndvi;
    case Target::lai: return ndvi > 0 ? 6.0 * ndvi * ndvi : 0.0;
    case Target::fapar: return ndvi > 0 ? 1.0 - std::exp(-2.0 * ndvi) : 0.0;
  }
  return ndvi;
}

double target_noise(const SynthConfig& c, Target t) {
  switch (t) {
    case Target::ndvi: return c.label_noise;
    case Target::evi: return 0.6 * c.label_noise;
    case Target::lai: return 6.0 * c.label_noise;
    case Target::fapar: return 0.6 * c.label_noise;
  }
  return c.label_noise;
}

double oracle_latent_ndvi(const OracleDescriptor& o, const SampleRecord& r) {
  auto it = o.areas.find(r.area_id);
  if (it == o.areas.end()) throw ValueError("area '" + r.area_id + "' is not part of the oracle");
  if (it->second.class_label != r.class_label)
    throw ValueError("record class differs from the generated class of area '" + r.area_id + "'");
  if (year_of(r.timestamp) != o.config.year)
    throw ValueError("timestamp " + format_timestamp(r.timestamp) + " outside the generated year");
  return latent(o.config, it->second, r.elevation, day_of_year(r.timestamp),
                days_in_year(o.config.year));
}

double oracle_predict(const OracleDescriptor& o, const SampleRecord& r, Target t) {
  return target_from_ndvi(t, oracle_latent_ndvi(o, r));
}

SynthResult generate(const SynthConfig& cfg) {
  cfg.check();
  SynthResult out;
  out.oracle.config = cfg;
  const int days = days_in_year(cfg.year);
  const auto weather = regional_weather(cfg);

  struct AreaJob {
    ClassLabel cls;
    int index;
    std::string id;
  };
  std::vector<AreaJob> jobs;
  const int counts[] = {cfg.areas_healthy_coniferous, cfg.areas_healthy_broadleaved,
                        cfg.areas_disturbed_coniferous};
  for (auto cls : kAllClasses)
    for (int i = 0; i < counts[static_cast<int>(cls)]; ++i)
      jobs.push_back({cls, i, area_name(cls, i + 1)});

  std::vector<std::vector<SampleRecord>> per_area(jobs.size());
  std::vector<AreaTruth> truths(jobs.size());
  const int max_slots = 2 * days;
  const auto n_jobs = static_cast<std::ptrdiff_t>(jobs.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t a = 0; a < n_jobs; ++a) {
    const auto& job = jobs[a];
    std::mt19937_64 rng(detail::derive_seed(
        cfg.seed, {kAreaStream, static_cast<std::uint64_t>(job.cls), static_cast<std::uint64_t>(job.index)}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    AreaTruth truth;
    truth.class_label = job.cls;
    if (job.cls == ClassLabel::disturbed_coniferous)
      truth.disturbance_doy =
          std::uniform_int_distribution<int>(cfg.disturbance_doy_min, cfg.disturbance_doy_max)(rng);
    const ForestType ft = job.cls == ClassLabel::healthy_broadleaved ? ForestType::broadleaved
                                                                     : ForestType::coniferous;
    const double elevation = 300.0 + 800.0 * unit(rng);
    const double slope = std::min(std::abs(gauss(rng)) * 8.0, 60.0);
    const double aspect = 360.0 * unit(rng);
    const SarGeometry geom[2] = {{31.0 + 15.0 * unit(rng), 80.0 + 4.0 * (unit(rng) - 0.5)},
                                 {31.0 + 15.0 * unit(rng), 280.0 + 4.0 * (unit(rng) - 0.5)}};
    const double lia[2] = {local_incidence_angle(slope, aspect, geom[0]),
                           local_incidence_angle(slope, aspect, geom[1])};
    const double area_vv_offset = 0.2 * gauss(rng);
    const double area_vh_offset = 0.2 * gauss(rng);

    const int n_acq =
        std::uniform_int_distribution<int>(cfg.acquisitions_min, std::min(cfg.acquisitions_max, max_slots))(rng);
    std::vector<int> slots(static_cast<std::size_t>(max_slots));
    std::iota(slots.begin(), slots.end(), 0);
    for (int k = 0; k < n_acq; ++k) {
      const int j = std::uniform_int_distribution<int>(k, max_slots - 1)(rng);
      std::swap(slots[static_cast<std::size_t>(k)], slots[static_cast<std::size_t>(j)]);
    }
    slots.resize(static_cast<std::size_t>(n_acq));
    std::sort(slots.begin(), slots.end());

    auto& recs = per_area[a];
    recs.reserve(slots.size());
    for (int slot : slots) {
      const Slot s{slot / 2 + 1, slot % 2 == 1};
      const int orbit = s.ascending ? 0 : 1;
      SampleRecord r;
      r.area_id = job.id;
      r.class_label = job.cls;
      r.forest_type = ft;
      r.timestamp = s.ascending
                        ? make_timestamp(cfg.year, s.doy, kAscendingHour, kAscendingMinute)
                        : make_timestamp(cfg.year, s.doy, kDescendingHour, kDescendingMinute);
      r.angle = geom[orbit].incidence_deg;
      r.lia = lia[orbit];
      r.elevation = elevation;
      r.slope = slope;
      const auto w = aggregate_weather(weather, r.timestamp);
      r.prec_12h = w.prec_12h;
      r.temp = w.temp - kLapseRate * (elevation - kReferenceElevation) / 1000.0;
      const auto doy = encode_doy(r.timestamp);
      r.doy_sin = doy.sin_val;
      r.doy_cos = doy.cos_val;

      const double nd = latent(cfg, truth, elevation, s.doy, days);
      const bool after_step =
          job.cls == ClassLabel::disturbed_coniferous && s.doy >= truth.disturbance_doy;
      const double sigma = cfg.sar_noise_db + (after_step ? cfg.disturbed_extra_noise_db : 0.0);
      const double wetness = 1.5 * std::min(r.prec_12h * 1000.0 / 5.0, 1.0);
      const double frozen = r.temp < 273.15 ? -1.5 : 0.0;
      const double broadleaf = ft == ForestType::broadleaved ? 0.8 : 0.0;
      r.vh = -20.0 + 10.0 * (nd - 0.5) - 0.05 * (r.lia - 39.0) + wetness + frozen + broadleaf +
             area_vh_offset + sigma * gauss(rng);
      r.vv = -12.0 + 4.0 * (nd - 0.5) - 0.06 * (r.lia - 39.0) + 1.2 * wetness + frozen +
             area_vv_offset + sigma * gauss(rng);
      const auto ratios = sar_ratios(r.vv, r.vh);
      r.vvvh = ratios.vvvh;
      r.vhvv = ratios.vhvv;

      for (auto t : kAllTargets) {
        double v = target_from_ndvi(t, nd) + target_noise(cfg, t) * gauss(rng);
        switch (t) {
          case Target::ndvi:
          case Target::evi: v = std::clamp(v, -1.0, 1.0); break;
          case Target::lai: v = std::max(v, 0.0); break;
          case Target::fapar: v = std::clamp(v, 0.0, 1.0); break;
        }
        r.target(t) = v;
      }
      recs.push_back(std::move(r));
    }
    truths[a] = truth;
  }

  out.dataset.source = "synth";
  for (std::size_t a = 0; a < jobs.size(); ++a) {
    out.oracle.areas[jobs[a].id] = truths[a];
    for (auto& r : per_area[a]) out.dataset.records.push_back(std::move(r));
  }
  return out;
}

}  // namespace sarvi
