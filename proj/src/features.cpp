// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include "sarvi/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sarvi/error.hpp"

namespace sarvi {

double compute_ndvi(double nir, double red) {
  if (nir < 0 || red < 0) throw ValueError("ndvi: negative reflectance");
  const double den = nir + red;
  if (den == 0) throw ValueError("ndvi undefined: nir + red = 0");
  return (nir - red) / den;
}

double compute_evi(double nir, double red, double blue) {
  if (nir < 0 || red < 0 || blue < 0) throw ValueError("evi: negative reflectance");
  const double den = nir + 6.0 * red - 7.5 * blue + 1.0;
  if (den == 0) throw ValueError("evi undefined: zero denominator");
  return 2.5 * (nir - red) / den;
}

SarRatios sar_ratios(double vv_db, double vh_db) {
  if (!std::isfinite(vv_db) || !std::isfinite(vh_db))
    throw ValueError("sar_ratios: non-finite backscatter");
  const double vvvh = std::pow(10.0, (vv_db - vh_db) / 10.0);
  return {vvvh, 1.0 / vvvh};
}

DoyEncoding encode_doy(int doy, int days_in_year) {
  if (days_in_year != 365 && days_in_year != 366)
    throw ValueError("days_in_year must be 365 or 366");
  if (doy < 1 || doy > days_in_year)
    throw ValueError("day of year " + std::to_string(doy) + " out of range");
  const double angle = 2.0 * std::numbers::pi * (doy - 1) / days_in_year;
  return {std::sin(angle), std::cos(angle)};
}

DoyEncoding encode_doy(Timestamp t) { return encode_doy(day_of_year(t), days_in_year(year_of(t))); }

WeatherSeries::WeatherSeries(std::vector<WeatherSample> samples) : samples_(std::move(samples)) {
  std::sort(samples_.begin(), samples_.end(),
            [](const WeatherSample& a, const WeatherSample& b) { return a.time < b.time; });
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (s.time != std::chrono::floor<std::chrono::hours>(s.time))
      throw ValueError("weather sample at " + format_timestamp(s.time) + " is not on the hour");
    if (s.total_precipitation < 0) throw ValueError("negative precipitation");
    if (i && samples_[i - 1].time == s.time)
      throw ValueError("duplicate weather hour " + format_timestamp(s.time));
  }
}

const WeatherSample* WeatherSeries::at(Timestamp hour) const {
  auto it = std::lower_bound(samples_.begin(), samples_.end(), hour,
                             [](const WeatherSample& s, Timestamp t) { return s.time < t; });
  return it != samples_.end() && it->time == hour ? &*it : nullptr;
}

WeatherAggregate aggregate_weather(const WeatherSeries& ws, Timestamp t_acq) {
  using std::chrono::hours;
  // Hour marks h with t - 12h < h <= t.
  const Timestamp last = std::chrono::floor<hours>(t_acq);
  double prec = 0;
  std::string missing;
  for (int k = 11; k >= 0; --k) {
    const Timestamp h = last - hours(k);
    if (const auto* s = ws.at(h))
      prec += s->total_precipitation;
    else
      missing += (missing.empty() ? "" : ", ") + format_timestamp(h);
  }
  if (!missing.empty())
    throw ValueError("weather series does not cover the 12 h window; missing hours: " + missing);

  // Nearest sample: candidates are the floor hour and the next one.
  const auto* before = ws.at(last);
  const auto* after = ws.at(last + hours(1));
  double temp = before->temperature_2m;
  if (after && (after->time - t_acq) < (t_acq - before->time)) temp = after->temperature_2m;
  return {prec, temp};
}

std::vector<EventPair> pair_records(std::span<const AcquisitionEvent> sar,
                                    std::span<const AcquisitionEvent> optical,
                                    std::chrono::seconds max_dt) {
  std::vector<EventPair> out;
  if (optical.empty()) return out;
  std::vector<const AcquisitionEvent*> sar_sorted;
  for (const auto& e : sar) sar_sorted.push_back(&e);
  std::stable_sort(sar_sorted.begin(), sar_sorted.end(),
                   [](auto* a, auto* b) { return a->timestamp < b->timestamp; });
  std::vector<const AcquisitionEvent*> opt_sorted;
  for (const auto& e : optical) opt_sorted.push_back(&e);
  std::stable_sort(opt_sorted.begin(), opt_sorted.end(),
                   [](auto* a, auto* b) { return a->timestamp < b->timestamp; });

  for (const auto* s : sar_sorted) {
    auto it = std::lower_bound(opt_sorted.begin(), opt_sorted.end(), s->timestamp,
                               [](auto* o, Timestamp t) { return o->timestamp < t; });
    const AcquisitionEvent* best = nullptr;
    std::chrono::seconds best_dt{};
    // The earlier candidate is examined first so it wins ties.
    if (it != opt_sorted.begin()) {
      auto* prev = *std::prev(it);
      // Walk back to the first event sharing that timestamp.
      auto first = std::lower_bound(opt_sorted.begin(), it, prev->timestamp,
                                    [](auto* o, Timestamp t) { return o->timestamp < t; });
      best = *first;
      best_dt = s->timestamp - best->timestamp;
    }
    if (it != opt_sorted.end()) {
      const auto dt = (*it)->timestamp - s->timestamp;
      if (!best || dt < best_dt) {
        best = *it;
        best_dt = dt;
      }
    }
    if (best && best_dt <= max_dt) out.push_back({s, best});
  }
  return out;
}

std::vector<SampleRecord> assemble_records(const AreaInfo& area, std::span<const EventPair> pairs) {
  std::vector<SampleRecord> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    const auto& sp = p.sar->payload;
    const auto& op = p.optical->payload;
    auto need = [&](const std::map<std::string, double>& m, const char* key) {
      auto it = m.find(key);
      if (it == m.end())
        throw SchemaError(std::string("event payload lacks '") + key + "' for area " +
                          area.area_id);
      return it->second;
    };
    auto maybe = [](const std::map<std::string, double>& m, const char* key) -> std::optional<double> {
      auto it = m.find(key);
      if (it == m.end()) return std::nullopt;
      return it->second;
    };

    SampleRecord r;
    r.area_id = area.area_id;
    r.class_label = area.class_label;
    r.forest_type = area.forest_type;
    r.timestamp = p.sar->timestamp;
    r.vv = need(sp, "vv");
    r.vh = need(sp, "vh");
    r.angle = need(sp, "angle");
    const auto ratios = sar_ratios(r.vv, r.vh);
    r.vvvh = ratios.vvvh;
    r.vhvv = ratios.vhvv;
    r.lia = need(sp, "lia");
    r.elevation = need(sp, "elevation");
    r.slope = need(sp, "slope");
    r.prec_12h = need(sp, "prec_12h");
    r.temp = need(sp, "temp");
    const auto doy = encode_doy(r.timestamp);
    r.doy_sin = doy.sin_val;
    r.doy_cos = doy.cos_val;

    r.ndvi = maybe(op, "ndvi");
    r.evi = maybe(op, "evi");
    const auto nir = maybe(op, "nir");
    const auto red = maybe(op, "red");
    const auto blue = maybe(op, "blue");
    if (!r.ndvi && nir && red) r.ndvi = compute_ndvi(*nir, *red);
    if (!r.evi && nir && red && blue) r.evi = compute_evi(*nir, *red, *blue);
    r.lai = maybe(op, "lai");
    r.fapar = maybe(op, "fapar");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace sarvi
