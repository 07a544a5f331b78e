// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include "sarvi/inference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "inference_kernels.hpp"
#include "sarvi/error.hpp"

namespace sarvi {

using nlohmann::json;

std::string_view to_string(SeriesSource s) {
  return s == SeriesSource::optical_label ? "optical_label" : "sar_estimated";
}

namespace {

void check_stream(std::span<const SampleRecord> records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].area_id != records[0].area_id)
      throw ValueError("time series mixes areas '" + records[0].area_id + "' and '" +
                       records[i].area_id + "'");
    if (!(records[i - 1].timestamp < records[i].timestamp))
      throw ValueError("time series records must be strictly increasing in time");
  }
}

}  // namespace

TimeSeries estimate_timeseries(const Model& m, std::span<const SampleRecord> sar_stream) {
  check_stream(sar_stream);
  TimeSeries ts;
  ts.source = SeriesSource::sar_estimated;
  if (sar_stream.empty()) return ts;
  ts.area_id = sar_stream.front().area_id;
  const auto X = feature_matrix(sar_stream, m.feature_names);
  const auto p = predict(m, X);
  ts.samples.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) ts.samples.emplace_back(sar_stream[i].timestamp, p[i]);
  return ts;
}

TimeSeries label_timeseries(std::span<const SampleRecord> records, Target target) {
  check_stream(records);
  TimeSeries ts;
  ts.source = SeriesSource::optical_label;
  if (!records.empty()) ts.area_id = records.front().area_id;
  for (const auto& r : records)
    if (auto v = r.target(target)) ts.samples.emplace_back(r.timestamp, *v);
  return ts;
}

void SpatialCase::check() const {
  mask.check();
  forest_type.check();
  if (!forest_type.same_grid(mask)) throw ValueError("forest-type raster grid differs from the mask");
  for (const auto& [name, r] : feature_rasters) {
    r.check();
    if (!r.same_grid(mask)) throw ValueError("raster '" + name + "' grid differs from the mask");
  }
  if (truth) {
    truth->check();
    if (!truth->same_grid(mask)) throw ValueError("truth raster grid differs from the mask");
  }
  for (double v : mask.values)
    if (v != 0 && v != 1 && v != mask.nodata)
      throw ValueError("mask values must be 0, 1 or nodata");
}

SpatialCase load_spatial_case(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error("cannot open " + manifest.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("case manifest is not valid JSON: ") + e.what(), 0);
  }
  const auto base = manifest.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
  };
  SpatialCase c;
  try {
    const json rasters = j.value("rasters", json::object());
    for (const auto& [name, path] : rasters.items())
      c.feature_rasters[name] = read_grid(resolve(path.get<std::string>()));
    c.forest_type = read_grid(resolve(j.at("forest_type").get<std::string>()));
    c.mask = read_grid(resolve(j.at("mask").get<std::string>()));
    if (j.contains("truth") && !j.at("truth").is_null())
      c.truth = read_grid(resolve(j.at("truth").get<std::string>()));
    const json scalars = j.value("scalars", json::object());
    for (const auto& [name, v] : scalars.items())
      c.scalars[name] = v.get<double>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed case manifest: ") + e.what());
  }
  c.check();
  return c;
}

Raster infer_raster(const Model& m, const SpatialCase& c) {
  c.check();
  const auto sources = detail::pixel_sources(m, c);
  Raster out = c.mask;
  out.nodata = c.mask.nodata;
  const auto n = static_cast<std::ptrdiff_t>(out.values.size());
#pragma omp parallel
  {
    std::vector<double> x(sources.size());
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      out.values[i] = detail::infer_pixel(m, c, sources, static_cast<std::size_t>(i), x);
  }
  return out;
}

ErrorMap error_map(const Raster& pred, const Raster& truth, const Raster& mask) {
  pred.check();
  truth.check();
  mask.check();
  if (!pred.same_grid(truth) || !pred.same_grid(mask))
    throw ValueError("prediction, truth and mask rasters are not co-registered");
  ErrorMap out{pred, {}};
  out.ae.nodata = pred.nodata;
  std::vector<double> errs;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const bool use = mask.values[i] == 1 && pred.values[i] != pred.nodata &&
                     truth.values[i] != truth.nodata;
    if (use) {
      out.ae.values[i] = std::abs(pred.values[i] - truth.values[i]);
      errs.push_back(out.ae.values[i]);
    } else {
      out.ae.values[i] = out.ae.nodata;
    }
  }
  out.summary.n = errs.size();
  if (!errs.empty()) {
    double s = 0;
    for (double e : errs) s += e;
    out.summary.mae = s / static_cast<double>(errs.size());
    double ss = 0;
    for (double e : errs) ss += (e - out.summary.mae) * (e - out.summary.mae);
    out.summary.std = std::sqrt(ss / static_cast<double>(errs.size()));
  }
  return out;
}

json to_json(const ErrorSummary& s) { return {{"mae", s.mae}, {"std", s.std}, {"n", s.n}}; }

}  // namespace sarvi
