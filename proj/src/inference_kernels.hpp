// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#pragma once

#include <string>
#include <vector>

#include "sarvi/error.hpp"
#include "sarvi/inference.hpp"

namespace sarvi::detail {

/// Where each model input comes from: a raster, the forest-type layer, or an
/// acquisition scalar.
struct PixelSource {
  enum class Kind { raster, forest_type, scalar } kind = Kind::scalar;
  const Raster* raster = nullptr;
  double scalar = 0;
};

inline std::vector<PixelSource> pixel_sources(const Model& m, const SpatialCase& c) {
  std::vector<PixelSource> out;
  for (const auto& name : m.feature_names) {
    PixelSource s;
    if (name == "forest_type") {
      s.kind = PixelSource::Kind::forest_type;
    } else if (auto it = c.feature_rasters.find(name); it != c.feature_rasters.end()) {
      s.kind = PixelSource::Kind::raster;
      s.raster = &it->second;
    } else if (auto sc = c.scalars.find(name); sc != c.scalars.end()) {
      s.scalar = sc->second;
    } else {
      throw ValueError("spatial case provides no raster or scalar for feature '" + name + "'");
    }
    out.push_back(s);
  }
  return out;
}

/// Prediction for pixel i, or the mask nodata value when the pixel is not
/// predicted. `x` is scratch space sized to the model inputs.
inline double infer_pixel(const Model& m, const SpatialCase& c,
                          const std::vector<PixelSource>& sources, std::size_t i,
                          std::vector<double>& x) {
  const double nodata = c.mask.nodata;
  if (c.mask.values[i] != 1) return nodata;
  const double code = c.forest_type.values[i];
  double ft;
  if (code == kConiferousCode)
    ft = static_cast<double>(ForestType::coniferous);
  else if (code == kBroadleavedCode)
    ft = static_cast<double>(ForestType::broadleaved);
  else
    return nodata;
  for (std::size_t k = 0; k < sources.size(); ++k) {
    const auto& s = sources[k];
    switch (s.kind) {
      case PixelSource::Kind::forest_type: x[k] = ft; break;
      case PixelSource::Kind::scalar: x[k] = s.scalar; break;
      case PixelSource::Kind::raster: {
        const double v = s.raster->values[i];
        if (v == s.raster->nodata) return nodata;
        x[k] = v;
        break;
      }
    }
  }
  return m.predict_row(x);
}

}  // namespace sarvi::detail
