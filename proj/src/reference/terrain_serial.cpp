// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

// Single-threaded raster kernels used as the reference in tests and
// benchmarks.

#include "sarvi/terrain.hpp"
#include "../terrain_kernels.hpp"

namespace sarvi {

namespace serial {

SlopeAspect slope_aspect(const Raster& dem) {
  detail::require_3x3(dem);
  SlopeAspect out{detail::like(dem), detail::like(dem)};
  for (std::size_t r = 1; r + 1 < dem.height; ++r)
    for (std::size_t c = 1; c + 1 < dem.width; ++c) {
      detail::SlopeAspectCell cell;
      if (!detail::horn_cell(dem, r, c, cell)) continue;
      out.slope.at(r, c) = cell.slope;
      out.aspect.at(r, c) = cell.aspect;
    }
  return out;
}

Raster lee_filter(const Raster& img, const LeeParams& p) {
  detail::require_lee(p);
  img.check();
  Raster out = detail::like(img);
  const double cu2 = 1.0 / p.enl;
  for (std::size_t r = 0; r < img.height; ++r)
    for (std::size_t c = 0; c < img.width; ++c)
      out.at(r, c) = detail::lee_cell(img, r, c, p.window / 2, cu2);
  return out;
}

Raster local_incidence_raster(const SlopeAspect& t, const SarGeometry& geom) {
  if (!t.slope.same_grid(t.aspect)) throw ValueError("slope and aspect grids differ");
  Raster out = detail::like(t.slope);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double s = t.slope.values[i];
    if (s == t.slope.nodata) continue;
    const double a = t.aspect.values[i] == t.aspect.nodata ? 0.0 : t.aspect.values[i];
    out.values[i] = detail::lia_cell(s, a, geom.incidence_deg, geom.look_azimuth_deg);
  }
  return out;
}

}  // namespace serial

}  // namespace sarvi
