// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

// Per-cell kernels shared by the OpenMP loops and their serial references.

#pragma once

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <numbers>

#include "sarvi/error.hpp"
#include "sarvi/terrain.hpp"

namespace sarvi::detail {

constexpr double kDeg = std::numbers::pi / 180.0;

struct SlopeAspectCell {
  double slope;
  double aspect;
};

/// Horn gradient at an interior cell. Returns false when any of the nine
/// cells is nodata.
inline bool horn_cell(const Raster& dem, std::size_t r, std::size_t c, SlopeAspectCell& out) {
  double z[3][3];
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc) {
      const double v = dem.at(r + dr, c + dc);
      if (v == dem.nodata) return false;
      z[dr + 1][dc + 1] = v;
    }
  // x grows east (columns), y grows north (row 0 is north).
  const double dzdx = ((z[0][2] + 2 * z[1][2] + z[2][2]) - (z[0][0] + 2 * z[1][0] + z[2][0])) /
                      (8 * dem.cellsize);
  const double dzdy = ((z[0][0] + 2 * z[0][1] + z[0][2]) - (z[2][0] + 2 * z[2][1] + z[2][2])) /
                      (8 * dem.cellsize);
  const double g = std::hypot(dzdx, dzdy);
  out.slope = std::atan(g) / kDeg;
  if (g == 0) {
    out.aspect = dem.nodata;
  } else {
    // Downslope direction, clockwise from north.
    double a = std::atan2(-dzdx, -dzdy) / kDeg;
    if (a < 0) a += 360.0;
    if (a >= 360.0) a -= 360.0;
    out.aspect = a;
  }
  return true;
}

inline double lia_cell(double slope_deg, double aspect_deg, double incidence_deg,
                       double look_azimuth_deg) {
  const double s = slope_deg * kDeg;
  const double th = incidence_deg * kDeg;
  const double rel = (aspect_deg - look_azimuth_deg) * kDeg;
  double c = std::cos(s) * std::cos(th) + std::sin(s) * std::sin(th) * std::cos(rel);
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c) / kDeg;
}

/// Lee estimate at one pixel; window statistics accumulate in row-major
/// window order.
inline double lee_cell(const Raster& img, std::size_t r, std::size_t c, int half, double cu2) {
  const double center = img.at(r, c);
  if (center == img.nodata) return img.nodata;
  const std::ptrdiff_t r0 = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(r) - half);
  const std::ptrdiff_t r1 =
      std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(img.height) - 1,
                               static_cast<std::ptrdiff_t>(r) + half);
  const std::ptrdiff_t c0 = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(c) - half);
  const std::ptrdiff_t c1 =
      std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(img.width) - 1,
                               static_cast<std::ptrdiff_t>(c) + half);
  double sum = 0, sum2 = 0;
  std::size_t n = 0;
  for (auto i = r0; i <= r1; ++i)
    for (auto j = c0; j <= c1; ++j) {
      const double v = img.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (v == img.nodata) continue;
      sum += v;
      sum2 += v * v;
      ++n;
    }
  // n counts the centre as well.
  if (n < 5) return center;
  const double m = sum / static_cast<double>(n);
  const double var = std::max(0.0, sum2 / static_cast<double>(n) - m * m);
  const double ci2 = m == 0 ? 0.0 : var / (m * m);
  double w = 0;
  if (ci2 > 0) w = std::max(0.0, (ci2 - cu2) / (ci2 * (1 + cu2)));
  return m + w * (center - m);
}

inline Raster like(const Raster& r) {
  Raster out(r.width, r.height, r.nodata, r.cellsize, r.nodata);
  out.origin_x = r.origin_x;
  out.origin_y = r.origin_y;
  return out;
}

inline void require_3x3(const Raster& dem) {
  dem.check();
  if (dem.width < 3 || dem.height < 3) throw ValueError("slope_aspect needs at least a 3x3 DEM");
}

inline void require_lee(const LeeParams& p) {
  if (p.window < 3 || p.window % 2 == 0)
    throw ValueError("Lee window must be odd and >= 3, got " + std::to_string(p.window));
  if (!(p.enl > 0)) throw ValueError("Lee ENL must be positive");
}


}  // namespace sarvi::detail
