// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace sarvi {

/// North-up grid. Row 0 is the northern edge; `origin_x/origin_y` locate
/// the lower-left corner of the lower-left cell.
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  double cellsize = 1;
  double origin_x = 0;
  double origin_y = 0;
  double nodata = -9999;
  std::vector<double> values;

  Raster() = default;
  Raster(std::size_t w, std::size_t h, double fill = 0, double cell = 1, double nodata_value = -9999);

  double& at(std::size_t row, std::size_t col) { return values[row * width + col]; }
  double at(std::size_t row, std::size_t col) const { return values[row * width + col]; }
  bool valid(std::size_t row, std::size_t col) const { return at(row, col) != nodata; }

  /// Same dimensions, cell size and origin.
  bool same_grid(const Raster& other) const noexcept;
  /// Throws ValueError when the grid is internally inconsistent.
  void check() const;
};

struct SlopeAspect {
  Raster slope;   // degrees
  Raster aspect;  // degrees clockwise from north, downslope direction
};

/// Horn 3x3 gradient. Border cells and cells touching nodata become nodata;
/// aspect is nodata on flat cells.
SlopeAspect slope_aspect(const Raster& dem);

struct SarGeometry {
  double incidence_deg = 39;
  double look_azimuth_deg = 0;  // 0 = north, clockwise
};

/// Angle between the radar look vector and the terrain normal, degrees.
double local_incidence_angle(double slope_deg, double aspect_deg, const SarGeometry& geom);

/// Per-pixel local incidence angle. Flat cells (aspect nodata, slope 0)
/// resolve to the ellipsoid incidence.
Raster local_incidence_raster(const SlopeAspect& terrain, const SarGeometry& geom);

struct LeeParams {
  int window = 5;
  double enl = 4.4;
};

/// Lee filter for multiplicative speckle, applied to linear power.
Raster lee_filter(const Raster& img, const LeeParams& p = {});

// ESRI ASCII grid I/O.
Raster read_grid(const std::filesystem::path& path);
Raster read_grid(std::istream& in);
void write_grid(const Raster& r, const std::filesystem::path& path);
void write_grid(const Raster& r, std::ostream& out);

/// Single-threaded references for the raster kernels above; the parallel
/// versions must agree with them bit for bit.
namespace serial {
SlopeAspect slope_aspect(const Raster& dem);
Raster lee_filter(const Raster& img, const LeeParams& p = {});
Raster local_incidence_raster(const SlopeAspect& terrain, const SarGeometry& geom);
}  // namespace serial

}  // namespace sarvi
