// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include "sarvi/terrain.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "sarvi/error.hpp"
#include "terrain_kernels.hpp"

namespace sarvi {

Raster::Raster(std::size_t w, std::size_t h, double fill, double cell, double nodata_value)
    : width(w), height(h), cellsize(cell), nodata(nodata_value), values(w * h, fill) {}

bool Raster::same_grid(const Raster& o) const noexcept {
  return width == o.width && height == o.height && cellsize == o.cellsize &&
         origin_x == o.origin_x && origin_y == o.origin_y;
}

void Raster::check() const {
  if (values.size() != width * height)
    throw ValueError("raster holds " + std::to_string(values.size()) + " values for " +
                     std::to_string(width) + "x" + std::to_string(height));
  if (!(cellsize > 0)) throw ValueError("raster cellsize must be positive");
}

SlopeAspect slope_aspect(const Raster& dem) {
  detail::require_3x3(dem);
  SlopeAspect out{detail::like(dem), detail::like(dem)};
  const auto h = static_cast<std::ptrdiff_t>(dem.height);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 1; r < h - 1; ++r)
    for (std::size_t c = 1; c + 1 < dem.width; ++c) {
      detail::SlopeAspectCell cell;
      if (!detail::horn_cell(dem, static_cast<std::size_t>(r), c, cell)) continue;
      out.slope.at(static_cast<std::size_t>(r), c) = cell.slope;
      out.aspect.at(static_cast<std::size_t>(r), c) = cell.aspect;
    }
  return out;
}

double local_incidence_angle(double slope_deg, double aspect_deg, const SarGeometry& geom) {
  return detail::lia_cell(slope_deg, aspect_deg, geom.incidence_deg, geom.look_azimuth_deg);
}

Raster local_incidence_raster(const SlopeAspect& t, const SarGeometry& geom) {
  if (!t.slope.same_grid(t.aspect)) throw ValueError("slope and aspect grids differ");
  Raster out = detail::like(t.slope);
  const auto n = static_cast<std::ptrdiff_t>(out.values.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double s = t.slope.values[i];
    if (s == t.slope.nodata) continue;
    const double a = t.aspect.values[i] == t.aspect.nodata ? 0.0 : t.aspect.values[i];
    out.values[i] = detail::lia_cell(s, a, geom.incidence_deg, geom.look_azimuth_deg);
  }
  return out;
}

Raster lee_filter(const Raster& img, const LeeParams& p) {
  detail::require_lee(p);
  img.check();
  Raster out = detail::like(img);
  const double cu2 = 1.0 / p.enl;
  const auto h = static_cast<std::ptrdiff_t>(img.height);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < img.width; ++c)
      out.at(static_cast<std::size_t>(r), c) =
          detail::lee_cell(img, static_cast<std::size_t>(r), c, p.window / 2, cu2);
  return out;
}

// ---------------------------------------------------------------------------
// ESRI ASCII grid

Raster read_grid(std::istream& in) {
  std::map<std::string, double> header;
  std::string line;
  std::size_t line_no = 0;
  std::streampos data_start = in.tellg();
  std::size_t data_line = 0;
  while (true) {
    data_start = in.tellg();
    if (!std::getline(in, line)) break;
    ++line_no;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (!std::isalpha(static_cast<unsigned char>(key[0]))) {
      data_line = line_no;
      break;
    }
    for (auto& ch : key) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    double v;
    if (!(ls >> v)) throw ParseError("header key '" + key + "' has no numeric value", line_no);
    header[key] = v;
  }
  auto need = [&](const char* key) {
    auto it = header.find(key);
    if (it == header.end())
      throw ParseError(std::string("grid header missing '") + key + "'", line_no);
    return it->second;
  };
  Raster r;
  const double ncols = need("ncols"), nrows = need("nrows");
  if (ncols < 1 || nrows < 1 || ncols != std::floor(ncols) || nrows != std::floor(nrows))
    throw ParseError("ncols/nrows must be positive integers", line_no);
  r.width = static_cast<std::size_t>(ncols);
  r.height = static_cast<std::size_t>(nrows);
  r.cellsize = need("cellsize");
  if (!(r.cellsize > 0)) throw ParseError("cellsize must be positive", line_no);
  if (header.count("xllcorner")) {
    r.origin_x = header["xllcorner"];
  } else if (header.count("xllcenter")) {
    r.origin_x = header["xllcenter"] - r.cellsize / 2;
  } else {
    throw ParseError("grid header missing 'xllcorner'", line_no);
  }
  if (header.count("yllcorner")) {
    r.origin_y = header["yllcorner"];
  } else if (header.count("yllcenter")) {
    r.origin_y = header["yllcenter"] - r.cellsize / 2;
  } else {
    throw ParseError("grid header missing 'yllcorner'", line_no);
  }
  r.nodata = header.count("nodata_value") ? header["nodata_value"] : -9999.0;

  if (!data_line) throw ParseError("grid has no data rows", line_no);
  in.clear();
  in.seekg(data_start);
  r.values.reserve(r.width * r.height);
  std::string tok;
  std::size_t cur_line = data_line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    while (ls >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size())
        throw ParseError("bad grid value '" + tok + "'", cur_line);
      r.values.push_back(v);
    }
    ++cur_line;
  }
  if (r.values.size() != r.width * r.height)
    throw ParseError("grid has " + std::to_string(r.values.size()) + " values, expected " +
                         std::to_string(r.width * r.height),
                     cur_line);
  return r;
}

Raster read_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_grid(in);
}

void write_grid(const Raster& r, std::ostream& out) {
  r.check();
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "ncols " << r.width << '\n'
      << "nrows " << r.height << '\n'
      << "xllcorner " << num(r.origin_x) << '\n'
      << "yllcorner " << num(r.origin_y) << '\n'
      << "cellsize " << num(r.cellsize) << '\n'
      << "NODATA_value " << num(r.nodata) << '\n';
  for (std::size_t row = 0; row < r.height; ++row) {
    for (std::size_t c = 0; c < r.width; ++c) out << (c ? " " : "") << num(r.at(row, c));
    out << '\n';
  }
}

void write_grid(const Raster& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_grid(r, out);
}

}  // namespace sarvi
