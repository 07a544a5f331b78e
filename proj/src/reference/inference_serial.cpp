// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include "../inference_kernels.hpp"

namespace sarvi::serial {

Raster infer_raster(const Model& m, const SpatialCase& c) {
  c.check();
  const auto sources = detail::pixel_sources(m, c);
  Raster out = c.mask;
  std::vector<double> x(sources.size());
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = detail::infer_pixel(m, c, sources, i, x);
  return out;
}

}  // namespace sarvi::serial
