// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include "../importance_kernels.hpp"

namespace sarvi::serial {

ImportanceReport permutation_importance(const Model& m, const FeatureMatrix& X,
                                        std::span<const double> y, int repeats,
                                        std::uint64_t seed) {
  auto r = detail::importance_setup(m, X, y, repeats);
  FeatureMatrix work = X;
  for (std::size_t f = 0; f < X.cols(); ++f)
    for (std::size_t k = 0; k < static_cast<std::size_t>(repeats); ++k)
      r.raw[f][k] = detail::permuted_mae(m, X, work, y, f, k, seed) - r.baseline;
  detail::importance_finish(r);
  return r;
}

}  // namespace sarvi::serial
