// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <span>

#include "rng.hpp"
#include "sarvi/error.hpp"
#include "sarvi/eval.hpp"

namespace sarvi::detail {

inline ImportanceReport importance_setup(const Model& m, const FeatureMatrix& X,
                                         std::span<const double> y, int repeats) {
  if (repeats < 1) throw ValueError("repeats must be >= 1");
  if (X.rows == 0 || X.rows != y.size())
    throw ValueError("importance needs a non-empty matrix with one target per row");
  ImportanceReport r;
  r.features = X.names;
  r.repeats = repeats;
  r.baseline = mae(y, predict(m, X));
  r.raw.assign(X.cols(), std::vector<double>(static_cast<std::size_t>(repeats), 0.0));
  return r;
}

/// MAE after shuffling column f with the stream for (f, k). `work` must hold
/// a copy of X; column f is restored before returning.
inline double permuted_mae(const Model& m, const FeatureMatrix& X, FeatureMatrix& work,
                           std::span<const double> y, std::size_t f, std::size_t k,
                           std::uint64_t seed) {
  std::vector<std::size_t> perm(X.rows);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(seed, {f, k}));
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t i = 0; i < X.rows; ++i) work(i, f) = X(perm[i], f);
  std::vector<double> p(X.rows);
  for (std::size_t i = 0; i < X.rows; ++i) p[i] = m.predict_row(work.row(i));
  for (std::size_t i = 0; i < X.rows; ++i) work(i, f) = X(i, f);
  return mae(y, p);
}

inline void importance_finish(ImportanceReport& r) {
  const std::size_t F = r.features.size();
  r.mean.assign(F, 0.0);
  r.std.assign(F, 0.0);
  r.share.assign(F, 0.0);
  const double n = static_cast<double>(r.repeats);
  for (std::size_t f = 0; f < F; ++f) {
    double s = 0;
    for (double v : r.raw[f]) s += v;
    r.mean[f] = s / n;
    double ss = 0;
    for (double v : r.raw[f]) ss += (v - r.mean[f]) * (v - r.mean[f]);
    r.std[f] = std::sqrt(ss / n);
  }
  double total = 0;
  for (double v : r.mean) total += std::max(v, 0.0);
  if (total > 0)
    for (std::size_t f = 0; f < F; ++f) r.share[f] = std::max(r.mean[f], 0.0) / total;
}

}  // namespace sarvi::detail
