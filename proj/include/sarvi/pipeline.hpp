// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#pragma once

#include <cstdint>
#include <variant>

#include <nlohmann/json.hpp>

#include "sarvi/datamodel.hpp"
#include "sarvi/learners.hpp"

namespace sarvi {

/// A model family together with its hyperparameters.
using ModelSpec = std::variant<TreeParams, ForestParams, GbtParams>;

ModelKind kind_of(const ModelSpec& spec);

/// Builds a spec from a flat config object such as
/// {"n_estimators": 450, "max_features": 8}. Missing keys take the
/// library defaults (MAE criterion for trees and forests, 5000-round cap and
/// 5-round patience for boosting). `seed` overrides any seed in the config.
ModelSpec spec_from_config(ModelKind kind, const nlohmann::json& config, std::uint64_t seed);
nlohmann::json spec_to_json(const ModelSpec& spec);

/// Fraction of training areas held out for boosting early stopping when no
/// validation set is supplied.
inline constexpr double kDefaultValidationFraction = 0.2;

/// Trains on the dataset's active features. Boosting uses `val` for early
/// stopping; when `val` is null an area-level split of `train` provides it.
Model train_model(const ModelSpec& spec, const Dataset& train, const Dataset* val, Target target,
                  const Deadline& deadline = {});

}  // namespace sarvi
