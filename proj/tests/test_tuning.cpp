// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "sarvi/error.hpp"
#include "sarvi/eval.hpp"
#include "sarvi/synth.hpp"
#include "sarvi/tuning.hpp"
#include "test_util.hpp"

namespace sarvi {
namespace {

using nlohmann::json;

// Synthetic records whose NDVI depends only on the forest type.
Dataset step_dataset(std::uint64_t seed) {
  auto ds = generate(testing::small_config(4, 10, 14, seed)).dataset;
  for (auto& r : ds.records) r.ndvi = r.forest_type == ForestType::broadleaved ? 0.8 : 0.3;
  return ds;
}

std::pair<Dataset, Dataset> small_split(std::uint64_t seed) {
  const auto ds = generate(testing::small_config(5, 8, 10, seed)).dataset;
  return split_by_area(ds, 0.3, seed);
}

TEST(ExpandGrid, SizesAndOrder) {
  EXPECT_EQ(expand_grid(paper_rfr_grid()).size(), 160u);
  const auto xgb = expand_grid(paper_xgb_grid());
  EXPECT_EQ(xgb.size(), 66u);
  for (const auto& c : xgb) {
    EXPECT_EQ(c.at("n_estimators_cap"), 5000);
    EXPECT_EQ(c.at("early_stopping_rounds"), 5);
  }

  GridSpec g;
  g.axes = {{"n_estimators", {10, 20}}, {"max_features", {"sqrt", 1, 2}}};
  const auto cfgs = expand_grid(g);
  ASSERT_EQ(cfgs.size(), 6u);
  EXPECT_EQ(cfgs[0], (json{{"n_estimators", 10}, {"max_features", "sqrt"}}));
  EXPECT_EQ(cfgs[1], (json{{"n_estimators", 10}, {"max_features", 1}}));
  EXPECT_EQ(cfgs[3], (json{{"n_estimators", 20}, {"max_features", "sqrt"}}));

  GridSpec one;
  one.axes = {{"n_estimators", {5, 6, 7}}};
  EXPECT_EQ(expand_grid(one).size(), 3u);
  one.axes.push_back({"max_depth", {}});
  EXPECT_THROW(expand_grid(one), ValueError);
}

TEST(ExpandGrid, SizeIsProductOfAxes) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    GridSpec g;
    std::size_t product = 1;
    const char* names[] = {"n_estimators", "min_samples_leaf", "max_depth"};
    for (const char* n : names) {
      const std::size_t len = 1 + rng() % 4;
      GridAxis a{n, {}};
      for (std::size_t i = 0; i < len; ++i) a.values.emplace_back(static_cast<int>(i + 1));
      g.axes.push_back(a);
      product *= len;
    }
    EXPECT_EQ(expand_grid(g).size(), product);
  }
}

TEST(GridJson, ParsesValidatesAndRoundTrips) {
  const auto g = grid_from_json(json::parse(R"({"model": "gbt", "axes": [
      {"name": "learning_rate", "values": [0.05, 0.1]}, {"name": "max_depth", "values": [3]}]})"));
  EXPECT_EQ(g.model_kind, ModelKind::gbt);
  EXPECT_EQ(grid_to_json(grid_from_json(grid_to_json(g))), grid_to_json(g));
  EXPECT_THROW(grid_from_json(json::parse(R"({"model": "forest", "axes": {"bogus": [1]}})")), ValueError);
  EXPECT_THROW(grid_from_json(json::parse(R"({"model": "forest", "axes": {"max_features": ["half"]}})")),
               ValueError);
  EXPECT_THROW(grid_from_json(json::parse(R"({"model": "tree", "axes": {"max_depth": [1]}})")), ValueError);
  EXPECT_EQ(expand_grid(load_grid("paper-rfr")).size(), 160u);
}

TEST(GridSearch, GeneratingConfigurationRanksBest) {
  const auto [train, val] = split_by_area(step_dataset(5), 0.3, 5);
  GridSpec g;
  g.axes = {{"max_depth", {0, 1, 3}}, {"n_estimators", {1}}, {"bootstrap", {false}},
            {"max_features", {"all"}}};
  const auto rep = grid_search(g, train, val, Target::ndvi, 1);
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_EQ(*rep.best().val_mae, 0.0);
  EXPECT_GE(rep.best().config.at("max_depth").get<int>(), 1);
  EXPECT_EQ(rep.rows.back().config.at("max_depth"), 0);
  // Equal MAE keeps grid order.
  EXPECT_EQ(rep.rows[0].config_index, 1u);
  EXPECT_EQ(rep.rows[1].config_index, 2u);
}

TEST(GridSearch, FailuresAreRecordedAndBestIsMinimum) {
  const auto [train, val] = small_split(6);
  GridSpec g;
  g.axes = {{"n_estimators", {4}}, {"max_features", {"sqrt", 3, 14}}};
  const auto rep = grid_search(g, train, val, Target::ndvi, 2);
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_EQ(rep.rows.back().status, RunStatus::failure);
  EXPECT_FALSE(rep.rows.back().val_mae);
  EXPECT_FALSE(rep.rows.back().message.empty());
  for (const auto& r : rep.rows)
    if (r.val_mae) EXPECT_LE(*rep.best().val_mae, *r.val_mae);

  GridSpec single;
  single.axes = {{"n_estimators", {3}}};
  const auto one = grid_search(single, train, val, Target::ndvi, 2);
  ASSERT_EQ(one.rows.size(), 1u);
  EXPECT_EQ(one.best().config_index, 0u);
}

TEST(GridSearch, ReportIsDeterministic) {
  const auto [train, val] = small_split(7);
  GridSpec g;
  g.axes = {{"n_estimators", {3, 6}}, {"max_features", {"log2", 2}}};
  auto dump = [&] {
    std::ostringstream out;
    const auto rep = grid_search(g, train, val, Target::evi, 11);
    write_tuning_csv(rep, out);
    return out.str() + tuning_summary_json(rep).dump();
  };
  EXPECT_EQ(dump(), dump());
}

TEST(GreedyEnsemble, AnticorrelatedPairBeatsBothMembers) {
  const std::vector<double> y = {0, 0, 0, 0};
  const std::vector<std::vector<double>> preds = {{1, 1, -1, -1}, {-1, -1, 1, 1}, {2, 2, 2, 2}};
  const auto sel = greedy_ensemble(preds, y);
  EXPECT_EQ(sel.mae, 0.0);
  EXPECT_EQ(sel.counts, (std::vector<std::size_t>{1, 1, 0}));
  EXPECT_EQ(sel.weights, (std::vector<double>{0.5, 0.5, 0.0}));
}

TEST(GreedyEnsemble, NeverWorseThanBestSingle) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> y(25);
    for (auto& v : y) v = n(rng);
    std::vector<std::vector<double>> preds(1 + rng() % 6, std::vector<double>(25));
    double best = INFINITY;
    for (auto& p : preds) {
      for (std::size_t i = 0; i < 25; ++i) p[i] = y[i] + n(rng);
      best = std::min(best, mae(y, p));
    }
    const auto sel = greedy_ensemble(preds, y, 1 + rng() % 20);
    EXPECT_LE(sel.mae, best);
    double wsum = 0;
    for (double w : sel.weights) wsum += w;
    EXPECT_NEAR(wsum, 1.0, 1e-12);
    for (std::size_t i = 1; i < sel.history.size(); ++i) EXPECT_LT(sel.history[i], sel.history[i - 1]);
  }
  EXPECT_THROW(greedy_ensemble({}, std::vector<double>{1.0}), ValueError);
}

TEST(BudgetSearch, TraceInvariantsAndEnsemble) {
  const auto [train, val] = small_split(9);
  SearchSpace space;
  space.forest_trees_max = 20;
  space.gbt_depth_max = 4;
  const auto res = budget_search(space, train, val, Target::ndvi, 2.0, 3);
  ASSERT_FALSE(res.trace.entries.empty());
  EXPECT_EQ(res.trace.per_config_cap_seconds, 0.2);
  ASSERT_EQ(res.models.size(), res.trace.entries.size());
  double total = 0;
  for (std::size_t i = 0; i < res.trace.entries.size(); ++i) {
    const auto& e = res.trace.entries[i];
    total += e.seconds;
    if (e.status == RunStatus::success) {
      ASSERT_TRUE(e.val_mae);
      EXPECT_TRUE(std::isfinite(*e.val_mae));
      EXPECT_LE(e.seconds, res.trace.per_config_cap_seconds);
      EXPECT_TRUE(res.models[i]);
    } else {
      EXPECT_FALSE(e.val_mae);
    }
  }
  EXPECT_LE(total, res.trace.budget_seconds + res.trace.per_config_cap_seconds + 0.5);

  const auto ens = ensemble_select(res, val, Target::ndvi);
  const auto y = target_vector(val, Target::ndvi);
  const auto X = feature_matrix(val);
  double best = INFINITY;
  for (const auto& e : res.trace.entries)
    if (e.val_mae) best = std::min(best, *e.val_mae);
  EXPECT_LE(mae(y, predict(ens, X)), best + 1e-12);
}

TEST(BudgetSearch, LongerBudgetTestsMoreConfigsInTheSameOrder) {
  const auto [train, val] = small_split(10);
  SearchSpace space;
  space.forest_trees_max = 15;
  space.gbt_depth_max = 3;
  const auto short_run = budget_search(space, train, val, Target::ndvi, 0.5, 4);
  const auto long_run = budget_search(space, train, val, Target::ndvi, 3.0, 4);
  EXPECT_GE(long_run.trace.entries.size(), short_run.trace.entries.size());
  const auto n = std::min(short_run.trace.entries.size(), long_run.trace.entries.size());
  for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(short_run.trace.entries[i].config, long_run.trace.entries[i].config);
  EXPECT_THROW(budget_search(space, train, val, Target::ndvi, 0, 4), ValueError);
}

TEST(SearchSpace, SamplesValidConfigs) {
  std::mt19937_64 rng(12);
  SearchSpace space;
  for (int i = 0; i < 200; ++i) {
    const auto [kind, cfg] = space.sample(rng, 13);
    EXPECT_NO_THROW(spec_from_config(kind, cfg, 0)) << cfg.dump();
  }
}

TEST(RepeatAndAverage, MeanAndVariance) {
  const std::uint64_t seeds[] = {1, 2, 3};
  const auto s = repeat_and_average(seeds, [](std::uint64_t seed) {
    return std::map<std::string, double>{{"mae", 0.1 * static_cast<double>(seed)}, {"r2", 0.5}};
  });
  EXPECT_EQ(s.runs.size(), 3u);
  EXPECT_NEAR(s.mean.at("mae"), 0.2, 1e-15);
  EXPECT_NEAR(s.variance.at("mae"), 0.01, 1e-15);
  EXPECT_EQ(s.mean.at("r2"), 0.5);
  EXPECT_EQ(s.variance.at("r2"), 0.0);
  const std::uint64_t one[] = {7};
  const auto single = repeat_and_average(one, [](std::uint64_t) { return std::map<std::string, double>{{"x", 3}}; });
  EXPECT_EQ(single.mean.at("x"), 3);
  EXPECT_EQ(single.variance.at("x"), 0);
}

}  // namespace
}  // namespace sarvi
