// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

// Acceptance runner: prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "sarvi/error.hpp"
#include "sarvi/eval.hpp"
#include "sarvi/inference.hpp"
#include "sarvi/pipeline.hpp"
#include "sarvi/synth.hpp"
#include "sarvi/terrain.hpp"
#include "sarvi/tuning.hpp"
#include "test_util.hpp"

namespace sarvi {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double variance(std::span<const double> y) {
  double m = 0;
  for (double v : y) m += v;
  m /= static_cast<double>(y.size());
  double s = 0;
  for (double v : y) s += (v - m) * (v - m);
  return s / static_cast<double>(y.size());
}

// 1. Metric oracle equivalence ------------------------------------------------

Outcome metric_oracle() {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 1);
  std::vector<std::vector<double>> ys, ps;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t len = 2 + rng() % 200;
    std::vector<double> y(len), p(len);
    for (std::size_t i = 0; i < len; ++i) {
      y[i] = n(rng) * 3;
      p[i] = y[i] + n(rng);
    }
    ys.push_back(std::move(y));
    ps.push_back(std::move(p));
  }
  double worst = 0;
  double elapsed = 0;
  for (std::size_t t = 0; t < ys.size(); ++t) {
    const auto& y = ys[t];
    const auto& p = ps[t];
    const auto t0 = Clock::now();
    const double a = mae(y, p);
    const auto [mse, rmse] = mse_rmse(y, p);
    const double r = r2(y, p);
    elapsed += seconds_since(t0);

    long double abs_sum = 0, sq_sum = 0, mean = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      abs_sum += std::fabs(static_cast<long double>(y[i]) - p[i]);
      sq_sum += (static_cast<long double>(y[i]) - p[i]) * (static_cast<long double>(y[i]) - p[i]);
      mean += y[i];
    }
    const auto len = static_cast<long double>(y.size());
    mean /= len;
    long double tot = 0;
    for (double v : y) tot += (v - mean) * (v - mean);
    const double ref[] = {static_cast<double>(abs_sum / len), static_cast<double>(sq_sum / len),
                          static_cast<double>(std::sqrt(sq_sum / len)),
                          static_cast<double>(1 - sq_sum / tot)};
    const double got[] = {a, mse, rmse, r};
    for (int k = 0; k < 4; ++k) worst = std::max(worst, std::fabs(ref[k] - got[k]));
  }
  return {worst <= 1e-12 && elapsed < 1.0, fmt("max |diff| %.3g, %.3f s", worst, elapsed)};
}

// 2. R2 semantics -------------------------------------------------------------

Outcome r2_semantics() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-5, 5);
  double worst_perfect = 0, worst_mean = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> y(2 + rng() % 100);
    for (auto& v : y) v = u(rng);
    double m = 0;
    for (double v : y) m += v;
    m /= static_cast<double>(y.size());
    const std::vector<double> mean_pred(y.size(), m);
    worst_perfect = std::max(worst_perfect, std::fabs(r2(y, y) - 1));
    worst_mean = std::max(worst_mean, std::fabs(r2(y, mean_pred)));
  }
  return {worst_perfect <= 1e-12 && worst_mean <= 1e-12,
          fmt("perfect %.3g, mean %.3g", worst_perfect, worst_mean)};
}

// 3. Split hygiene ------------------------------------------------------------

Outcome split_hygiene() {
  auto cfg = testing::small_config(10, 3, 5, 3);
  cfg.areas_healthy_broadleaved = 13;
  cfg.areas_disturbed_coniferous = 7;
  const auto ds = generate(cfg).dataset;
  std::map<ClassLabel, std::set<std::string>> all;
  for (const auto& r : ds.records) all[r.class_label].insert(r.area_id);
  int bad = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto [train, test] = split_by_area(ds, 0.3, seed);
    std::set<std::string> tr;
    std::map<ClassLabel, std::set<std::string>> te;
    for (const auto& r : train.records) tr.insert(r.area_id);
    for (const auto& r : test.records) te[r.class_label].insert(r.area_id);
    for (const auto& [c, ids] : te)
      for (const auto& id : ids)
        if (tr.count(id)) ++bad;
    for (const auto& [c, ids] : all) {
      const double expected = 0.3 * static_cast<double>(ids.size());
      if (std::fabs(static_cast<double>(te[c].size()) - expected) > 1) ++bad;
    }
  }
  return {bad == 0, fmt("%d violations over 100 seeds", bad)};
}

// 4. Learner recovery ---------------------------------------------------------

Outcome learner_recovery() {
  const auto t0 = Clock::now();
  auto cfg = testing::small_config(40, 30, 40, 4);
  cfg.label_noise = 0.05;
  const auto [train_all, test] = split_by_area(generate(cfg).dataset, 0.3, 4);
  const auto [train, val] = split_by_area(train_all, 0.2, 5);
  const auto y_test = target_vector(test, Target::ndvi);
  const double ceiling = 1 - cfg.label_noise * cfg.label_noise / variance(y_test);

  // Forest: choose max_features on a validation split, then refit with 500 trees.
  GridSpec grid;
  grid.axes = {{"n_estimators", {60}}, {"max_features", {"sqrt", 6, "all"}}};
  const auto rep = grid_search(grid, train, val, Target::ndvi, 4);
  auto forest_cfg = rep.best().config;
  forest_cfg["n_estimators"] = 500;
  const auto forest = train_model(spec_from_config(ModelKind::forest, forest_cfg, 4), train_all,
                                  nullptr, Target::ndvi);
  const double forest_r2 = r2(y_test, predict(forest, feature_matrix(test)));

  GbtParams gp;
  gp.learning_rate = 0.05;
  gp.max_depth = 6;
  gp.seed = 4;
  const auto gbt = train_model(gp, train, &val, Target::ndvi);
  const double gbt_r2 = r2(y_test, predict(gbt, feature_matrix(test)));

  const double secs = seconds_since(t0);
  const bool ok = forest_r2 >= ceiling - 0.1 && gbt_r2 >= ceiling - 0.1 && secs < 120;
  return {ok, fmt("ceiling %.4f, forest(%s) %.4f, gbt(%zu rounds) %.4f, %.1f s", ceiling,
                  forest_cfg.at("max_features").dump().c_str(), forest_r2, gbt.best_round, gbt_r2,
                  secs)};
}

// 5. Early stopping -----------------------------------------------------------

Outcome early_stopping() {
  std::mt19937_64 rng(5);
  int mismatches = 0;
  for (int s = 0; s < 50; ++s) {
    std::vector<double> seq(5 + rng() % 40);
    for (auto& v : seq) v = static_cast<double>(rng() % 6);
    if (s % 5 == 0) std::sort(seq.rbegin(), seq.rend());
    // Reference rule: stop once 5 consecutive rounds fail to beat the best.
    double best = INFINITY;
    int best_round = 0, since = 0, ref_stop = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (seq[i] < best) {
        best = seq[i];
        best_round = static_cast<int>(i) + 1;
        since = 0;
      } else if (++since >= 5) {
        ref_stop = static_cast<int>(i) + 1;
        break;
      }
    }
    EarlyStopping es(5);
    int stop = 0;
    for (std::size_t i = 0; i < seq.size(); ++i)
      if (es.update(seq[i])) {
        stop = static_cast<int>(i) + 1;
        break;
      }
    if (stop != ref_stop || es.best_round() != best_round) ++mismatches;
  }

  const auto ds = generate(testing::small_config(12, 20, 25, 6)).dataset;
  const auto [train, val] = split_by_area(ds, 0.3, 6);
  GbtParams fast, slow;
  fast.learning_rate = 0.1;
  slow.learning_rate = 0.01;
  fast.max_depth = slow.max_depth = 4;
  const auto mf = train_model(fast, train, &val, Target::ndvi);
  const auto ms = train_model(slow, train, &val, Target::ndvi);
  const auto rf = mf.validation_mae.size(), rs = ms.validation_mae.size();
  return {mismatches == 0 && rs > rf,
          fmt("%d/50 scripted mismatches; stop round lr 0.1: %zu, lr 0.01: %zu", mismatches, rf, rs)};
}

// 6. Permutation importance ---------------------------------------------------

Outcome permutation_importance_check() {
  auto make = [](std::size_t rows, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    FeatureMatrix X;
    X.names = {"x0", "x1", "x2", "x3"};
    X.cardinality = {0, 0, 0, 0};
    X.rows = rows;
    X.values.resize(rows * 4);
    std::vector<double> y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      X(r, 0) = u(rng);
      X(r, 1) = u(rng);
      X(r, 2) = 1.0;
      X(r, 3) = -2.0;
      y[r] = std::sin(6 * X(r, 0));
    }
    return std::pair{X, y};
  };
  const auto [Xtr, ytr] = make(400, 61);
  const auto [Xte, yte] = make(300, 62);
  ForestParams p;
  p.n_estimators = 30;
  p.tree.seed = 6;
  const auto m = fit_random_forest(Xtr, ytr, p);
  std::set<int> used;
  for (const auto& t : m.trees)
    for (int f : t.feature)
      if (f >= 0) used.insert(f);
  const auto rep = permutation_importance(m, Xte, yte, 10, 6);
  std::size_t unused = 0;
  bool unused_zero = true;
  for (std::size_t f = 0; f < rep.features.size(); ++f) {
    if (used.count(static_cast<int>(f))) continue;
    ++unused;
    for (double v : rep.raw[f]) unused_zero = unused_zero && v == 0.0;
  }
  return {rep.share[0] > 0.5 && unused >= 2 && unused_zero,
          fmt("x0 share %.3f, %zu unused features, unused raw all zero: %s", rep.share[0], unused,
              unused_zero ? "yes" : "no")};
}

// 7. Ensemble selection -------------------------------------------------------

Outcome ensemble_selection() {
  const auto ds = generate(testing::small_config(6, 12, 15, 7)).dataset;
  const auto [train, val] = split_by_area(ds, 0.3, 7);
  const auto X = feature_matrix(val);
  const auto y = target_vector(val, Target::ndvi);
  SearchSpace space;
  space.forest_trees_max = 30;
  space.gbt_depth_max = 6;
  int violations = 0;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const auto res = budget_search(space, train, val, Target::ndvi, 1.5, seed);
    double best = INFINITY;
    for (const auto& e : res.trace.entries)
      if (e.val_mae) best = std::min(best, *e.val_mae);
    const double ens = mae(y, predict(ensemble_select(res, val, Target::ndvi), X));
    if (!(ens <= best + 1e-12)) ++violations;
    detail += fmt(" seed %llu: %zu configs %.5f<=%.5f;", static_cast<unsigned long long>(seed),
                  res.trace.entries.size(), ens, best);
  }
  return {violations == 0, fmt("%d violations;", violations) + detail};
}

// 8. Feature-set ablation direction -------------------------------------------

Outcome ablation_direction() {
  auto cfg = testing::small_config(25, 25, 30, 8);
  cfg.elevation_effect = 0.4;
  const auto [train, test] = split_by_area(generate(cfg).dataset, 0.3, 8);
  ForestParams fp;
  fp.n_estimators = 80;
  fp.tree.max_features = MaxFeatures::all();
  fp.tree.seed = 8;
  const auto rows = ablation_feature_sets(train, test, Target::ndvi, fp);
  const double sar = rows[0].report.overall.r2, dem = rows[1].report.overall.r2,
               all = rows[2].report.overall.r2;
  return {dem > sar && all >= dem - 0.01,
          fmt("sar_only %.4f, sar_dem %.4f, all %.4f", sar, dem, all)};
}

// 9. Robustness ablation ------------------------------------------------------

Outcome robustness_ablation() {
  const auto ds = generate(testing::small_config(20, 25, 30, 9)).dataset;
  const auto [train, test] = split_by_area(ds, 0.3, 9);
  const ClassLabel healthy[] = {ClassLabel::healthy_coniferous, ClassLabel::healthy_broadleaved};
  ForestParams fp;
  fp.n_estimators = 60;
  fp.tree.seed = 9;
  const auto rows = ablation_robustness(filter_classes(train, healthy), filter_classes(test, healthy),
                                        train, test, Target::ndvi, fp, 5, 9);
  const double r2_h = rows[0].report.overall.r2, r2_d = rows[1].report.overall.r2;
  const double sar_h = rows[0].importance.share_of(kSarFeatures);
  const double sar_d = rows[1].importance.share_of(kSarFeatures);
  return {r2_h > r2_d && sar_d > sar_h,
          fmt("R2 healthy %.4f vs with disturbed %.4f; SAR share %.3f vs %.3f", r2_h, r2_d, sar_h,
              sar_d)};
}

// 10. Disturbance timing ------------------------------------------------------

Outcome disturbance_timing() {
  auto cfg = testing::small_config(15, 225, 236, 10);
  const auto g = generate(cfg);
  const auto [train, test] = split_by_area(g.dataset, 0.3, 10);
  ForestParams fp;
  fp.n_estimators = 60;
  fp.tree.max_features = MaxFeatures::sqrt();
  fp.tree.seed = 10;
  const auto model = train_model(fp, train, nullptr, Target::ndvi);

  std::map<std::string, std::vector<SampleRecord>> streams;
  for (const auto& r : test.records)
    if (r.class_label == ClassLabel::disturbed_coniferous) streams[r.area_id].push_back(r);
  const int window = 5;
  const std::size_t half = window / 2;
  int missed = 0;
  std::string detail;
  for (auto& [id, recs] : streams) {
    std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    const int step_doy = g.oracle.areas.at(id).disturbance_doy;
    std::size_t step = 0;
    while (step < recs.size() && day_of_year(recs[step].timestamp) < step_doy) ++step;
    const auto ts = estimate_timeseries(model, recs);
    const auto sm = moving_average(ts.samples, window);
    // Pre-step statistics of the estimates, clear of the smoothing window.
    const std::size_t pre = step - half;
    double mean = 0, var = 0;
    for (std::size_t i = 0; i < pre; ++i) mean += ts.samples[i].second;
    mean /= static_cast<double>(pre);
    for (std::size_t i = 0; i < pre; ++i) var += std::pow(ts.samples[i].second - mean, 2);
    const double threshold = mean - 3 * std::sqrt(var / static_cast<double>(pre));
    // Only fully smoothed samples count.
    std::size_t cross = sm.size();
    for (std::size_t i = half; i + half < sm.size(); ++i)
      if (sm[i].second < threshold) {
        cross = i;
        break;
      }
    const long off = static_cast<long>(cross) - static_cast<long>(step);
    if (std::labs(off) > 4) ++missed;
    detail += fmt(" %s n=%zu step=%zu offset=%ld;", id.c_str(), recs.size(), step, off);
  }
  return {missed == 0 && !streams.empty(), fmt("%d/%zu streams off;", missed, streams.size()) + detail};
}

// 11. Grid protocol shape -----------------------------------------------------

Outcome grid_protocol() {
  const auto rfr = expand_grid(load_grid("paper-rfr"));
  const auto xgb = expand_grid(load_grid("paper-xgb"));
  bool caps = !xgb.empty();
  for (const auto& c : xgb) {
    const auto spec = std::get<GbtParams>(spec_from_config(ModelKind::gbt, c, 0));
    caps = caps && spec.n_estimators_cap == 5000 && spec.early_stopping_rounds == 5;
  }
  const auto ds = generate(testing::small_config(6, 15, 20, 11)).dataset;
  const auto [train, val] = split_by_area(ds, 0.3, 11);
  json cfg = xgb.back();  // largest learning rate and depth
  const auto m = train_model(spec_from_config(ModelKind::gbt, cfg, 11), train, &val, Target::ndvi);
  const bool stopped = m.validation_mae.size() < 5000 && m.validation_mae.size() == m.best_round + 5;
  return {rfr.size() == 160 && caps && stopped,
          fmt("paper-rfr %zu configs; paper-xgb %zu configs, caps ok: %s; %s stopped at round %zu, kept %zu",
              rfr.size(), xgb.size(), caps ? "yes" : "no", cfg.dump().c_str(), m.validation_mae.size(),
              m.best_round)};
}

// 12. Kernel checks -----------------------------------------------------------

Outcome kernel_checks() {
  const Raster flat(40, 30, 0.25);
  const bool constant = lee_filter(flat).values == flat.values;

  std::mt19937_64 rng(12);
  const double enl = 4.4;
  std::gamma_distribution<double> speckle(enl, 1 / enl);
  Raster noisy(100, 100, 0);
  for (auto& v : noisy.values) v = 0.2 * speckle(rng);
  LeeParams lp;
  lp.enl = enl;
  const auto filtered = lee_filter(noisy, lp);
  const double ratio = variance(filtered.values) / variance(noisy.values);

  double lia_err = 0;
  for (double theta : {20.0, 30.0, 39.0, 45.5})
    for (double aspect = 0; aspect < 360; aspect += 15) {
      SarGeometry geom{theta, 80};
      lia_err = std::max(lia_err, std::fabs(local_incidence_angle(0, aspect, geom) - theta));
    }

  const auto ds = generate(testing::small_config(3, 8, 10, 12)).dataset;
  ForestParams fp;
  fp.n_estimators = 8;
  const auto m = fit_random_forest(feature_matrix(ds), target_vector(ds, Target::ndvi), fp);
  const auto c = testing::random_case(16, 12);
  const auto out = infer_raster(m, c);
  std::size_t mismatches = 0, predicted = 0;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double code = c.forest_type.values[i];
    const bool known = code == kConiferousCode || code == kBroadleavedCode;
    if (c.mask.values[i] != 1 || !known) {
      mismatches += out.values[i] != out.nodata;
      continue;
    }
    FeatureMatrix X;
    X.names = m.feature_names;
    X.rows = 1;
    for (const auto& name : X.names) {
      X.cardinality.push_back(feature_cardinality(name));
      if (name == "forest_type")
        X.values.push_back(code == kConiferousCode ? 0.0 : 1.0);
      else if (c.feature_rasters.count(name))
        X.values.push_back(c.feature_rasters.at(name).values[i]);
      else
        X.values.push_back(c.scalars.at(name));
    }
    mismatches += out.values[i] != predict(m, X)[0];
    ++predicted;
  }
  const bool ok = constant && ratio < 0.5 && lia_err <= 1e-12 && mismatches == 0 && predicted > 0;
  return {ok, fmt("lee constant %s, speckle variance ratio %.3f, LIA err %.3g, infer %zu/%zu pixel mismatches",
                  constant ? "unchanged" : "changed", ratio, lia_err, mismatches, out.values.size())};
}

// 13. Determinism -------------------------------------------------------------

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string("\"") + SARVI_CLI_PATH + "\" " + args + " >>\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file() && e.path().filename() != "run.json" && e.path().filename() != "log.txt")
      out[fs::relative(e.path(), root).string()] = testing::slurp(e.path());
  return out;
}

Outcome determinism() {
  testing::TempDir dir("accept");
  std::ofstream(dir / "manifest.json")
      << R"({"seed": 13, "areas": 5, "acq_min": 12, "acq_max": 16, "repeats": 2})";
  std::ofstream(dir / "grid.json")
      << R"({"model": "forest", "axes": [{"name": "n_estimators", "values": [5, 10]},
                                        {"name": "max_features", "values": ["sqrt", 4]}]})";
  auto pipeline = [&](const std::string& threads, const std::string& name) {
    const auto root = dir / name;
    fs::create_directories(root);
    const auto log = root / "log.txt";
    const std::string g = "--threads " + threads + " --manifest \"" + (dir / "manifest.json").string() + "\" ";
    auto q = [&](const std::string& rel) { return "\"" + (root / rel).string() + "\""; };
    const std::string steps[] = {
        "synth --out " + q("synth"),
        "split --out " + q("split") + " --data " + q("synth/dataset.csv"),
        "train --out " + q("forest") + " --train " + q("split/train.csv") +
            " --params '{\"n_estimators\": 20, \"max_features\": \"sqrt\"}'",
        "train --out " + q("gbt") + " --model gbt --train " + q("split/train.csv") +
            " --params '{\"learning_rate\": 0.2, \"max_depth\": 3}'",
        "tune --out " + q("tune") + " --train " + q("split/train.csv") + " --val " + q("split/test.csv") +
            " --grid \"" + (dir / "grid.json").string() + "\"",
        "eval --out " + q("eval") + " --model " + q("forest/model.json") + " --test " + q("split/test.csv"),
        "importance --out " + q("importance") + " --model " + q("forest/model.json") + " --data " +
            q("split/test.csv"),
        "infer --out " + q("infer") + " --model " + q("gbt/model.json") + " --data " + q("split/test.csv"),
        "ablate --out " + q("ablate") + " --kind features --train " + q("split/train.csv") + " --test " +
            q("split/test.csv") + " --params '{\"n_estimators\": 10}'",
    };
    for (const auto& s : steps)
      if (run_cli(g + s, log) != 0) throw Error("cli step failed: " + s + "\n" + testing::slurp(log));
    return tree_contents(root);
  };
  const auto a = pipeline("1", "a");
  const auto b = pipeline("8", "b");
  const auto c = pipeline("1", "c");
  std::size_t differing = 0;
  for (const auto& [k, v] : a) {
    if (!b.count(k) || b.at(k) != v) ++differing;
    if (!c.count(k) || c.at(k) != v) ++differing;
  }
  const bool same_files = a.size() == b.size() && a.size() == c.size();
  return {differing == 0 && same_files && a.size() >= 10,
          fmt("%zu output files compared across threads 1/8/1, %zu differ", a.size(), differing)};
}

}  // namespace
}  // namespace sarvi

int main() {
  using namespace sarvi;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"metric oracle equivalence", metric_oracle},
      {"r2 semantics", r2_semantics},
      {"split hygiene", split_hygiene},
      {"learner recovery", learner_recovery},
      {"early stopping", early_stopping},
      {"permutation importance", permutation_importance_check},
      {"ensemble selection", ensemble_selection},
      {"feature-set ablation direction", ablation_direction},
      {"robustness ablation", robustness_ablation},
      {"disturbance timing", disturbance_timing},
      {"grid protocol shape", grid_protocol},
      {"kernel checks", kernel_checks},
      {"determinism", determinism},
  };
  int failed = 0;
  int index = 1;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", index++, name, seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
