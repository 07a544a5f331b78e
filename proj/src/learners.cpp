// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include "sarvi/learners.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>

#include "sarvi/error.hpp"
#include "tree_builder.hpp"

namespace sarvi {

using nlohmann::json;

Deadline Deadline::after(std::chrono::duration<double> d) {
  return Deadline(std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(d));
}

bool Deadline::expired() const { return at_ && std::chrono::steady_clock::now() >= *at_; }

void Deadline::check() const {
  if (expired()) throw TimeoutError("training deadline exceeded");
}

int MaxFeatures::resolve(std::size_t n_features) const {
  const auto n = static_cast<int>(n_features);
  switch (mode) {
    case Mode::all: return n;
    case Mode::sqrt: return std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n))));
    case Mode::log2: return std::max(1, static_cast<int>(std::log2(static_cast<double>(n))));
    case Mode::count:
      if (count < 1 || count > n)
        throw ValueError("max_features=" + std::to_string(count) + " outside [1, " +
                         std::to_string(n) + "]");
      return count;
  }
  return n;
}

std::string MaxFeatures::to_string() const {
  switch (mode) {
    case Mode::all: return "all";
    case Mode::sqrt: return "sqrt";
    case Mode::log2: return "log2";
    case Mode::count: return std::to_string(count);
  }
  return "all";
}

MaxFeatures MaxFeatures::parse(std::string_view s) {
  if (s == "all" || s == "None") return all();
  if (s == "sqrt") return sqrt();
  if (s == "log2") return log2();
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw ValueError("bad max_features '" + std::string(s) + "'");
    v = v * 10 + (c - '0');
  }
  if (s.empty() || v < 1) throw ValueError("bad max_features '" + std::string(s) + "'");
  return fixed(v);
}

std::size_t Tree::leaf_index(std::span<const double> x) const {
  std::size_t i = 0;
  while (feature[i] >= 0) {
    const double v = x[static_cast<std::size_t>(feature[i])];
    bool left;
    if (categorical[i]) {
      const auto c = static_cast<long>(v);
      left = c >= 0 && c < 32 && ((left_categories[i] >> c) & 1u);
    } else {
      left = v <= threshold[i];
    }
    i = static_cast<std::size_t>(left ? this->left[i] : right[i]);
  }
  return i;
}

int Tree::depth() const {
  if (feature.empty()) return 0;
  std::vector<int> d(size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    best = std::max(best, d[i]);
    if (feature[i] >= 0) {
      d[static_cast<std::size_t>(left[i])] = d[i] + 1;
      d[static_cast<std::size_t>(right[i])] = d[i] + 1;
    }
  }
  return best;
}

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::tree: return "tree";
    case ModelKind::forest: return "forest";
    case ModelKind::gbt: return "gbt";
    case ModelKind::weighted_ensemble: return "weighted_ensemble";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view s) {
  for (auto k : {ModelKind::tree, ModelKind::forest, ModelKind::gbt, ModelKind::weighted_ensemble})
    if (to_string(k) == s) return k;
  if (s == "xgb") return ModelKind::gbt;
  if (s == "rfr") return ModelKind::forest;
  throw ValueError("unknown model kind '" + std::string(s) + "'");
}

double Model::predict_row(std::span<const double> x) const {
  switch (kind) {
    case ModelKind::tree: return trees.at(0).predict(x);
    case ModelKind::forest: {
      double s = 0;
      for (const auto& t : trees) s += t.predict(x);
      return s / static_cast<double>(trees.size());
    }
    case ModelKind::gbt: {
      double s = 0;
      for (const auto& t : trees) s += t.predict(x);
      return base_prediction + learning_rate * s;
    }
    case ModelKind::weighted_ensemble: {
      double s = 0;
      for (std::size_t i = 0; i < members.size(); ++i) s += weights[i] * members[i].predict_row(x);
      return s;
    }
  }
  return 0;
}

EarlyStopping::EarlyStopping(int patience)
    : patience_(patience), best_(std::numeric_limits<double>::infinity()) {
  if (patience < 1) throw ValueError("early_stopping_rounds must be >= 1");
}

bool EarlyStopping::update(double metric) {
  ++rounds_;
  if (metric < best_) {
    best_ = metric;
    best_round_ = rounds_;
    since_best_ = 0;
  } else {
    ++since_best_;
  }
  return since_best_ >= patience_;
}

namespace {

void check_xy(const FeatureMatrix& X, std::span<const double> y) {
  if (X.rows == 0 || y.empty()) throw ValueError("cannot fit on empty input");
  if (X.rows != y.size())
    throw ValueError("feature matrix has " + std::to_string(X.rows) + " rows but target has " +
                     std::to_string(y.size()));
  if (X.cols() == 0) throw ValueError("feature matrix has no columns");
  for (double v : y)
    if (!std::isfinite(v)) throw ValueError("target contains non-finite values");
}

std::vector<int> all_columns(const FeatureMatrix& X) {
  std::vector<int> c(X.cols());
  std::iota(c.begin(), c.end(), 0);
  return c;
}

detail::BuildConfig tree_config(const FeatureMatrix& X, const TreeParams& p) {
  if (p.max_depth && *p.max_depth < 0) throw ValueError("max_depth must be >= 0");
  detail::BuildConfig cfg;
  cfg.criterion = p.criterion;
  cfg.max_depth = p.max_depth;
  cfg.min_samples_leaf = p.min_samples_leaf;
  cfg.candidates = all_columns(X);
  cfg.features_per_split = p.max_features.resolve(X.cols());
  return cfg;
}

Model blank_model(ModelKind kind, const FeatureMatrix& X) {
  Model m;
  m.kind = kind;
  m.feature_names = X.names;
  return m;
}

}  // namespace

json to_json(const TreeParams& p) {
  json j;
  j["max_features"] = p.max_features.to_string();
  j["criterion"] = p.criterion == Criterion::mae ? "mae" : "mse";
  j["max_depth"] = p.max_depth ? json(*p.max_depth) : json(nullptr);
  j["min_samples_leaf"] = p.min_samples_leaf;
  j["seed"] = p.seed;
  return j;
}

json to_json(const ForestParams& p) {
  json j = to_json(p.tree);
  j["n_estimators"] = p.n_estimators;
  j["bootstrap"] = p.bootstrap;
  return j;
}

json to_json(const GbtParams& p) {
  json j;
  j["learning_rate"] = p.learning_rate;
  j["max_depth"] = p.max_depth;
  j["n_estimators_cap"] = p.n_estimators_cap;
  j["early_stopping_rounds"] = p.early_stopping_rounds;
  j["loss"] = "absolute_error";
  j["seed"] = p.seed;
  j["min_samples_leaf"] = p.min_samples_leaf;
  j["subsample"] = p.subsample;
  j["colsample_bytree"] = p.colsample_bytree;
  return j;
}

Model fit_tree(const FeatureMatrix& X, std::span<const double> y, const TreeParams& p) {
  check_xy(X, y);
  auto cfg = tree_config(X, p);
  const auto sorted = detail::presort(X);
  std::vector<std::uint32_t> counts(X.rows, 1);
  std::mt19937_64 rng(p.seed);
  Model m = blank_model(ModelKind::tree, X);
  m.params = to_json(p);
  m.trees.push_back(detail::build_tree(X, y, sorted, counts, cfg, rng));
  return m;
}

Model fit_random_forest(const FeatureMatrix& X, std::span<const double> y, const ForestParams& p,
                        const Deadline& deadline) {
  check_xy(X, y);
  if (p.n_estimators < 1) throw ValueError("n_estimators must be >= 1");
  const auto cfg = tree_config(X, p.tree);
  const auto sorted = detail::presort(X);

  Model m = blank_model(ModelKind::forest, X);
  m.params = to_json(p);
  m.trees.resize(static_cast<std::size_t>(p.n_estimators));

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::atomic<bool> stop{false};
  const std::size_t n = X.rows;
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < p.n_estimators; ++t) {
    if (stop.load(std::memory_order_relaxed)) continue;
    try {
      deadline.check();
      std::mt19937_64 rng(p.tree.seed + static_cast<std::uint64_t>(t));
      std::vector<std::uint32_t> counts(n, p.bootstrap ? 0u : 1u);
      if (p.bootstrap) {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t i = 0; i < n; ++i) ++counts[pick(rng)];
      }
      m.trees[static_cast<std::size_t>(t)] = detail::build_tree(X, y, sorted, counts, cfg, rng);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      stop = true;
    }
  }
  if (failure) std::rethrow_exception(failure);
  return m;
}

Model fit_gbt(const FeatureMatrix& X_train, std::span<const double> y_train,
              const FeatureMatrix& X_val, std::span<const double> y_val, const GbtParams& p,
              const Deadline& deadline) {
  check_xy(X_train, y_train);
  if (X_val.rows == 0 || y_val.empty())
    throw ValueError("boosting needs a non-empty validation set for early stopping");
  if (X_val.rows != y_val.size()) throw ValueError("validation rows and targets differ in length");
  if (X_val.names != X_train.names) throw ValueError("validation columns differ from training");
  if (!(p.learning_rate > 0)) throw ValueError("learning_rate must be positive");
  if (p.max_depth < 1) throw ValueError("max_depth must be >= 1");
  if (p.n_estimators_cap < 1) throw ValueError("n_estimators_cap must be >= 1");
  if (!(p.subsample > 0 && p.subsample <= 1)) throw ValueError("subsample must lie in (0, 1]");
  if (!(p.colsample_bytree > 0 && p.colsample_bytree <= 1))
    throw ValueError("colsample_bytree must lie in (0, 1]");

  const std::size_t n = X_train.rows, nv = X_val.rows, F = X_train.cols();
  const auto sorted = detail::presort(X_train);
  std::mt19937_64 rng(p.seed);

  Model m = blank_model(ModelKind::gbt, X_train);
  m.params = to_json(p);
  m.learning_rate = p.learning_rate;
  m.base_prediction = detail::median_of({y_train.begin(), y_train.end()});

  // Tree sums kept separately so that predictions match predict_row exactly.
  std::vector<double> sum_train(n, 0.0), sum_val(nv, 0.0);
  std::vector<double> residual(n), gradient(n), val_pred(nv);
  std::vector<std::uint32_t> counts(n, 1);
  std::vector<std::size_t> leaf_of(n);

  detail::BuildConfig cfg;
  cfg.criterion = Criterion::mse;
  cfg.max_depth = p.max_depth;
  cfg.min_samples_leaf = p.min_samples_leaf;
  cfg.parallel = true;

  EarlyStopping stopper(p.early_stopping_rounds);
  const auto sn = static_cast<std::ptrdiff_t>(n);
  const auto svn = static_cast<std::ptrdiff_t>(nv);
  for (int round = 0; round < p.n_estimators_cap; ++round) {
    deadline.check();
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] = y_train[i] - (m.base_prediction + p.learning_rate * sum_train[i]);
      gradient[i] = residual[i] > 0 ? 1.0 : (residual[i] < 0 ? -1.0 : 0.0);
    }
    if (p.subsample < 1) {
      std::vector<std::uint32_t> idx(n);
      std::iota(idx.begin(), idx.end(), 0u);
      std::shuffle(idx.begin(), idx.end(), rng);
      const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(p.subsample * n));
      std::fill(counts.begin(), counts.end(), 0u);
      for (std::size_t i = 0; i < keep; ++i) counts[idx[i]] = 1;
    }
    cfg.candidates = all_columns(X_train);
    if (p.colsample_bytree < 1) {
      std::shuffle(cfg.candidates.begin(), cfg.candidates.end(), rng);
      const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(p.colsample_bytree * F));
      cfg.candidates.resize(keep);
      std::sort(cfg.candidates.begin(), cfg.candidates.end());
    }
    cfg.features_per_split = static_cast<int>(cfg.candidates.size());

    Tree tree = detail::build_tree(X_train, gradient, sorted, counts, cfg, rng);

    // Absolute-error leaves: median residual of the rows in each leaf.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < sn; ++i) leaf_of[i] = tree.leaf_index(X_train.row(i));
    std::vector<std::vector<double>> in_leaf(tree.size());
    for (std::size_t i = 0; i < n; ++i)
      if (counts[i]) in_leaf[leaf_of[i]].push_back(residual[i]);
    for (std::size_t k = 0; k < tree.size(); ++k)
      tree.value[k] = (tree.feature[k] < 0 && !in_leaf[k].empty())
                          ? detail::median_of(std::move(in_leaf[k]))
                          : 0.0;

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < sn; ++i) sum_train[i] += tree.value[leaf_of[i]];
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < svn; ++i) {
      sum_val[i] += tree.predict(X_val.row(i));
      val_pred[i] = m.base_prediction + p.learning_rate * sum_val[i];
    }
    double err = 0;
    for (std::size_t i = 0; i < nv; ++i) err += std::abs(y_val[i] - val_pred[i]);
    err /= static_cast<double>(nv);

    m.trees.push_back(std::move(tree));
    m.validation_mae.push_back(err);
    if (stopper.update(err)) break;
  }
  m.best_round = static_cast<std::size_t>(stopper.best_round());
  m.trees.resize(m.best_round);
  return m;
}

namespace {

std::vector<std::size_t> column_map(const Model& m, const FeatureMatrix& X) {
  std::vector<std::size_t> map;
  std::string missing, extra;
  for (const auto& name : m.feature_names) {
    auto it = std::find(X.names.begin(), X.names.end(), name);
    if (it == X.names.end())
      missing += (missing.empty() ? "" : ", ") + name;
    else
      map.push_back(static_cast<std::size_t>(it - X.names.begin()));
  }
  for (const auto& name : X.names)
    if (std::find(m.feature_names.begin(), m.feature_names.end(), name) == m.feature_names.end())
      extra += (extra.empty() ? "" : ", ") + name;
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "feature columns do not match the model";
    if (!missing.empty()) msg += "; missing: " + missing;
    if (!extra.empty()) msg += "; extra: " + extra;
    throw SchemaError(msg);
  }
  return map;
}

bool identity(const std::vector<std::size_t>& map) {
  for (std::size_t i = 0; i < map.size(); ++i)
    if (map[i] != i) return false;
  return true;
}

}  // namespace

std::vector<double> predict(const Model& m, const FeatureMatrix& X) {
  const auto map = column_map(m, X);
  const bool direct = identity(map);
  std::vector<double> out(X.rows);
  const auto rows = static_cast<std::ptrdiff_t>(X.rows);
#pragma omp parallel
  {
    std::vector<double> buf(map.size());
#pragma omp for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
      if (direct) {
        out[r] = m.predict_row(X.row(r));
      } else {
        for (std::size_t j = 0; j < map.size(); ++j) buf[j] = X(r, map[j]);
        out[r] = m.predict_row(buf);
      }
    }
  }
  return out;
}

namespace serial {

std::vector<double> predict(const Model& m, const FeatureMatrix& X) {
  const auto map = column_map(m, X);
  std::vector<double> out(X.rows), buf(map.size());
  for (std::size_t r = 0; r < X.rows; ++r) {
    for (std::size_t j = 0; j < map.size(); ++j) buf[j] = X(r, map[j]);
    out[r] = m.predict_row(buf);
  }
  return out;
}

}  // namespace serial

// ---------------------------------------------------------------------------
// Persistence

namespace {

json tree_to_json(const Tree& t) {
  json j;
  j["feature"] = t.feature;
  j["threshold"] = t.threshold;
  j["categorical"] = t.categorical;
  j["left_categories"] = t.left_categories;
  j["left"] = t.left;
  j["right"] = t.right;
  j["value"] = t.value;
  return j;
}

Tree tree_from_json(const json& j, std::size_t n_features) {
  Tree t;
  j.at("feature").get_to(t.feature);
  j.at("threshold").get_to(t.threshold);
  j.at("categorical").get_to(t.categorical);
  j.at("left_categories").get_to(t.left_categories);
  j.at("left").get_to(t.left);
  j.at("right").get_to(t.right);
  j.at("value").get_to(t.value);
  const std::size_t n = t.feature.size();
  if (n == 0 || t.threshold.size() != n || t.categorical.size() != n ||
      t.left_categories.size() != n || t.left.size() != n || t.right.size() != n ||
      t.value.size() != n)
    throw SchemaError("tree node arrays have inconsistent lengths");
  for (std::size_t i = 0; i < n; ++i) {
    if (t.feature[i] < 0) continue;
    if (static_cast<std::size_t>(t.feature[i]) >= n_features)
      throw SchemaError("tree split references feature index out of range");
    // Children always follow their parent in preorder.
    for (int c : {t.left[i], t.right[i]})
      if (c <= static_cast<int>(i) || static_cast<std::size_t>(c) >= n)
        throw SchemaError("tree child index out of range");
  }
  return t;
}

}  // namespace

json model_to_json(const Model& m) {
  json j;
  j["format"] = "sarvi.model";
  j["version"] = kModelFormatVersion;
  j["kind"] = std::string(to_string(m.kind));
  j["feature_names"] = m.feature_names;
  j["target_name"] = m.target_name;
  j["params"] = m.params;
  if (m.kind != ModelKind::weighted_ensemble) {
    j["trees"] = json::array();
    for (const auto& t : m.trees) j["trees"].push_back(tree_to_json(t));
  }
  if (m.kind == ModelKind::gbt) {
    j["base_prediction"] = m.base_prediction;
    j["learning_rate"] = m.learning_rate;
    j["best_round"] = m.best_round;
    j["validation_mae"] = m.validation_mae;
  }
  if (m.kind == ModelKind::weighted_ensemble) {
    j["members"] = json::array();
    for (const auto& mem : m.members) j["members"].push_back(model_to_json(mem));
    j["weights"] = m.weights;
  }
  return j;
}

Model model_from_json(const json& j) {
  try {
    if (!j.contains("version")) throw SchemaError("model document has no version field");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw SchemaError("unsupported model format version " + std::to_string(version));
    Model m;
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    j.at("feature_names").get_to(m.feature_names);
    j.at("target_name").get_to(m.target_name);
    m.params = j.value("params", json::object());
    if (m.kind != ModelKind::weighted_ensemble) {
      for (const auto& t : j.at("trees")) m.trees.push_back(tree_from_json(t, m.feature_names.size()));
      if (m.kind != ModelKind::gbt && m.trees.empty()) throw SchemaError("model has no trees");
    }
    if (m.kind == ModelKind::gbt) {
      m.base_prediction = j.at("base_prediction").get<double>();
      m.learning_rate = j.at("learning_rate").get<double>();
      m.best_round = j.at("best_round").get<std::size_t>();
      j.at("validation_mae").get_to(m.validation_mae);
    }
    if (m.kind == ModelKind::weighted_ensemble) {
      for (const auto& mem : j.at("members")) m.members.push_back(model_from_json(mem));
      j.at("weights").get_to(m.weights);
      if (m.weights.size() != m.members.size() || m.members.empty())
        throw SchemaError("ensemble weights and members differ in length");
      double s = 0;
      for (double w : m.weights) {
        if (w < 0) throw SchemaError("negative ensemble weight");
        s += w;
      }
      if (std::abs(s - 1.0) > 1e-9) throw SchemaError("ensemble weights do not sum to 1");
      for (const auto& mem : m.members)
        if (mem.feature_names != m.feature_names)
          throw SchemaError("ensemble member features differ from the ensemble");
    }
    return m;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed model document: ") + e.what());
  }
}

void save_model(const Model& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << model_to_json(m).dump() << '\n';
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what(), 0);
  }
  return model_from_json(j);
}

}  // namespace sarvi
