// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include "sarvi/tuning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>

#include "rng.hpp"
#include "sarvi/error.hpp"

namespace sarvi {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string config_cell(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

double mae_of(std::span<const double> y, std::span<const double> p) {
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - p[i]);
  return s / static_cast<double>(y.size());
}

}  // namespace

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::success: return "success";
    case RunStatus::failure: return "failure";
    case RunStatus::timeout: return "timeout";
  }
  return "?";
}

GridSpec paper_rfr_grid() {
  GridSpec g;
  g.model_kind = ModelKind::forest;
  GridAxis trees{"n_estimators", {}};
  for (int n = 50; n <= 500; n += 50) trees.values.emplace_back(n);
  GridAxis feats{"max_features", {"sqrt", "log2"}};
  for (int k = 1; k <= 14; ++k) feats.values.emplace_back(k);
  g.axes = {trees, feats, {"criterion", {"mae"}}};
  return g;
}

GridSpec paper_xgb_grid() {
  GridSpec g;
  g.model_kind = ModelKind::gbt;
  GridAxis lr{"learning_rate", {0.01, 0.02, 0.05, 0.1, 0.2, 0.3}};
  GridAxis depth{"max_depth", {}};
  for (int d = 2; d <= 12; ++d) depth.values.emplace_back(d);
  g.axes = {lr, depth, {"n_estimators_cap", {5000}}, {"early_stopping_rounds", {5}}};
  return g;
}

GridSpec grid_from_json(const json& j) {
  GridSpec g;
  try {
    g.model_kind = parse_model_kind(j.at("model").get<std::string>());
    if (g.model_kind != ModelKind::forest && g.model_kind != ModelKind::gbt)
      throw ValueError("grids support the forest and gbt model kinds");
    const auto& axes = j.at("axes");
    if (!axes.is_object() && !axes.is_array()) throw ValueError("grid axes must be an object or array");
    if (axes.is_object()) {
      // Object keys are visited in sorted order, which fixes the axis order.
      for (const auto& [name, values] : axes.items()) g.axes.push_back({name, values.get<std::vector<json>>()});
    } else {
      for (const auto& a : axes)
        g.axes.push_back({a.at("name").get<std::string>(), a.at("values").get<std::vector<json>>()});
    }
  } catch (const json::exception& e) {
    throw ValueError(std::string("malformed grid: ") + e.what());
  }
  if (g.axes.empty()) throw ValueError("grid has no axes");
  for (const auto& a : g.axes) {
    if (a.values.empty()) throw ValueError("grid axis '" + a.name + "' is empty");
    for (const auto& v : a.values) spec_from_config(g.model_kind, json{{a.name, v}}, 0);
  }
  return g;
}

json grid_to_json(const GridSpec& g) {
  json axes = json::array();
  for (const auto& a : g.axes) axes.push_back({{"name", a.name}, {"values", a.values}});
  return {{"model", std::string(to_string(g.model_kind))}, {"axes", axes}};
}

GridSpec load_grid(const std::string& name_or_path) {
  if (name_or_path == "paper-rfr") return paper_rfr_grid();
  if (name_or_path == "paper-xgb") return paper_xgb_grid();
  std::ifstream in(name_or_path);
  if (!in) throw Error("cannot open grid file " + name_or_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("grid file is not valid JSON: ") + e.what(), 0);
  }
  return grid_from_json(j);
}

std::vector<json> expand_grid(const GridSpec& spec) {
  if (spec.axes.empty()) throw ValueError("grid has no axes");
  std::size_t total = 1;
  for (const auto& a : spec.axes) {
    if (a.values.empty()) throw ValueError("grid axis '" + a.name + "' is empty");
    total *= a.values.size();
  }
  std::vector<json> out;
  out.reserve(total);
  std::vector<std::size_t> idx(spec.axes.size(), 0);
  for (std::size_t k = 0; k < total; ++k) {
    json c = json::object();
    for (std::size_t a = 0; a < spec.axes.size(); ++a) c[spec.axes[a].name] = spec.axes[a].values[idx[a]];
    out.push_back(std::move(c));
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      if (++idx[a] < spec.axes[a].values.size()) break;
      idx[a] = 0;
    }
  }
  return out;
}

const TuningRow& TuningReport::best() const {
  if (rows.empty() || rows.front().status != RunStatus::success)
    throw ValueError("no successful configuration in the tuning report");
  return rows.front();
}

TuningReport grid_search(const GridSpec& grid, const Dataset& train, const Dataset& val,
                         Target target, std::uint64_t seed) {
  if (!train.has_target(target) || !val.has_target(target))
    throw SchemaError("target " + std::string(to_string(target)) +
                      " is missing from the training or validation set");
  const auto configs = expand_grid(grid);
  const auto X_val = feature_matrix(val);
  const auto y_val = target_vector(val, target);

  TuningReport report;
  report.model_kind = grid.model_kind;
  report.target = std::string(to_string(target));
  const auto t_start = Clock::now();
  for (std::size_t i = 0; i < configs.size(); ++i) {
    TuningRow row;
    row.config_index = i;
    row.config = configs[i];
    const auto t0 = Clock::now();
    try {
      const auto spec = spec_from_config(grid.model_kind, configs[i], seed);
      const auto model = train_model(spec, train, &val, target);
      row.val_mae = mae_of(y_val, predict(model, X_val));
    } catch (const std::exception& e) {
      row.status = RunStatus::failure;
      row.message = e.what();
    }
    row.seconds = seconds_since(t0);
    report.rows.push_back(std::move(row));
  }
  report.total_seconds = seconds_since(t_start);
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const TuningRow& a, const TuningRow& b) {
    const bool sa = a.status == RunStatus::success, sb = b.status == RunStatus::success;
    if (sa != sb) return sa;
    return sa && *a.val_mae < *b.val_mae;
  });
  return report;
}

void write_tuning_csv(const TuningReport& r, std::ostream& out) {
  std::vector<std::string> keys;
  for (const auto& row : r.rows)
    for (const auto& [k, _] : row.config.items())
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  out << "rank,config_index";
  for (const auto& k : keys) out << ',' << csv_field(k);
  out << ",status,val_mae,message\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    out << i + 1 << ',' << row.config_index;
    for (const auto& k : keys)
      out << ',' << (row.config.contains(k) ? csv_field(config_cell(row.config.at(k))) : "");
    out << ',' << to_string(row.status) << ',' << (row.val_mae ? num(*row.val_mae) : "") << ','
        << csv_field(row.message) << '\n';
  }
}

json tuning_summary_json(const TuningReport& r) {
  json j;
  j["model"] = std::string(to_string(r.model_kind));
  j["target"] = r.target;
  j["n_configs"] = r.rows.size();
  std::size_t ok = 0;
  for (const auto& row : r.rows) ok += row.status == RunStatus::success;
  j["n_success"] = ok;
  if (ok) {
    j["best_config"] = r.best().config;
    j["best_config_index"] = r.best().config_index;
    j["best_val_mae"] = *r.best().val_mae;
  } else {
    j["best_config"] = nullptr;
  }
  return j;
}

std::pair<ModelKind, json> SearchSpace::sample(std::mt19937_64& rng, std::size_t n_features) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  json c = json::object();
  const int leaf = std::uniform_int_distribution<int>(1, std::max(1, min_samples_leaf_max))(rng);
  if (unit(rng) < forest_probability) {
    c["n_estimators"] = std::uniform_int_distribution<int>(forest_trees_min, forest_trees_max)(rng);
    const int options = 2 + static_cast<int>(n_features);
    const int pick = std::uniform_int_distribution<int>(0, options - 1)(rng);
    if (pick == 0)
      c["max_features"] = "sqrt";
    else if (pick == 1)
      c["max_features"] = "log2";
    else
      c["max_features"] = pick - 1;
    c["min_samples_leaf"] = leaf;
    return {ModelKind::forest, c};
  }
  const double lo = std::log(gbt_lr_min), hi = std::log(gbt_lr_max);
  c["learning_rate"] = std::exp(lo + (hi - lo) * unit(rng));
  c["max_depth"] = std::uniform_int_distribution<int>(gbt_depth_min, gbt_depth_max)(rng);
  c["min_samples_leaf"] = leaf;
  return {ModelKind::gbt, c};
}

SearchResult budget_search(const SearchSpace& space, const Dataset& train, const Dataset& val,
                           Target target, double budget_seconds, std::uint64_t seed,
                           std::optional<double> per_config_cap) {
  if (!(budget_seconds > 0)) throw ValueError("budget must be positive");
  if (per_config_cap && !(*per_config_cap > 0)) throw ValueError("per-config cap must be positive");
  const auto X_val = feature_matrix(val);
  const auto y_val = target_vector(val, target);

  SearchResult result;
  result.trace.budget_seconds = budget_seconds;
  result.trace.per_config_cap_seconds = per_config_cap.value_or(budget_seconds / 10.0);
  const double cap = result.trace.per_config_cap_seconds;

  std::mt19937_64 rng(seed);
  const auto t_start = Clock::now();
  for (std::uint64_t i = 0; seconds_since(t_start) < budget_seconds; ++i) {
    auto [kind, config] = space.sample(rng, train.features.size());
    SearchEntry entry;
    entry.kind = kind;
    entry.config = config;
    std::optional<Model> model;
    const double remaining = budget_seconds - seconds_since(t_start);
    const auto t0 = Clock::now();
    try {
      const auto deadline = Deadline::after(std::chrono::duration<double>(std::min(cap, remaining)));
      const auto spec = spec_from_config(kind, config, detail::derive_seed(seed, {i}));
      model = train_model(spec, train, &val, target, deadline);
      entry.val_mae = mae_of(y_val, predict(*model, X_val));
    } catch (const TimeoutError& e) {
      entry.status = RunStatus::timeout;
      entry.message = e.what();
    } catch (const std::exception& e) {
      entry.status = RunStatus::failure;
      entry.message = e.what();
    }
    entry.seconds = seconds_since(t0);
    if (entry.status == RunStatus::success && entry.seconds > cap) {
      entry.status = RunStatus::timeout;
      entry.val_mae.reset();
      entry.message = "exceeded the per-config cap";
    }
    if (entry.status != RunStatus::success) model.reset();
    result.trace.entries.push_back(std::move(entry));
    result.models.push_back(std::move(model));
  }
  return result;
}

void write_trace_csv(const SearchTrace& t, std::ostream& out) {
  out << "entry,model,config,status,val_mae,seconds,message\n";
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    const auto& e = t.entries[i];
    out << i << ',' << to_string(e.kind) << ',' << csv_field(e.config.dump()) << ','
        << to_string(e.status) << ',' << (e.val_mae ? num(*e.val_mae) : "") << ',' << num(e.seconds)
        << ',' << csv_field(e.message) << '\n';
  }
}

json trace_summary_json(const SearchTrace& t) {
  json j;
  j["budget_seconds"] = t.budget_seconds;
  j["per_config_cap_seconds"] = t.per_config_cap_seconds;
  j["n_entries"] = t.entries.size();
  std::size_t ok = 0, failed = 0, timed_out = 0;
  double total = 0;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    const auto& e = t.entries[i];
    total += e.seconds;
    if (e.status == RunStatus::success) {
      ++ok;
      if (!best || *e.val_mae < *t.entries[*best].val_mae) best = i;
    } else if (e.status == RunStatus::failure) {
      ++failed;
    } else {
      ++timed_out;
    }
  }
  j["n_success"] = ok;
  j["n_failure"] = failed;
  j["n_timeout"] = timed_out;
  j["success_share"] = t.entries.empty() ? 0.0 : static_cast<double>(ok) / t.entries.size();
  j["total_seconds"] = total;
  if (best) {
    j["best_entry"] = *best;
    j["best_model"] = std::string(to_string(t.entries[*best].kind));
    j["best_config"] = t.entries[*best].config;
    j["best_val_mae"] = *t.entries[*best].val_mae;
  }
  return j;
}

EnsembleSelection greedy_ensemble(const std::vector<std::vector<double>>& preds,
                                  std::span<const double> y, std::size_t max_members) {
  if (preds.empty()) throw ValueError("ensemble selection needs at least one candidate");
  if (max_members < 1) throw ValueError("max_members must be >= 1");
  const std::size_t n = y.size();
  if (n == 0) throw ValueError("ensemble selection needs a non-empty validation set");
  for (const auto& p : preds)
    if (p.size() != n) throw ValueError("candidate prediction length differs from the targets");

  EnsembleSelection sel;
  sel.counts.assign(preds.size(), 0);
  std::size_t first = 0;
  double first_mae = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < preds.size(); ++c) {
    const double m = mae_of(y, preds[c]);
    if (m < first_mae) {
      first_mae = m;
      first = c;
    }
  }
  std::vector<double> sum = preds[first];
  sel.counts[first] = 1;
  sel.mae = first_mae;
  sel.history.push_back(first_mae);
  for (std::size_t k = 1; k < max_members; ++k) {
    const double denom = static_cast<double>(k + 1);
    std::size_t pick = 0;
    double pick_mae = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < preds.size(); ++c) {
      double s = 0;
      for (std::size_t i = 0; i < n; ++i) s += std::abs(y[i] - (sum[i] + preds[c][i]) / denom);
      s /= static_cast<double>(n);
      if (s < pick_mae) {
        pick_mae = s;
        pick = c;
      }
    }
    if (!(pick_mae < sel.mae)) break;
    for (std::size_t i = 0; i < n; ++i) sum[i] += preds[pick][i];
    ++sel.counts[pick];
    sel.mae = pick_mae;
    sel.history.push_back(pick_mae);
  }
  const double total = static_cast<double>(std::accumulate(sel.counts.begin(), sel.counts.end(), std::size_t{0}));
  for (auto c : sel.counts) sel.weights.push_back(static_cast<double>(c) / total);
  return sel;
}

Model ensemble_select(const SearchResult& result, const Dataset& val, Target target,
                      std::size_t max_members) {
  const auto X_val = feature_matrix(val);
  const auto y_val = target_vector(val, target);
  std::vector<const Model*> candidates;
  std::vector<std::vector<double>> preds;
  for (std::size_t i = 0; i < result.models.size(); ++i) {
    if (!result.models[i]) continue;
    candidates.push_back(&*result.models[i]);
    preds.push_back(predict(*result.models[i], X_val));
  }
  if (candidates.empty()) throw ValueError("no successful model to build an ensemble from");
  const auto sel = greedy_ensemble(preds, y_val, max_members);

  Model ens;
  ens.kind = ModelKind::weighted_ensemble;
  ens.feature_names = candidates.front()->feature_names;
  ens.target_name = std::string(to_string(target));
  ens.params = {{"max_members", max_members}, {"selection_mae", sel.mae}};
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (!sel.counts[c]) continue;
    ens.members.push_back(*candidates[c]);
    ens.weights.push_back(sel.weights[c]);
  }
  return ens;
}

RepeatSummary repeat_and_average(
    std::span<const std::uint64_t> seeds,
    const std::function<std::map<std::string, double>(std::uint64_t)>& experiment) {
  if (seeds.empty()) throw ValueError("repeat_and_average needs at least one run");
  RepeatSummary s;
  for (auto seed : seeds) s.runs.push_back(experiment(seed));
  const double n = static_cast<double>(s.runs.size());
  for (const auto& [key, _] : s.runs.front()) {
    double sum = 0;
    for (const auto& run : s.runs) {
      auto it = run.find(key);
      if (it == run.end()) throw ValueError("metric '" + key + "' missing from a run");
      sum += it->second;
    }
    const double mean = sum / n;
    double ss = 0;
    for (const auto& run : s.runs) ss += (run.at(key) - mean) * (run.at(key) - mean);
    s.mean[key] = mean;
    s.variance[key] = s.runs.size() > 1 ? ss / (n - 1) : 0.0;
  }
  return s;
}

}  // namespace sarvi
