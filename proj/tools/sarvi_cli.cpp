// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sarvi/datamodel.hpp"
#include "sarvi/error.hpp"
#include "sarvi/eval.hpp"
#include "sarvi/features.hpp"
#include "sarvi/inference.hpp"
#include "sarvi/learners.hpp"
#include "sarvi/pipeline.hpp"
#include "sarvi/synth.hpp"
#include "sarvi/terrain.hpp"
#include "sarvi/tuning.hpp"

#ifndef SARVI_VERSION
#define SARVI_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sarvi;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void log(const std::string& msg) { std::cerr << "sarvi: " << msg << '\n'; }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Output directory plus the list of files written, echoed into run.json.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  fs::path path(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }
  std::ofstream open(const std::string& name) {
    std::ofstream out(path(name), std::ios::binary);
    if (!out) throw Error("cannot write " + (dir_ / name).string());
    return out;
  }
  void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }
  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

// --------------------------------------------------------------------------
// Small CSV helpers for the event and weather inputs.

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::size_t column(const std::string& name, const std::string& file) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw SchemaError(file + ": missing column '" + name + "'");
  }
};

Table read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  Table t;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (line.empty() || line == "\r") continue;
    auto cells = split_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw ParseError(path.string() + ": expected " + std::to_string(t.header.size()) +
                           " cells, found " + std::to_string(cells.size()),
                       ln);
    t.rows.push_back(std::move(cells));
    t.line_numbers.push_back(ln);
  }
  if (t.header.empty()) throw ParseError(path.string() + ": empty file", ln);
  return t;
}

double parse_number(const std::string& s, const std::string& file, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ParseError(file + ": bad number '" + s + "'", line);
  return v;
}

/// area_id -> events; every column other than area_id and timestamp becomes
/// a payload entry (empty cells are skipped).
std::map<std::string, std::vector<AcquisitionEvent>> read_events(const fs::path& path, Sensor sensor) {
  const auto t = read_table(path);
  const auto ia = t.column("area_id", path.string());
  const auto it = t.column("timestamp", path.string());
  std::map<std::string, std::vector<AcquisitionEvent>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    AcquisitionEvent e;
    e.sensor = sensor;
    try {
      e.timestamp = parse_timestamp(row[it]);
    } catch (const ValueError& ex) {
      throw ParseError(path.string() + ": " + ex.what(), t.line_numbers[r]);
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == ia || c == it || row[c].empty()) continue;
      e.payload[t.header[c]] = parse_number(row[c], path.string(), t.line_numbers[r]);
    }
    out[row[ia]].push_back(std::move(e));
  }
  return out;
}

WeatherSeries read_weather(const fs::path& path) {
  const auto t = read_table(path);
  const auto it = t.column("timestamp", path.string());
  const auto ip = t.column("total_precipitation", path.string());
  const auto itemp = t.column("temperature_2m", path.string());
  std::vector<WeatherSample> samples;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    try {
      samples.push_back({parse_timestamp(row[it]),
                         parse_number(row[ip], path.string(), t.line_numbers[r]),
                         parse_number(row[itemp], path.string(), t.line_numbers[r])});
    } catch (const ValueError& ex) {
      throw ParseError(path.string() + ": " + ex.what(), t.line_numbers[r]);
    }
  }
  return WeatherSeries(std::move(samples));
}

// --------------------------------------------------------------------------

Dataset load(const std::string& path, FeatureSet set, bool lenient) {
  auto r = load_dataset(path, !lenient);
  if (r.dropped) log("dropped " + std::to_string(r.dropped) + " invalid rows from " + path);
  return select_features(r.dataset, set);
}

json parse_params(const std::string& text) {
  if (text.empty()) return json::object();
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("--params is not valid JSON: ") + e.what());
  }
}

void print_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], r[i].size());
    }
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
    }
    std::cerr << line << '\n';
  }
}

std::string fixed(double v, int digits = 4) {
  if (!std::isfinite(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// --------------------------------------------------------------------------
// Options shared by the subcommands.

struct Settings {
  // global
  int threads = 0;
  std::string manifest;
  // common
  std::string out;
  std::uint64_t seed = 0;
  std::string target = "ndvi";
  std::string feature_set = "all";
  bool lenient = false;
  // data
  std::string data, train, val, test;
  double test_fraction = 0.3;
  // synth
  std::string synth_config;
  int areas = -1;
  int acq_min = -1, acq_max = -1;
  double label_noise = -1, sar_noise = -1;
  // pair
  std::string sar, optical, weather, area_table;
  double max_dt_hours = 24;
  // models
  std::string model_kind = "forest";
  std::string params;
  std::string model;
  std::string grid;
  double budget = 60;
  double cap = 0;
  int max_members = 50;
  int repeats = 10;
  // infer / smooth
  std::string spatial_case;
  std::string input;
  std::string column = "estimate";
  int window = 5;
  // ablate
  std::string ablation = "features";
};

using Handler = std::function<void(Settings&, Outputs&, json&)>;

void require(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what + " is required");
}

// --------------------------------------------------------------------------
// Subcommand bodies.

void run_synth(Settings& s, Outputs& out, json& info) {
  SynthConfig cfg;
  if (!s.synth_config.empty()) {
    std::ifstream in(s.synth_config);
    if (!in) throw Error("cannot open " + s.synth_config);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ParseError(std::string("synth config is not valid JSON: ") + e.what(), 0);
    }
    cfg = synth_config_from_json(j);
  }
  if (s.areas >= 0)
    cfg.areas_healthy_coniferous = cfg.areas_healthy_broadleaved = cfg.areas_disturbed_coniferous =
        s.areas;
  if (s.acq_min >= 0) cfg.acquisitions_min = s.acq_min;
  if (s.acq_max >= 0) cfg.acquisitions_max = s.acq_max;
  if (s.label_noise >= 0) cfg.label_noise = s.label_noise;
  if (s.sar_noise >= 0) cfg.sar_noise_db = s.sar_noise;
  cfg.seed = s.seed;
  cfg.check();
  const auto result = generate(cfg);
  save_dataset(result.dataset, out.path("dataset.csv"));
  out.write_json("oracle.json", to_json(result.oracle));
  info["synth_config"] = to_json(cfg);
  info["records"] = result.dataset.size();
  log("generated " + std::to_string(result.dataset.size()) + " records");
}

void run_pair(Settings& s, Outputs& out, json& info) {
  require(!s.sar.empty(), "--sar");
  require(!s.optical.empty(), "--optical");
  require(!s.area_table.empty(), "--area-table");
  auto sar = read_events(s.sar, Sensor::sar);
  auto optical = read_events(s.optical, Sensor::optical);
  std::optional<WeatherSeries> weather;
  if (!s.weather.empty()) weather = read_weather(s.weather);

  const auto areas = read_table(s.area_table);
  const auto ia = areas.column("area_id", s.area_table);
  const auto ic = areas.column("class_label", s.area_table);
  const auto ift = areas.column("forest_type", s.area_table);
  const auto max_dt = std::chrono::seconds(static_cast<long long>(s.max_dt_hours * 3600));

  Dataset ds;
  ds.source = "pair";
  std::size_t unpaired = 0;
  for (const auto& row : areas.rows) {
    AreaInfo area{row[ia], parse_class_label(row[ic]), parse_forest_type(row[ift])};
    auto& events = sar[area.area_id];
    if (weather)
      for (auto& e : events) {
        const auto w = aggregate_weather(*weather, e.timestamp);
        e.payload.try_emplace("prec_12h", w.prec_12h);
        e.payload.try_emplace("temp", w.temp);
      }
    const auto pairs = pair_records(events, optical[area.area_id], max_dt);
    unpaired += events.size() - pairs.size();
    for (auto& r : assemble_records(area, pairs)) ds.records.push_back(std::move(r));
  }
  save_dataset(ds, out.path("dataset.csv"));
  info["records"] = ds.size();
  info["unpaired_sar_events"] = unpaired;
  log("paired " + std::to_string(ds.size()) + " records, " + std::to_string(unpaired) +
      " SAR events without an optical partner");
}

void run_split(Settings& s, Outputs& out, json& info) {
  require(!s.data.empty(), "--data");
  const auto ds = load(s.data, FeatureSet::all, s.lenient);
  auto [train, test] = split_by_area(ds, s.test_fraction, s.seed);
  save_dataset(train, out.path("train.csv"));
  save_dataset(test, out.path("test.csv"));
  info["train_records"] = train.size();
  info["test_records"] = test.size();
}

void run_train(Settings& s, Outputs& out, json& info) {
  require(!s.train.empty(), "--train");
  const auto set = parse_feature_set(s.feature_set);
  const auto target = parse_target(s.target);
  const auto train = load(s.train, set, s.lenient);
  std::optional<Dataset> val;
  if (!s.val.empty()) val = load(s.val, set, s.lenient);
  const auto spec = spec_from_config(parse_model_kind(s.model_kind), parse_params(s.params), s.seed);
  const auto model = train_model(spec, train, val ? &*val : nullptr, target);
  save_model(model, out.path("model.json"));
  info["spec"] = spec_to_json(spec);
  if (model.kind == ModelKind::gbt) {
    info["best_round"] = model.best_round;
    info["rounds_trained"] = model.validation_mae.size();
  }
  log("trained " + std::string(to_string(model.kind)) + " with " +
      std::to_string(model.trees.size()) + " trees");
}

void run_tune(Settings& s, Outputs& out, json& info) {
  require(!s.train.empty(), "--train");
  require(!s.grid.empty(), "--grid");
  const auto set = parse_feature_set(s.feature_set);
  const auto target = parse_target(s.target);
  auto grid = load_grid(s.grid);
  if (s.grid != "paper-rfr" && s.grid != "paper-xgb") {
    // file grids name their own model kind
  } else if (parse_model_kind(s.model_kind) != grid.model_kind) {
    throw UsageError("grid " + s.grid + " is for model " + std::string(to_string(grid.model_kind)));
  }
  Dataset train = load(s.train, set, s.lenient);
  Dataset val;
  if (!s.val.empty()) {
    val = load(s.val, set, s.lenient);
  } else {
    std::tie(train, val) = split_by_area(train, kDefaultValidationFraction, s.seed);
    log("no --val given; holding out " + num(kDefaultValidationFraction) + " of the training areas");
  }
  const auto report = grid_search(grid, train, val, target, s.seed);
  auto csv = out.open("tuning.csv");
  write_tuning_csv(report, csv);
  const auto summary = tuning_summary_json(report);
  out.write_json("tuning.json", summary);
  info["grid"] = grid_to_json(grid);
  info["n_configs"] = report.rows.size();
  info["total_seconds"] = report.total_seconds;

  std::vector<std::vector<std::string>> rows{{"target", "model", "best config", "val MAE"}};
  if (summary.contains("best_val_mae"))
    rows.push_back({report.target, std::string(to_string(report.model_kind)),
                    summary["best_config"].dump(), fixed(summary["best_val_mae"].get<double>())});
  else
    rows.push_back({report.target, std::string(to_string(report.model_kind)), "(none)", "-"});
  print_table(rows);
}

void run_search(Settings& s, Outputs& out, json& info) {
  require(!s.train.empty(), "--train");
  const auto set = parse_feature_set(s.feature_set);
  const auto target = parse_target(s.target);
  Dataset train = load(s.train, set, s.lenient);
  Dataset val;
  if (!s.val.empty()) {
    val = load(s.val, set, s.lenient);
  } else {
    std::tie(train, val) = split_by_area(train, kDefaultValidationFraction, s.seed);
  }
  if (s.max_members < 1) throw UsageError("--max-members must be >= 1");
  std::optional<double> cap;
  if (s.cap > 0) cap = s.cap;
  const auto result = budget_search(SearchSpace{}, train, val, target, s.budget, s.seed, cap);
  auto csv = out.open("trace.csv");
  write_trace_csv(result.trace, csv);
  auto summary = trace_summary_json(result.trace);
  bool have_model = false;
  for (const auto& m : result.models) have_model |= m.has_value();
  if (have_model) {
    const auto ens = ensemble_select(result, val, target, static_cast<std::size_t>(s.max_members));
    save_model(ens, out.path("model.json"));
    summary["ensemble_val_mae"] = mae(target_vector(val, target), predict(ens, feature_matrix(val)));
    summary["ensemble_members"] = ens.members.size();
  } else {
    log("no configuration finished within the budget; no ensemble written");
  }
  out.write_json("search.json", summary);
  info["summary"] = summary;
  log("tested " + std::to_string(result.trace.entries.size()) + " configurations, " +
      std::to_string(summary["n_success"].get<std::size_t>()) + " succeeded");
}

void run_eval(Settings& s, Outputs& out, json& info) {
  require(!s.model.empty(), "--model");
  require(!s.test.empty(), "--test");
  const auto model = load_model(s.model);
  const auto target = parse_target(model.target_name.empty() ? s.target : model.target_name);
  auto test = load(s.test, FeatureSet::all, s.lenient);
  test.features = model.feature_names;
  const auto report = evaluate(model, test, target);
  out.write_json("eval.json", to_json(report));
  auto csv = out.open("eval.csv");
  write_eval_csv(report, csv);
  info["target"] = report.target;

  std::vector<std::vector<std::string>> rows{{"group", "n", "R2", "MSE", "RMSE", "MAE"}};
  auto add = [&](const std::string& g, const Metrics& m) {
    rows.push_back({g, std::to_string(m.n), fixed(m.r2), fixed(m.mse), fixed(m.rmse), fixed(m.mae)});
  };
  add("all", report.overall);
  for (const auto& [cls, m] : report.per_class) add(cls, m);
  print_table(rows);
}

void run_importance(Settings& s, Outputs& out, json& info) {
  require(!s.model.empty(), "--model");
  require(!s.data.empty(), "--data");
  const auto model = load_model(s.model);
  const auto target = parse_target(model.target_name.empty() ? s.target : model.target_name);
  auto ds = load(s.data, FeatureSet::all, s.lenient);
  ds.features = model.feature_names;
  const auto report = permutation_importance(model, feature_matrix(ds), target_vector(ds, target),
                                             s.repeats, s.seed);
  out.write_json("importance.json", to_json(report));
  auto csv = out.open("importance.csv");
  write_importance_csv(report, csv);
  info["repeats"] = s.repeats;

  std::vector<std::vector<std::string>> rows{{"feature", "mean", "std", "share %"}};
  for (std::size_t i = 0; i < report.features.size(); ++i)
    rows.push_back({report.features[i], fixed(report.mean[i], 5), fixed(report.std[i], 5),
                    fixed(100 * report.share[i], 2)});
  print_table(rows);
}

void run_infer(Settings& s, Outputs& out, json& info) {
  require(!s.model.empty(), "--model");
  if (s.spatial_case.empty() == s.data.empty())
    throw UsageError("exactly one of --case and --data is required");
  const auto model = load_model(s.model);
  if (!s.spatial_case.empty()) {
    const auto c = load_spatial_case(s.spatial_case);
    const auto pred = infer_raster(model, c);
    write_grid(pred, out.path("prediction.asc"));
    if (c.truth) {
      const auto em = error_map(pred, *c.truth, c.mask);
      write_grid(em.ae, out.path("abs_error.asc"));
      out.write_json("error.json", to_json(em.summary));
      info["error"] = to_json(em.summary);
      log("MAE " + fixed(em.summary.mae) + ", std " + fixed(em.summary.std) + " over " +
          std::to_string(em.summary.n) + " pixels");
    }
    return;
  }
  auto ds = load(s.data, FeatureSet::all, true).records;
  std::stable_sort(ds.begin(), ds.end(), [](const SampleRecord& a, const SampleRecord& b) {
    return a.area_id != b.area_id ? a.area_id < b.area_id : a.timestamp < b.timestamp;
  });
  const bool labelled = !model.target_name.empty();
  const Target target = labelled ? parse_target(model.target_name) : Target::ndvi;
  auto csv = out.open("timeseries.csv");
  csv << "area_id,timestamp,estimate,label\n";
  std::size_t series = 0;
  for (std::size_t i = 0; i < ds.size();) {
    std::size_t j = i;
    while (j < ds.size() && ds[j].area_id == ds[i].area_id) ++j;
    const std::span<const SampleRecord> stream(ds.data() + i, j - i);
    const auto ts = estimate_timeseries(model, stream);
    for (std::size_t k = 0; k < ts.samples.size(); ++k) {
      const auto label = labelled ? stream[k].target(target) : std::nullopt;
      csv << ts.area_id << ',' << format_timestamp(ts.samples[k].first) << ','
          << num(ts.samples[k].second) << ',' << (label ? num(*label) : "") << '\n';
    }
    ++series;
    i = j;
  }
  info["series"] = series;
}

void run_smooth(Settings& s, Outputs& out, json& info) {
  require(!s.input.empty(), "--input");
  const auto t = read_table(s.input);
  const auto ia = t.column("area_id", s.input);
  const auto it = t.column("timestamp", s.input);
  const auto iv = t.column(s.column, s.input);
  std::map<std::string, std::vector<TimeValue>> groups;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (row[iv].empty()) continue;
    groups[row[ia]].emplace_back(parse_timestamp(row[it]),
                                 parse_number(row[iv], s.input, t.line_numbers[r]));
  }
  auto csv = out.open("smoothed.csv");
  csv << "area_id,timestamp," << s.column << ",smoothed\n";
  for (auto& [area, ts] : groups) {
    std::stable_sort(ts.begin(), ts.end(), [](auto& a, auto& b) { return a.first < b.first; });
    const auto sm = moving_average(ts, s.window);
    for (std::size_t k = 0; k < ts.size(); ++k)
      csv << area << ',' << format_timestamp(ts[k].first) << ',' << num(ts[k].second) << ','
          << num(sm[k].second) << '\n';
  }
  info["series"] = groups.size();
}

void run_ablate(Settings& s, Outputs& out, json& info) {
  require(!s.train.empty(), "--train");
  require(!s.test.empty(), "--test");
  const auto target = parse_target(s.target);
  const auto train = load(s.train, FeatureSet::all, s.lenient);
  const auto test = load(s.test, FeatureSet::all, s.lenient);
  const auto spec = spec_from_config(parse_model_kind(s.model_kind), parse_params(s.params), s.seed);
  info["spec"] = spec_to_json(spec);
  json report;
  std::vector<std::vector<std::string>> rows;
  if (s.ablation == "features") {
    const auto results = ablation_feature_sets(train, test, target, spec);
    auto csv = out.open("ablation.csv");
    csv << "feature_set,n_features,n,r2,mse,rmse,mae\n";
    rows.push_back({"feature set", "features", "R2", "MSE", "MAE"});
    report = json::array();
    for (const auto& r : results) {
      const auto& m = r.report.overall;
      csv << to_string(r.set) << ',' << r.n_features << ',' << m.n << ',' << num(m.r2) << ','
          << num(m.mse) << ',' << num(m.rmse) << ',' << num(m.mae) << '\n';
      report.push_back({{"feature_set", std::string(to_string(r.set))},
                        {"n_features", r.n_features},
                        {"report", to_json(r.report)}});
      rows.push_back({std::string(to_string(r.set)), std::to_string(r.n_features), fixed(m.r2),
                      fixed(m.mse), fixed(m.mae)});
    }
  } else if (s.ablation == "robustness") {
    const ClassLabel healthy[] = {ClassLabel::healthy_coniferous, ClassLabel::healthy_broadleaved};
    const auto results =
        ablation_robustness(filter_classes(train, healthy), filter_classes(test, healthy), train,
                            test, target, spec, s.repeats, s.seed);
    auto csv = out.open("ablation.csv");
    csv << "regime,feature,mean,std,share\n";
    rows.push_back({"regime", "R2", "MAE", "SAR share %", "top feature"});
    report = json::array();
    for (const auto& r : results) {
      for (std::size_t i = 0; i < r.importance.features.size(); ++i)
        csv << r.regime << ',' << r.importance.features[i] << ',' << num(r.importance.mean[i])
            << ',' << num(r.importance.std[i]) << ',' << num(r.importance.share[i]) << '\n';
      const double sar_share = r.importance.share_of(kSarFeatures);
      report.push_back({{"regime", r.regime},
                        {"report", to_json(r.report)},
                        {"importance", to_json(r.importance)},
                        {"sar_share", sar_share}});
      std::size_t top = 0;
      for (std::size_t i = 1; i < r.importance.share.size(); ++i)
        if (r.importance.share[i] > r.importance.share[top]) top = i;
      rows.push_back({r.regime, fixed(r.report.overall.r2), fixed(r.report.overall.mae),
                      fixed(100 * sar_share, 2),
                      r.importance.features.empty() ? "-" : r.importance.features[top]});
    }
  } else {
    throw UsageError("--kind must be 'features' or 'robustness'");
  }
  out.write_json("ablation.json", report);
  print_table(rows);
}

// --------------------------------------------------------------------------

std::string manifest_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

/// Fills options not given on the command line from the manifest. Keys may
/// use dashes or underscores.
void apply_manifest(CLI::App& app, const json& manifest) {
  for (auto* opt : app.get_options()) {
    if (opt->count() > 0 || opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    std::string alt = name;
    std::replace(alt.begin(), alt.end(), '-', '_');
    const json* v = nullptr;
    if (manifest.contains(name))
      v = &manifest.at(name);
    else if (manifest.contains(alt))
      v = &manifest.at(alt);
    if (!v || name == "manifest" || name == "help") continue;
    opt->add_result(manifest_value(*v));
    opt->run_callback();
  }
}

json resolved_options(const CLI::App& app) {
  json j = json::object();
  for (const auto* opt : app.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const auto& name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      j[name] = res.size() == 1 ? json(res.front()) : json(res);
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sarvi: vegetation indices from SAR backscatter with tree ensembles"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", SARVI_VERSION);
  Settings s;
  app.add_option("--threads", s.threads, "Worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--manifest", s.manifest, "JSON file with option values");

  std::map<CLI::App*, Handler> handlers;
  auto sub = [&](const char* name, const char* desc, Handler h) {
    auto* c = app.add_subcommand(name, desc);
    c->add_option("--out", s.out, "Output directory");
    c->add_option("--seed", s.seed, "Random seed")->capture_default_str();
    handlers[c] = std::move(h);
    return c;
  };
  auto data_opts = [&](CLI::App* c) {
    c->add_option("--target", s.target, "ndvi | evi | lai | fapar")->capture_default_str();
    c->add_option("--feature-set", s.feature_set, "sar_only | sar_dem | all")->capture_default_str();
    c->add_flag("--lenient", s.lenient, "Drop malformed rows instead of failing");
  };
  auto model_opts = [&](CLI::App* c) {
    c->add_option("--model", s.model_kind, "tree | forest | gbt")->capture_default_str();
    c->add_option("--params", s.params, "Hyperparameters as a JSON object");
  };

  auto* synth = sub("synth", "Generate a synthetic paired dataset", run_synth);
  synth->add_option("--config", s.synth_config, "Synthetic generator config (JSON)");
  synth->add_option("--areas", s.areas, "Areas per class");
  synth->add_option("--acq-min", s.acq_min, "Minimum acquisitions per area");
  synth->add_option("--acq-max", s.acq_max, "Maximum acquisitions per area");
  synth->add_option("--label-noise", s.label_noise, "Label noise standard deviation");
  synth->add_option("--sar-noise", s.sar_noise, "Backscatter noise in dB");

  auto* pair = sub("pair", "Pair SAR and optical events into dataset rows", run_pair);
  pair->add_option("--sar", s.sar, "SAR events CSV");
  pair->add_option("--optical", s.optical, "Optical events CSV");
  pair->add_option("--weather", s.weather, "Hourly weather CSV");
  pair->add_option("--area-table", s.area_table, "Area attributes CSV");
  pair->add_option("--max-dt-hours", s.max_dt_hours, "Pairing tolerance")->capture_default_str();

  auto* split = sub("split", "Per-class area-level train/test split", run_split);
  split->add_option("--data", s.data, "Dataset CSV");
  split->add_option("--test-fraction", s.test_fraction, "Test share of areas")->capture_default_str();
  split->add_flag("--lenient", s.lenient, "Drop malformed rows instead of failing");

  auto* train = sub("train", "Train a model", run_train);
  train->add_option("--train", s.train, "Training CSV");
  train->add_option("--val", s.val, "Validation CSV for boosting early stopping");
  data_opts(train);
  model_opts(train);

  auto* tune = sub("tune", "Grid search", run_tune);
  tune->add_option("--train", s.train, "Training CSV");
  tune->add_option("--val", s.val, "Validation CSV");
  tune->add_option("--grid", s.grid, "paper-rfr | paper-xgb | grid JSON file");
  data_opts(tune);
  tune->add_option("--model", s.model_kind, "forest | gbt")->capture_default_str();

  auto* search = sub("search", "Budgeted random search with ensemble selection", run_search);
  search->add_option("--train", s.train, "Training CSV");
  search->add_option("--val", s.val, "Validation CSV");
  search->add_option("--budget", s.budget, "Wall-clock budget in seconds")->capture_default_str();
  search->add_option("--cap", s.cap, "Per-config cap in seconds (default budget/10)");
  search->add_option("--max-members", s.max_members, "Ensemble selection steps")->capture_default_str();
  data_opts(search);

  auto* eval = sub("eval", "Evaluate a model on a test set", run_eval);
  eval->add_option("--model", s.model, "Model JSON");
  eval->add_option("--test", s.test, "Test CSV");
  eval->add_flag("--lenient", s.lenient, "Drop malformed rows instead of failing");

  auto* imp = sub("importance", "Permutation feature importance", run_importance);
  imp->add_option("--model", s.model, "Model JSON");
  imp->add_option("--data", s.data, "Dataset CSV");
  imp->add_option("--repeats", s.repeats, "Shuffles per feature")->capture_default_str();
  imp->add_flag("--lenient", s.lenient, "Drop malformed rows instead of failing");

  auto* infer = sub("infer", "Time-series or raster inference", run_infer);
  infer->add_option("--model", s.model, "Model JSON");
  infer->add_option("--case", s.spatial_case, "Spatial case manifest (JSON)");
  infer->add_option("--data", s.data, "SAR stream CSV for time-series estimation");

  auto* smooth = sub("smooth", "Centred moving average of time series", run_smooth);
  smooth->add_option("--input", s.input, "Time-series CSV (area_id, timestamp, value columns)");
  smooth->add_option("--column", s.column, "Value column")->capture_default_str();
  smooth->add_option("--window", s.window, "Odd window length")->capture_default_str();

  auto* ablate = sub("ablate", "Feature-set or robustness ablation", run_ablate);
  ablate->add_option("--kind", s.ablation, "features | robustness")->capture_default_str();
  ablate->add_option("--train", s.train, "Training CSV");
  ablate->add_option("--test", s.test, "Test CSV");
  ablate->add_option("--repeats", s.repeats, "Permutation repeats")->capture_default_str();
  ablate->add_option("--target", s.target, "ndvi | evi | lai | fapar")->capture_default_str();
  ablate->add_flag("--lenient", s.lenient, "Drop malformed rows instead of failing");
  model_opts(ablate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* active = app.get_subcommands().front();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    json manifest = json::object();
    if (!s.manifest.empty()) {
      std::ifstream in(s.manifest);
      if (!in) throw UsageError("cannot open manifest " + s.manifest);
      try {
        in >> manifest;
      } catch (const json::exception& e) {
        throw UsageError(std::string("manifest is not valid JSON: ") + e.what());
      }
      if (!manifest.is_object()) throw UsageError("manifest must be a JSON object");
      apply_manifest(app, manifest);
      apply_manifest(*active, manifest);
    }
    require(!s.out.empty(), "--out");
    if (s.threads > 0) omp_set_num_threads(s.threads);

    Outputs out(s.out);
    json info;
    handlers.at(active)(s, out, info);

    json run;
    run["command"] = active->get_name();
    run["version"] = SARVI_VERSION;
    run["options"] = resolved_options(*active);
    run["seed"] = s.seed;
    run["threads"] = s.threads > 0 ? s.threads : omp_get_max_threads();
    if (!s.manifest.empty()) run["manifest"] = manifest;
    run["outputs"] = out.files();
    run["details"] = info;
    run["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.write_json("run.json", run);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "sarvi " << active->get_name() << ": usage error: " << e.what() << "\n"
              << "Run 'sarvi " << active->get_name() << " --help' for the options.\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "sarvi " << active->get_name() << ": error: " << e.what() << '\n';
    return 1;
  }
}
