// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include "sarvi/datamodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "rng.hpp"
#include "sarvi/error.hpp"

namespace sarvi {

std::string_view to_string(ClassLabel c) {
  switch (c) {
    case ClassLabel::healthy_coniferous: return "healthy_coniferous";
    case ClassLabel::healthy_broadleaved: return "healthy_broadleaved";
    case ClassLabel::disturbed_coniferous: return "disturbed_coniferous";
  }
  return "?";
}

std::string_view to_string(ForestType f) {
  return f == ForestType::coniferous ? "coniferous" : "broadleaved";
}

std::string_view to_string(Target t) {
  switch (t) {
    case Target::ndvi: return "ndvi";
    case Target::evi: return "evi";
    case Target::lai: return "lai";
    case Target::fapar: return "fapar";
  }
  return "?";
}

std::string_view to_string(FeatureSet f) {
  switch (f) {
    case FeatureSet::sar_only: return "sar_only";
    case FeatureSet::sar_dem: return "sar_dem";
    case FeatureSet::all: return "all";
  }
  return "?";
}

ClassLabel parse_class_label(std::string_view s) {
  for (auto c : kAllClasses)
    if (to_string(c) == s) return c;
  throw ValueError("unknown class label '" + std::string(s) + "'");
}

ForestType parse_forest_type(std::string_view s) {
  if (s == "coniferous") return ForestType::coniferous;
  if (s == "broadleaved") return ForestType::broadleaved;
  throw ValueError("unknown forest type '" + std::string(s) + "'");
}

Target parse_target(std::string_view s) {
  for (auto t : kAllTargets)
    if (to_string(t) == s) return t;
  throw ValueError("unknown target '" + std::string(s) + "'");
}

FeatureSet parse_feature_set(std::string_view s) {
  for (auto f : {FeatureSet::sar_only, FeatureSet::sar_dem, FeatureSet::all})
    if (to_string(f) == s) return f;
  throw ValueError("unknown feature set '" + std::string(s) + "'");
}

std::vector<std::string> feature_columns(FeatureSet set) {
  std::vector<std::string> cols = {"vv", "vh", "angle", "vvvh", "vhvv"};
  if (set != FeatureSet::sar_only) {
    cols.insert(cols.end(), {"lia", "elevation", "slope"});
  }
  if (set == FeatureSet::all) {
    cols.insert(cols.end(), {"prec_12h", "temp"});
  }
  // Forest type and acquisition time are part of every set.
  cols.insert(cols.end(), {"forest_type", "doy_sin", "doy_cos"});
  return cols;
}

int feature_cardinality(std::string_view name) { return name == "forest_type" ? 2 : 0; }

double SampleRecord::feature(std::string_view name) const {
  if (name == "vv") return vv;
  if (name == "vh") return vh;
  if (name == "angle") return angle;
  if (name == "vvvh") return vvvh;
  if (name == "vhvv") return vhvv;
  if (name == "lia") return lia;
  if (name == "elevation") return elevation;
  if (name == "slope") return slope;
  if (name == "prec_12h") return prec_12h;
  if (name == "temp") return temp;
  if (name == "forest_type") return static_cast<double>(forest_type);
  if (name == "doy_sin") return doy_sin;
  if (name == "doy_cos") return doy_cos;
  throw SchemaError("unknown feature '" + std::string(name) + "'");
}

std::optional<double> SampleRecord::target(Target t) const {
  return const_cast<SampleRecord*>(this)->target(t);
}

std::optional<double>& SampleRecord::target(Target t) {
  switch (t) {
    case Target::ndvi: return ndvi;
    case Target::evi: return evi;
    case Target::lai: return lai;
    case Target::fapar: return fapar;
  }
  return ndvi;
}

std::string check_record(const SampleRecord& r) {
  if (r.area_id.empty()) return "empty area_id";
  for (auto name : kAllFeatures)
    if (!std::isfinite(r.feature(name))) return std::string(name) + " is not finite";
  if (std::abs(r.doy_sin * r.doy_sin + r.doy_cos * r.doy_cos - 1.0) > 1e-9)
    return "doy_sin/doy_cos off the unit circle";
  if (std::abs(r.vvvh * r.vhvv - 1.0) > 1e-9) return "vvvh * vhvv != 1";
  if (r.angle < 0 || r.angle > 90) return "angle outside [0, 90]";
  if (r.lia < 0 || r.lia > 180) return "lia outside [0, 180]";
  if (r.slope < 0) return "negative slope";
  if (r.prec_12h < 0) return "negative prec_12h";
  auto in = [](const std::optional<double>& v, double lo, double hi) {
    return !v || (std::isfinite(*v) && *v >= lo && *v <= hi);
  };
  if (!in(r.ndvi, -1, 1)) return "ndvi outside [-1, 1]";
  if (!in(r.evi, -1, 1)) return "evi outside [-1, 1]";
  if (!in(r.lai, 0, INFINITY)) return "negative lai";
  if (!in(r.fapar, 0, 1)) return "fapar outside [0, 1]";
  return {};
}

std::vector<Target> Dataset::present_targets() const {
  std::vector<Target> out;
  for (auto t : kAllTargets)
    if (has_target(t)) out.push_back(t);
  return out;
}

bool Dataset::has_target(Target t) const {
  if (records.empty()) return false;
  return std::all_of(records.begin(), records.end(),
                     [t](const SampleRecord& r) { return r.target(t).has_value(); });
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

bool is_null(std::string_view s) {
  return s.empty() || s == "NaN" || s == "nan" || s == "NA" || s == "null";
}

double parse_double(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
    throw ValueError("cannot parse number '" + std::string(s) + "'");
  return v;
}

void format_double(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

enum class RowOutcome { ok, null_cell, bad };

}  // namespace

LoadResult read_dataset(std::istream& in, bool strict, std::string source) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty file: missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;
  for (auto col : kCsvColumns)
    if (!index.count(std::string(col)))
      throw SchemaError("missing required column: " + std::string(col));
  for (const auto& h : header)
    if (std::find(kCsvColumns.begin(), kCsvColumns.end(), h) == kCsvColumns.end())
      throw SchemaError("unexpected column: " + h);
  auto col = [&](std::string_view name) { return index.at(std::string(name)); };

  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    rows.emplace_back(line_no, split_csv_line(line));
  }

  // A target column is part of the dataset when any row populates it.
  std::array<bool, 4> target_used{};
  for (auto& [ln, cells] : rows)
    for (std::size_t t = 0; t < 4; ++t) {
      const auto c = col(to_string(kAllTargets[t]));
      if (c < cells.size() && !is_null(cells[c])) target_used[t] = true;
    }

  LoadResult result;
  result.dataset.source = std::move(source);
  for (auto& [ln, cells] : rows) {
    if (cells.size() != header.size()) {
      if (strict)
        throw ParseError("expected " + std::to_string(header.size()) + " cells, got " +
                             std::to_string(cells.size()),
                         ln);
      ++result.dropped;
      continue;
    }
    bool has_null = false;
    for (std::size_t i = 0; i < 16; ++i)
      if (is_null(cells[col(kCsvColumns[i])])) has_null = true;
    for (std::size_t t = 0; t < 4; ++t)
      if (target_used[t] && is_null(cells[col(to_string(kAllTargets[t]))])) has_null = true;
    if (has_null) {
      ++result.dropped;
      continue;
    }

    SampleRecord r;
    try {
      auto num = [&](std::string_view name) { return parse_double(cells[col(name)]); };
      r.area_id = cells[col("area_id")];
      r.class_label = parse_class_label(cells[col("class_label")]);
      r.timestamp = parse_timestamp(cells[col("timestamp")]);
      r.vv = num("vv");
      r.vh = num("vh");
      r.angle = num("angle");
      r.vvvh = num("vvvh");
      r.vhvv = num("vhvv");
      r.lia = num("lia");
      r.elevation = num("elevation");
      r.slope = num("slope");
      r.prec_12h = num("prec_12h");
      r.temp = num("temp");
      r.forest_type = parse_forest_type(cells[col("forest_type")]);
      r.doy_sin = num("doy_sin");
      r.doy_cos = num("doy_cos");
      for (std::size_t t = 0; t < 4; ++t)
        if (target_used[t]) r.target(kAllTargets[t]) = num(to_string(kAllTargets[t]));
      if (auto why = check_record(r); !why.empty()) throw ValueError(why);
    } catch (const ValueError& e) {
      if (strict) throw ParseError(e.what(), ln);
      ++result.dropped;
      continue;
    }
    result.dataset.records.push_back(std::move(r));
  }
  return result;
}

LoadResult load_dataset(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_dataset(in, strict, path.string());
}

void write_dataset(const Dataset& ds, std::ostream& out) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
  out << '\n';
  for (const auto& r : ds.records) {
    out << r.area_id << ',' << to_string(r.class_label) << ',' << format_timestamp(r.timestamp);
    for (std::size_t i = 3; i < 16; ++i) {
      out << ',';
      if (kCsvColumns[i] == "forest_type")
        out << to_string(r.forest_type);
      else
        format_double(out, r.feature(kCsvColumns[i]));
    }
    for (auto t : kAllTargets) {
      out << ',';
      if (auto v = r.target(t)) format_double(out, *v);
    }
    out << '\n';
  }
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_dataset(ds, out);
  if (!out) throw Error("write failed: " + path.string());
}

std::pair<Dataset, Dataset> split_by_area(const Dataset& ds, double test_fraction,
                                          std::uint64_t seed) {
  if (!(test_fraction > 0 && test_fraction < 1))
    throw ValueError("test_fraction must lie in (0, 1)");

  std::map<std::string, ClassLabel> area_class;
  std::map<ClassLabel, std::set<std::string>> areas;
  for (const auto& r : ds.records) {
    auto [it, inserted] = area_class.emplace(r.area_id, r.class_label);
    if (!inserted && it->second != r.class_label)
      throw ValueError("area '" + r.area_id + "' appears under two classes");
    areas[r.class_label].insert(r.area_id);
  }

  std::set<std::string> test_areas;
  for (auto& [cls, ids] : areas) {
    if (ids.size() < 2)
      throw ValueError("class " + std::string(to_string(cls)) +
                       " has fewer than 2 areas; cannot stratify");
    std::vector<std::string> order(ids.begin(), ids.end());
    std::mt19937_64 rng(detail::derive_seed(seed, {static_cast<std::uint64_t>(cls)}));
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_test =
        static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(order.size()) + 0.5));
    test_areas.insert(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  }

  Dataset train, test;
  for (Dataset* d : {&train, &test}) {
    d->schema_version = ds.schema_version;
    d->source = ds.source;
    d->features = ds.features;
  }
  for (const auto& r : ds.records)
    (test_areas.count(r.area_id) ? test : train).records.push_back(r);
  return {std::move(train), std::move(test)};
}

Dataset select_features(const Dataset& ds, FeatureSet set) {
  Dataset out = ds;
  out.features = feature_columns(set);
  return out;
}

Dataset filter_classes(const Dataset& ds, std::span<const ClassLabel> classes) {
  Dataset out;
  out.schema_version = ds.schema_version;
  out.source = ds.source;
  out.features = ds.features;
  for (const auto& r : ds.records)
    if (std::find(classes.begin(), classes.end(), r.class_label) != classes.end())
      out.records.push_back(r);
  return out;
}

FeatureMatrix feature_matrix(std::span<const SampleRecord> records,
                             std::span<const std::string> names) {
  FeatureMatrix X;
  X.names.assign(names.begin(), names.end());
  for (const auto& n : X.names) {
    if (std::find(kAllFeatures.begin(), kAllFeatures.end(), n) == kAllFeatures.end())
      throw SchemaError("unknown feature '" + n + "'");
    X.cardinality.push_back(feature_cardinality(n));
  }
  X.rows = records.size();
  X.values.resize(X.rows * X.cols());
  for (std::size_t i = 0; i < X.rows; ++i)
    for (std::size_t j = 0; j < X.cols(); ++j) X(i, j) = records[i].feature(X.names[j]);
  return X;
}

FeatureMatrix feature_matrix(const Dataset& ds) { return feature_matrix(ds.records, ds.features); }

std::vector<double> target_vector(const Dataset& ds, Target t) {
  std::vector<double> y;
  y.reserve(ds.size());
  for (const auto& r : ds.records) {
    auto v = r.target(t);
    if (!v) throw SchemaError("target '" + std::string(to_string(t)) + "' missing for area " + r.area_id);
    y.push_back(*v);
  }
  return y;
}

}  // namespace sarvi
