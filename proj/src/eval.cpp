// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include "sarvi/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "importance_kernels.hpp"
#include "sarvi/error.hpp"

namespace sarvi {

using nlohmann::json;

namespace {

void check_pair(std::span<const double> y, std::span<const double> p) {
  if (y.size() != p.size())
    throw ValueError("length mismatch: " + std::to_string(y.size()) + " targets vs " +
                     std::to_string(p.size()) + " predictions");
  if (y.empty()) throw ValueError("metrics need at least one sample");
}

std::string num(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

double mae(std::span<const double> y, std::span<const double> p) {
  check_pair(y, p);
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - p[i]);
  return s / static_cast<double>(y.size());
}

MseRmse mse_rmse(std::span<const double> y, std::span<const double> p) {
  check_pair(y, p);
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - p[i]) * (y[i] - p[i]);
  const double mse = s / static_cast<double>(y.size());
  return {mse, std::sqrt(mse)};
}

double r2(std::span<const double> y, std::span<const double> p) {
  check_pair(y, p);
  if (y.size() < 2) throw ValueError("r2 needs at least two samples");
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - p[i]) * (y[i] - p[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (ss_tot == 0) throw ValueError("r2 undefined for a constant target");
  return 1.0 - ss_res / ss_tot;
}

Metrics compute_metrics(std::span<const double> y, std::span<const double> p) {
  Metrics m;
  m.n = y.size();
  m.mae = mae(y, p);
  const auto e = mse_rmse(y, p);
  m.mse = e.mse;
  m.rmse = e.rmse;
  try {
    m.r2 = r2(y, p);
  } catch (const ValueError&) {
    m.r2 = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

EvalReport evaluate(const Model& m, const Dataset& test, Target target) {
  if (test.empty()) throw ValueError("test set is empty");
  const auto y = target_vector(test, target);
  const auto p = predict(m, feature_matrix(test));
  EvalReport r;
  r.target = std::string(to_string(target));
  r.overall = compute_metrics(y, p);
  if (std::isnan(r.overall.r2)) r2(y, p);  // rethrows the undefined-r2 error

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (std::size_t i = 0; i < test.size(); ++i) {
    auto& g = groups[std::string(to_string(test.records[i].class_label))];
    g.first.push_back(y[i]);
    g.second.push_back(p[i]);
  }
  for (const auto& [cls, g] : groups) r.per_class[cls] = compute_metrics(g.first, g.second);
  return r;
}

json to_json(const Metrics& m) {
  return {{"n", m.n},
          {"mae", m.mae},
          {"mse", m.mse},
          {"rmse", m.rmse},
          {"r2", finite_or_null(m.r2)}};
}

json to_json(const EvalReport& r) {
  json j;
  j["target"] = r.target;
  j["overall"] = to_json(r.overall);
  j["per_class"] = json::object();
  for (const auto& [cls, m] : r.per_class) j["per_class"][cls] = to_json(m);
  return j;
}

void write_eval_csv(const EvalReport& r, std::ostream& out) {
  out << "target,group,n,r2,mse,rmse,mae\n";
  auto row = [&](const std::string& group, const Metrics& m) {
    out << r.target << ',' << group << ',' << m.n << ',' << num(m.r2) << ',' << num(m.mse) << ','
        << num(m.rmse) << ',' << num(m.mae) << '\n';
  };
  row("all", r.overall);
  for (const auto& [cls, m] : r.per_class) row(cls, m);
}

double ImportanceReport::share_of(std::span<const std::string_view> names) const {
  double s = 0;
  for (std::size_t i = 0; i < features.size(); ++i)
    if (std::find(names.begin(), names.end(), features[i]) != names.end()) s += share[i];
  return s;
}

ImportanceReport permutation_importance(const Model& m, const FeatureMatrix& X,
                                        std::span<const double> y, int repeats,
                                        std::uint64_t seed) {
  auto r = detail::importance_setup(m, X, y, repeats);
  const auto F = static_cast<std::ptrdiff_t>(X.cols());
  const std::ptrdiff_t jobs = F * repeats;
#pragma omp parallel
  {
    FeatureMatrix work = X;
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t job = 0; job < jobs; ++job) {
      const auto f = static_cast<std::size_t>(job / repeats);
      const auto k = static_cast<std::size_t>(job % repeats);
      r.raw[f][k] = detail::permuted_mae(m, X, work, y, f, k, seed) - r.baseline;
    }
  }
  detail::importance_finish(r);
  return r;
}

json to_json(const ImportanceReport& r) {
  json j;
  j["baseline_mae"] = r.baseline;
  j["repeats"] = r.repeats;
  j["features"] = json::array();
  for (std::size_t i = 0; i < r.features.size(); ++i)
    j["features"].push_back({{"feature", r.features[i]},
                             {"mean", r.mean[i]},
                             {"std", r.std[i]},
                             {"share", r.share[i]}});
  return j;
}

void write_importance_csv(const ImportanceReport& r, std::ostream& out) {
  out << "feature,mean,std,share\n";
  for (std::size_t i = 0; i < r.features.size(); ++i)
    out << r.features[i] << ',' << num(r.mean[i]) << ',' << num(r.std[i]) << ','
        << num(r.share[i]) << '\n';
}

std::vector<TimeValue> moving_average(std::span<const TimeValue> ts, int window) {
  if (window < 1 || window % 2 == 0) throw ValueError("moving-average window must be odd and >= 1");
  const auto n = static_cast<std::ptrdiff_t>(ts.size());
  for (std::ptrdiff_t i = 1; i < n; ++i)
    if (!(ts[i - 1].first < ts[i].first))
      throw ValueError("time series timestamps must be strictly increasing");
  std::vector<TimeValue> out(ts.begin(), ts.end());
  const std::ptrdiff_t half = window / 2;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t h = std::min({half, i, n - 1 - i});
    double s = 0;
    for (std::ptrdiff_t j = i - h; j <= i + h; ++j) s += ts[j].second;
    out[i].second = s / static_cast<double>(2 * h + 1);
  }
  return out;
}

std::vector<FeatureSetResult> ablation_feature_sets(const Dataset& train, const Dataset& test,
                                                    Target target, const ModelSpec& spec) {
  std::vector<FeatureSetResult> out;
  for (auto set : {FeatureSet::sar_only, FeatureSet::sar_dem, FeatureSet::all}) {
    const auto tr = select_features(train, set);
    const auto te = select_features(test, set);
    auto s = spec;
    // A fixed max_features above the narrower column count is clamped.
    auto clamp = [&](TreeParams& t) {
      if (t.max_features.mode == MaxFeatures::Mode::count)
        t.max_features.count = std::min<int>(t.max_features.count, static_cast<int>(tr.features.size()));
    };
    if (auto* t = std::get_if<TreeParams>(&s)) clamp(*t);
    if (auto* f = std::get_if<ForestParams>(&s)) clamp(f->tree);
    const auto model = train_model(s, tr, nullptr, target);
    out.push_back({set, tr.features.size(), evaluate(model, te, target)});
  }
  return out;
}

std::vector<RegimeResult> ablation_robustness(const Dataset& healthy_train,
                                              const Dataset& healthy_test,
                                              const Dataset& disturbed_train,
                                              const Dataset& disturbed_test, Target target,
                                              const ModelSpec& spec, int repeats,
                                              std::uint64_t seed) {
  if (healthy_train.features != disturbed_train.features)
    throw SchemaError("regimes use different feature columns");
  std::vector<RegimeResult> out;
  const std::pair<const char*, std::pair<const Dataset*, const Dataset*>> regimes[] = {
      {"healthy_only", {&healthy_train, &healthy_test}},
      {"with_disturbed", {&disturbed_train, &disturbed_test}}};
  for (const auto& [name, sets] : regimes) {
    const auto model = train_model(spec, *sets.first, nullptr, target);
    const auto X = feature_matrix(*sets.second);
    const auto y = target_vector(*sets.second, target);
    out.push_back({name, evaluate(model, *sets.second, target),
                   permutation_importance(model, X, y, repeats, seed)});
  }
  return out;
}

}  // namespace sarvi
