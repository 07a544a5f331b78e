// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include "tree_builder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "sarvi/error.hpp"

namespace sarvi::detail {

Presorted presort(const FeatureMatrix& X) {
  Presorted p;
  p.order.resize(X.cols());
  for (std::size_t f = 0; f < X.cols(); ++f) {
    auto& o = p.order[f];
    o.resize(X.rows);
    std::iota(o.begin(), o.end(), 0u);
    std::stable_sort(o.begin(), o.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return X(a, f) < X(b, f); });
  }
  return p;
}

double median_of(std::vector<double> v) {
  if (v.empty()) throw ValueError("median of an empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return lower + (upper - lower) / 2;
}

void RunningMedian::reserve(std::size_t n) {
  low_.reserve(n / 2 + 1);
  high_.reserve(n / 2 + 1);
}

void RunningMedian::clear() {
  low_.clear();
  high_.clear();
  low_sum_ = high_sum_ = 0;
}

void RunningMedian::push(double v) {
  if (low_.empty() || v <= low_.front()) {
    low_.push_back(v);
    std::push_heap(low_.begin(), low_.end());
    low_sum_ += v;
  } else {
    high_.push_back(v);
    std::push_heap(high_.begin(), high_.end(), std::greater<>{});
    high_sum_ += v;
  }
  // Keep |low| == |high| or |low| == |high| + 1.
  if (low_.size() > high_.size() + 1) {
    std::pop_heap(low_.begin(), low_.end());
    const double m = low_.back();
    low_.pop_back();
    low_sum_ -= m;
    high_.push_back(m);
    std::push_heap(high_.begin(), high_.end(), std::greater<>{});
    high_sum_ += m;
  } else if (high_.size() > low_.size()) {
    std::pop_heap(high_.begin(), high_.end(), std::greater<>{});
    const double m = high_.back();
    high_.pop_back();
    high_sum_ -= m;
    low_.push_back(m);
    std::push_heap(low_.begin(), low_.end());
    low_sum_ += m;
  }
}

double RunningMedian::median() const {
  if (low_.size() > high_.size()) return low_.front();
  return low_.front() + (high_.front() - low_.front()) / 2;
}

double RunningMedian::abs_deviation() const {
  if (low_.empty()) return 0;
  const double m = median();
  const double d = (m * static_cast<double>(low_.size()) - low_sum_) +
                   (high_sum_ - m * static_cast<double>(high_.size()));
  return d > 0 ? d : 0;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxCategories = 32;

struct Split {
  double impurity = kInf;
  int feature = -1;
  double threshold = 0;
  double key = 0;
  bool categorical = false;
  std::uint32_t mask = 0;

  bool valid() const { return feature >= 0; }
};

bool better(const Split& a, const Split& b) {
  if (!a.valid()) return false;
  if (!b.valid()) return true;
  if (a.impurity != b.impurity) return a.impurity < b.impurity;
  if (a.feature != b.feature) return a.feature < b.feature;
  return a.key < b.key;
}

double midpoint(double a, double b) {
  const double t = a / 2 + b / 2;
  return t < b && t >= a ? t : a;
}

double sad_of(std::vector<double>& v) {
  if (v.empty()) return 0;
  const double m = median_of(v);
  double s = 0;
  for (double x : v) s += std::abs(x - m);
  return s;
}

class Builder {
 public:
  Builder(const FeatureMatrix& X, std::span<const double> y, const BuildConfig& cfg)
      : X_(X), y_(y), cfg_(cfg) {}

  Split evaluate(int f, std::span<const std::uint32_t> seg) const {
    if (X_.cardinality[f] > 0) return evaluate_categorical(f, seg);
    return cfg_.criterion == Criterion::mse ? evaluate_mse(f, seg) : evaluate_mae(f, seg);
  }

  bool constant(int f, std::span<const std::uint32_t> seg) const {
    return X_(seg.front(), f) == X_(seg.back(), f);
  }

 private:
  Split evaluate_mse(int f, std::span<const std::uint32_t> seg) const {
    const std::size_t n = seg.size();
    const auto msl = static_cast<std::size_t>(cfg_.min_samples_leaf);
    double total = 0, total_sq = 0;
    for (auto r : seg) {
      total += y_[r];
      total_sq += y_[r] * y_[r];
    }
    Split best;
    double ls = 0, lsq = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const double yv = y_[seg[i - 1]];
      ls += yv;
      lsq += yv * yv;
      if (i < msl || n - i < msl) continue;
      const double xa = X_(seg[i - 1], f), xb = X_(seg[i], f);
      if (xa == xb) continue;
      const double nl = static_cast<double>(i), nr = static_cast<double>(n - i);
      const double rs = total - ls, rsq = total_sq - lsq;
      const double imp = (lsq - ls * ls / nl) + (rsq - rs * rs / nr);
      if (imp < best.impurity) {
        best.impurity = imp;
        best.feature = f;
        best.threshold = midpoint(xa, xb);
        best.key = best.threshold;
      }
    }
    return best;
  }

  Split evaluate_mae(int f, std::span<const std::uint32_t> seg) const {
    const std::size_t n = seg.size();
    const auto msl = static_cast<std::size_t>(cfg_.min_samples_leaf);
    std::vector<double> prefix(n + 1, 0.0), suffix(n + 1, 0.0);
    RunningMedian rm;
    rm.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      rm.push(y_[seg[i]]);
      prefix[i + 1] = rm.abs_deviation();
    }
    rm.clear();
    for (std::size_t i = n; i-- > 0;) {
      rm.push(y_[seg[i]]);
      suffix[i] = rm.abs_deviation();
    }
    Split best;
    for (std::size_t i = 1; i < n; ++i) {
      if (i < msl || n - i < msl) continue;
      const double xa = X_(seg[i - 1], f), xb = X_(seg[i], f);
      if (xa == xb) continue;
      const double imp = prefix[i] + suffix[i];
      if (imp < best.impurity) {
        best.impurity = imp;
        best.feature = f;
        best.threshold = midpoint(xa, xb);
        best.key = best.threshold;
      }
    }
    return best;
  }

  // Categories are ordered by their mean (MSE) or median (MAE) target and
  // every prefix of that order is tried as the left set.
  Split evaluate_categorical(int f, std::span<const std::uint32_t> seg) const {
    struct Group {
      int category;
      std::size_t begin, end;
      double stat = 0, sum = 0, sq = 0;
    };
    std::vector<Group> groups;
    for (std::size_t i = 0; i < seg.size(); ++i) {
      const int c = static_cast<int>(X_(seg[i], f));
      if (groups.empty() || groups.back().category != c) groups.push_back({c, i, i});
      auto& g = groups.back();
      g.end = i + 1;
      g.sum += y_[seg[i]];
      g.sq += y_[seg[i]] * y_[seg[i]];
    }
    Split best;
    if (groups.size() < 2) return best;
    for (auto& g : groups) {
      if (cfg_.criterion == Criterion::mse) {
        g.stat = g.sum / static_cast<double>(g.end - g.begin);
      } else {
        std::vector<double> v;
        for (auto i = g.begin; i < g.end; ++i) v.push_back(y_[seg[i]]);
        g.stat = median_of(std::move(v));
      }
    }
    std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
      return a.stat < b.stat || (a.stat == b.stat && a.category < b.category);
    });
    const auto msl = static_cast<std::size_t>(cfg_.min_samples_leaf);
    for (std::size_t j = 1; j < groups.size(); ++j) {
      std::size_t nl = 0, nr = 0;
      double ls = 0, lsq = 0, rs = 0, rsq = 0;
      std::uint32_t mask = 0;
      for (std::size_t k = 0; k < groups.size(); ++k) {
        const auto cnt = groups[k].end - groups[k].begin;
        if (k < j) {
          nl += cnt, ls += groups[k].sum, lsq += groups[k].sq;
          mask |= 1u << groups[k].category;
        } else {
          nr += cnt, rs += groups[k].sum, rsq += groups[k].sq;
        }
      }
      if (nl < msl || nr < msl) continue;
      double imp;
      if (cfg_.criterion == Criterion::mse) {
        imp = (lsq - ls * ls / static_cast<double>(nl)) + (rsq - rs * rs / static_cast<double>(nr));
      } else {
        std::vector<double> lv, rv;
        for (std::size_t k = 0; k < groups.size(); ++k)
          for (auto i = groups[k].begin; i < groups[k].end; ++i)
            (k < j ? lv : rv).push_back(y_[seg[i]]);
        imp = sad_of(lv) + sad_of(rv);
      }
      if (imp < best.impurity) {
        best.impurity = imp;
        best.feature = f;
        best.categorical = true;
        best.mask = mask;
        best.key = static_cast<double>(j);
      }
    }
    return best;
  }

  const FeatureMatrix& X_;
  std::span<const double> y_;
  const BuildConfig& cfg_;
};

bool goes_left(const FeatureMatrix& X, std::uint32_t row, const Split& s) {
  const double v = X(row, s.feature);
  if (s.categorical) return (s.mask >> static_cast<int>(v)) & 1u;
  return v <= s.threshold;
}

}  // namespace

Tree build_tree(const FeatureMatrix& X, std::span<const double> y, const Presorted& presorted,
                std::span<const std::uint32_t> counts, const BuildConfig& cfg,
                std::mt19937_64& rng) {
  if (cfg.min_samples_leaf < 1) throw ValueError("min_samples_leaf must be >= 1");
  for (int f : cfg.candidates) {
    if (X.cardinality[f] > kMaxCategories)
      throw ValueError("categorical feature '" + X.names[f] + "' has too many categories");
    if (X.cardinality[f] == 0) continue;
    for (std::size_t r = 0; r < X.rows; ++r) {
      const double v = X(r, f);
      if (v < 0 || v >= X.cardinality[f] || v != std::floor(v))
        throw ValueError("categorical feature '" + X.names[f] + "' holds non-category value");
    }
  }

  // Per-candidate sorted multisets of the sample.
  const std::size_t slots = cfg.candidates.size();
  std::size_t m = 0;
  for (auto c : counts) m += c;
  if (m == 0) throw ValueError("cannot fit a tree on an empty sample");
  std::vector<std::vector<std::uint32_t>> work(std::max<std::size_t>(slots, 1));
  if (slots == 0) {
    for (std::uint32_t r = 0; r < counts.size(); ++r)
      for (std::uint32_t k = 0; k < counts[r]; ++k) work[0].push_back(r);
  }
  for (std::size_t s = 0; s < slots; ++s) {
    auto& w = work[s];
    w.reserve(m);
    for (auto r : presorted.order[cfg.candidates[s]])
      for (std::uint32_t k = 0; k < counts[r]; ++k) w.push_back(r);
  }

  Builder builder(X, y, cfg);
  const bool leaf_median = cfg.criterion == Criterion::mae;
  const std::size_t k_split =
      cfg.features_per_split <= 0 ? slots
                                  : std::min<std::size_t>(slots, static_cast<std::size_t>(cfg.features_per_split));
  const auto msl = static_cast<std::size_t>(cfg.min_samples_leaf);

  Tree tree;
  struct Task {
    std::size_t begin, end;
    int depth;
    int parent;
    bool is_left;
  };
  std::vector<Task> stack{{0, m, 0, -1, false}};
  std::vector<std::uint8_t> left_flag(X.rows, 0);
  std::vector<std::uint32_t> buffer(m);
  std::vector<std::size_t> order(slots);
  std::vector<Split> per_slot(slots);

  while (!stack.empty()) {
    const Task t = stack.back();
    stack.pop_back();
    const int id = static_cast<int>(tree.size());
    tree.feature.push_back(-1);
    tree.threshold.push_back(0);
    tree.categorical.push_back(0);
    tree.left_categories.push_back(0);
    tree.left.push_back(-1);
    tree.right.push_back(-1);
    tree.value.push_back(0);
    if (t.parent >= 0) (t.is_left ? tree.left : tree.right)[t.parent] = id;

    const std::span<const std::uint32_t> seg0(work[0].data() + t.begin, t.end - t.begin);
    const std::size_t n = seg0.size();
    double ymin = kInf, ymax = -kInf;
    for (auto r : seg0) {
      ymin = std::min(ymin, y[r]);
      ymax = std::max(ymax, y[r]);
    }

    Split best;
    const bool can_split = slots > 0 && ymin != ymax && n >= 2 * msl &&
                           !(cfg.max_depth && t.depth >= *cfg.max_depth);
    if (can_split) {
      auto seg = [&](std::size_t s) {
        return std::span<const std::uint32_t>(work[s].data() + t.begin, n);
      };
      if (k_split >= slots) {
        const auto ns = static_cast<std::ptrdiff_t>(slots);
#pragma omp parallel for schedule(dynamic) if (cfg.parallel && n >= 2048)
        for (std::ptrdiff_t s = 0; s < ns; ++s) {
          const int f = cfg.candidates[s];
          per_slot[s] = builder.constant(f, seg(s)) ? Split{} : builder.evaluate(f, seg(s));
        }
        for (const auto& s : per_slot)
          if (better(s, best)) best = s;
      } else {
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::size_t visited = 0;
        for (auto s : order) {
          const int f = cfg.candidates[s];
          if (builder.constant(f, seg(s))) continue;
          const Split cand = builder.evaluate(f, seg(s));
          if (better(cand, best)) best = cand;
          if (++visited == k_split) break;
        }
      }
    }

    if (!best.valid()) {
      if (leaf_median) {
        std::vector<double> v;
        v.reserve(n);
        for (auto r : seg0) v.push_back(y[r]);
        tree.value[id] = median_of(std::move(v));
      } else {
        double s = 0;
        for (auto r : seg0) s += y[r];
        tree.value[id] = s / static_cast<double>(n);
      }
      continue;
    }

    tree.feature[id] = best.feature;
    tree.threshold[id] = best.categorical ? 0.0 : best.threshold;
    tree.categorical[id] = best.categorical ? 1 : 0;
    tree.left_categories[id] = best.mask;

    std::size_t nl = 0;
    for (auto r : seg0) {
      left_flag[r] = goes_left(X, r, best) ? 1 : 0;
      nl += left_flag[r];
    }
    for (std::size_t s = 0; s < work.size(); ++s) {
      auto* base = work[s].data() + t.begin;
      std::size_t li = 0, ri = nl;
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = base[i];
        buffer[left_flag[r] ? li++ : ri++] = r;
      }
      std::copy(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(n), base);
    }
    stack.push_back({t.begin + nl, t.end, t.depth + 1, id, false});
    stack.push_back({t.begin, t.begin + nl, t.depth + 1, id, true});
  }
  return tree;
}

}  // namespace sarvi::detail
