#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "unigap/metric.hpp"

namespace unigap {

struct Example {
  Point x = 0.0;
  Point y = 0.0;
  friend bool operator==(const Example&, const Example&) = default;
};

struct LabeledSample {
  std::vector<Example> points;
  /// Seed of the stream that drew the sample.
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  LabeledSample prefix(std::size_t n) const {
    LabeledSample s;
    s.seed = seed;
    s.points.assign(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(std::min(n, points.size())));
    return s;
  }
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual Point predict(Point x) const = 0;
  /// The predictor's value when it is constant on the open interval (lo, hi).
  virtual std::optional<Point> constant_on(Point, Point) const { return std::nullopt; }
};

class ConstantPredictor final : public Predictor {
 public:
  explicit ConstantPredictor(Point value) : value_(value) {}
  Point predict(Point) const override { return value_; }
  std::optional<Point> constant_on(Point, Point) const override { return value_; }

 private:
  Point value_;
};

class FunctionPredictor final : public Predictor {
 public:
  explicit FunctionPredictor(std::function<Point(Point)> f) : f_(std::move(f)) {}
  Point predict(Point x) const override { return f_(x); }

 private:
  std::function<Point(Point)> f_;
};

/// Exact-match lookup on seen instances, a fixed default elsewhere.
class MemorizePredictor final : public Predictor {
 public:
  MemorizePredictor(std::span<const Example> sample, Point fallback) : fallback_(fallback) {
    for (const auto& e : sample) table_.emplace(e.x, e.y);
  }

  Point predict(Point x) const override {
    auto it = table_.find(x);
    return it == table_.end() ? fallback_ : it->second;
  }

  std::optional<Point> constant_on(Point lo, Point hi) const override {
    auto it = table_.upper_bound(lo);
    if (it != table_.end() && it->first < hi) return std::nullopt;
    return fallback_;
  }

  std::size_t seen() const { return table_.size(); }

 private:
  std::map<Point, Point> table_;
  Point fallback_;
};

inline std::shared_ptr<MemorizePredictor> memorize_baseline(std::span<const Example> sample,
                                                            Point fallback = 0.0) {
  return std::make_shared<MemorizePredictor>(sample, fallback);
}

}  // namespace unigap
