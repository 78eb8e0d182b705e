#pragma once

// Concrete hypothesis classes: the interval counterexample, grid Lipschitz and
// monotone functions, the binary-digit separating class, finitely supported
// functions, explicit finite tables, and a label-rescaling adapter.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "unigap/hypothesis.hpp"

namespace unigap {

namespace detail {

inline std::optional<std::int64_t> to_grid_unit(double value, double unit) {
  const double t = value / unit;
  if (!std::isfinite(t)) return std::nullopt;
  const double r = std::nearbyint(t);
  if (std::fabs(t - r) > 1e-9 * std::max(1.0, std::fabs(t))) return std::nullopt;
  return static_cast<std::int64_t>(r);
}

inline void enumeration_guard(std::optional<std::uint64_t> size, std::uint64_t limit,
                              const std::string& who) {
  if (!size || *size > limit) throw Error(who + ": parameter grid too large to enumerate");
}

// Draw k in [1, n] with probability proportional to 1/k^3.
inline std::size_t inverse_cube_index(Stream& rng, std::size_t n) {
  double total = 0.0;
  for (std::size_t k = 1; k <= n; ++k) total += 1.0 / std::pow(static_cast<double>(k), 3);
  double u = rng.uniform() * total;
  for (std::size_t k = 1; k <= n; ++k) {
    u -= 1.0 / std::pow(static_cast<double>(k), 3);
    if (u < 0.0) return k;
  }
  return n;
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct CounterexampleOptions {
  /// Coordinates of theta beyond depth_cap are fixed to 0 (labels finite up to 511).
  std::size_t depth_cap = 64;
  /// When nonzero, the domain is restricted to I_1 .. I_support.
  std::size_t support = 0;
  /// Number of interval midpoints in the default move pool.
  std::size_t pool_depth = 20;
};

/// f(x) in {0, 2^{2k+1}} for x in I_k, independently per interval.
class CounterexampleClass final : public HypothesisClass {
 public:
  explicit CounterexampleClass(CounterexampleOptions opts = {}) : opts_(opts) {
    if (opts_.depth_cap == 0 || opts_.depth_cap > 511) {
      throw ConfigError("counterexample depth cap must be in [1, 511]");
    }
  }

  static double gap_label(std::size_t k) { return std::ldexp(1.0, static_cast<int>(2 * k + 1)); }

  const CounterexampleOptions& options() const { return opts_; }

  std::string name() const override { return "counterexample"; }
  const MetricSpace& instance_space() const override { return instances_; }
  const MetricSpace& label_space() const override { return labels_; }

  ParamSpace params() const override {
    std::optional<std::uint64_t> size;
    if (opts_.depth_cap < 63) size = std::uint64_t{1} << opts_.depth_cap;
    return {ParamKind::binary_product, opts_.depth_cap, true, size};
  }

  bool in_domain(Point x) const override { return interval_of(x) > 0; }

  bool contains_param(const Param& theta) const override {
    return theta.size() == opts_.depth_cap &&
           std::all_of(theta.begin(), theta.end(), [](auto b) { return b == 0 || b == 1; });
  }

  Point evaluate_unchecked(const Param& theta, Point x) const override {
    const auto k = static_cast<std::size_t>(interval_of(x));
    return k <= opts_.depth_cap && theta[k - 1] ? gap_label(k) : 0.0;
  }

  std::vector<Point> label_candidates(Point x) const override {
    const auto k = static_cast<std::size_t>(interval_of(x));
    if (k > opts_.depth_cap) return {0.0};
    return {0.0, gap_label(k)};
  }

  std::optional<Param> witness(std::span<const Commitment> commitments) const override {
    Param theta(opts_.depth_cap, 0);
    std::vector<signed char> fixed(opts_.depth_cap + 1, -1);
    for (const auto& c : commitments) {
      const int k = interval_of(c.instance);
      if (k <= 0) return std::nullopt;
      const auto uk = static_cast<std::size_t>(k);
      signed char bit;
      if (c.label == 0.0) {
        bit = 0;
      } else if (uk <= opts_.depth_cap && c.label == gap_label(uk)) {
        bit = 1;
      } else {
        return std::nullopt;
      }
      if (uk > opts_.depth_cap) continue;
      if (fixed[uk] >= 0 && fixed[uk] != bit) return std::nullopt;
      fixed[uk] = bit;
      theta[uk - 1] = bit;
    }
    return theta;
  }

  std::vector<Point> feasible(std::span<const Commitment> commitments, Point x) const override {
    const int k = interval_of(x);
    for (const auto& c : commitments) {
      if (interval_of(c.instance) == k) return {c.label};
    }
    return label_candidates(x);
  }

  std::vector<Point> instance_pool() const override {
    std::size_t depth = opts_.pool_depth;
    if (opts_.support) depth = std::min(depth, opts_.support);
    std::vector<Point> pool;
    for (std::size_t k = 1; k <= depth; ++k) pool.push_back(interval_midpoint(static_cast<int>(k)));
    return pool;
  }

  void for_each_param(const std::function<bool(const Param&)>& visit) const override {
    detail::enumeration_guard(params().grid_size, std::uint64_t{1} << 24, name());
    const std::size_t d = opts_.depth_cap;
    Param theta(d, 0);
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << d); ++v) {
      for (std::size_t i = 0; i < d; ++i) theta[i] = static_cast<std::int64_t>((v >> (d - 1 - i)) & 1);
      if (!visit(theta)) return;
    }
  }

  Param random_param(Stream& rng) const override {
    Param theta(opts_.depth_cap);
    for (auto& b : theta) b = rng.coin() ? 1 : 0;
    return theta;
  }

  Point random_instance(Stream& rng) const override {
    const double lo = opts_.support ? interval_lower(static_cast<int>(opts_.support)) : 0.0;
    for (;;) {
      const double x = lo + (1.0 - lo) * rng.uniform_open();
      if (in_domain(x)) return x;
    }
  }

  /// Interval index of x, or 0 when x is outside the domain.
  int interval_of(Point x) const {
    if (!(x > 0.0 && x < 1.0)) return 0;
    int exponent = 0;
    if (std::frexp(x, &exponent) == 0.5) return 0;
    const int k = 1 - exponent;
    if (opts_.support && static_cast<std::size_t>(k) > opts_.support) return 0;
    return k;
  }

 private:
  CounterexampleOptions opts_;
  MetricSpace instances_ = MetricSpace::unit_interval(true);
  MetricSpace labels_ = MetricSpace::naturals();
};

// ---------------------------------------------------------------------------

struct LipschitzOptions {
  double lipschitz = 1.0;
  /// Instance grid {0, 1/G, ..., 1}.
  std::size_t resolution = 4;
  /// |f(0)| <= range; must be a multiple of the label unit L/G.
  double range = 4.0;
};

/// L-Lipschitz functions on the instance grid with values on the label grid
/// of step L/G. Parameters: theta_0 = f(0) in units, then per-step increments
/// in {-1, 0, 1}.
class LipschitzClass final : public HypothesisClass {
 public:
  explicit LipschitzClass(LipschitzOptions opts = {}) : opts_(opts) {
    if (!(opts_.lipschitz > 0.0) || opts_.resolution == 0 || !(opts_.range >= 0.0)) {
      throw ConfigError("lipschitz: constant, resolution and range must be positive");
    }
    unit_ = opts_.lipschitz / static_cast<double>(opts_.resolution);
    auto a = detail::to_grid_unit(opts_.range, unit_);
    if (!a) throw ConfigError("lipschitz: range must be a multiple of L/resolution");
    offset_bound_ = *a;
  }

  const LipschitzOptions& options() const { return opts_; }
  double unit() const { return unit_; }
  std::int64_t offset_bound() const { return offset_bound_; }
  std::size_t resolution() const { return opts_.resolution; }

  std::string name() const override { return "lipschitz"; }
  const MetricSpace& instance_space() const override { return instances_; }
  const MetricSpace& label_space() const override { return labels_; }
  bool exact_labels() const override { return false; }

  ParamSpace params() const override {
    std::optional<std::uint64_t> size;
    double count = static_cast<double>(2 * offset_bound_ + 1) *
                   std::pow(3.0, static_cast<double>(opts_.resolution));
    if (count < 9.0e18) size = static_cast<std::uint64_t>(count);
    return {ParamKind::box, opts_.resolution + 1, true, size};
  }

  bool in_domain(Point x) const override { return node_of(x) >= 0; }

  bool contains_param(const Param& theta) const override {
    if (theta.size() != opts_.resolution + 1) return false;
    if (std::llabs(theta[0]) > offset_bound_) return false;
    return std::all_of(theta.begin() + 1, theta.end(), [](auto d) { return d >= -1 && d <= 1; });
  }

  Point evaluate_unchecked(const Param& theta, Point x) const override {
    const auto i = node_of(x);
    std::int64_t v = theta[0];
    for (std::int64_t m = 1; m <= i; ++m) v += theta[static_cast<std::size_t>(m)];
    return label_at(v);
  }

  std::vector<Point> label_candidates(Point x) const override {
    const auto i = node_of(x);
    return labels_between(-offset_bound_ - i, offset_bound_ + i);
  }

  std::optional<Param> witness(std::span<const Commitment> commitments) const override {
    std::vector<Unit> cs;
    if (!to_units(commitments, cs)) return std::nullopt;
    Param theta;
    theta.reserve(opts_.resolution + 1);
    auto [lo0, hi0] = bounds(cs, 0);
    if (lo0 > hi0) return std::nullopt;
    std::int64_t f = lo0;
    theta.push_back(f);
    for (std::int64_t i = 1; i <= static_cast<std::int64_t>(opts_.resolution); ++i) {
      auto [lo, hi] = bounds(cs, i);
      const std::int64_t v = std::max(lo, f - 1);
      if (v > std::min(hi, f + 1)) return std::nullopt;
      theta.push_back(v - f);
      f = v;
    }
    return theta;
  }

  std::vector<Point> feasible(std::span<const Commitment> commitments, Point x) const override {
    std::vector<Unit> cs;
    if (!to_units(commitments, cs)) return {};
    auto [lo, hi] = bounds(cs, node_of(x));
    return labels_between(lo, hi);
  }

  std::optional<std::pair<Point, Point>> feasible_extent(std::span<const Commitment> commitments,
                                                         Point x) const override {
    std::vector<Unit> cs;
    if (!to_units(commitments, cs)) return std::nullopt;
    auto [lo, hi] = bounds(cs, node_of(x));
    if (lo > hi) return std::nullopt;
    return std::pair{label_at(lo), label_at(hi)};
  }

  std::vector<Point> instance_pool() const override {
    std::vector<Point> pool;
    for (std::size_t i = 0; i <= opts_.resolution; ++i) pool.push_back(node_point(i));
    return pool;
  }

  void for_each_param(const std::function<bool(const Param&)>& visit) const override {
    detail::enumeration_guard(params().grid_size, 10'000'000, name());
    const std::size_t g = opts_.resolution;
    Param theta(g + 1, -1);
    for (std::int64_t a = -offset_bound_; a <= offset_bound_; ++a) {
      theta[0] = a;
      std::fill(theta.begin() + 1, theta.end(), -1);
      for (;;) {
        if (!visit(theta)) return;
        std::size_t pos = g;
        while (pos >= 1 && theta[pos] == 1) theta[pos--] = -1;
        if (pos == 0) break;
        ++theta[pos];
      }
    }
  }

  Param random_param(Stream& rng) const override {
    Param theta;
    theta.push_back(rng.between(-offset_bound_, offset_bound_));
    for (std::size_t i = 0; i < opts_.resolution; ++i) theta.push_back(rng.between(-1, 1));
    return theta;
  }

  Point random_instance(Stream& rng) const override {
    return node_point(static_cast<std::size_t>(rng.below(opts_.resolution + 1)));
  }

  Point node_point(std::size_t i) const {
    return static_cast<double>(i) / static_cast<double>(opts_.resolution);
  }

  /// Grid node of x, or -1 when x is not a grid point.
  std::int64_t node_of(Point x) const {
    if (!(x >= 0.0 && x <= 1.0)) return -1;
    const double t = x * static_cast<double>(opts_.resolution);
    const double r = std::nearbyint(t);
    if (std::fabs(t - r) > 1e-9) return -1;
    return static_cast<std::int64_t>(r);
  }

 private:
  struct Unit {
    std::int64_t node;
    std::int64_t value;
  };

  Point label_at(std::int64_t units) const { return static_cast<double>(units) * unit_; }

  std::vector<Point> labels_between(std::int64_t lo, std::int64_t hi) const {
    std::vector<Point> out;
    for (std::int64_t v = lo; v <= hi; ++v) out.push_back(label_at(v));
    return out;
  }

  // Converts commitments to grid units and checks pairwise consistency, which
  // is sufficient for integer 1-Lipschitz paths with a bounded start.
  bool to_units(std::span<const Commitment> commitments, std::vector<Unit>& out) const {
    out.clear();
    for (const auto& c : commitments) {
      const auto node = node_of(c.instance);
      const auto value = detail::to_grid_unit(c.label, unit_);
      if (node < 0 || !value) return false;
      if (std::llabs(*value) > offset_bound_ + node) return false;
      for (const auto& o : out) {
        if (std::llabs(o.value - *value) > std::llabs(o.node - node)) return false;
      }
      out.push_back({node, *value});
    }
    return true;
  }

  std::pair<std::int64_t, std::int64_t> bounds(const std::vector<Unit>& cs, std::int64_t i) const {
    std::int64_t lo = -offset_bound_ - i;
    std::int64_t hi = offset_bound_ + i;
    for (const auto& c : cs) {
      const std::int64_t d = std::llabs(i - c.node);
      lo = std::max(lo, c.value - d);
      hi = std::min(hi, c.value + d);
    }
    return {lo, hi};
  }

  LipschitzOptions opts_;
  double unit_ = 0.0;
  std::int64_t offset_bound_ = 0;
  MetricSpace instances_ = MetricSpace::unit_interval(false);
  MetricSpace labels_ = MetricSpace::reals();
};

// ---------------------------------------------------------------------------

struct MonotoneOptions {
  std::size_t resolution = 4;
  /// Values lie in [-range, range] on a grid of step `unit`.
  double range = 4.0;
  double unit = 1.0;
};

/// Non-decreasing functions on the instance grid with values on a label grid.
class MonotoneClass final : public HypothesisClass {
 public:
  explicit MonotoneClass(MonotoneOptions opts = {}) : opts_(opts) {
    if (opts_.resolution == 0 || !(opts_.unit > 0.0) || !(opts_.range >= 0.0)) {
      throw ConfigError("monotone: resolution, unit and range must be positive");
    }
    auto a = detail::to_grid_unit(opts_.range, opts_.unit);
    if (!a) throw ConfigError("monotone: range must be a multiple of the unit");
    bound_ = *a;
  }

  std::string name() const override { return "monotone"; }
  const MetricSpace& instance_space() const override { return instances_; }
  const MetricSpace& label_space() const override { return labels_; }
  bool exact_labels() const override { return false; }

  ParamSpace params() const override {
    // Non-decreasing sequences of length G+1 over 2A+1 values.
    const std::uint64_t values = static_cast<std::uint64_t>(2 * bound_ + 1);
    const std::uint64_t len = opts_.resolution + 1;
    double count = 1.0;
    for (std::uint64_t i = 1; i <= len; ++i) {
      count = count * static_cast<double>(values - 1 + i) / static_cast<double>(i);
    }
    std::optional<std::uint64_t> size;
    if (count < 9.0e18) size = static_cast<std::uint64_t>(std::llround(count));
    return {ParamKind::box, opts_.resolution + 1, true, size};
  }

  bool in_domain(Point x) const override { return node_of(x) >= 0; }

  bool contains_param(const Param& theta) const override {
    if (theta.size() != opts_.resolution + 1) return false;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      if (std::llabs(theta[i]) > bound_) return false;
      if (i > 0 && theta[i] < theta[i - 1]) return false;
    }
    return true;
  }

  Point evaluate_unchecked(const Param& theta, Point x) const override {
    return static_cast<double>(theta[static_cast<std::size_t>(node_of(x))]) * opts_.unit;
  }

  std::vector<Point> label_candidates(Point) const override { return labels_between(-bound_, bound_); }

  std::optional<Param> witness(std::span<const Commitment> commitments) const override {
    std::vector<std::pair<std::int64_t, std::int64_t>> cs;
    if (!to_units(commitments, cs)) return std::nullopt;
    Param theta(opts_.resolution + 1);
    std::int64_t running = -bound_;
    for (std::size_t i = 0; i <= opts_.resolution; ++i) {
      for (const auto& [node, value] : cs) {
        if (node == static_cast<std::int64_t>(i)) running = std::max(running, value);
      }
      theta[i] = running;
    }
    return theta;
  }

  std::vector<Point> feasible(std::span<const Commitment> commitments, Point x) const override {
    std::vector<std::pair<std::int64_t, std::int64_t>> cs;
    if (!to_units(commitments, cs)) return {};
    const auto i = node_of(x);
    std::int64_t lo = -bound_, hi = bound_;
    for (const auto& [node, value] : cs) {
      if (node <= i) lo = std::max(lo, value);
      if (node >= i) hi = std::min(hi, value);
    }
    return labels_between(lo, hi);
  }

  std::vector<Point> instance_pool() const override {
    std::vector<Point> pool;
    for (std::size_t i = 0; i <= opts_.resolution; ++i) pool.push_back(node_point(i));
    return pool;
  }

  void for_each_param(const std::function<bool(const Param&)>& visit) const override {
    detail::enumeration_guard(params().grid_size, 10'000'000, name());
    Param theta(opts_.resolution + 1, -bound_);
    for (;;) {
      if (!visit(theta)) return;
      std::size_t pos = theta.size();
      while (pos > 0 && theta[pos - 1] == bound_) --pos;
      if (pos == 0) return;
      const std::int64_t v = theta[pos - 1] + 1;
      for (std::size_t i = pos - 1; i < theta.size(); ++i) theta[i] = v;
    }
  }

  Param random_param(Stream& rng) const override {
    Param theta(opts_.resolution + 1);
    std::int64_t v = rng.between(-bound_, 0);
    for (auto& t : theta) {
      t = v;
      if (v < bound_ && rng.coin()) ++v;
    }
    return theta;
  }

  Point random_instance(Stream& rng) const override {
    return node_point(static_cast<std::size_t>(rng.below(opts_.resolution + 1)));
  }

  Point node_point(std::size_t i) const {
    return static_cast<double>(i) / static_cast<double>(opts_.resolution);
  }

  std::int64_t node_of(Point x) const {
    if (!(x >= 0.0 && x <= 1.0)) return -1;
    const double t = x * static_cast<double>(opts_.resolution);
    const double r = std::nearbyint(t);
    if (std::fabs(t - r) > 1e-9) return -1;
    return static_cast<std::int64_t>(r);
  }

 private:
  bool to_units(std::span<const Commitment> commitments,
                std::vector<std::pair<std::int64_t, std::int64_t>>& out) const {
    out.clear();
    for (const auto& c : commitments) {
      const auto node = node_of(c.instance);
      const auto value = detail::to_grid_unit(c.label, opts_.unit);
      if (node < 0 || !value || std::llabs(*value) > bound_) return false;
      for (const auto& [n, v] : out) {
        if ((n <= node && v > *value) || (n >= node && v < *value)) return false;
      }
      out.emplace_back(node, *value);
    }
    return true;
  }

  std::vector<Point> labels_between(std::int64_t lo, std::int64_t hi) const {
    std::vector<Point> out;
    for (std::int64_t v = lo; v <= hi; ++v) out.push_back(static_cast<double>(v) * opts_.unit);
    return out;
  }

  MonotoneOptions opts_;
  std::int64_t bound_ = 0;
  MetricSpace instances_ = MetricSpace::unit_interval(false);
  MetricSpace labels_ = MetricSpace::reals();
};

// ---------------------------------------------------------------------------

struct BinaryDigitOptions {
  /// Parameters n < 2^bit_cap; digits beyond the cap are zero.
  std::size_t bit_cap = 62;
  std::size_t pool_depth = 12;
};

/// h(n, x_k) = (k-th binary digit of n) * k with instances x_k encoded as k.
class BinaryDigitClass final : public HypothesisClass {
 public:
  explicit BinaryDigitClass(BinaryDigitOptions opts = {}) : opts_(opts) {
    if (opts_.bit_cap == 0 || opts_.bit_cap > 62) throw ConfigError("binary-digit: bit cap in [1, 62]");
  }

  std::string name() const override { return "binary-digit"; }
  const MetricSpace& instance_space() const override { return naturals_; }
  const MetricSpace& label_space() const override { return naturals_; }

  ParamSpace params() const override {
    return {ParamKind::nonneg_integers, 1, false, std::uint64_t{1} << opts_.bit_cap};
  }

  bool in_domain(Point x) const override { return naturals_.contains(x) && x >= 1.0; }

  bool contains_param(const Param& theta) const override {
    return theta.size() == 1 && theta[0] >= 0 &&
           static_cast<std::uint64_t>(theta[0]) < (std::uint64_t{1} << opts_.bit_cap);
  }

  Point evaluate_unchecked(const Param& theta, Point x) const override {
    const auto k = static_cast<std::uint64_t>(x);
    if (k > opts_.bit_cap) return 0.0;
    const auto n = static_cast<std::uint64_t>(theta[0]);
    return ((n >> (k - 1)) & 1) ? x : 0.0;
  }

  std::vector<Point> label_candidates(Point x) const override {
    if (x > static_cast<double>(opts_.bit_cap)) return {0.0};
    return {0.0, x};
  }

  std::optional<Param> witness(std::span<const Commitment> commitments) const override {
    std::uint64_t ones = 0, zeros = 0;
    for (const auto& c : commitments) {
      if (!in_domain(c.instance)) return std::nullopt;
      const auto k = static_cast<std::uint64_t>(c.instance);
      if (c.label == 0.0) {
        if (k <= opts_.bit_cap) zeros |= std::uint64_t{1} << (k - 1);
      } else if (c.label == c.instance && k <= opts_.bit_cap) {
        ones |= std::uint64_t{1} << (k - 1);
      } else {
        return std::nullopt;
      }
    }
    if (ones & zeros) return std::nullopt;
    return Param{static_cast<std::int64_t>(ones)};
  }

  std::vector<Point> feasible(std::span<const Commitment> commitments, Point x) const override {
    for (const auto& c : commitments) {
      if (c.instance == x) return {c.label};
    }
    return label_candidates(x);
  }

  std::vector<Point> instance_pool() const override {
    std::vector<Point> pool;
    for (std::size_t k = 1; k <= opts_.pool_depth; ++k) pool.push_back(static_cast<double>(k));
    return pool;
  }

  void for_each_param(const std::function<bool(const Param&)>& visit) const override {
    detail::enumeration_guard(params().grid_size, std::uint64_t{1} << 24, name());
    for (std::uint64_t n = 0; n < (std::uint64_t{1} << opts_.bit_cap); ++n) {
      if (!visit(Param{static_cast<std::int64_t>(n)})) return;
    }
  }

  Param random_param(Stream& rng) const override {
    const std::size_t bits = std::min(opts_.bit_cap, opts_.pool_depth);
    return Param{static_cast<std::int64_t>(rng.below(std::uint64_t{1} << bits))};
  }

  Point random_instance(Stream& rng) const override {
    return static_cast<double>(detail::inverse_cube_index(rng, opts_.pool_depth));
  }

 private:
  BinaryDigitOptions opts_;
  MetricSpace naturals_ = MetricSpace::naturals();
};

// ---------------------------------------------------------------------------

struct FiniteSupportOptions {
  /// Instances 1..support.
  std::size_t support = 8;
  /// Labels 0..label_cap.
  std::size_t label_cap = 8;
};

/// Functions on {1, ..., P} with labels in {0, ..., C}; zero off the support.
class FiniteSupportClass final : public HypothesisClass {
 public:
  explicit FiniteSupportClass(FiniteSupportOptions opts = {}) : opts_(opts) {
    if (opts_.support == 0) throw ConfigError("finite-support: support must be positive");
  }

  std::string name() const override { return "finite-support"; }
  const MetricSpace& instance_space() const override { return naturals_; }
  const MetricSpace& label_space() const override { return naturals_; }

  ParamSpace params() const override {
    double count = std::pow(static_cast<double>(opts_.label_cap + 1), static_cast<double>(opts_.support));
    std::optional<std::uint64_t> size;
    if (count < 9.0e18) size = static_cast<std::uint64_t>(count);
    return {ParamKind::finite_set, opts_.support, true, size};
  }

  bool in_domain(Point x) const override {
    return naturals_.contains(x) && x >= 1.0 && x <= static_cast<double>(opts_.support);
  }

  bool contains_param(const Param& theta) const override {
    return theta.size() == opts_.support &&
           std::all_of(theta.begin(), theta.end(), [&](auto v) {
             return v >= 0 && v <= static_cast<std::int64_t>(opts_.label_cap);
           });
  }

  Point evaluate_unchecked(const Param& theta, Point x) const override {
    return static_cast<double>(theta[static_cast<std::size_t>(x) - 1]);
  }

  std::vector<Point> label_candidates(Point) const override {
    std::vector<Point> out;
    for (std::size_t v = 0; v <= opts_.label_cap; ++v) out.push_back(static_cast<double>(v));
    return out;
  }

  std::optional<Param> witness(std::span<const Commitment> commitments) const override {
    Param theta(opts_.support, 0);
    std::vector<bool> fixed(opts_.support, false);
    for (const auto& c : commitments) {
      if (!in_domain(c.instance) || !naturals_.contains(c.label) ||
          c.label > static_cast<double>(opts_.label_cap)) {
        return std::nullopt;
      }
      const auto i = static_cast<std::size_t>(c.instance) - 1;
      const auto v = static_cast<std::int64_t>(c.label);
      if (fixed[i] && theta[i] != v) return std::nullopt;
      fixed[i] = true;
      theta[i] = v;
    }
    return theta;
  }

  std::vector<Point> feasible(std::span<const Commitment> commitments, Point x) const override {
    for (const auto& c : commitments) {
      if (c.instance == x) return {c.label};
    }
    return label_candidates(x);
  }

  std::vector<Point> instance_pool() const override {
    std::vector<Point> pool;
    for (std::size_t k = 1; k <= opts_.support; ++k) pool.push_back(static_cast<double>(k));
    return pool;
  }

  void for_each_param(const std::function<bool(const Param&)>& visit) const override {
    detail::enumeration_guard(params().grid_size, 10'000'000, name());
    Param theta(opts_.support, 0);
    for (;;) {
      if (!visit(theta)) return;
      std::size_t pos = theta.size();
      while (pos > 0 && theta[pos - 1] == static_cast<std::int64_t>(opts_.label_cap)) theta[--pos] = 0;
      if (pos == 0) return;
      ++theta[pos - 1];
    }
  }

  Param random_param(Stream& rng) const override {
    Param theta(opts_.support);
    for (auto& v : theta) v = rng.between(0, static_cast<std::int64_t>(opts_.label_cap));
    return theta;
  }

  Point random_instance(Stream& rng) const override {
    return static_cast<double>(detail::inverse_cube_index(rng, opts_.support));
  }

 private:
  FiniteSupportOptions opts_;
  MetricSpace naturals_ = MetricSpace::naturals();
};

// ---------------------------------------------------------------------------

/// Explicit finite class: rows[r][i] is the label of hypothesis r at instances[i].
class FiniteTableClass final : public HypothesisClass {
 public:
  FiniteTableClass(std::string name, std::vector<Point> instances,
                   std::vector<std::vector<Point>> rows,
                   MetricSpace instance_space = MetricSpace::reals(),
                   MetricSpace label_space = MetricSpace::reals())
      : name_(std::move(name)),
        instances_(std::move(instances)),
        rows_(std::move(rows)),
        instance_space_(instance_space),
        label_space_(label_space) {
    for (const auto& row : rows_) {
      if (row.size() != instances_.size()) throw ConfigError("finite table: ragged rows");
    }
    if (rows_.empty()) throw ConfigError("finite table: no hypotheses");
  }

  std::string name() const override { return name_; }
  const MetricSpace& instance_space() const override { return instance_space_; }
  const MetricSpace& label_space() const override { return label_space_; }

  ParamSpace params() const override {
    return {ParamKind::finite_set, 1, true, rows_.size()};
  }

  bool in_domain(Point x) const override { return column(x) >= 0; }

  bool contains_param(const Param& theta) const override {
    return theta.size() == 1 && theta[0] >= 0 && static_cast<std::size_t>(theta[0]) < rows_.size();
  }

  Point evaluate_unchecked(const Param& theta, Point x) const override {
    return rows_[static_cast<std::size_t>(theta[0])][static_cast<std::size_t>(column(x))];
  }

  std::vector<Point> label_candidates(Point x) const override {
    std::vector<Point> out;
    const auto c = static_cast<std::size_t>(column(x));
    for (const auto& row : rows_) out.push_back(row[c]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::optional<Param> witness(std::span<const Commitment> commitments) const override {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      bool ok = true;
      for (const auto& c : commitments) {
        const auto col = column(c.instance);
        if (col < 0 || rows_[r][static_cast<std::size_t>(col)] != c.label) {
          ok = false;
          break;
        }
      }
      if (ok) return Param{static_cast<std::int64_t>(r)};
    }
    return std::nullopt;
  }

  std::vector<Point> instance_pool() const override { return instances_; }

  void for_each_param(const std::function<bool(const Param&)>& visit) const override {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (!visit(Param{static_cast<std::int64_t>(r)})) return;
    }
  }

  Param random_param(Stream& rng) const override {
    return Param{static_cast<std::int64_t>(rng.below(rows_.size()))};
  }

  Point random_instance(Stream& rng) const override {
    return instances_[static_cast<std::size_t>(rng.below(instances_.size()))];
  }

 private:
  std::int64_t column(Point x) const {
    for (std::size_t i = 0; i < instances_.size(); ++i) {
      if (instances_[i] == x) return static_cast<std::int64_t>(i);
    }
    return -1;
  }

  std::string name_;
  std::vector<Point> instances_;
  std::vector<std::vector<Point>> rows_;
  MetricSpace instance_space_;
  MetricSpace label_space_;
};

// ---------------------------------------------------------------------------

/// Multiplies every label of an inner class by a positive factor.
class ScaledLabelsClass final : public HypothesisClass {
 public:
  ScaledLabelsClass(std::shared_ptr<const HypothesisClass> inner, double factor)
      : inner_(std::move(inner)), factor_(factor) {
    if (!(factor_ > 0.0)) throw ConfigError("label scale must be positive");
  }

  std::string name() const override { return inner_->name() + "-scaled"; }
  const MetricSpace& instance_space() const override { return inner_->instance_space(); }
  const MetricSpace& label_space() const override { return reals_; }
  ParamSpace params() const override { return inner_->params(); }
  bool exact_labels() const override { return inner_->exact_labels(); }
  bool in_domain(Point x) const override { return inner_->in_domain(x); }
  bool contains_param(const Param& theta) const override { return inner_->contains_param(theta); }

  Point evaluate_unchecked(const Param& theta, Point x) const override {
    return factor_ * inner_->evaluate_unchecked(theta, x);
  }

  std::vector<Point> label_candidates(Point x) const override { return scale(inner_->label_candidates(x)); }

  std::optional<Param> witness(std::span<const Commitment> commitments) const override {
    return inner_->witness(unscale(commitments));
  }

  std::vector<Point> feasible(std::span<const Commitment> commitments, Point x) const override {
    return scale(inner_->feasible(unscale(commitments), x));
  }

  std::vector<Point> instance_pool() const override { return inner_->instance_pool(); }

  void for_each_param(const std::function<bool(const Param&)>& visit) const override {
    inner_->for_each_param(visit);
  }

  Param random_param(Stream& rng) const override { return inner_->random_param(rng); }
  Point random_instance(Stream& rng) const override { return inner_->random_instance(rng); }

 private:
  std::vector<Point> scale(std::vector<Point> labels) const {
    for (auto& y : labels) y *= factor_;
    return labels;
  }

  std::vector<Commitment> unscale(std::span<const Commitment> commitments) const {
    std::vector<Commitment> out(commitments.begin(), commitments.end());
    for (auto& c : out) c.label /= factor_;
    return out;
  }

  std::shared_ptr<const HypothesisClass> inner_;
  double factor_;
  MetricSpace reals_ = MetricSpace::reals();
};

// ---------------------------------------------------------------------------

/// Registry options; zero means "class default".
struct ClassOptions {
  std::size_t resolution = 0;
  double lipschitz = 1.0;
  double range = 0.0;
  std::size_t depth_cap = 0;
  std::size_t support = 0;
  std::size_t pool_depth = 0;
  std::size_t label_cap = 0;
};

inline std::vector<std::string> class_names() {
  return {"counterexample", "lipschitz", "monotone", "binary-digit", "finite-support"};
}

inline std::shared_ptr<const HypothesisClass> make_class(std::string_view name,
                                                         const ClassOptions& o = {}) {
  auto pick = [](std::size_t v, std::size_t fallback) { return v ? v : fallback; };
  if (name == "counterexample") {
    CounterexampleOptions c;
    c.depth_cap = pick(o.depth_cap, c.depth_cap);
    c.support = o.support;
    c.pool_depth = pick(o.pool_depth, c.pool_depth);
    return std::make_shared<CounterexampleClass>(c);
  }
  if (name == "lipschitz") {
    LipschitzOptions c;
    c.lipschitz = o.lipschitz;
    c.resolution = pick(o.resolution, c.resolution);
    if (o.range > 0.0) c.range = o.range;
    return std::make_shared<LipschitzClass>(c);
  }
  if (name == "monotone") {
    MonotoneOptions c;
    c.resolution = pick(o.resolution, c.resolution);
    if (o.range > 0.0) c.range = o.range;
    return std::make_shared<MonotoneClass>(c);
  }
  if (name == "binary-digit") {
    BinaryDigitOptions c;
    c.bit_cap = pick(o.depth_cap, c.bit_cap);
    c.pool_depth = pick(o.pool_depth, c.pool_depth);
    return std::make_shared<BinaryDigitClass>(c);
  }
  if (name == "finite-support") {
    FiniteSupportOptions c;
    c.support = pick(o.support, c.support);
    c.label_cap = pick(o.label_cap, c.label_cap);
    return std::make_shared<FiniteSupportClass>(c);
  }
  throw ConfigError("unknown class: " + std::string(name));
}

}  // namespace unigap
