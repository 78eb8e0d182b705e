#pragma once

// Computable metric spaces used for instances and labels.
//
// Every space here is a subset of the real line under |a - b|, which lets
// the rest of the library reason about label sets through their extremes.
// Points are plain doubles; membership is checked by the owning space.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "unigap/error.hpp"

namespace unigap {

using Point = double;

/// Tolerance for equality of real-valued points where no exact contract holds.
inline constexpr double kRealTolerance = 1e-12;

enum class SpaceKind { unit_interval_rho, naturals_l1, reals_l1 };

inline std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::unit_interval_rho: return "unit_interval_rho";
    case SpaceKind::naturals_l1: return "naturals_l1";
    case SpaceKind::reals_l1: return "reals_l1";
  }
  return "unknown";
}

namespace detail {

// Cumulative count of the dyadic real enumeration through stage s: 2*4^s + 1.
constexpr std::uint64_t dyadic_stage_total(unsigned s) {
  return 2 * (std::uint64_t{1} << (2 * s)) + 1;
}

inline constexpr unsigned kMaxDyadicStage = 31;

inline bool is_integral(double v) { return std::isfinite(v) && std::floor(v) == v; }

}  // namespace detail

/// A metric space on a subset of the real line with a fixed dense enumeration.
///
/// Dense enumerations (1-based):
///  - naturals_l1: q_j = j - 1.
///  - reals_l1: stage 0 lists 0, 1, -1; stage s >= 1 lists every multiple of
///    2^{-s} with magnitude at most 2^s that did not appear earlier, by
///    increasing magnitude, positive before negative. This begins
///    0, 1, -1, 1/2, -1/2, 3/2, -3/2, 2, -2, 1/4, ...
///  - unit_interval_rho: 0, 1, then the odd multiples of 2^{-l} for
///    l = 1, 2, ... in increasing order (1/2, 1/4, 3/4, 1/8, ...).
class MetricSpace {
 public:
  static MetricSpace unit_interval(bool open = false) {
    return MetricSpace(SpaceKind::unit_interval_rho, open);
  }
  static MetricSpace naturals() { return MetricSpace(SpaceKind::naturals_l1, false); }
  static MetricSpace reals() { return MetricSpace(SpaceKind::reals_l1, false); }

  SpaceKind kind() const { return kind_; }
  bool open() const { return open_; }

  bool contains(Point p) const {
    if (!std::isfinite(p)) return false;
    switch (kind_) {
      case SpaceKind::unit_interval_rho:
        return open_ ? (p > 0.0 && p < 1.0) : (p >= 0.0 && p <= 1.0);
      case SpaceKind::naturals_l1:
        return p >= 0.0 && detail::is_integral(p);
      case SpaceKind::reals_l1:
        return true;
    }
    return false;
  }

  double distance(Point a, Point b) const {
    if (!contains(a) || !contains(b)) {
      throw DomainError("point outside " + to_string(kind_));
    }
    return std::fabs(a - b);
  }

  Point dense_point(std::uint64_t j) const {
    if (j == 0) throw DomainError("dense enumeration is 1-based");
    switch (kind_) {
      case SpaceKind::naturals_l1:
        return static_cast<double>(j - 1);
      case SpaceKind::reals_l1:
        return dyadic_real(j);
      case SpaceKind::unit_interval_rho:
        return dyadic_unit(j);
    }
    return 0.0;
  }

  /// Position of p in the dense enumeration, if p is ever enumerated.
  std::optional<std::uint64_t> dense_index(Point p) const {
    if (!contains(p)) return std::nullopt;
    switch (kind_) {
      case SpaceKind::naturals_l1:
        if (p >= 9.0e15) return std::nullopt;
        return static_cast<std::uint64_t>(p) + 1;
      case SpaceKind::reals_l1:
        return dyadic_real_index(p);
      case SpaceKind::unit_interval_rho:
        return dyadic_unit_index(p);
    }
    return std::nullopt;
  }

  friend bool operator==(const MetricSpace&, const MetricSpace&) = default;

 private:
  MetricSpace(SpaceKind kind, bool open) : kind_(kind), open_(open) {}

  static Point dyadic_real(std::uint64_t j) {
    if (j <= 3) {
      constexpr double base[] = {0.0, 1.0, -1.0};
      return base[j - 1];
    }
    unsigned s = 1;
    while (j > detail::dyadic_stage_total(s)) {
      if (++s > detail::kMaxDyadicStage) throw DomainError("dense index too large");
    }
    const std::uint64_t offset = j - detail::dyadic_stage_total(s - 1) - 1;
    const std::uint64_t pos = offset / 2;
    const double sign = (offset % 2 == 0) ? 1.0 : -1.0;
    const std::uint64_t odd_count = std::uint64_t{1} << (2 * s - 2);
    const std::uint64_t t = pos < odd_count
                                ? 2 * pos + 1
                                : (std::uint64_t{1} << (2 * s - 1)) + 1 + (pos - odd_count);
    return sign * std::ldexp(static_cast<double>(t), -static_cast<int>(s));
  }

  static std::optional<std::uint64_t> dyadic_real_index(Point p) {
    if (p == 0.0) return 1;
    if (p == 1.0) return 2;
    if (p == -1.0) return 3;
    const double mag = std::fabs(p);
    for (unsigned s = 1; s <= detail::kMaxDyadicStage; ++s) {
      const double scaled = std::ldexp(mag, static_cast<int>(s));
      if (!detail::is_integral(scaled) || mag > std::ldexp(1.0, static_cast<int>(s))) continue;
      const auto t = static_cast<std::uint64_t>(scaled);
      const std::uint64_t half = std::uint64_t{1} << (2 * s - 1);
      const std::uint64_t pos = t <= half ? (t - 1) / 2
                                          : (std::uint64_t{1} << (2 * s - 2)) + (t - half - 1);
      return detail::dyadic_stage_total(s - 1) + 1 + 2 * pos + (p < 0 ? 1 : 0);
    }
    return std::nullopt;
  }

  static Point dyadic_unit(std::uint64_t j) {
    if (j == 1) return 0.0;
    if (j == 2) return 1.0;
    const std::uint64_t p = j - 2;
    unsigned level = 0;
    while ((std::uint64_t{1} << (level + 1)) <= p) ++level;
    const std::uint64_t i = p - (std::uint64_t{1} << level);
    return std::ldexp(static_cast<double>(2 * i + 1), -static_cast<int>(level + 1));
  }

  static std::optional<std::uint64_t> dyadic_unit_index(Point p) {
    if (p == 0.0) return 1;
    if (p == 1.0) return 2;
    for (unsigned level = 1; level <= 62; ++level) {
      const double scaled = std::ldexp(p, static_cast<int>(level));
      if (!detail::is_integral(scaled)) continue;
      const auto odd = static_cast<std::uint64_t>(scaled);
      return 2 + (std::uint64_t{1} << (level - 1)) + (odd - 1) / 2;
    }
    return std::nullopt;
  }

  SpaceKind kind_;
  bool open_;
};

inline double distance(const MetricSpace& space, Point a, Point b) {
  return space.distance(a, b);
}

inline Point dense_point(const MetricSpace& space, std::uint64_t j) {
  return space.dense_point(j);
}

/// Index k of the dyadic interval I_k = (2^{-k}, 2^{-(k-1)}) containing x.
inline int interval_index(Point x) {
  if (!(x > 0.0 && x < 1.0)) throw DomainError("interval_index needs 0 < x < 1");
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);
  if (mantissa == 0.5) throw EndpointError("x is a dyadic endpoint");
  return 1 - exponent;
}

inline double interval_lower(int k) { return std::ldexp(1.0, -k); }
inline double interval_upper(int k) { return std::ldexp(1.0, 1 - k); }
inline double interval_width(int k) { return std::ldexp(1.0, -k); }
inline double interval_midpoint(int k) { return std::ldexp(3.0, -(k + 1)); }

}  // namespace unigap
