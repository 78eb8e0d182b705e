#pragma once

// Parameterized hypothesis classes H = { h(theta, .) : theta in Theta }.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unigap/error.hpp"
#include "unigap/history.hpp"
#include "unigap/metric.hpp"
#include "unigap/rng.hpp"

namespace unigap {

/// Parameters are integer coordinates on a class-specific grid: bits for
/// product spaces, grid units for Lipschitz and monotone functions, or a
/// plain integer index.
using Param = std::vector<std::int64_t>;

enum class ParamKind { binary_product, box, finite_set, nonneg_integers };

inline std::string to_string(ParamKind kind) {
  switch (kind) {
    case ParamKind::binary_product: return "binary_product";
    case ParamKind::box: return "box";
    case ParamKind::finite_set: return "finite_set";
    case ParamKind::nonneg_integers: return "nonneg_integers";
  }
  return "unknown";
}

struct ParamSpace {
  ParamKind kind = ParamKind::finite_set;
  std::size_t dims = 0;
  bool compact = true;
  /// Number of representative grid points, when it fits in 64 bits.
  std::optional<std::uint64_t> grid_size;
};

/// Interface every class implements. Implementations exploit their structure
/// for consistency and feasible-label queries; for_each_param gives the
/// brute-force view of the same grid (usable only on small instances).
class HypothesisClass {
 public:
  virtual ~HypothesisClass() = default;

  virtual std::string name() const = 0;
  virtual const MetricSpace& instance_space() const = 0;
  virtual const MetricSpace& label_space() const = 0;
  virtual ParamSpace params() const = 0;

  virtual bool in_domain(Point x) const = 0;
  virtual bool contains_param(const Param& theta) const = 0;

  /// h(theta, x) for x in the domain and theta in the parameter space.
  virtual Point evaluate_unchecked(const Param& theta, Point x) const = 0;

  /// Finite label menu at x under the empty history, ascending.
  virtual std::vector<Point> label_candidates(Point x) const = 0;

  /// First parameter in grid iteration order consistent with every
  /// commitment, or nullopt.
  virtual std::optional<Param> witness(std::span<const Commitment> commitments) const = 0;

  /// V(x) given consistent commitments, ascending. The default tests every
  /// candidate label with a witness query.
  virtual std::vector<Point> feasible(std::span<const Commitment> commitments, Point x) const {
    std::vector<Commitment> extended(commitments.begin(), commitments.end());
    extended.push_back({x, 0.0});
    std::vector<Point> out;
    for (Point y : label_candidates(x)) {
      extended.back().label = y;
      if (witness(extended)) out.push_back(y);
    }
    return out;
  }

  /// Smallest and largest label of feasible(), or nullopt when empty.
  virtual std::optional<std::pair<Point, Point>> feasible_extent(
      std::span<const Commitment> commitments, Point x) const {
    auto labels = feasible(commitments, x);
    if (labels.empty()) return std::nullopt;
    return std::pair{labels.front(), labels.back()};
  }

  /// Default adversary move pool (instances), deterministic order.
  virtual std::vector<Point> instance_pool() const = 0;

  /// Visits the representative grid in iteration order until visit returns
  /// false. Throws Error when the grid is too large to enumerate.
  virtual void for_each_param(const std::function<bool(const Param&)>& visit) const = 0;

  /// True when feasible() is exact rather than grid-approximate.
  virtual bool exact_labels() const { return true; }

  /// Testbed generators: a random target parameter and a draw from the
  /// class's reference instance distribution.
  virtual Param random_param(Stream& rng) const = 0;
  virtual Point random_instance(Stream& rng) const = 0;
};

inline Point evaluate(const HypothesisClass& cls, const Param& theta, Point x) {
  if (!cls.in_domain(x)) throw DomainError(cls.name() + ": instance outside the domain");
  if (!cls.contains_param(theta)) throw DomainError(cls.name() + ": parameter outside Theta");
  return cls.evaluate_unchecked(theta, x);
}

struct ConsistentRegion {
  std::optional<Param> witness;
  bool nonempty() const { return witness.has_value(); }
};

inline ConsistentRegion consistent_region(const HypothesisClass& cls,
                                          std::span<const Commitment> commitments) {
  return {cls.witness(commitments)};
}

inline ConsistentRegion consistent_region(const HypothesisClass& cls, const History& history) {
  return consistent_region(cls, history.commitments());
}

inline std::vector<Point> feasible_labels(const HypothesisClass& cls,
                                          std::span<const Commitment> commitments, Point x) {
  if (!cls.in_domain(x)) throw DomainError(cls.name() + ": instance outside the domain");
  if (!cls.witness(commitments)) throw InconsistentHistory(cls.name() + ": no consistent hypothesis");
  return cls.feasible(commitments, x);
}

inline std::vector<Point> feasible_labels(const HypothesisClass& cls, const History& history,
                                          Point x) {
  return feasible_labels(cls, history.commitments(), x);
}

}  // namespace unigap
