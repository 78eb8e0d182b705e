#pragma once

// Gap trees: depth-indexed binary trees of (instance, label pair) nodes,
// generated on demand from the path prefix.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unigap/classes.hpp"
#include "unigap/history.hpp"
#include "unigap/hypothesis.hpp"
#include "unigap/rng.hpp"
#include "unigap/schedule.hpp"

namespace unigap {

struct TreeNode {
  Point instance = 0.0;
  Point first = 0.0;
  Point second = 0.0;

  Move move() const { return {instance, first, second}; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class GapTree {
 public:
  /// Node at depth (1-based) after the choices in prefix (size depth - 1),
  /// or nullopt when the tree ends there.
  using Generator =
      std::function<std::optional<TreeNode>(std::size_t depth, std::span<const Choice> prefix)>;

  GapTree(std::string name, std::size_t max_depth, GapSchedule schedule, Generator generator)
      : name_(std::move(name)),
        max_depth_(max_depth),
        schedule_(std::move(schedule)),
        generator_(std::make_shared<const Generator>(std::move(generator))) {}

  const std::string& name() const { return name_; }
  std::size_t max_depth() const { return max_depth_; }
  const GapSchedule& schedule() const { return schedule_; }

  std::optional<TreeNode> node(std::size_t depth, std::span<const Choice> prefix) const {
    if (depth == 0 || depth > max_depth_ || prefix.size() + 1 != depth) return std::nullopt;
    if (!overrides_.empty()) {
      auto it = overrides_.find(key(prefix));
      if (it != overrides_.end()) return it->second;
    }
    return (*generator_)(depth, prefix);
  }

  /// Copy of the tree with one node replaced.
  GapTree with_node(std::span<const Choice> prefix, TreeNode replacement) const {
    GapTree out = *this;
    out.overrides_[key(prefix)] = replacement;
    return out;
  }

 private:
  static std::vector<int> key(std::span<const Choice> prefix) {
    std::vector<int> k;
    k.reserve(prefix.size());
    for (Choice c : prefix) k.push_back(to_index(c));
    return k;
  }

  std::string name_;
  std::size_t max_depth_;
  GapSchedule schedule_;
  std::shared_ptr<const Generator> generator_;
  std::map<std::vector<int>, TreeNode> overrides_;
};

/// Depth-k node at the midpoint of I_k offering (0, 2^{2k+1}).
inline GapTree counterexample_tree(std::size_t max_depth = 511) {
  if (max_depth == 0 || max_depth > 511) throw ConfigError("counterexample tree depth must be in [1, 511]");
  return GapTree("counterexample", max_depth, GapSchedule::counterexample(),
                 [](std::size_t depth, std::span<const Choice>) -> std::optional<TreeNode> {
                   const int k = static_cast<int>(depth);
                   return TreeNode{interval_midpoint(k), 0.0, CounterexampleClass::gap_label(depth)};
                 });
}

/// Depth-k node (x_k, 0, k): choice 2 sets the k-th binary digit.
inline GapTree binary_digit_tree(std::size_t max_depth = 62) {
  if (max_depth == 0 || max_depth > 62) throw ConfigError("binary-digit tree depth must be in [1, 62]");
  return GapTree("binary-digit", max_depth, GapSchedule::identity(),
                 [](std::size_t depth, std::span<const Choice>) -> std::optional<TreeNode> {
                   const auto k = static_cast<double>(depth);
                   return TreeNode{k, 0.0, k};
                 });
}

/// Re-indexes a tree so that depth m carries gap at least target(m): depth m
/// maps to the first unused original depth whose declared gap reaches
/// target(m). Skipped levels follow branch 1.
inline GapTree skip_levels(const GapTree& tree, const GapSchedule& target) {
  std::vector<std::size_t> kept;
  std::size_t d = 0;
  for (std::size_t m = 1;; ++m) {
    const double need = target(m);
    ++d;
    while (d <= tree.max_depth() && tree.schedule()(d) < need) ++d;
    if (d > tree.max_depth()) break;
    kept.push_back(d);
  }
  if (kept.empty()) throw ConfigError("skip_levels: no original level meets the first target gap");
  auto base = std::make_shared<const GapTree>(tree);
  auto map = std::make_shared<const std::vector<std::size_t>>(kept);
  return GapTree(tree.name() + "/skip", kept.size(), target,
                 [base, map](std::size_t depth, std::span<const Choice> prefix) -> std::optional<TreeNode> {
                   const std::size_t original = (*map)[depth - 1];
                   std::vector<Choice> path(original - 1, Choice::first);
                   for (std::size_t i = 0; i + 1 < depth; ++i) path[(*map)[i] - 1] = prefix[i];
                   return base->node(original, path);
                 });
}

/// Commitment history of a root path truncated at depth.
inline History path_history(const GapTree& tree, std::span<const Choice> path, std::size_t depth) {
  if (depth > path.size()) throw DomainError("path shorter than requested depth");
  History h;
  for (std::size_t k = 1; k <= depth; ++k) {
    auto n = tree.node(k, path.first(k - 1));
    if (!n) throw DomainError(tree.name() + ": tree ends before depth " + std::to_string(k));
    h.push(n->move(), path[k - 1]);
  }
  return h;
}

struct BridgingLevel {
  std::size_t depth = 0;
  bool nonempty = false;
  std::optional<Param> witness;
};

/// For k = 1..depth: is the set of parameters realizing the first k path
/// commitments nonempty, and what is its first witness.
inline std::vector<BridgingLevel> bridging_audit(const HypothesisClass& cls, const GapTree& tree,
                                                 std::span<const Choice> path, std::size_t depth) {
  const History full = path_history(tree, path, depth);
  std::vector<BridgingLevel> out;
  for (std::size_t k = 1; k <= depth; ++k) {
    auto w = cls.witness(full.commitments().first(k));
    out.push_back({k, w.has_value(), w});
  }
  return out;
}

enum class TreeFailureKind { missing_node, gap, unrealizable };

inline std::string to_string(TreeFailureKind kind) {
  switch (kind) {
    case TreeFailureKind::missing_node: return "missing_node";
    case TreeFailureKind::gap: return "gap";
    case TreeFailureKind::unrealizable: return "unrealizable";
  }
  return "unknown";
}

struct TreeFailure {
  TreeFailureKind kind;
  std::size_t depth = 0;
  std::vector<Choice> path;
};

struct LevelSummary {
  std::size_t depth = 0;
  double required_gap = 0.0;
  /// Smallest node gap seen at this depth.
  double min_gap = 0.0;
  std::size_t nodes_checked = 0;
  bool ok = true;
};

struct TreeReport {
  bool valid = true;
  bool exhaustive = true;
  std::size_t paths_checked = 0;
  std::optional<TreeFailure> failure;
  std::vector<LevelSummary> levels;
  /// First witness per checked path, in path order (exhaustive runs only).
  std::vector<Param> witnesses;
};

struct ValidateOptions {
  /// Depths above this are checked on sampled paths.
  std::size_t exhaustive_depth = 12;
  std::size_t sampled_paths = 256;
  std::uint64_t seed = 1;
};

/// Checks gap certificates on every node up to depth and realizability of
/// every root path of length depth (or a seeded sample of paths).
inline TreeReport validate_tree(const HypothesisClass& cls, const GapTree& tree, std::size_t depth,
                                const ValidateOptions& opts = {}) {
  TreeReport report;
  report.exhaustive = depth <= opts.exhaustive_depth;
  report.levels.resize(depth);
  for (std::size_t k = 1; k <= depth; ++k) {
    report.levels[k - 1].depth = k;
    report.levels[k - 1].required_gap = tree.schedule()(k);
    report.levels[k - 1].min_gap = std::numeric_limits<double>::infinity();
  }

  auto fail = [&](TreeFailureKind kind, std::size_t k, std::span<const Choice> path) {
    report.valid = false;
    if (k >= 1) report.levels[k - 1].ok = false;
    if (!report.failure) report.failure = TreeFailure{kind, k, {path.begin(), path.end()}};
  };

  std::map<std::vector<int>, bool> seen_nodes;
  auto check_path = [&](const std::vector<Choice>& path) {
    History h;
    for (std::size_t k = 1; k <= depth; ++k) {
      auto prefix = std::span<const Choice>(path).first(k - 1);
      auto n = tree.node(k, prefix);
      if (!n) {
        fail(TreeFailureKind::missing_node, k, path);
        return;
      }
      std::vector<int> id;
      for (Choice c : prefix) id.push_back(to_index(c));
      if (seen_nodes.emplace(id, true).second) {
        auto& level = report.levels[k - 1];
        const double gap = std::fabs(n->first - n->second);
        level.min_gap = std::min(level.min_gap, gap);
        ++level.nodes_checked;
        if (gap < level.required_gap) fail(TreeFailureKind::gap, k, path);
      }
      h.push(n->move(), path[k - 1]);
    }
    auto w = cls.witness(h.commitments());
    if (!w) {
      fail(TreeFailureKind::unrealizable, depth, path);
    } else if (report.exhaustive) {
      report.witnesses.push_back(*w);
    }
    ++report.paths_checked;
  };

  std::vector<Choice> path(depth, Choice::first);
  if (report.exhaustive) {
    const std::uint64_t total = std::uint64_t{1} << depth;
    for (std::uint64_t v = 0; v < total; ++v) {
      for (std::size_t i = 0; i < depth; ++i) path[i] = choice_from_bit(static_cast<int>((v >> (depth - 1 - i)) & 1));
      check_path(path);
    }
  } else {
    Stream rng(derive_seed(opts.seed, "validate-tree"));
    for (std::size_t p = 0; p < opts.sampled_paths; ++p) {
      for (auto& c : path) c = choice_from_bit(rng.coin());
      check_path(path);
    }
  }
  for (auto& level : report.levels) {
    if (level.nodes_checked == 0) level.min_gap = 0.0;
  }
  return report;
}

}  // namespace unigap
