#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "unigap/classes.hpp"
#include "unigap/tree.hpp"

using namespace unigap;

namespace {

std::vector<Choice> path_from_bits(std::uint64_t v, std::size_t depth) {
  std::vector<Choice> path(depth);
  for (std::size_t i = 0; i < depth; ++i) path[i] = choice_from_bit(static_cast<int>((v >> (depth - 1 - i)) & 1));
  return path;
}

}  // namespace

TEST(ValidateTree, CounterexampleExhaustiveDepthEight) {
  CounterexampleClass cls;
  const auto report = validate_tree(cls, counterexample_tree(), 8);
  EXPECT_TRUE(report.valid);
  EXPECT_TRUE(report.exhaustive);
  EXPECT_EQ(report.paths_checked, 256u);
  ASSERT_EQ(report.witnesses.size(), 256u);
  for (std::uint64_t v = 0; v < 256; ++v) {
    const auto& w = report.witnesses[v];
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(w[i], static_cast<std::int64_t>((v >> (7 - i)) & 1));
    for (std::size_t i = 8; i < w.size(); ++i) EXPECT_EQ(w[i], 0);
  }
}

TEST(ValidateTree, CounterexampleGapsAreExact) {
  CounterexampleClass cls;
  const auto report = validate_tree(cls, counterexample_tree(), 12);
  ASSERT_TRUE(report.valid);
  for (const auto& level : report.levels) {
    EXPECT_EQ(level.min_gap, std::ldexp(1.0, static_cast<int>(2 * level.depth + 1)));
    EXPECT_EQ(level.min_gap, level.required_gap);
    EXPECT_EQ(level.nodes_checked, std::size_t{1} << (level.depth - 1));
    EXPECT_TRUE(level.ok);
  }
}

TEST(ValidateTree, SampledModeOnDeepTree) {
  CounterexampleClass cls;
  ValidateOptions o;
  o.sampled_paths = 64;
  const auto report = validate_tree(cls, counterexample_tree(), 40, o);
  EXPECT_TRUE(report.valid);
  EXPECT_FALSE(report.exhaustive);
  EXPECT_EQ(report.paths_checked, 64u);
  EXPECT_TRUE(report.witnesses.empty());
}

TEST(ValidateTree, DetectsShrunkenGap) {
  CounterexampleClass cls;
  const std::vector<Choice> prefix = {Choice::first};
  const auto broken = counterexample_tree().with_node(prefix, TreeNode{interval_midpoint(2), 0.0, 4.0});
  const auto report = validate_tree(cls, broken, 4);
  EXPECT_FALSE(report.valid);
  ASSERT_TRUE(report.failure.has_value());
  EXPECT_EQ(report.failure->kind, TreeFailureKind::gap);
  EXPECT_EQ(report.failure->depth, 2u);
  EXPECT_FALSE(report.levels[1].ok);
  EXPECT_TRUE(report.levels[0].ok);
  EXPECT_EQ(report.levels[1].min_gap, 4.0);
}

TEST(ValidateTree, DetectsUnrealizablePath) {
  CounterexampleClass cls;
  const std::vector<Choice> prefix = {Choice::second};
  const auto broken = counterexample_tree().with_node(prefix, TreeNode{0.75, 0.0, 32.0});
  const auto report = validate_tree(cls, broken, 3);
  EXPECT_FALSE(report.valid);
  ASSERT_TRUE(report.failure.has_value());
  EXPECT_EQ(report.failure->kind, TreeFailureKind::unrealizable);
  EXPECT_EQ(report.failure->path.front(), Choice::second);
}

TEST(ValidateTree, DetectsMissingNode) {
  CounterexampleClass cls;
  GapTree shallow("shallow", 5, GapSchedule::counterexample(),
                  [](std::size_t depth, std::span<const Choice>) -> std::optional<TreeNode> {
                    if (depth >= 3) return std::nullopt;
                    return TreeNode{interval_midpoint(static_cast<int>(depth)), 0.0,
                                    CounterexampleClass::gap_label(depth)};
                  });
  const auto report = validate_tree(cls, shallow, 4);
  ASSERT_TRUE(report.failure.has_value());
  EXPECT_EQ(report.failure->kind, TreeFailureKind::missing_node);
  EXPECT_EQ(report.failure->depth, 3u);
}

TEST(ValidateTree, BinaryDigitWitnessesAreBinaryReadings) {
  BinaryDigitClass cls;
  const auto report = validate_tree(cls, binary_digit_tree(), 5);
  ASSERT_TRUE(report.valid);
  ASSERT_EQ(report.witnesses.size(), 32u);
  for (std::uint64_t v = 0; v < 32; ++v) {
    const auto path = path_from_bits(v, 5);
    std::int64_t n = 0;
    for (std::size_t k = 0; k < 5; ++k) {
      if (path[k] == Choice::second) n += std::int64_t{1} << k;
    }
    EXPECT_EQ(report.witnesses[v], Param{n});
    EXPECT_LE(n, 31);
  }
}

TEST(Bridging, BinaryDigitWitnessGrowsAsPowersOfTwo) {
  BinaryDigitClass cls;
  const std::vector<Choice> path(20, Choice::second);
  const auto levels = bridging_audit(cls, binary_digit_tree(), path, 20);
  ASSERT_EQ(levels.size(), 20u);
  for (const auto& level : levels) {
    EXPECT_TRUE(level.nonempty);
    EXPECT_EQ(*level.witness, Param{(std::int64_t{1} << level.depth) - 1});
  }
}

TEST(Bridging, CounterexampleEveryPrefixRealizable) {
  CounterexampleClass cls;
  Stream rng(41);
  std::vector<Choice> path(30);
  for (auto& c : path) c = choice_from_bit(rng.coin());
  for (const auto& level : bridging_audit(cls, counterexample_tree(), path, 30)) {
    ASSERT_TRUE(level.nonempty);
    for (std::size_t i = 0; i < level.depth; ++i) EXPECT_EQ((*level.witness)[i], to_index(path[i]) - 1);
  }
}

TEST(PathHistory, RecordsChosenLabels) {
  const std::vector<Choice> path = {Choice::second, Choice::first, Choice::second};
  const auto h = path_history(counterexample_tree(), path, 3);
  const auto cs = h.commitments();
  ASSERT_EQ(cs.size(), 3u);
  EXPECT_EQ(cs[0].label, 8.0);
  EXPECT_EQ(cs[1].label, 0.0);
  EXPECT_EQ(cs[2].label, 128.0);
  EXPECT_EQ(cs[2].instance, interval_midpoint(3));
  EXPECT_THROW(path_history(counterexample_tree(), path, 4), DomainError);
}

TEST(SkipLevels, ReindexesToTargetGaps) {
  const auto skipped = skip_levels(binary_digit_tree(), GapSchedule::square());
  EXPECT_EQ(skipped.max_depth(), 7u);
  const std::vector<Choice> prefix = {Choice::second};
  EXPECT_EQ(skipped.node(2, prefix), (TreeNode{4.0, 0.0, 4.0}));
  BinaryDigitClass cls;
  const auto report = validate_tree(cls, skipped, 7);
  EXPECT_TRUE(report.valid);
  for (const auto& level : report.levels) EXPECT_GE(level.min_gap, level.required_gap);
  // All-second path: digits at original depths 1, 4, 9, ... set.
  const std::vector<Choice> all(3, Choice::second);
  const auto levels = bridging_audit(cls, skipped, all, 3);
  EXPECT_EQ(*levels.back().witness, Param{1 + 8 + 256});
}

TEST(SkipLevels, RejectsUnreachableTarget) {
  EXPECT_THROW(skip_levels(binary_digit_tree(3), GapSchedule::linear(10)), ConfigError);
}

TEST(GapTree, DepthLimits) {
  EXPECT_THROW(counterexample_tree(0), ConfigError);
  EXPECT_THROW(counterexample_tree(512), ConfigError);
  EXPECT_THROW(binary_digit_tree(63), ConfigError);
  const auto t = counterexample_tree(3);
  const std::vector<Choice> prefix(3, Choice::first);
  EXPECT_FALSE(t.node(4, prefix).has_value());
  EXPECT_FALSE(t.node(2, prefix).has_value());
  EXPECT_EQ(counterexample_tree().node(511, std::vector<Choice>(510, Choice::first))->second,
            std::ldexp(1.0, 1023));
}
