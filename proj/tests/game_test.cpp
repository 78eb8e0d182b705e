#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>
#include <vector>

#include "unigap/classes.hpp"
#include "unigap/game.hpp"

using namespace unigap;

namespace {

// Rank by exhaustive recursion over the brute-force consistent set. Shares
// nothing with the library's search beyond the class grid itself.
struct RankOracle {
  const HypothesisClass& cls;
  GapSchedule schedule;
  std::vector<Point> pool;

  std::vector<Param> consistent(const std::vector<Commitment>& cs) const {
    std::vector<Param> out;
    cls.for_each_param([&](const Param& theta) {
      for (const auto& c : cs) {
        if (cls.evaluate_unchecked(theta, c.instance) != c.label) return true;
      }
      out.push_back(theta);
      return true;
    });
    return out;
  }

  std::size_t rank(std::vector<Commitment>& cs) const {
    const auto alive = consistent(cs);
    if (alive.empty()) return 0;
    const double gap = schedule(cs.size() + 1);
    std::size_t best = 0;
    for (Point x : pool) {
      std::set<Point> labels;
      for (const auto& theta : alive) labels.insert(cls.evaluate_unchecked(theta, x));
      for (Point a : labels) {
        for (Point b : labels) {
          if (std::fabs(a - b) < gap) continue;
          cs.push_back({x, a});
          const auto ra = rank(cs);
          cs.back().label = b;
          const auto rb = rank(cs);
          cs.pop_back();
          best = std::max(best, 1 + std::min(ra, rb));
        }
      }
    }
    return best;
  }
};

std::shared_ptr<FiniteTableClass> random_table(Stream& rng) {
  const std::vector<Point> instances = {1.0, 2.0, 3.0};
  std::vector<std::vector<Point>> rows(2 + rng.below(5));
  for (auto& row : rows) {
    for (std::size_t i = 0; i < instances.size(); ++i) row.push_back(static_cast<double>(rng.below(6)));
  }
  return std::make_shared<FiniteTableClass>("table", instances, rows);
}

GameState lipschitz_root() { return GameState(std::make_shared<LipschitzClass>(), GapSchedule::linear(3)); }

}  // namespace

TEST(LegalMoves, CounterexampleRootOffersBranchingMove) {
  GameState root(std::make_shared<CounterexampleClass>(), GapSchedule::counterexample());
  const auto moves = legal_moves(root);
  EXPECT_TRUE(std::find(moves.begin(), moves.end(), Move{0.375, 0.0, 32.0}) != moves.end());
  for (const auto& m : moves) EXPECT_GE(std::fabs(m.first - m.second), 8.0);
}

TEST(LegalMoves, LipschitzEmptyAfterOneCommitment) {
  auto root = lipschitz_root();
  ASSERT_FALSE(legal_moves(root).empty());
  auto after = root.after(Move{0.5, 0.0, 3.0}, Choice::first);
  EXPECT_EQ(after.next_gap(), 6.0);
  EXPECT_TRUE(legal_moves(after).empty());
}

TEST(LegalMoves, BothSuccessorsRealizable) {
  Stream rng(31);
  for (int t = 0; t < 40; ++t) {
    auto cls = random_table(rng);
    GameState root(cls, GapSchedule::identity());
    for (const auto& m : legal_moves(root)) {
      EXPECT_TRUE(cls->witness(root.after(m, Choice::first).history.commitments()).has_value());
      EXPECT_TRUE(cls->witness(root.after(m, Choice::second).history.commitments()).has_value());
    }
  }
}

TEST(GameRank, LipschitzIsOne) {
  const auto r = game_rank(lipschitz_root());
  ASSERT_FALSE(r.exceeded());
  EXPECT_EQ(*r.rank, 1u);
}

TEST(GameRank, CounterexampleExceedsBudget) {
  CounterexampleOptions o;
  o.pool_depth = 10;
  GameState root(std::make_shared<CounterexampleClass>(o), GapSchedule::counterexample());
  const auto r = game_rank(root, 5);
  EXPECT_TRUE(r.exceeded());
  EXPECT_EQ(r.to_string(), "exceeded");
}

TEST(GameRank, RestrictedCounterexampleIsFinite) {
  CounterexampleOptions o;
  o.support = 3;
  GameState root(std::make_shared<CounterexampleClass>(o), GapSchedule::counterexample());
  EXPECT_EQ(game_rank(root).rank, std::optional<std::size_t>(3));
}

TEST(GameRank, ZeroBudgetRejected) { EXPECT_THROW(game_rank(lipschitz_root(), 0), ConfigError); }

TEST(GameRank, MatchesExhaustiveOracleOnRandomTables) {
  Stream rng(32);
  for (int t = 0; t < 60; ++t) {
    auto cls = random_table(rng);
    GameState root(cls, GapSchedule::identity());
    RankOracle oracle{*cls, GapSchedule::identity(), cls->instance_pool()};
    std::vector<Commitment> cs;
    EXPECT_EQ(game_rank(root).rank, std::optional<std::size_t>(oracle.rank(cs))) << "table " << t;
  }
}

TEST(GameRank, MatchesExhaustiveOracleOnFiniteSupport) {
  FiniteSupportOptions o;
  o.support = 3;
  o.label_cap = 3;
  auto cls = std::make_shared<FiniteSupportClass>(o);
  GameState root(cls, GapSchedule::identity());
  RankOracle oracle{*cls, GapSchedule::identity(), cls->instance_pool()};
  std::vector<Commitment> cs;
  EXPECT_EQ(game_rank(root).rank, std::optional<std::size_t>(oracle.rank(cs)));
  cs.push_back({1.0, 2.0});
  EXPECT_EQ(game_rank(root.after(Move{1.0, 2.0, 0.0}, Choice::first)).rank,
            std::optional<std::size_t>(oracle.rank(cs)));
}

TEST(GameRank, MovesNeverIncreaseRank) {
  Stream rng(33);
  for (int t = 0; t < 30; ++t) {
    auto cls = random_table(rng);
    GameState root(cls, GapSchedule::identity());
    const auto r = *game_rank(root).rank;
    for (const auto& m : legal_moves(root)) {
      const auto r1 = *game_rank(root.after(m, Choice::first)).rank;
      const auto r2 = *game_rank(root.after(m, Choice::second)).rank;
      EXPECT_LE(std::max(r1, r2), r);
      EXPECT_LE(std::min(r1, r2) + 1, r);
    }
  }
}

TEST(GameRank, InvariantUnderJointLabelAndGapScaling) {
  FiniteSupportOptions o;
  o.support = 3;
  o.label_cap = 4;
  auto inner = std::make_shared<FiniteSupportClass>(o);
  auto scaled = std::make_shared<ScaledLabelsClass>(inner, 2.5);
  GameState a(inner, GapSchedule::identity());
  GameState b(scaled, GapSchedule::identity().scaled(2.5));
  EXPECT_EQ(game_rank(a).rank, game_rank(b).rank);
  const auto ma = legal_moves(a);
  const auto mb = legal_moves(b);
  ASSERT_EQ(ma.size(), mb.size());
  for (std::size_t i = 0; i < ma.size(); ++i) {
    EXPECT_EQ(mb[i].first, 2.5 * ma[i].first);
    EXPECT_EQ(sigma_choice(a, ma[i]), sigma_choice(b, mb[i]));
  }
}

TEST(Sigma, LipschitzPicksFirst) {
  EXPECT_EQ(sigma_choice(lipschitz_root(), Move{0.5, 0.0, 3.0}), Choice::first);
}

TEST(Sigma, ForcedByConsistency) {
  auto cls = std::make_shared<FiniteTableClass>("forced", std::vector<Point>{1.0, 2.0},
                                                std::vector<std::vector<Point>>{{0.0, 0.0}, {0.0, 5.0}});
  GameState s(cls, GapSchedule::identity());
  EXPECT_EQ(sigma_choice(s, Move{1.0, 7.0, 0.0}), Choice::second);
  EXPECT_EQ(sigma_choice(s, Move{1.0, 0.0, 7.0}), Choice::first);
}

TEST(Sigma, PrefersStrictlySmallerRank) {
  // Hypotheses agreeing at 1 on label 0 still differ at 2; label 9 leaves one.
  auto cls = std::make_shared<FiniteTableClass>(
      "split", std::vector<Point>{1.0, 2.0},
      std::vector<std::vector<Point>>{{0.0, 0.0}, {0.0, 5.0}, {9.0, 0.0}});
  GameState s(cls, GapSchedule::identity());
  EXPECT_EQ(*game_rank(s.after(Move{1.0, 0.0, 9.0}, Choice::first)).rank, 1u);
  EXPECT_EQ(*game_rank(s.after(Move{1.0, 0.0, 9.0}, Choice::second)).rank, 0u);
  EXPECT_EQ(sigma_choice(s, Move{1.0, 0.0, 9.0}), Choice::second);
  EXPECT_EQ(sigma_choice(s, Move{1.0, 9.0, 0.0}), Choice::first);
}

TEST(Sigma, MatchesRankDefinitionOnRandomTables) {
  Stream rng(34);
  for (int t = 0; t < 40; ++t) {
    auto cls = random_table(rng);
    GameState root(cls, GapSchedule::identity());
    for (const auto& m : legal_moves(root)) {
      const auto r1 = *game_rank(root.after(m, Choice::first)).rank;
      const auto r2 = *game_rank(root.after(m, Choice::second)).rank;
      EXPECT_EQ(sigma_choice(root, m), r2 < r1 ? Choice::second : Choice::first);
    }
  }
}

TEST(Sigma, ThrowsWhenBothSuccessorsExceedBudget) {
  GameState root(std::make_shared<CounterexampleClass>(), GapSchedule::counterexample());
  EXPECT_THROW(sigma_choice(root, Move{0.375, 0.0, 32.0}, 5), BudgetExceeded);
}

TEST(Play, TreeAdversaryOnLipschitzStopsAfterOneRound) {
  auto root = lipschitz_root();
  auto adv = make_adversary("tree", root);
  SigmaLearner sigma;
  const auto t = play(root, *adv, sigma, {}, 1);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_TRUE(t.adversary_stuck);
  EXPECT_EQ(t.rows[0].rank, std::optional<std::size_t>(0));
}

TEST(Play, CoinLearnerAgainstCounterexampleRunsFullHorizon) {
  GameState root(std::make_shared<CounterexampleClass>(), GapSchedule::counterexample());
  GreedyAdversary adv;
  CoinFlipLearner coin;
  PlayOptions o;
  o.max_rounds = 10;
  o.record_rank = false;
  const auto t = play(root, adv, coin, o, 7);
  EXPECT_EQ(t.size(), 10u);
  EXPECT_FALSE(t.adversary_stuck);
  const auto h = replay(t);
  EXPECT_TRUE(root.cls->witness(h.commitments()).has_value());
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_GE(std::fabs(t.rows[k].move.first - t.rows[k].move.second), root.schedule(k + 1));
  }
}

TEST(Play, SigmaAgainstCounterexampleExceedsBudget) {
  GameState root(std::make_shared<CounterexampleClass>(), GapSchedule::counterexample());
  GreedyAdversary adv;
  SigmaLearner sigma(4);
  EXPECT_THROW(play(root, adv, sigma, {}, 1), BudgetExceeded);
}

TEST(Play, EveryAdversaryRespectsGapsAndRealizability) {
  FiniteSupportOptions o;
  o.support = 3;
  o.label_cap = 5;
  GameState root(std::make_shared<FiniteSupportClass>(o), GapSchedule::identity());
  for (const auto& name : {"greedy", "rank", "random", "tree"}) {
    auto adv = make_adversary(name, root);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      CoinFlipLearner coin;
      const auto t = play(root, *adv, coin, {}, seed);
      EXPECT_TRUE(t.adversary_stuck) << name;
      GameState s = root;
      for (const auto& row : t.rows) {
        const auto moves = legal_moves(s);
        EXPECT_TRUE(std::find(moves.begin(), moves.end(), row.move) != moves.end()) << name;
        s = s.after(row.move, row.choice);
        EXPECT_EQ(row.rank, game_rank(s).rank);
      }
    }
  }
  EXPECT_THROW(make_adversary("oracle", root), ConfigError);
  EXPECT_THROW(make_game_learner("oracle"), ConfigError);
}

TEST(Play, SigmaBoundsRoundsByRootRank) {
  FiniteSupportOptions o;
  o.support = 3;
  o.label_cap = 4;
  GameState root(std::make_shared<FiniteSupportClass>(o), GapSchedule::identity());
  const auto r = *game_rank(root).rank;
  for (const auto& name : {"greedy", "rank", "random"}) {
    auto adv = make_adversary(name, root);
    SigmaLearner sigma;
    const auto t = play(root, *adv, sigma, {}, 5);
    EXPECT_LE(t.size(), r) << name;
    for (std::size_t k = 0; k < t.size(); ++k) EXPECT_LE(*t.rows[k].rank, r - k - 1);
  }
}

TEST(Play, SeedsReproduce) {
  GameState root(std::make_shared<CounterexampleClass>(), GapSchedule::counterexample());
  RandomAdversary adv;
  CoinFlipLearner coin;
  PlayOptions o;
  o.max_rounds = 8;
  o.record_rank = false;
  const auto a = play(root, adv, coin, o, 11);
  const auto b = play(root, adv, coin, o, 11);
  EXPECT_EQ(a.rows, b.rows);
}

TEST(Transcript, JsonLinesRoundTrip) {
  Transcript t;
  t.rows.push_back({1, Move{0.375, 0.0, 32.0}, Choice::second, std::nullopt});
  t.rows.push_back({2, Move{0.1875, 128.0, 0.0}, Choice::first, 3});
  std::stringstream ss;
  write_transcript(ss, t);
  const std::string text = ss.str();
  EXPECT_NE(text.find("\"eta2\":32.0"), std::string::npos);
  EXPECT_NE(text.find("\"rank\":null"), std::string::npos);
  const auto back = read_transcript(ss);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(replay(back).size(), 2u);
}

TEST(Transcript, MalformedLinesThrow) {
  std::stringstream bad1("{\"round\":1,\"xi\":0.3,\"eta1\":0,\"eta2\":32,\"choice\":3,\"rank\":null}\n");
  EXPECT_THROW(read_transcript(bad1), IoError);
  std::stringstream bad2("not json\n");
  EXPECT_THROW(read_transcript(bad2), IoError);
  std::stringstream bad3("{\"round\":1}\n");
  EXPECT_THROW(read_transcript(bad3), IoError);
}
