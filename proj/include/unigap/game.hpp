#pragma once

// The unbounded-gap game: legal moves over a finite instance pool, capped
// rank search, the rank-minimizing learner strategy, adversaries and play.

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "unigap/hypothesis.hpp"
#include "unigap/schedule.hpp"
#include "unigap/tree.hpp"

namespace unigap {

inline constexpr std::size_t kDefaultRankBudget = 16;

/// Position of the game: class, gap schedule, instance pool and the play so far.
struct GameState {
  std::shared_ptr<const HypothesisClass> cls;
  GapSchedule schedule;
  std::shared_ptr<const std::vector<Point>> pool;
  History history;

  GameState(std::shared_ptr<const HypothesisClass> c, GapSchedule s)
      : cls(std::move(c)),
        schedule(std::move(s)),
        pool(std::make_shared<const std::vector<Point>>(cls->instance_pool())) {}

  GameState(std::shared_ptr<const HypothesisClass> c, GapSchedule s, std::vector<Point> instances)
      : cls(std::move(c)),
        schedule(std::move(s)),
        pool(std::make_shared<const std::vector<Point>>(std::move(instances))) {}

  std::size_t round() const { return history.size(); }
  double next_gap() const { return schedule(round() + 1); }

  GameState after(const Move& m, Choice c) const {
    GameState s = *this;
    s.history.push(m, c);
    return s;
  }
};

namespace detail {

// Visits legal moves in the documented order until visit returns false.
// Both labels are drawn from the feasible set, so every move keeps both
// successor histories realizable.
inline void for_each_legal_move(const GameState& state, const std::function<bool(const Move&)>& visit) {
  const auto commitments = state.history.commitments();
  if (!state.cls->witness(commitments)) return;
  const double gap = state.next_gap();
  for (Point xi : *state.pool) {
    auto extent = state.cls->feasible_extent(commitments, xi);
    if (!extent || extent->second - extent->first < gap) continue;
    const auto labels = state.cls->feasible(commitments, xi);
    for (Point a : labels) {
      for (Point b : labels) {
        if (std::fabs(a - b) >= gap && !visit(Move{xi, a, b})) return;
      }
    }
  }
}

inline bool has_legal_move(const GameState& state) {
  const auto commitments = state.history.commitments();
  if (!state.cls->witness(commitments)) return false;
  const double gap = state.next_gap();
  for (Point xi : *state.pool) {
    auto extent = state.cls->feasible_extent(commitments, xi);
    if (extent && extent->second - extent->first >= gap) return true;
  }
  return false;
}

// min(rank(state), cap). Mutates and restores state.history.
inline std::size_t rank_capped(GameState& state, std::size_t cap) {
  if (cap == 0 || !has_legal_move(state)) return 0;
  if (cap == 1) return 1;
  std::size_t best = 0;
  for_each_legal_move(state, [&](const Move& m) {
    state.history.push(m, Choice::first);
    const std::size_t r1 = rank_capped(state, cap - 1);
    state.history.pop();
    std::size_t worst = r1;
    if (r1 > 0) {
      state.history.push(m, Choice::second);
      worst = std::min(r1, rank_capped(state, r1));
      state.history.pop();
    }
    best = std::max(best, 1 + worst);
    return best < cap;
  });
  return best;
}

}  // namespace detail

inline std::vector<Move> legal_moves(const GameState& state) {
  std::vector<Move> out;
  detail::for_each_legal_move(state, [&](const Move& m) {
    out.push_back(m);
    return true;
  });
  return out;
}

struct RankResult {
  /// Rank when it is at most the budget.
  std::optional<std::size_t> rank;
  std::size_t budget = 0;

  bool exceeded() const { return !rank.has_value(); }
  std::string to_string() const { return rank ? std::to_string(*rank) : "exceeded"; }
};

inline RankResult game_rank(const GameState& state, std::size_t budget = kDefaultRankBudget) {
  if (budget == 0) throw ConfigError("rank budget must be positive");
  GameState work = state;
  const std::size_t r = detail::rank_capped(work, budget + 1);
  if (r > budget) return {std::nullopt, budget};
  return {r, budget};
}

/// Rank-minimizing learner strategy: choose the successor of strictly smaller
/// rank, otherwise index 1. A label no hypothesis can realize is never chosen
/// over one that some hypothesis realizes. Throws BudgetExceeded when neither
/// successor has rank within budget.
inline Choice sigma_choice(const GameState& state, const Move& move,
                           std::size_t budget = kDefaultRankBudget) {
  GameState work = state;
  const bool ok1 = state.cls->witness(state.history.extended(move, Choice::first).commitments()).has_value();
  const bool ok2 = state.cls->witness(state.history.extended(move, Choice::second).commitments()).has_value();
  if (ok1 != ok2) return ok1 ? Choice::first : Choice::second;
  work.history.push(move, Choice::first);
  const std::size_t r1 = detail::rank_capped(work, budget + 1);
  work.history.pop();
  if (r1 == 0) return Choice::first;
  work.history.push(move, Choice::second);
  const std::size_t r2 = detail::rank_capped(work, r1);
  if (r2 < r1) return Choice::second;
  if (r1 > budget) {
    throw BudgetExceeded(state.cls->name() + ": both successor ranks exceed budget " +
                         std::to_string(budget));
  }
  return Choice::first;
}

// ---------------------------------------------------------------------------
// Adversaries and learners.

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string name() const = 0;
  /// Next legal move, or nullopt when stuck.
  virtual std::optional<Move> propose(const GameState& state, Stream& rng) = 0;
};

/// First legal move in enumeration order.
class GreedyAdversary final : public Adversary {
 public:
  std::string name() const override { return "greedy"; }
  std::optional<Move> propose(const GameState& state, Stream&) override {
    std::optional<Move> out;
    detail::for_each_legal_move(state, [&](const Move& m) {
      out = m;
      return false;
    });
    return out;
  }
};

/// Legal move maximizing the smaller successor rank (capped).
class RankAdversary final : public Adversary {
 public:
  explicit RankAdversary(std::size_t cap = kDefaultRankBudget) : cap_(cap) {}
  std::string name() const override { return "rank"; }
  std::optional<Move> propose(const GameState& state, Stream&) override {
    GameState work = state;
    std::optional<Move> best;
    std::size_t best_value = 0;
    detail::for_each_legal_move(state, [&](const Move& m) {
      work.history.push(m, Choice::first);
      const std::size_t r1 = detail::rank_capped(work, cap_);
      work.history.pop();
      work.history.push(m, Choice::second);
      const std::size_t r2 = detail::rank_capped(work, cap_);
      work.history.pop();
      const std::size_t v = std::min(r1, r2);
      if (!best || v > best_value) {
        best = m;
        best_value = v;
      }
      return best_value < cap_;
    });
    return best;
  }

 private:
  std::size_t cap_;
};

/// Uniformly random legal move.
class RandomAdversary final : public Adversary {
 public:
  std::string name() const override { return "random"; }
  std::optional<Move> propose(const GameState& state, Stream& rng) override {
    auto moves = legal_moves(state);
    if (moves.empty()) return std::nullopt;
    return moves[static_cast<std::size_t>(rng.below(moves.size()))];
  }
};

/// Plays the tree node along the learner's choices; stuck when the tree ends
/// or its node is not a legal move.
class TreeAdversary final : public Adversary {
 public:
  explicit TreeAdversary(GapTree tree) : tree_(std::move(tree)) {}
  std::string name() const override { return "tree"; }
  std::optional<Move> propose(const GameState& state, Stream&) override {
    std::vector<Choice> prefix;
    for (const auto& r : state.history.rounds()) prefix.push_back(r.choice);
    auto n = tree_.node(state.round() + 1, prefix);
    if (!n || std::fabs(n->first - n->second) < state.next_gap()) return std::nullopt;
    const auto commitments = state.history.commitments();
    if (!state.cls->in_domain(n->instance) || !state.cls->witness(commitments)) return std::nullopt;
    const auto labels = state.cls->feasible(commitments, n->instance);
    auto has = [&](Point y) { return std::find(labels.begin(), labels.end(), y) != labels.end(); };
    if (!has(n->first) && !has(n->second)) return std::nullopt;
    return n->move();
  }

 private:
  GapTree tree_;
};

/// Tree grown from a class by the greedy adversary: the node after a prefix
/// is the first legal move at the position that prefix reaches.
inline GapTree greedy_tree(std::shared_ptr<const HypothesisClass> cls, GapSchedule schedule,
                           std::size_t max_depth = 64) {
  auto root = std::make_shared<const GameState>(cls, schedule);
  return GapTree(cls->name() + "/greedy", max_depth, schedule,
                 [root](std::size_t, std::span<const Choice> prefix) -> std::optional<TreeNode> {
                   GameState s = *root;
                   GreedyAdversary greedy;
                   Stream unused(0);
                   for (Choice c : prefix) {
                     auto m = greedy.propose(s, unused);
                     if (!m) return std::nullopt;
                     s.history.push(*m, c);
                   }
                   auto m = greedy.propose(s, unused);
                   if (!m) return std::nullopt;
                   return TreeNode{m->instance, m->first, m->second};
                 });
}

inline std::unique_ptr<Adversary> make_adversary(const std::string& name, const GameState& root,
                                                 std::size_t budget = kDefaultRankBudget) {
  if (name == "greedy") return std::make_unique<GreedyAdversary>();
  if (name == "rank") return std::make_unique<RankAdversary>(budget + 1);
  if (name == "random") return std::make_unique<RandomAdversary>();
  if (name == "tree") return std::make_unique<TreeAdversary>(greedy_tree(root.cls, root.schedule));
  throw ConfigError("unknown adversary: " + name);
}

class GameLearner {
 public:
  virtual ~GameLearner() = default;
  virtual std::string name() const = 0;
  virtual Choice choose(const GameState& state, const Move& move, Stream& rng) = 0;
};

class SigmaLearner final : public GameLearner {
 public:
  explicit SigmaLearner(std::size_t budget = kDefaultRankBudget) : budget_(budget) {}
  std::string name() const override { return "sigma"; }
  Choice choose(const GameState& state, const Move& move, Stream&) override {
    return sigma_choice(state, move, budget_);
  }

 private:
  std::size_t budget_;
};

class CoinFlipLearner final : public GameLearner {
 public:
  std::string name() const override { return "coin"; }
  Choice choose(const GameState&, const Move&, Stream& rng) override { return choice_from_bit(rng.coin()); }
};

inline std::unique_ptr<GameLearner> make_game_learner(const std::string& name,
                                                      std::size_t budget = kDefaultRankBudget) {
  if (name == "sigma") return std::make_unique<SigmaLearner>(budget);
  if (name == "coin") return std::make_unique<CoinFlipLearner>();
  throw ConfigError("unknown game learner: " + name);
}

// ---------------------------------------------------------------------------
// Play and transcripts.

struct TranscriptRow {
  std::size_t round = 0;
  Move move;
  Choice choice = Choice::first;
  /// Rank of the position after the choice; nullopt when it exceeds the budget.
  std::optional<std::size_t> rank;

  friend bool operator==(const TranscriptRow&, const TranscriptRow&) = default;
};

struct Transcript {
  std::vector<TranscriptRow> rows;
  bool adversary_stuck = false;

  std::size_t size() const { return rows.size(); }
};

struct PlayOptions {
  std::size_t max_rounds = 32;
  std::size_t rank_budget = kDefaultRankBudget;
  /// Skip per-round rank evaluation (recorded as exceeded).
  bool record_rank = true;
};

inline Transcript play(const GameState& root, Adversary& adversary, GameLearner& learner,
                       const PlayOptions& opts, std::uint64_t seed) {
  if (opts.max_rounds == 0) throw ConfigError("max_rounds must be positive");
  Stream adversary_rng(derive_seed(seed, "adversary"));
  Stream learner_rng(derive_seed(seed, "learner"));
  GameState state = root;
  Transcript t;
  for (std::size_t k = 1; k <= opts.max_rounds; ++k) {
    auto m = adversary.propose(state, adversary_rng);
    if (!m) {
      t.adversary_stuck = true;
      return t;
    }
    const Choice c = learner.choose(state, *m, learner_rng);
    state.history.push(*m, c);
    TranscriptRow row{k, *m, c, std::nullopt};
    if (opts.record_rank) row.rank = game_rank(state, opts.rank_budget).rank;
    t.rows.push_back(row);
  }
  t.adversary_stuck = !detail::has_legal_move(state);
  return t;
}

inline nlohmann::json to_json(const TranscriptRow& r) {
  nlohmann::json j;
  j["round"] = r.round;
  j["xi"] = r.move.instance;
  j["eta1"] = r.move.first;
  j["eta2"] = r.move.second;
  j["choice"] = to_index(r.choice);
  j["rank"] = r.rank ? nlohmann::json(*r.rank) : nlohmann::json(nullptr);
  return j;
}

inline TranscriptRow transcript_row_from_json(const nlohmann::json& j) {
  try {
    TranscriptRow r;
    r.round = j.at("round").get<std::size_t>();
    r.move = {j.at("xi").get<double>(), j.at("eta1").get<double>(), j.at("eta2").get<double>()};
    const int c = j.at("choice").get<int>();
    if (c != 1 && c != 2) throw IoError("transcript choice must be 1 or 2");
    r.choice = c == 1 ? Choice::first : Choice::second;
    if (!j.at("rank").is_null()) r.rank = j.at("rank").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad transcript record: ") + e.what());
  }
}

/// One JSON object per line: round, xi, eta1, eta2, choice, rank.
inline void write_transcript(std::ostream& out, const Transcript& t) {
  for (const auto& r : t.rows) out << to_json(r).dump() << '\n';
}

inline Transcript read_transcript(std::istream& in) {
  Transcript t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      t.rows.push_back(transcript_row_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw IoError(std::string("bad transcript line: ") + e.what());
    }
  }
  return t;
}

/// Rebuilds the history a transcript records.
inline History replay(const Transcript& t) {
  History h;
  for (const auto& r : t.rows) h.push(r.move, r.choice);
  return h;
}

}  // namespace unigap
