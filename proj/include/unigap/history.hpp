#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "unigap/metric.hpp"

namespace unigap {

/// Learner response: which of the two proposed labels is committed.
enum class Choice : int { first = 1, second = 2 };

inline Choice choice_from_bit(int bit) { return bit ? Choice::second : Choice::first; }
inline int to_index(Choice c) { return static_cast<int>(c); }

/// Adversary proposal (xi, eta_1, eta_2).
struct Move {
  Point instance = 0.0;
  Point first = 0.0;
  Point second = 0.0;

  Point label(Choice c) const { return c == Choice::first ? first : second; }
  friend bool operator==(const Move&, const Move&) = default;
};

struct Commitment {
  Point instance = 0.0;
  Point label = 0.0;
};

struct Round {
  Move move;
  Choice choice = Choice::first;

  Point committed() const { return move.label(choice); }
  friend bool operator==(const Round&, const Round&) = default;
};

/// Finite play tau_k: the rounds so far plus the committed labels.
class History {
 public:
  History() = default;

  std::size_t size() const { return rounds_.size(); }
  bool empty() const { return rounds_.empty(); }
  std::span<const Round> rounds() const { return rounds_; }
  std::span<const Commitment> commitments() const { return commitments_; }
  const Round& operator[](std::size_t i) const { return rounds_[i]; }

  void push(const Round& r) {
    rounds_.push_back(r);
    commitments_.push_back({r.move.instance, r.committed()});
  }
  void push(const Move& m, Choice c) { push(Round{m, c}); }

  void pop() {
    rounds_.pop_back();
    commitments_.pop_back();
  }

  History extended(const Move& m, Choice c) const {
    History h = *this;
    h.push(m, c);
    return h;
  }

  History prefix(std::size_t k) const {
    History h;
    for (std::size_t i = 0; i < k && i < rounds_.size(); ++i) h.push(rounds_[i]);
    return h;
  }

  friend bool operator==(const History& a, const History& b) { return a.rounds_ == b.rounds_; }

 private:
  std::vector<Round> rounds_;
  std::vector<Commitment> commitments_;
};

}  // namespace unigap
