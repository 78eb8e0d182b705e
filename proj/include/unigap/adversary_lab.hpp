#pragma once

// Realizable adversarial distributions driven by a fair coin path, with exact
// risk series, per-interval integrals and divergence certificates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "unigap/classes.hpp"
#include "unigap/learner.hpp"
#include "unigap/rng.hpp"
#include "unigap/sample.hpp"
#include "unigap/tree.hpp"

namespace unigap {

inline constexpr std::size_t kAtomTruncation = 100'000;
inline constexpr std::size_t kDepthHorizon = 1'000'000;

/// 6 / (pi^2 m^2).
inline double atom_mass(std::size_t m) {
  const double md = static_cast<double>(m);
  return 6.0 / (std::numbers::pi * std::numbers::pi * md * md);
}

/// Certificate threshold 3/pi^2 less a small slack.
inline double certificate_threshold() { return 3.0 / (std::numbers::pi * std::numbers::pi) - 1e-9; }

/// i.i.d. fair bits B_1, B_2, ... realized lazily and immutably.
class CoinPath {
 public:
  explicit CoinPath(std::uint64_t seed) : rng_(std::make_shared<Stream>(seed)) {}

  /// Fixed prefix; bits past it are fill.
  static CoinPath fixed(std::vector<int> bits, int fill = 0) {
    CoinPath c(0);
    c.rng_.reset();
    c.bits_.assign(bits.begin(), bits.end());
    c.fill_ = fill ? 1 : 0;
    return c;
  }

  CoinPath(const CoinPath& other) {
    std::lock_guard lock(other.mutex_);
    rng_ = other.rng_ ? std::make_shared<Stream>(*other.rng_) : nullptr;
    bits_ = other.bits_;
    fill_ = other.fill_;
  }

  /// B_k, 1-based.
  int bit(std::size_t k) const {
    if (k == 0) throw DomainError("coin bits are 1-based");
    std::lock_guard lock(mutex_);
    if (k > bits_.size()) {
      if (!rng_) return fill_;
      while (bits_.size() < k) bits_.push_back(rng_->coin() ? 1 : 0);
    }
    return bits_[k - 1];
  }

  Choice choice(std::size_t k) const { return choice_from_bit(bit(k)); }

  std::vector<Choice> prefix(std::size_t depth) const {
    std::vector<Choice> out;
    for (std::size_t k = 1; k <= depth; ++k) out.push_back(choice(k));
    return out;
  }

  std::size_t realized() const {
    std::lock_guard lock(mutex_);
    return bits_.size();
  }

 private:
  mutable std::mutex mutex_;
  mutable std::shared_ptr<Stream> rng_;
  mutable std::vector<int> bits_;
  int fill_ = 0;
};

/// k_m = min{k > k_{m-1} : gamma_k >= m^2}, m = 1..m_max.
inline std::vector<std::size_t> depth_indices(const GapSchedule& schedule, std::size_t m_max,
                                              std::size_t horizon = kDepthHorizon) {
  if (m_max == 0) throw DomainError("m_max must be positive");
  std::vector<std::size_t> out;
  std::size_t k = 0;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const double need = static_cast<double>(m) * static_cast<double>(m);
    do {
      if (++k > horizon) throw SearchHorizonExceeded("schedule does not reach m^2 within the horizon");
    } while (schedule(k) < need);
    out.push_back(k);
  }
  return out;
}

struct Atom {
  std::size_t m = 0;
  std::size_t depth = 0;
  Point instance = 0.0;
  Point label = 0.0;
  double mass = 0.0;
};

/// Atom m sits at the depth-k_m node on the coin path with its coin-selected
/// label and mass p_m; the last representable atom also carries the
/// truncated tail mass.
class TreeAtomDistribution {
 public:
  TreeAtomDistribution(GapTree tree, CoinPath coin, std::size_t truncation = kAtomTruncation)
      : tree_(std::move(tree)), coin_(std::move(coin)) {
    // Atoms stop where k_m would pass the tree depth.
    std::size_t k = 0;
    for (std::size_t m = 1; m <= truncation; ++m) {
      const double need = static_cast<double>(m) * static_cast<double>(m);
      do {
        ++k;
      } while (k <= tree_.max_depth() && tree_.schedule()(k) < need);
      if (k > tree_.max_depth()) break;
      depths_.push_back(k);
    }
    if (depths_.empty()) throw ConfigError("tree too shallow for a single atom");
    cumulative_.reserve(depths_.size());
    double total = 0.0;
    for (std::size_t m = 1; m <= depths_.size(); ++m) {
      total += atom_mass(m);
      cumulative_.push_back(total);
    }
    cumulative_.back() = 1.0;
    atoms_.resize(depths_.size());
    built_.assign(depths_.size(), false);
  }

  std::size_t truncation() const { return depths_.size(); }
  const GapTree& tree() const { return tree_; }
  const CoinPath& coin() const { return coin_; }
  const std::vector<std::size_t>& depths() const { return depths_; }

  /// Mass on the last atom beyond its own p_m.
  double overflow_mass() const {
    const std::size_t t = depths_.size();
    return 1.0 - (t > 1 ? cumulative_[t - 2] : 0.0) - atom_mass(t);
  }

  double mass(std::size_t m) const {
    check(m);
    return m == depths_.size() ? atom_mass(m) + overflow_mass() : atom_mass(m);
  }

  const Atom& atom(std::size_t m) const {
    check(m);
    std::lock_guard lock(mutex_);
    if (!built_[m - 1]) {
      const std::size_t k = depths_[m - 1];
      auto node = tree_.node(k, coin_.prefix(k - 1));
      if (!node) throw DomainError(tree_.name() + ": tree ends before an atom depth");
      atoms_[m - 1] = Atom{m, k, node->instance, node->move().label(coin_.choice(k)), atom_mass(m)};
      built_[m - 1] = true;
    }
    return atoms_[m - 1];
  }

  /// Inverse-CDF draw of the atom index.
  std::size_t draw_index(Stream& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin()) + 1;
  }

  Example sample(Stream& rng) const {
    const auto& a = atom(draw_index(rng));
    return {a.instance, a.label};
  }

  /// Commitment history of the coin path through atom m's depth.
  History realized_history(std::size_t m) const {
    check(m);
    const std::size_t k = depths_[m - 1];
    return path_history(tree_, coin_.prefix(k), k);
  }

 private:
  void check(std::size_t m) const {
    if (m == 0 || m > depths_.size()) throw DomainError("atom index outside the truncation");
  }

  GapTree tree_;
  CoinPath coin_;
  std::vector<std::size_t> depths_;
  std::vector<double> cumulative_;
  mutable std::mutex mutex_;
  mutable std::vector<Atom> atoms_;
  mutable std::vector<bool> built_;
};

/// X ~ Unif(0, 1) and Y = f_B(X) = B_k 2^{2k+1} on I_k (0 beyond depth 511).
class UniformIntervalDistribution {
 public:
  explicit UniformIntervalDistribution(CoinPath coin) : coin_(std::move(coin)) {}

  const CoinPath& coin() const { return coin_; }

  static constexpr std::size_t kMaxDepth = 511;

  Point label_on(std::size_t k) const {
    if (k == 0 || k > kMaxDepth) return 0.0;
    return coin_.bit(k) ? CounterexampleClass::gap_label(k) : 0.0;
  }

  Point label(Point x) const { return label_on(static_cast<std::size_t>(interval_index(x))); }

  Example sample(Stream& rng) const {
    for (;;) {
      const double x = rng.uniform_open();
      try {
        return {x, label(x)};
      } catch (const EndpointError&) {
      }
    }
  }

 private:
  CoinPath coin_;
};

struct RiskReport {
  std::size_t truncation = 0;
  double partial_sum = 0.0;
  double tail_bound = 0.0;
  std::vector<double> terms;
  double certificate_threshold = 0.0;
  std::size_t certificate_count = 0;
  std::size_t unseen_count = 0;
  std::optional<double> mc_estimate;
  std::optional<double> mc_std_error;
};

/// Exact risk series sum_{m <= M} p_m l(h(x_m), y_m) with the tail mass bound
/// 6/(pi^2 M) and the count of terms at or above 3/pi^2.
inline RiskReport exact_risk_atoms(const TreeAtomDistribution& dist, const Predictor& predictor,
                                   std::size_t M) {
  if (M == 0) throw DomainError("truncation must be positive");
  if (M > dist.truncation()) {
    throw DomainError("truncation " + std::to_string(M) + " exceeds the representable atoms " +
                      std::to_string(dist.truncation()));
  }
  RiskReport r;
  r.truncation = M;
  r.certificate_threshold = certificate_threshold();
  r.terms.reserve(M);
  for (std::size_t m = 1; m <= M; ++m) {
    const auto& a = dist.atom(m);
    const double term = a.mass * std::fabs(predictor.predict(a.instance) - a.label);
    r.terms.push_back(term);
    r.partial_sum += term;
    if (term >= r.certificate_threshold) ++r.certificate_count;
  }
  r.tail_bound = 6.0 / (std::numbers::pi * std::numbers::pi * static_cast<double>(M));
  return r;
}

struct IntervalContribution {
  std::size_t k = 0;
  double contribution = 0.0;
  /// Integrals of l(h, 0) and l(h, 2^{2k+1}) over I_k.
  double branch0 = 0.0;
  double branch1 = 0.0;
  bool exact = false;
};

struct IntervalRiskReport : RiskReport {
  std::vector<IntervalContribution> intervals;
};

/// Per-interval integrals of l(h(x), f_B(x)) over I_1..I_M: closed form where
/// the predictor is constant on I_k, composite midpoint rule with Q nodes
/// otherwise. Certificates count intervals contributing at least 2^k.
inline IntervalRiskReport interval_risk_quadrature(const UniformIntervalDistribution& dist,
                                                   const Predictor& predictor, std::size_t M,
                                                   std::size_t Q = 8) {
  if (Q == 0) throw DomainError("quadrature needs at least one node");
  if (M == 0 || M > UniformIntervalDistribution::kMaxDepth) throw DomainError("depth must be in [1, 511]");
  IntervalRiskReport r;
  r.truncation = M;
  r.certificate_threshold = 0.0;
  for (std::size_t k = 1; k <= M; ++k) {
    const int ki = static_cast<int>(k);
    const double lo = interval_lower(ki), width = interval_width(ki);
    const double big = CounterexampleClass::gap_label(k);
    IntervalContribution c{k, 0.0, 0.0, 0.0, false};
    if (auto v = predictor.constant_on(lo, interval_upper(ki))) {
      c.branch0 = width * std::fabs(*v);
      c.branch1 = width * std::fabs(*v - big);
      c.exact = true;
    } else {
      const double h = width / static_cast<double>(Q);
      for (std::size_t q = 0; q < Q; ++q) {
        const double x = lo + (static_cast<double>(q) + 0.5) * h;
        const double p = predictor.predict(x);
        c.branch0 += h * std::fabs(p);
        c.branch1 += h * std::fabs(p - big);
      }
    }
    c.contribution = dist.coin().bit(k) ? c.branch1 : c.branch0;
    r.terms.push_back(c.contribution);
    r.partial_sum += c.contribution;
    if (c.contribution >= std::ldexp(1.0, ki)) ++r.certificate_count;
    r.intervals.push_back(c);
  }
  r.tail_bound = std::ldexp(1.0, -static_cast<int>(M));
  return r;
}

// ---------------------------------------------------------------------------

/// A learner maps a sample to a predictor.
using SampleLearner = std::function<std::shared_ptr<const Predictor>(std::span<const Example>)>;

inline SampleLearner memorize_learner(Point fallback = 0.0) {
  return [fallback](std::span<const Example> s) -> std::shared_ptr<const Predictor> {
    return memorize_baseline(s, fallback);
  };
}

struct LowerBoundRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  RiskReport report;
  /// Certificate count at truncation M/2, for the trend check.
  std::size_t certificate_count_half = 0;
  std::size_t distinct_seen = 0;
};

/// One coin path per seed; the sample stream is drawn once for the largest n
/// and shared by prefix across the n list.
inline std::vector<LowerBoundRow> lower_bound_experiment(const GapTree& tree, const SampleLearner& learner,
                                                         std::span<const std::size_t> n_list,
                                                         std::span<const std::uint64_t> seeds, std::size_t M) {
  std::vector<LowerBoundRow> rows;
  const std::size_t n_max = n_list.empty() ? 0 : *std::max_element(n_list.begin(), n_list.end());
  for (std::uint64_t seed : seeds) {
    TreeAtomDistribution dist(tree, CoinPath(derive_seed(seed, "coin")));
    Stream sample_rng(derive_seed(seed, "sample"));
    std::vector<Example> sample;
    std::vector<std::size_t> drawn;
    for (std::size_t i = 0; i < n_max; ++i) {
      const std::size_t m = dist.draw_index(sample_rng);
      drawn.push_back(m);
      const auto& a = dist.atom(m);
      sample.push_back({a.instance, a.label});
    }
    for (std::size_t n : n_list) {
      auto predictor = learner(std::span<const Example>(sample).first(n));
      LowerBoundRow row;
      row.n = n;
      row.seed = seed;
      row.report = exact_risk_atoms(dist, *predictor, M);
      row.certificate_count_half = exact_risk_atoms(dist, *predictor, std::max<std::size_t>(1, M / 2)).certificate_count;
      std::vector<bool> seen(M + 1, false);
      for (std::size_t i = 0; i < n; ++i) {
        if (drawn[i] <= M) seen[drawn[i]] = true;
      }
      row.distinct_seen = static_cast<std::size_t>(std::count(seen.begin() + 1, seen.end(), true));
      row.report.unseen_count = M - row.distinct_seen;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace unigap
