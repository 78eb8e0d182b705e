#pragma once

// Realizable learning rule: stabilize the game on the first half of the
// sample, partition instances by the anchor nearest their label set, and fit
// a bounded-range medoid nearest-neighbour rule per cell on the second half.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "unigap/game.hpp"
#include "unigap/sample.hpp"

namespace unigap {

inline constexpr std::uint64_t kCellSearchHorizon = 1'000'000;

struct TerminalHistory {
  GameState state;
  /// Sample positions (0-based) at which the game advanced.
  std::vector<std::size_t> advance_indices;

  std::size_t K() const { return state.round(); }
  const History& tau() const { return state.history; }
  /// gamma_{K+1}.
  double gap() const { return state.next_gap(); }
};

namespace detail {

inline std::uint64_t dense_rank(const MetricSpace& space, Point y) {
  return space.dense_index(y).value_or(std::numeric_limits<std::uint64_t>::max());
}

// Labels ordered by dense-enumeration index, then value.
inline void sort_dense(const MetricSpace& space, std::vector<Point>& labels) {
  std::sort(labels.begin(), labels.end(), [&](Point a, Point b) {
    const auto ia = dense_rank(space, a), ib = dense_rank(space, b);
    return ia != ib ? ia < ib : a < b;
  });
}

}  // namespace detail

/// Scans the sample in order and advances the game whenever a far feasible
/// witness exists against which the strategy keeps the observed label.
inline TerminalHistory stabilize(const GameState& root, std::span<const Example> sample,
                                 std::size_t budget = kDefaultRankBudget) {
  TerminalHistory t{root, {}};
  const auto& cls = *root.cls;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto [x, y] = sample[i];
    if (!cls.in_domain(x)) throw DomainError(cls.name() + ": sample instance outside the domain");
    const auto commitments = t.state.history.commitments();
    const double gap = t.state.next_gap();
    auto extent = cls.feasible_extent(commitments, x);
    if (!extent || extent->second - extent->first < gap) continue;
    auto labels = cls.feasible(commitments, x);
    if (std::find(labels.begin(), labels.end(), y) == labels.end()) continue;
    std::vector<Point> witnesses;
    for (Point w : labels) {
      if (std::fabs(w - y) >= gap) witnesses.push_back(w);
    }
    detail::sort_dense(cls.label_space(), witnesses);
    for (Point w : witnesses) {
      const Move m{x, y, w};
      if (sigma_choice(t.state, m, budget) == Choice::first) {
        t.state.history.push(m, Choice::first);
        t.advance_indices.push_back(i);
        break;
      }
    }
  }
  return t;
}

/// H_K(x): feasible labels the strategy never keeps against a far feasible
/// alternative. Ascending.
inline std::vector<Point> history_label_set(const TerminalHistory& t, Point x,
                                            std::size_t budget = kDefaultRankBudget) {
  const auto& cls = *t.state.cls;
  if (!cls.in_domain(x)) throw DomainError(cls.name() + ": instance outside the domain");
  const auto labels = feasible_labels(cls, t.state.history, x);
  if (labels.empty()) return labels;
  const double gap = t.gap();
  if (labels.back() - labels.front() < gap) return labels;
  std::vector<Point> out;
  for (Point y : labels) {
    bool keep = true;
    for (Point w : labels) {
      if (std::fabs(y - w) < gap) continue;
      if (sigma_choice(t.state, Move{x, y, w}, budget) == Choice::first) {
        keep = false;
        break;
      }
    }
    if (keep) out.push_back(y);
  }
  return out;
}

/// First dense index j with some label of H within gamma of q_j.
inline std::uint64_t cell_index(const MetricSpace& labels, std::span<const Point> H, double gamma,
                                std::uint64_t horizon = kCellSearchHorizon) {
  if (H.empty()) throw DomainError("cell_index needs a nonempty label set");
  for (std::uint64_t j = 1; j <= horizon; ++j) {
    const Point q = labels.dense_point(j);
    for (Point y : H) {
      if (labels.distance(y, q) <= gamma) return j;
    }
  }
  throw SearchHorizonExceeded("no anchor within gamma among the first " + std::to_string(horizon));
}

// ---------------------------------------------------------------------------

/// Per-cell medoid k-nearest-neighbour rule restricted to the label region
/// { y : l(y, q_j) <= radius }.
class CellPredictor {
 public:
  CellPredictor(std::uint64_t j, Point anchor, double radius, std::vector<Example> data,
                MetricSpace instances, MetricSpace labels)
      : j_(j),
        anchor_(anchor),
        radius_(radius),
        data_(std::move(data)),
        instances_(instances),
        labels_(labels) {
    for (const auto& e : data_) {
      if (labels_.distance(e.y, anchor_) > radius_ + kRealTolerance) {
        throw RegionViolation("cell " + std::to_string(j_) + ": label outside the cell region");
      }
    }
  }

  std::uint64_t index() const { return j_; }
  Point anchor() const { return anchor_; }
  double radius() const { return radius_; }
  bool is_default() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }
  const std::vector<Example>& data() const { return data_; }

  std::size_t neighbours() const {
    return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(data_.size()))));
  }

  Point predict(Point x) const {
    if (data_.empty()) return anchor_;
    const std::size_t k = neighbours();
    std::vector<std::size_t> order(data_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto closer = [&](std::size_t a, std::size_t b) {
      const double da = instances_.distance(x, data_[a].x), db = instances_.distance(x, data_[b].x);
      return da != db ? da < db : a < b;
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);
    std::vector<Point> near;
    near.reserve(k);
    for (std::size_t i = 0; i < k; ++i) near.push_back(data_[order[i]].y);
    return medoid(near);
  }

  /// Element of the multiset minimizing summed distance to it; ties by dense
  /// index, then value.
  Point medoid(std::span<const Point> ys) const {
    std::optional<Point> best;
    double best_cost = 0.0;
    for (Point c : ys) {
      double cost = 0.0;
      for (Point y : ys) cost += labels_.distance(c, y);
      const bool better =
          !best || cost < best_cost ||
          (cost == best_cost && (detail::dense_rank(labels_, c) < detail::dense_rank(labels_, *best) ||
                                 (detail::dense_rank(labels_, c) == detail::dense_rank(labels_, *best) &&
                                  c < *best)));
      if (better) {
        best = c;
        best_cost = cost;
      }
    }
    return *best;
  }

 private:
  std::uint64_t j_;
  Point anchor_;
  double radius_;
  std::vector<Example> data_;
  MetricSpace instances_;
  MetricSpace labels_;
};

inline CellPredictor medoid_fit(std::span<const Example> cell_sample, std::uint64_t j, Point anchor,
                                double radius, const MetricSpace& instances, const MetricSpace& labels) {
  return CellPredictor(j, anchor, radius, {cell_sample.begin(), cell_sample.end()}, instances, labels);
}

inline Point medoid_predict(const CellPredictor& p, Point x) { return p.predict(x); }

// ---------------------------------------------------------------------------

struct TrainOptions {
  std::size_t budget = kDefaultRankBudget;
  /// Per-instance query cache entries kept before the cache is cleared.
  std::size_t cache_limit = 1 << 16;
};

/// The aggregate predictor. Cells are fitted on first use; prediction is safe
/// for concurrent callers.
class RealizablePredictor final : public Predictor {
 public:
  struct Query {
    std::vector<Point> H;
    /// Nullopt when H is empty and the fallback anchor q_1 is used.
    std::optional<std::uint64_t> cell;
    Point prediction = 0.0;
  };

  RealizablePredictor(TerminalHistory terminal, std::vector<Example> second_half, TrainOptions opts)
      : terminal_(std::move(terminal)), opts_(opts), second_(std::move(second_half)) {
    const auto& labels = terminal_.state.cls->label_space();
    const double radius = 2.0 * terminal_.gap();
    for (const auto& e : second_) {
      auto [H, cell] = locate(e.x);
      if (!cell || labels.distance(e.y, labels.dense_point(*cell)) > radius + kRealTolerance) {
        ++dropped_;
        continue;
      }
      cell_data_[*cell].push_back(e);
    }
  }

  Point predict(Point x) const override { return query(x).prediction; }

  Query query(Point x) const {
    {
      std::lock_guard lock(cache_mutex_);
      auto it = cache_.find(x);
      if (it != cache_.end()) return it->second;
    }
    Query q;
    std::tie(q.H, q.cell) = locate(x);
    const auto& labels = terminal_.state.cls->label_space();
    q.prediction = q.cell ? cell(*q.cell).predict(x) : labels.dense_point(1);
    std::lock_guard lock(cache_mutex_);
    if (cache_.size() >= opts_.cache_limit) cache_.clear();
    cache_.emplace(x, q);
    return q;
  }

  /// Fitted predictor of cell j (fit once, on first request).
  const CellPredictor& cell(std::uint64_t j) const {
    std::lock_guard lock(cell_mutex_);
    auto it = fitted_.find(j);
    if (it == fitted_.end()) {
      const auto& cls = *terminal_.state.cls;
      auto data = cell_data_.find(j);
      std::span<const Example> points;
      if (data != cell_data_.end()) points = data->second;
      it = fitted_
               .emplace(j, std::make_unique<CellPredictor>(medoid_fit(
                               points, j, cls.label_space().dense_point(j), 2.0 * terminal_.gap(),
                               cls.instance_space(), cls.label_space())))
               .first;
    }
    return *it->second;
  }

  const TerminalHistory& terminal() const { return terminal_; }
  std::size_t K() const { return terminal_.K(); }
  std::size_t dropped() const { return dropped_; }
  std::size_t cells_used() const { return cell_data_.size(); }
  std::size_t budget() const { return opts_.budget; }

  const std::vector<Example>& second_half() const { return second_; }

  /// K, the terminal history, schedule, pool and anchors of non-empty cells.
  nlohmann::json manifest() const {
    nlohmann::json m;
    m["class"] = terminal_.state.cls->name();
    m["schedule"] = terminal_.state.schedule.name();
    m["budget"] = opts_.budget;
    m["K"] = terminal_.K();
    m["advance_indices"] = terminal_.advance_indices;
    m["pool"] = *terminal_.state.pool;
    nlohmann::json rounds = nlohmann::json::array();
    std::size_t k = 0;
    for (const auto& r : terminal_.tau().rounds()) rounds.push_back(to_json(TranscriptRow{++k, r.move, r.choice, {}}));
    m["history"] = rounds;
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& [j, pts] : cell_data_) {
      cells.push_back({{"j", j}, {"anchor", terminal_.state.cls->label_space().dense_point(j)}, {"size", pts.size()}});
    }
    m["cells"] = cells;
    m["dropped"] = dropped_;
    return m;
  }

 private:
  std::pair<std::vector<Point>, std::optional<std::uint64_t>> locate(Point x) const {
    auto H = history_label_set(terminal_, x, opts_.budget);
    if (H.empty()) return {std::move(H), std::nullopt};
    const auto j = cell_index(terminal_.state.cls->label_space(), H, terminal_.gap());
    return {std::move(H), j};
  }

  TerminalHistory terminal_;
  TrainOptions opts_;
  std::vector<Example> second_;
  std::size_t dropped_ = 0;
  std::map<std::uint64_t, std::vector<Example>> cell_data_;
  mutable std::mutex cell_mutex_;
  mutable std::map<std::uint64_t, std::unique_ptr<CellPredictor>> fitted_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<Point, Query> cache_;
};

/// Splits the sample into halves of size floor(n/2) (an odd last point is
/// dropped), stabilizes on the first and fits cells on the second.
inline std::shared_ptr<RealizablePredictor> train(const GameState& root, std::span<const Example> sample,
                                                  const TrainOptions& opts = {}) {
  const std::size_t half = sample.size() / 2;
  auto terminal = stabilize(root, sample.first(half), opts.budget);
  std::vector<Example> second(sample.begin() + static_cast<std::ptrdiff_t>(half),
                              sample.begin() + static_cast<std::ptrdiff_t>(2 * half));
  return std::make_shared<RealizablePredictor>(std::move(terminal), std::move(second), opts);
}

/// Rebuilds a predictor from its manifest and second-half sample. The root
/// supplies the class and schedule, which must match the manifest.
inline std::shared_ptr<RealizablePredictor> from_manifest(const nlohmann::json& m, const GameState& root,
                                                          std::span<const Example> second_half) {
  try {
    if (m.at("class").get<std::string>() != root.cls->name() ||
        m.at("schedule").get<std::string>() != root.schedule.name()) {
      throw ConfigError("manifest class or schedule does not match");
    }
    GameState state(root.cls, root.schedule, m.at("pool").get<std::vector<Point>>());
    for (const auto& r : m.at("history")) {
      const auto row = transcript_row_from_json(r);
      state.history.push(row.move, row.choice);
    }
    if (state.round() != m.at("K").get<std::size_t>()) throw IoError("manifest K disagrees with history");
    TerminalHistory t{state, m.at("advance_indices").get<std::vector<std::size_t>>()};
    TrainOptions opts;
    opts.budget = m.at("budget").get<std::size_t>();
    return std::make_shared<RealizablePredictor>(std::move(t),
                                                 std::vector<Example>(second_half.begin(), second_half.end()), opts);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad manifest: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

struct RiskEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t draws = 0;
};

/// Monte-Carlo mean of l(prediction, target) over the given instances.
inline RiskEstimate mc_risk(const Predictor& predictor, const std::function<Point(Point)>& target,
                            std::span<const Point> xs) {
  RiskEstimate r;
  r.draws = xs.size();
  if (xs.empty()) return r;
  double sum = 0.0, sq = 0.0;
  for (Point x : xs) {
    const double loss = std::fabs(predictor.predict(x) - target(x));
    sum += loss;
    sq += loss * loss;
  }
  const double n = static_cast<double>(xs.size());
  r.mean = sum / n;
  if (xs.size() > 1) {
    const double var = std::max(0.0, (sq - n * r.mean * r.mean) / (n - 1.0));
    r.std_error = std::sqrt(var / n);
  }
  return r;
}

}  // namespace unigap
