#pragma once

// Batch experiment driver: configuration, seeded runs and CSV/JSON output.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"

#include "unigap/adversary_lab.hpp"
#include "unigap/classes.hpp"
#include "unigap/game.hpp"
#include "unigap/learner.hpp"
#include "unigap/tree.hpp"

namespace unigap {

inline constexpr const char* kVersion = "0.1.0";

inline std::vector<std::string> experiment_names() {
  return {"lower-bound", "upper-bound", "counterexample", "game", "rank", "validate-tree", "bridging"};
}

struct ExperimentConfig {
  std::string experiment;
  /// Empty fields take the experiment or class default.
  std::string class_name;
  std::string schedule;
  /// Unset means the experiment default; an empty list yields header-only output.
  std::optional<std::vector<std::size_t>> n_list;

  std::vector<std::size_t> sizes() const { return n_list.value_or(std::vector<std::size_t>{}); }
  std::uint64_t seed = 1;
  /// Explicit seed values; when empty, seed_count consecutive values from seed.
  std::vector<std::uint64_t> seeds;
  std::size_t seed_count = 1;
  std::size_t depth = 0;
  std::size_t truncation = 0;
  std::size_t budget = kDefaultRankBudget;
  std::size_t grid = 0;
  std::size_t support = 0;
  std::string learner;
  std::string adversary = "greedy";
  std::string path = "random";
  std::size_t max_rounds = 32;
  std::size_t mc_draws = 10'000;
  std::size_t workers = 1;
  std::string format = "csv";
  std::string out;

  std::vector<std::uint64_t> seed_values() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out_seeds;
    for (std::size_t i = 0; i < seed_count; ++i) out_seeds.push_back(seed + i);
    return out_seeds;
  }

  /// Fields that determine the output, as canonical JSON.
  nlohmann::ordered_json canonical() const {
    nlohmann::ordered_json j;
    j["experiment"] = experiment;
    j["class"] = class_name;
    j["schedule"] = schedule;
    j["n"] = sizes();
    j["seeds"] = seed_values();
    j["depth"] = depth;
    j["truncation"] = truncation;
    j["budget"] = budget;
    j["grid"] = grid;
    j["support"] = support;
    j["learner"] = learner;
    j["adversary"] = adversary;
    j["path"] = path;
    j["max_rounds"] = max_rounds;
    j["mc_draws"] = mc_draws;
    return j;
  }

  std::string hash() const {
    char buf[17];
    const auto h = fnv1a(canonical().dump());
    auto res = std::to_chars(buf, buf + sizeof buf, h, 16);
    std::string s(buf, res.ptr);
    return std::string(16 - s.size(), '0') + s;
  }
};

namespace detail {

template <class T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline std::string default_class(const std::string& experiment) {
  if (experiment == "lower-bound" || experiment == "counterexample" || experiment == "validate-tree") {
    return "counterexample";
  }
  if (experiment == "bridging") return "binary-digit";
  return "lipschitz";
}

inline std::string default_schedule(const std::string& cls) {
  if (cls == "counterexample") return "counterexample";
  if (cls == "binary-digit") return "identity";
  return "linear:3";
}

}  // namespace detail

/// Reads a JSON config; unknown keys are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {}) {
  static const std::vector<std::string> known = {
      "experiment", "class", "schedule", "n", "seed", "seeds", "depth", "truncation", "budget", "grid",
      "support", "learner", "adversary", "path", "max_rounds", "mc_draws", "workers", "format", "out"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key: " + key);
    }
    detail::read_if(j, "experiment", base.experiment);
    detail::read_if(j, "class", base.class_name);
    detail::read_if(j, "schedule", base.schedule);
    if (j.contains("n")) base.n_list = j.at("n").get<std::vector<std::size_t>>();
    detail::read_if(j, "seed", base.seed);
    if (j.contains("seeds")) {
      if (j.at("seeds").is_array()) {
        base.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
      } else {
        base.seeds.clear();
        base.seed_count = j.at("seeds").get<std::size_t>();
      }
    }
    detail::read_if(j, "depth", base.depth);
    detail::read_if(j, "truncation", base.truncation);
    detail::read_if(j, "budget", base.budget);
    detail::read_if(j, "grid", base.grid);
    detail::read_if(j, "support", base.support);
    detail::read_if(j, "learner", base.learner);
    detail::read_if(j, "adversary", base.adversary);
    detail::read_if(j, "path", base.path);
    detail::read_if(j, "max_rounds", base.max_rounds);
    detail::read_if(j, "mc_draws", base.mc_draws);
    detail::read_if(j, "workers", base.workers);
    detail::read_if(j, "format", base.format);
    detail::read_if(j, "out", base.out);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return base;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  try {
    return config_from_json(nlohmann::json::parse(in), std::move(base));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

/// Fills defaults and checks every field. Returns the resolved config.
inline ExperimentConfig resolve(ExperimentConfig c) {
  const auto names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
    throw ConfigError("unknown experiment: " + c.experiment);
  }
  if (c.class_name.empty()) c.class_name = detail::default_class(c.experiment);
  const auto classes = class_names();
  if (std::find(classes.begin(), classes.end(), c.class_name) == classes.end()) {
    throw ConfigError("unknown class: " + c.class_name);
  }
  if (c.schedule.empty()) c.schedule = detail::default_schedule(c.class_name);
  schedule_from_name(c.schedule);
  if (c.budget == 0) throw ConfigError("budget must be positive");
  if (c.max_rounds == 0) throw ConfigError("max-rounds must be positive");
  if (c.mc_draws == 0) throw ConfigError("mc draws must be positive");
  if (c.workers == 0) throw ConfigError("workers must be positive");
  if (c.seeds.empty() && c.seed_count == 0) throw ConfigError("seed count must be positive");
  if (c.format != "csv" && c.format != "json") throw ConfigError("format must be csv or json");
  if (c.path != "random" && c.path != "all-first" && c.path != "all-second") {
    throw ConfigError("path must be random, all-first or all-second");
  }
  for (auto n : c.sizes()) {
    if (n == 0 && c.experiment != "lower-bound" && c.experiment != "counterexample") {
      throw ConfigError("sample sizes must be positive");
    }
  }
  if (c.experiment == "lower-bound") {
    if (!c.n_list) c.n_list = std::vector<std::size_t>{10, 100};
    if (c.truncation == 0) c.truncation = 500;
    if (c.learner.empty()) c.learner = "memorize";
  } else if (c.experiment == "upper-bound") {
    if (!c.n_list) c.n_list = std::vector<std::size_t>{50, 200, 800, 3200};
    if (c.grid == 0 && (c.class_name == "lipschitz" || c.class_name == "monotone")) c.grid = 256;
    if (c.learner.empty()) c.learner = "realizable";
  } else if (c.experiment == "counterexample") {
    if (!c.n_list) c.n_list = std::vector<std::size_t>{10, 100};
    if (c.truncation == 0) c.truncation = 60;
    if (c.learner.empty()) c.learner = "memorize";
  } else if (c.experiment == "game") {
    if (c.learner.empty()) c.learner = "sigma";
  } else if (c.experiment == "validate-tree") {
    if (c.depth == 0) c.depth = 8;
  } else if (c.experiment == "bridging") {
    if (c.depth == 0) c.depth = 20;
  }
  return c;
}

// ---------------------------------------------------------------------------

using Value = std::variant<std::int64_t, double, std::string, std::nullptr_t>;

struct RunRecord {
  std::string experiment;
  std::string config_hash;
  std::string version = kVersion;
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
};

namespace detail {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_field(const Value& v) {
  struct Visitor {
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(std::nullptr_t) const { return ""; }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string out = "\"";
      for (char c : s) {
        if (c == '"') out += '"';
        out += c;
      }
      return out + "\"";
    }
  };
  return std::visit(Visitor{}, v);
}

inline nlohmann::ordered_json json_value(const Value& v) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::int64_t i) const { return i; }
    nlohmann::ordered_json operator()(double d) const {
      if (std::isfinite(d)) return d;
      return format_double(d);
    }
    nlohmann::ordered_json operator()(std::nullptr_t) const { return nullptr; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

inline Value count(std::size_t v) { return static_cast<std::int64_t>(v); }
inline Value seed_value(std::uint64_t v) { return static_cast<std::int64_t>(v); }

// Runs task(i) for i in [0, n) on up to `workers` threads. Exceptions are
// rethrown for the lowest failing index so the outcome is order-independent.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(workers, n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline std::string join_param(const Param& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(p[i]);
  }
  return out;
}

inline std::shared_ptr<const HypothesisClass> build_class(const ExperimentConfig& c) {
  ClassOptions o;
  o.resolution = c.grid;
  o.support = c.support;
  if (c.experiment == "rank" || c.experiment == "game") o.pool_depth = c.depth;
  return make_class(c.class_name, o);
}

inline GapTree build_tree(const std::string& cls) {
  if (cls == "counterexample") return counterexample_tree();
  if (cls == "binary-digit") return binary_digit_tree();
  throw ConfigError("no gap tree is defined for class " + cls);
}

inline GameState root_state(const ExperimentConfig& c) {
  return GameState(build_class(c), schedule_from_name(c.schedule));
}

// Wraps budget errors with the class name.
template <class F>
auto naming_budget(const std::string& cls, F&& f) {
  try {
    return f();
  } catch (const BudgetExceeded& e) {
    throw BudgetExceeded("class " + cls + ": " + e.what());
  }
}

inline SampleLearner sample_learner(const ExperimentConfig& c) {
  if (c.learner == "memorize") return memorize_learner(0.0);
  if (c.learner == "zero") {
    return [](std::span<const Example>) -> std::shared_ptr<const Predictor> {
      return std::make_shared<ConstantPredictor>(0.0);
    };
  }
  if (c.learner == "realizable") {
    auto root = std::make_shared<const GameState>(root_state(c));
    TrainOptions opts;
    opts.budget = c.budget;
    return [root, opts](std::span<const Example> s) -> std::shared_ptr<const Predictor> {
      return train(*root, s, opts);
    };
  }
  throw ConfigError("unknown learner: " + c.learner);
}

// --- experiments -----------------------------------------------------------

inline RunRecord run_lower_bound(const ExperimentConfig& c) {
  RunRecord r;
  r.columns = {"n", "seed", "M", "partial_sum", "tail_bound", "certificate_count",
               "certificate_count_half", "unseen_count", "distinct_seen"};
  const GapTree tree = build_tree(c.class_name);
  auto learner = sample_learner(c);
  const auto seeds = c.seed_values();
  std::vector<std::vector<LowerBoundRow>> per_seed(seeds.size());
  parallel_for(seeds.size(), c.workers, [&](std::size_t i) {
    const std::uint64_t s = seeds[i];
    per_seed[i] = naming_budget(c.class_name, [&] {
      return lower_bound_experiment(tree, learner, c.sizes(), std::span<const std::uint64_t>(&s, 1), c.truncation);
    });
  });
  for (const auto& rows : per_seed) {
    for (const auto& row : rows) {
      r.rows.push_back({count(row.n), seed_value(row.seed), count(row.report.truncation), row.report.partial_sum,
                        row.report.tail_bound, count(row.report.certificate_count),
                        count(row.certificate_count_half), count(row.report.unseen_count), count(row.distinct_seen)});
    }
  }
  return r;
}

struct UpperBoundRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  RiskEstimate risk;
  RiskEstimate memorize;
  std::size_t K = 0;
  std::size_t stable_index = 0;
  std::size_t cells_used = 0;
  std::size_t dropped = 0;
};

/// One seed of the upper-bound experiment: a random target, one sample stream
/// shared by prefix across n, and common Monte-Carlo test instances.
inline std::vector<UpperBoundRow> upper_bound_seed(const ExperimentConfig& c, std::uint64_t seed) {
  const GameState root = root_state(c);
  const auto& cls = *root.cls;
  Stream target_rng(derive_seed(seed, "target"));
  const Param theta = cls.random_param(target_rng);
  auto target = [&](Point x) { return evaluate(cls, theta, x); };
  const auto n_list = c.sizes();
  const std::size_t n_max = n_list.empty() ? 0 : *std::max_element(n_list.begin(), n_list.end());
  Stream sample_rng(derive_seed(seed, "sample"));
  std::vector<Example> sample;
  for (std::size_t i = 0; i < n_max; ++i) {
    const Point x = cls.random_instance(sample_rng);
    sample.push_back({x, target(x)});
  }
  Stream mc_rng(derive_seed(seed, "mc"));
  std::vector<Point> xs;
  for (std::size_t i = 0; i < c.mc_draws; ++i) xs.push_back(cls.random_instance(mc_rng));

  std::vector<UpperBoundRow> rows;
  TrainOptions opts;
  opts.budget = c.budget;
  for (std::size_t n : n_list) {
    const auto prefix = std::span<const Example>(sample).first(n);
    UpperBoundRow row;
    row.n = n;
    row.seed = seed;
    if (c.learner == "realizable") {
      auto p = train(root, prefix, opts);
      row.risk = mc_risk(*p, target, xs);
      row.K = p->K();
      const auto& adv = p->terminal().advance_indices;
      row.stable_index = adv.empty() ? 0 : adv.back() + 1;
      row.cells_used = p->cells_used();
      row.dropped = p->dropped();
    } else {
      auto p = sample_learner(c)(prefix);
      row.risk = mc_risk(*p, target, xs);
    }
    row.memorize = mc_risk(*memorize_baseline(prefix, 0.0), target, xs);
    rows.push_back(row);
  }
  return rows;
}

inline RunRecord run_upper_bound(const ExperimentConfig& c) {
  RunRecord r;
  r.columns = {"n", "seed", "risk", "std_error", "K", "stable_index", "cells_used", "dropped",
               "memorize_risk", "memorize_std_error"};
  const auto seeds = c.seed_values();
  std::vector<std::vector<UpperBoundRow>> per_seed(seeds.size());
  parallel_for(seeds.size(), c.workers, [&](std::size_t i) {
    per_seed[i] = naming_budget(c.class_name, [&] { return upper_bound_seed(c, seeds[i]); });
  });
  for (const auto& rows : per_seed) {
    for (const auto& row : rows) {
      r.rows.push_back({count(row.n), seed_value(row.seed), row.risk.mean, row.risk.std_error, count(row.K),
                        count(row.stable_index), count(row.cells_used), count(row.dropped), row.memorize.mean,
                        row.memorize.std_error});
    }
  }
  return r;
}

inline RunRecord run_counterexample(const ExperimentConfig& c) {
  if (c.class_name != "counterexample") throw ConfigError("the counterexample experiment needs class counterexample");
  if (c.truncation > UniformIntervalDistribution::kMaxDepth) throw ConfigError("truncation must be at most 511");
  RunRecord r;
  r.columns = {"n", "seed", "M", "partial_sum", "tail_bound", "certificate_count", "unseen_count"};
  auto learner = sample_learner(c);
  const auto seeds = c.seed_values();
  std::vector<std::vector<std::vector<Value>>> per_seed(seeds.size());
  parallel_for(seeds.size(), c.workers, [&](std::size_t i) {
    const std::uint64_t seed = seeds[i];
    UniformIntervalDistribution dist(CoinPath(derive_seed(seed, "coin")));
    Stream sample_rng(derive_seed(seed, "sample"));
    const auto n_list = c.sizes();
    const std::size_t n_max = n_list.empty() ? 0 : *std::max_element(n_list.begin(), n_list.end());
    std::vector<Example> sample;
    for (std::size_t k = 0; k < n_max; ++k) sample.push_back(dist.sample(sample_rng));
    for (std::size_t n : n_list) {
      const auto prefix = std::span<const Example>(sample).first(n);
      auto p = naming_budget(c.class_name, [&] { return learner(prefix); });
      auto report = interval_risk_quadrature(dist, *p, c.truncation);
      std::vector<bool> seen(c.truncation + 1, false);
      for (const auto& e : prefix) {
        const auto k = static_cast<std::size_t>(interval_index(e.x));
        if (k <= c.truncation) seen[k] = true;
      }
      const auto unseen = static_cast<std::size_t>(std::count(seen.begin() + 1, seen.end(), false));
      per_seed[i].push_back({count(n), seed_value(seed), count(report.truncation), report.partial_sum,
                             report.tail_bound, count(report.certificate_count), count(unseen)});
    }
  });
  for (auto& rows : per_seed) {
    for (auto& row : rows) r.rows.push_back(std::move(row));
  }
  return r;
}

inline RunRecord run_game(const ExperimentConfig& c) {
  RunRecord r;
  r.columns = {"seed", "round", "xi", "eta1", "eta2", "choice", "rank", "outcome"};
  const GameState root = root_state(c);
  const auto seeds = c.seed_values();
  std::vector<Transcript> transcripts(seeds.size());
  parallel_for(seeds.size(), c.workers, [&](std::size_t i) {
    auto adversary = make_adversary(c.adversary, root, c.budget);
    auto learner = make_game_learner(c.learner, c.budget);
    PlayOptions opts;
    opts.max_rounds = c.max_rounds;
    opts.rank_budget = c.budget;
    opts.record_rank = c.learner == "sigma";
    transcripts[i] = naming_budget(c.class_name, [&] { return play(root, *adversary, *learner, opts, seeds[i]); });
  });
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (const auto& row : transcripts[i].rows) {
      r.rows.push_back({seed_value(seeds[i]), count(row.round), row.move.instance, row.move.first, row.move.second,
                        static_cast<std::int64_t>(to_index(row.choice)),
                        row.rank ? count(*row.rank)
                                 : c.learner == "sigma" ? Value(std::string("exceeded")) : Value(nullptr),
                        std::string()});
    }
    r.rows.push_back({seed_value(seeds[i]), count(transcripts[i].size()), nullptr, nullptr, nullptr, nullptr,
                      nullptr, std::string(transcripts[i].adversary_stuck ? "adversary-stuck" : "max-rounds")});
  }
  return r;
}

inline RunRecord run_rank(const ExperimentConfig& c) {
  RunRecord r;
  r.columns = {"class", "schedule", "budget", "rank"};
  const auto result = game_rank(root_state(c), c.budget);
  r.rows.push_back({c.class_name, c.schedule, count(c.budget), result.to_string()});
  return r;
}

inline RunRecord run_validate_tree(const ExperimentConfig& c) {
  RunRecord r;
  r.columns = {"depth", "required_gap", "min_gap", "nodes_checked", "ok", "valid", "paths_checked", "exhaustive"};
  auto cls = build_class(c);
  const GapTree tree = build_tree(c.class_name);
  if (c.depth > tree.max_depth()) throw ConfigError("depth exceeds the tree depth");
  ValidateOptions opts;
  opts.seed = c.seed;
  const auto report = validate_tree(*cls, tree, c.depth, opts);
  for (const auto& level : report.levels) {
    r.rows.push_back({count(level.depth), level.required_gap, level.min_gap, count(level.nodes_checked),
                      count(level.ok ? 1 : 0), count(report.valid ? 1 : 0), count(report.paths_checked),
                      count(report.exhaustive ? 1 : 0)});
  }
  return r;
}

inline RunRecord run_bridging(const ExperimentConfig& c) {
  RunRecord r;
  r.columns = {"seed", "depth", "nonempty", "witness"};
  auto cls = build_class(c);
  const GapTree tree = build_tree(c.class_name);
  if (c.depth > tree.max_depth()) throw ConfigError("depth exceeds the tree depth");
  for (std::uint64_t seed : c.seed_values()) {
    std::vector<Choice> path(c.depth, c.path == "all-second" ? Choice::second : Choice::first);
    if (c.path == "random") path = CoinPath(derive_seed(seed, "coin")).prefix(c.depth);
    for (const auto& level : bridging_audit(*cls, tree, path, c.depth)) {
      r.rows.push_back({seed_value(seed), count(level.depth), count(level.nonempty ? 1 : 0),
                        level.witness ? Value(join_param(*level.witness)) : Value(nullptr)});
    }
  }
  return r;
}

}  // namespace detail

/// Runs one resolved or unresolved config.
inline RunRecord run(const ExperimentConfig& config) {
  const ExperimentConfig c = resolve(config);
  static const std::map<std::string, std::function<RunRecord(const ExperimentConfig&)>> table = {
      {"lower-bound", detail::run_lower_bound},     {"upper-bound", detail::run_upper_bound},
      {"counterexample", detail::run_counterexample}, {"game", detail::run_game},
      {"rank", detail::run_rank},                   {"validate-tree", detail::run_validate_tree},
      {"bridging", detail::run_bridging}};
  RunRecord r = table.at(c.experiment)(c);
  r.experiment = c.experiment;
  r.config_hash = c.hash();
  return r;
}

inline void write_csv(std::ostream& out, const RunRecord& r) {
  for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
  out << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::csv_field(row[i]);
    out << '\n';
  }
}

inline nlohmann::ordered_json to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["meta"] = {{"experiment", r.experiment}, {"config_hash", r.config_hash}, {"version", r.version},
               {"columns", r.columns}};
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) o[r.columns[i]] = detail::json_value(row[i]);
    rows.push_back(o);
  }
  j["rows"] = rows;
  return j;
}

inline void write_json(std::ostream& out, const RunRecord& r) { out << to_json(r).dump(2) << '\n'; }

/// Writes the record to path (stdout when empty) in the given format.
inline void emit(const RunRecord& r, const std::string& format, const std::string& path, std::ostream& fallback) {
  std::ostringstream buf;
  if (format == "csv") {
    write_csv(buf, r);
  } else if (format == "json") {
    write_json(buf, r);
  } else {
    throw ConfigError("format must be csv or json");
  }
  if (path.empty()) {
    fallback << buf.str();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  out << buf.str();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace unigap
