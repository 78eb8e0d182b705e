#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "unigap/unigap.hpp"

namespace {

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(item, &pos);
      if (pos != item.size() || v < 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw unigap::ConfigError("not a non-negative integer list: " + text);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gap-game and realizable-learning experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, seeds, n_list, class_name, schedule, learner, adversary, path, format, out;
  std::uint64_t seed = 1;
  std::size_t depth = 0, truncation = 0, budget = 0, grid = 0, support = 0, max_rounds = 0, mc_draws = 0,
              workers = 0;

  app.add_option("--config", config_path, "JSON config file; flags override its values");
  auto* o_seed = app.add_option("--seed", seed, "First seed value");
  auto* o_seeds = app.add_option("--seeds", seeds, "Seed count, or a comma-separated seed list");
  auto* o_n = app.add_option("--n", n_list, "Comma-separated sample sizes");
  auto* o_depth = app.add_option("--depth", depth, "Tree or audit depth; pool depth for rank and game");
  auto* o_trunc = app.add_option("--truncation", truncation, "Series truncation M");
  auto* o_budget = app.add_option("--budget", budget, "Rank budget");
  auto* o_out = app.add_option("--out", out, "Output file (stdout when omitted)");
  auto* o_format = app.add_option("--format", format, "csv or json");
  auto* o_class = app.add_option("--class", class_name, "Hypothesis class");
  auto* o_schedule = app.add_option("--schedule", schedule, "Gap schedule");
  auto* o_grid = app.add_option("--grid", grid, "Grid resolution (0: experiment default)");
  auto* o_support = app.add_option("--support", support, "Restrict the counterexample class to I_1..I_P");
  auto* o_learner = app.add_option("--learner", learner, "realizable, memorize, zero, sigma or coin");
  auto* o_adv = app.add_option("--adversary", adversary, "greedy, rank, random or tree");
  auto* o_path = app.add_option("--path", path, "Bridging path: random, all-first or all-second");
  auto* o_rounds = app.add_option("--max-rounds", max_rounds, "Game horizon");
  auto* o_mc = app.add_option("--mc-draws", mc_draws, "Monte-Carlo test draws");
  auto* o_workers = app.add_option("--workers", workers, "Worker threads");

  for (const auto& name : unigap::experiment_names()) app.add_subcommand(name, "Run the " + name + " experiment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    unigap::ExperimentConfig c;
    if (!config_path.empty()) c = unigap::load_config(config_path);
    c.experiment = app.get_subcommands().front()->get_name();
    if (o_seed->count()) c.seed = seed;
    if (o_seeds->count()) {
      if (seeds.find(',') != std::string::npos) {
        c.seeds.clear();
        for (auto s : parse_sizes(seeds)) c.seeds.push_back(s);
      } else {
        c.seeds.clear();
        const auto v = parse_sizes(seeds);
        if (v.size() != 1) throw unigap::ConfigError("bad --seeds value: " + seeds);
        c.seed_count = v.front();
      }
    }
    if (o_n->count()) c.n_list = parse_sizes(n_list);
    if (o_depth->count()) c.depth = depth;
    if (o_trunc->count()) c.truncation = truncation;
    if (o_budget->count()) c.budget = budget;
    if (o_out->count()) c.out = out;
    if (o_format->count()) c.format = format;
    if (o_class->count()) c.class_name = class_name;
    if (o_schedule->count()) c.schedule = schedule;
    if (o_grid->count()) c.grid = grid;
    if (o_support->count()) c.support = support;
    if (o_learner->count()) c.learner = learner;
    if (o_adv->count()) c.adversary = adversary;
    if (o_path->count()) c.path = path;
    if (o_rounds->count()) c.max_rounds = max_rounds;
    if (o_mc->count()) c.mc_draws = mc_draws;
    if (o_workers->count()) c.workers = workers;

    const auto record = unigap::run(c);
    unigap::emit(record, c.format, c.out, std::cout);
    return 0;
  } catch (const unigap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const unigap::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
