#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "unigap/harness.hpp"

using namespace unigap;

namespace {

ExperimentConfig config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  return c;
}

std::string csv(const RunRecord& r) {
  std::ostringstream out;
  write_csv(out, r);
  return out.str();
}

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(fields);
  }
  return rows;
}

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const auto tmp = std::filesystem::temp_directory_path() / ("unigap_cli_" + std::to_string(::getpid()) + ".txt");
  const std::string cmd = std::string(UNIGAP_CLI_PATH) + " " + args + " > " + tmp.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(tmp);
  r.out.assign(std::istreambuf_iterator<char>(in), {});
  std::filesystem::remove(tmp);
  return r;
}

}  // namespace

TEST(Config, ResolveFillsExperimentDefaults) {
  const auto lb = resolve(config("lower-bound"));
  EXPECT_EQ(lb.class_name, "counterexample");
  EXPECT_EQ(lb.schedule, "counterexample");
  EXPECT_EQ(lb.sizes(), (std::vector<std::size_t>{10, 100}));
  EXPECT_EQ(lb.truncation, 500u);
  EXPECT_EQ(lb.learner, "memorize");
  const auto ub = resolve(config("upper-bound"));
  EXPECT_EQ(ub.class_name, "lipschitz");
  EXPECT_EQ(ub.grid, 256u);
  EXPECT_EQ(ub.learner, "realizable");
  EXPECT_EQ(ub.sizes(), (std::vector<std::size_t>{50, 200, 800, 3200}));
  EXPECT_EQ(resolve(config("bridging")).class_name, "binary-digit");
  EXPECT_EQ(resolve(config("bridging")).depth, 20u);
  EXPECT_EQ(resolve(config("game")).learner, "sigma");
}

TEST(Config, ResolveRejectsBadValues) {
  EXPECT_THROW(resolve(config("nope")), ConfigError);
  auto c = config("rank");
  c.class_name = "nope";
  EXPECT_THROW(resolve(c), ConfigError);
  c = config("rank");
  c.schedule = "cubic";
  EXPECT_THROW(resolve(c), ConfigError);
  c = config("rank");
  c.budget = 0;
  EXPECT_THROW(resolve(c), ConfigError);
  c = config("rank");
  c.format = "xml";
  EXPECT_THROW(resolve(c), ConfigError);
  c = config("bridging");
  c.path = "sideways";
  EXPECT_THROW(resolve(c), ConfigError);
  c = config("upper-bound");
  c.n_list = std::vector<std::size_t>{0, 10};
  EXPECT_THROW(resolve(c), ConfigError);
  c = config("rank");
  c.workers = 0;
  EXPECT_THROW(resolve(c), ConfigError);
}

TEST(Config, JsonLoading) {
  const auto c = config_from_json(nlohmann::json::parse(
      R"({"experiment":"lower-bound","n":[5,7],"seeds":[3,9],"truncation":40,"workers":2})"));
  EXPECT_EQ(c.sizes(), (std::vector<std::size_t>{5, 7}));
  EXPECT_EQ(c.seed_values(), (std::vector<std::uint64_t>{3, 9}));
  EXPECT_EQ(c.truncation, 40u);
  const auto counted = config_from_json(nlohmann::json::parse(R"({"seed":4,"seeds":3})"));
  EXPECT_EQ(counted.seed_values(), (std::vector<std::uint64_t>{4, 5, 6}));
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"bogus":1})")), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"n":"ten"})")), ConfigError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse("[1]")), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, HashIgnoresExecutionOnlyFields) {
  auto a = resolve(config("lower-bound"));
  auto b = a;
  b.workers = 4;
  b.format = "json";
  b.out = "x.csv";
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  b.seed = 2;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  try {
    detail::parallel_for(20, 4, [](std::size_t i) {
      if (i == 7 || i == 13) throw DomainError("task " + std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const DomainError& e) {
    EXPECT_STREQ(e.what(), "task 7");
  }
}

TEST(Output, WorkerCountDoesNotChangeBytes) {
  for (const auto& experiment : {"lower-bound", "counterexample", "upper-bound", "game"}) {
    auto c = config(experiment);
    c.seed_count = 5;
    if (std::string(experiment) == "upper-bound") {
      c.n_list = std::vector<std::size_t>{20, 80};
      c.mc_draws = 500;
    }
    if (std::string(experiment) == "game") {
      c.class_name = "counterexample";
      c.learner = "coin";
      c.adversary = "random";
      c.max_rounds = 6;
    }
    const auto one = csv(run(c));
    c.workers = 3;
    EXPECT_EQ(one, csv(run(c))) << experiment;
    EXPECT_EQ(one, csv(run(c))) << experiment;
  }
}

TEST(Output, EmptySizeListGivesHeaderOnly) {
  auto c = config("lower-bound");
  c.n_list = std::vector<std::size_t>{};
  EXPECT_EQ(csv(run(c)),
            "n,seed,M,partial_sum,tail_bound,certificate_count,certificate_count_half,unseen_count,distinct_seen\n");
}

TEST(Output, JsonAndCsvAgree) {
  auto c = config("lower-bound");
  c.seed_count = 3;
  c.truncation = 80;
  const auto record = run(c);
  const auto table = split_csv(csv(record));
  const auto j = to_json(record);
  EXPECT_EQ(j["meta"]["config_hash"], record.config_hash);
  EXPECT_EQ(j["meta"]["version"], kVersion);
  ASSERT_EQ(table.size(), j["rows"].size() + 1);
  for (std::size_t r = 0; r < j["rows"].size(); ++r) {
    const auto& row = j["rows"][r];
    for (std::size_t i = 0; i < record.columns.size(); ++i) {
      const auto& v = row[record.columns[i]];
      EXPECT_EQ(std::stod(table[r + 1][i]), v.get<double>()) << record.columns[i];
    }
  }
}

TEST(Output, SeedsAreIsolated) {
  auto c = config("lower-bound");
  c.seeds = {1, 2, 3};
  c.truncation = 100;
  const auto all = run(c);
  c.seeds = {3};
  const auto alone = run(c);
  ASSERT_EQ(alone.rows.size(), 2u);
  EXPECT_EQ(all.rows[4], alone.rows[0]);
  EXPECT_EQ(all.rows[5], alone.rows[1]);
}

TEST(Output, SamplesAreNestedAcrossSizes) {
  auto c = config("lower-bound");
  c.n_list = std::vector<std::size_t>{10, 100};
  c.truncation = 200;
  const auto both = run(c);
  c.n_list = std::vector<std::size_t>{10};
  const auto small = run(c);
  EXPECT_EQ(both.rows[0], small.rows[0]);
}

TEST(Experiments, RankValidateAndBridging) {
  auto rank = config("rank");
  EXPECT_EQ(csv(run(rank)), "class,schedule,budget,rank\nlipschitz,linear:3,16,1\n");
  rank.class_name = "counterexample";
  rank.budget = 4;
  rank.depth = 10;
  EXPECT_EQ(std::get<std::string>(run(rank).rows[0][3]), "exceeded");

  auto vt = config("validate-tree");
  vt.class_name = "counterexample";
  const auto report = run(vt);
  ASSERT_EQ(report.rows.size(), 8u);
  for (const auto& row : report.rows) {
    EXPECT_EQ(std::get<std::int64_t>(row[4]), 1);
    EXPECT_EQ(std::get<std::int64_t>(row[6]), 256);
  }
  vt.class_name = "lipschitz";
  EXPECT_THROW(run(vt), ConfigError);

  auto br = config("bridging");
  br.path = "all-second";
  br.depth = 6;
  const auto levels = run(br);
  ASSERT_EQ(levels.rows.size(), 6u);
  EXPECT_EQ(std::get<std::string>(levels.rows[5][3]), "63");
}

TEST(Experiments, GameRowsEndWithOutcome) {
  auto g = config("game");
  g.seed_count = 2;
  const auto record = run(g);
  ASSERT_EQ(record.rows.size(), 4u);
  EXPECT_EQ(std::get<std::int64_t>(record.rows[0][6]), 0);
  EXPECT_EQ(std::get<std::string>(record.rows[1][7]), "adversary-stuck");
  g.class_name = "counterexample";
  g.budget = 4;
  EXPECT_THROW(run(g), BudgetExceeded);
}

TEST(Cli, ExitCodes) {
  auto ok = run_cli("rank");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_EQ(ok.out, "class,schedule,budget,rank\nlipschitz,linear:3,16,1\n");
  EXPECT_EQ(run_cli("rank --class nope").code, 2);
  EXPECT_EQ(run_cli("").code, 2);
  EXPECT_EQ(run_cli("lower-bound --n 1,x").code, 2);
  const auto budget = run_cli("lower-bound --learner realizable --seeds 1 --n 10");
  EXPECT_EQ(budget.code, 3);
  EXPECT_NE(budget.out.find("class counterexample"), std::string::npos);
}

TEST(Cli, WritesFilesAndJson) {
  const auto path = std::filesystem::temp_directory_path() / ("unigap_out_" + std::to_string(::getpid()) + ".json");
  const auto r = run_cli("bridging --depth 4 --path all-second --format json --out " + path.string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["meta"]["experiment"], "bridging");
  EXPECT_EQ(j["rows"].size(), 4u);
  EXPECT_EQ(j["rows"][3]["witness"], "15");
  std::filesystem::remove(path);
}

TEST(Cli, FlagsOverrideConfigFile) {
  const auto path = std::filesystem::temp_directory_path() / ("unigap_cfg_" + std::to_string(::getpid()) + ".json");
  {
    std::ofstream out(path);
    out << R"({"n":[3],"seeds":[2],"truncation":20})";
  }
  const auto from_file = run_cli("lower-bound --config " + path.string());
  ASSERT_EQ(from_file.code, 0) << from_file.out;
  EXPECT_EQ(split_csv(from_file.out).size(), 2u);
  const auto overridden = run_cli("lower-bound --config " + path.string() + " --n 3,4");
  EXPECT_EQ(split_csv(overridden.out).size(), 3u);
  std::filesystem::remove(path);
}
