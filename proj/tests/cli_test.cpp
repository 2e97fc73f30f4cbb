// Copyright 2026 The Slatebound Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the installed command-line tool end to end.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace sb = slatebound;
namespace fs = std::filesystem;
using sb::testing::data_path;
using sb::testing::read_file;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::path(::testing::TempDir()) / ("slatebound_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }

  CliResult run(const std::string& args) const {
    const std::string out = path("stdout.txt"), err = path("stderr.txt");
    const std::string cmd = std::string(SLATEBOUND_CLI) + " " + args + " > " +
                            out + " 2> " + err;
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(out),
            read_file(err)};
  }

  std::vector<sb::json> lines(const std::string& text) const {
    std::vector<sb::json> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty() && line[0] != '#') out.push_back(sb::json::parse(line));
    return out;
  }

  fs::path dir_;
};

const std::string kFixture = data_path("fixture_pools.jsonl");
const std::string kRules = " --rules " + data_path("rules_fixture.json");
const std::string kScorer = " --scorer " + data_path("scorer_reference.json");

TEST_F(Cli, RerankOnePool) {
  write("one.jsonl", lines(read_file(kFixture)).front().dump() + "\n");
  const auto r = run("rerank " + path("one.jsonl") + kRules + kScorer);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = lines(r.out);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].at("pool_id"), "fx-basic");
  EXPECT_EQ(out[0].at("schema_version"), 1);
  EXPECT_EQ(out[0].at("mode"), "two-stage");
}

TEST_F(Cli, MalformedRecordExitsTwoWithLine) {
  const auto good = lines(read_file(kFixture)).front().dump();
  write("bad.jsonl", good + "\n" + good + "\n{\"schema_version\": 1, oops}\n");
  const auto r = run("rerank " + path("bad.jsonl") + kRules + kScorer);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(Cli, SchemaAndDimensionErrorsExitThree) {
  // A rules file is not a scorer file.
  const auto r = run("rerank " + kFixture + kRules +
                     " --scorer " + data_path("rules_fixture.json"));
  EXPECT_EQ(r.code, 3) << r.err;
  write("scorer2.json", R"({"schema_version": 1, "feature_dim": 2, "seed": 1})");
  const auto r2 = run("rerank " + kFixture + kRules + " --scorer " + path("scorer2.json"));
  EXPECT_EQ(r2.code, 3) << r2.err;
  EXPECT_NE(r2.err.find("feature_dim"), std::string::npos);
}

// Expected values were produced by `slatebound verify` on the fixture and
// confirmed by tests/oracles/reference_model.py.
TEST_F(Cli, ExhaustiveFixtureMatchesPinnedOptimum) {
  const auto r = run("rerank " + kFixture + kRules + kScorer + " --mode exhaustive");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = lines(r.out);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].at("chosen"),
            (std::vector<std::string>{"o1", "g1", "g1", "o2", "o3", "a2"}));
  EXPECT_NEAR(out[0].at("reward").at("total").get<double>(), 1.7058988961281654, 1e-12);
  EXPECT_NEAR(out[1].at("reward").at("total").get<double>(), 0.21052256560366317, 1e-12);
  EXPECT_EQ(out[2].at("chosen"), (std::vector<std::string>{"o1", "o2", "o3"}));
  EXPECT_NEAR(out[2].at("reward").at("total").get<double>(), 0.3021846933233894, 1e-12);
  for (const auto& rec : out) EXPECT_TRUE(rec.at("violations").empty());
}

TEST_F(Cli, VerifyFixtureAndRandomPools) {
  const auto r = run("verify " + kFixture + kRules + kScorer);
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& rec : lines(r.out)) EXPECT_TRUE(rec.at("match").get<bool>());

  const auto g = run("generate " + data_path("scenario_small.json") + " --trials 40 --out " +
                     path("small.jsonl"));
  ASSERT_EQ(g.code, 0) << g.err;
  const auto v = run("verify " + path("small.jsonl") + " --rules " +
                     data_path("rules_small.json") + " --seed 11");
  EXPECT_EQ(v.code, 0) << v.err;
  EXPECT_EQ(lines(v.out).size(), 40u);
}

TEST_F(Cli, VerifyZeroAdPools) {
  write("noads.jsonl", lines(read_file(kFixture))[1].dump() + "\n");
  const auto r = run("verify " + path("noads.jsonl") + kRules + kScorer);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).at(0).at("feasible_count"), 1);
}

TEST_F(Cli, VerifyOversizedExitsFive) {
  const auto r = run("verify " + kFixture + kRules + kScorer + " --limit-feasible 10");
  EXPECT_EQ(r.code, 5);
  const auto out = lines(r.out);
  ASSERT_FALSE(out.empty());
  EXPECT_EQ(out[0].at("predicted_feasible"), 31);
  EXPECT_NE(r.err.find("31"), std::string::npos);
}

TEST_F(Cli, CountPinnedAndTrivialCases) {
  const auto r = run("count " + kFixture + kRules);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = lines(r.out);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].at("total"), 31);
  EXPECT_EQ(out[0].at("per_k"), (std::vector<int>{1, 12, 18}));
  EXPECT_EQ(out[1].at("total"), 1);
  EXPECT_EQ(out[1].at("per_k"), (std::vector<int>{1}));
  EXPECT_EQ(out[2].at("per_k"), (std::vector<int>{1, 0}));

  write("k0.json", R"({"schema_version": 1, "page_size": 6, "max_ads": 0, "min_spacing": 1})");
  const auto k0 = run("count " + kFixture + " --rules " + path("k0.json"));
  ASSERT_EQ(k0.code, 0) << k0.err;
  for (const auto& rec : lines(k0.out)) EXPECT_EQ(rec.at("total"), 1);
}

TEST_F(Cli, BenchIsDeterministic) {
  const std::string scenario = data_path("scenario_small.json");
  ASSERT_EQ(run("bench " + scenario + " --out " + path("a.jsonl")).code, 0);
  ASSERT_EQ(run("bench " + scenario + " --out " + path("b.jsonl")).code, 0);
  auto strip = [&](const std::string& file) {
    auto recs = lines(read_file(path(file)));
    for (auto& rec : recs) rec.erase("wall_us");
    return recs;
  };
  EXPECT_EQ(strip("a.jsonl"), strip("b.jsonl"));
  EXPECT_EQ(strip("a.jsonl").size(), 4u);
  EXPECT_TRUE(fs::exists(path("a.jsonl.table.txt")));
}

TEST_F(Cli, BenchSweepFactorialColumn) {
  const auto r = run("bench " + data_path("scenario_sweep_pool_size.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  int seen = 0;
  for (const auto& rec : lines(r.out)) {
    if (rec.at("strategy") != "full_permutation") continue;
    const int n = rec.at("sweep_value");
    EXPECT_TRUE(rec.at("executed").get<bool>());
    EXPECT_EQ(rec.at("evaluations").at("mean").get<double>(), sb::factorial(n));
    ++seen;
  }
  EXPECT_EQ(seen, 4);
  EXPECT_NE(r.err.find("full_permutation"), std::string::npos);
}

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("rerank " + path("missing.jsonl") + kRules).code, 1);
  EXPECT_EQ(run("rerank " + kFixture + kRules + " --mode sideways").code, 1);
}

}  // namespace
