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

// Command-line driver.
//
//   slatebound rerank   POOLS --rules FILE [--scorer FILE] [--mode M]
//                             [--pruning P] [--seed N] [--out PATH]
//   slatebound verify   POOLS --rules FILE [--scorer FILE] [--seed N]
//                             [--limit-feasible N] [--out PATH]
//   slatebound count    POOLS --rules FILE [--out PATH]
//   slatebound bench    SCENARIO [--seed N] [--out PATH]
//   slatebound generate SCENARIO [--seed N] [--trials N] [--out PATH]
//
// Exit codes: 0 success, 1 I/O or usage error, 2 parse failure, 3 schema or
// dimension mismatch, 4 optimality mismatch, 5 feasible set over the limit.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "slatebound/slatebound.hpp"

namespace sb = slatebound;

namespace {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kParseFailure = 2,
  kSchemaMismatch = 3,
  kOptimalityMismatch = 4,
  kTooLarge = 5,
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<sb::CandidatePool> load_pools(const std::string& path) {
  auto in = open_input(path);
  return sb::read_pools(in);
}

sb::RuleSet load_rules(const std::string& path) {
  auto in = open_input(path);
  return sb::rules_from_json(sb::parse_document(in));
}

sb::ReferenceScorerConfig load_scorer(const std::string& path,
                                      std::optional<std::uint64_t> seed,
                                      const std::vector<sb::CandidatePool>& pools) {
  sb::ReferenceScorerConfig config;
  if (path.empty()) {
    const std::size_t dim = pools.empty() ? 1 : pools.front().feature_dim;
    config = sb::ReferenceScorerConfig::from_seed(seed.value_or(7), dim);
  } else {
    auto in = open_input(path);
    config = sb::scorer_config_from_json(sb::parse_document(in), seed);
  }
  for (const auto& pool : pools)
    if (pool.feature_dim != config.feature_dim)
      throw sb::Error(sb::ErrorCode::kDimensionMismatch,
                      "pool '" + pool.id + "' has feature_dim " +
                          std::to_string(pool.feature_dim) +
                          ", scorer expects " +
                          std::to_string(config.feature_dim));
  return config;
}

int exit_code_for(const sb::Error& e) {
  switch (e.code()) {
    case sb::ErrorCode::kParse: return kParseFailure;
    case sb::ErrorCode::kFeasibleSetTooLarge: return kTooLarge;
    default: return kSchemaMismatch;
  }
}

struct CommonArgs {
  std::string input;
  std::string rules;
  std::string scorer;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int cmd_rerank(const CommonArgs& args, sb::DecodeConfig config) {
  const auto pools = load_pools(args.input);
  const auto rules = load_rules(args.rules);
  const sb::ReferenceScorer scorer(load_scorer(args.scorer, args.seed, pools));
  Output out(args.out);
  for (const auto& pool : pools) {
    const auto report = sb::decode(pool, rules, scorer, config);
    out.stream() << sb::report_to_json(report, pool, config).dump() << '\n';
  }
  return kOk;
}

int cmd_verify(const CommonArgs& args, std::uint64_t limit) {
  const auto pools = load_pools(args.input);
  const auto rules = load_rules(args.rules);
  const sb::ReferenceScorer scorer(load_scorer(args.scorer, args.seed, pools));
  Output out(args.out);
  int status = kOk;
  for (const auto& pool : pools) {
    sb::OracleResult oracle;
    try {
      oracle = sb::brute_force(pool, rules, scorer, limit);
    } catch (const sb::FeasibleSetTooLarge& e) {
      out.stream() << sb::json{{"schema_version", sb::kSchemaVersion},
                               {"pool_id", pool.id},
                               {"error", "FeasibleSetTooLarge"},
                               {"predicted_feasible", e.predicted()},
                               {"limit", e.limit()}}
                          .dump()
                   << '\n';
      std::cerr << "pool '" << pool.id << "': " << e.what() << '\n';
      return kTooLarge;
    }
    const auto report = sb::decode(pool, rules, scorer, {});
    const bool match = report.chosen == oracle.best &&
                       report.reward.total == oracle.score.reward.total;
    out.stream() << sb::json{{"schema_version", sb::kSchemaVersion},
                             {"pool_id", pool.id},
                             {"match", match},
                             {"reward", report.reward.total},
                             {"oracle_reward", oracle.score.reward.total},
                             {"chosen", sb::cell_ids(report.chosen, pool)},
                             {"oracle_chosen", sb::cell_ids(oracle.best, pool)},
                             {"feasible_count", oracle.feasible_count},
                             {"evaluations", report.evaluations},
                             {"pruned_by_bound", report.pruned_by_bound}}
                        .dump()
                 << '\n';
    if (!match) {
      status = kOptimalityMismatch;
      std::cerr << "pool '" << pool.id << "': decoder and oracle disagree\n"
                << "  decoder: " << sb::json(sb::cell_ids(report.chosen, pool)).dump()
                << " reward " << report.reward.total << '\n'
                << "  oracle:  " << sb::json(sb::cell_ids(oracle.best, pool)).dump()
                << " reward " << oracle.score.reward.total << '\n';
    }
  }
  return status;
}

int cmd_count(const CommonArgs& args) {
  const auto pools = load_pools(args.input);
  const auto rules = load_rules(args.rules);
  Output out(args.out);
  for (const auto& pool : pools) {
    const auto count = sb::count_feasible(pool, rules);
    out.stream() << sb::json{{"schema_version", sb::kSchemaVersion},
                             {"pool_id", pool.id},
                             {"total", count.total},
                             {"per_k", count.per_k}}
                        .dump()
                 << '\n';
  }
  return kOk;
}

sb::BenchScenario load_scenario(const std::string& path,
                                std::optional<std::uint64_t> seed) {
  auto in = open_input(path);
  auto scenario = sb::scenario_from_json(sb::parse_document(in));
  if (seed) scenario.seed = *seed;
  return scenario;
}

int cmd_bench(const CommonArgs& args) {
  const auto scenario = load_scenario(args.input, args.seed);
  const auto result = sb::run_bench(scenario);
  Output out(args.out);
  for (const auto& row : result.rows)
    out.stream() << sb::row_to_json(row).dump() << '\n';
  const std::string table = sb::render_table(result);
  if (args.out.empty()) {
    std::cerr << table;
  } else {
    std::ofstream table_file(args.out + ".table.txt");
    table_file << table;
  }
  return kOk;
}

int cmd_generate(const CommonArgs& args, std::optional<int> trials) {
  auto scenario = load_scenario(args.input, args.seed);
  if (trials) scenario.trials = *trials;
  Output out(args.out);
  for (int t = 0; t < scenario.trials; ++t)
    out.stream() << sb::pool_to_json(sb::generate_pool(scenario, t)).dump()
                 << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained slate reranking: decode, verify, count, bench"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string mode = "two-stage";
  std::string pruning = "full";
  std::uint64_t limit = sb::kDefaultFeasibleLimit;
  std::optional<int> trials;

  const std::map<std::string, sb::DecodeMode> modes{
      {"two-stage", sb::DecodeMode::kTwoStage},
      {"exhaustive", sb::DecodeMode::kExhaustiveBounded}};
  const std::map<std::string, sb::Pruning> prunings{
      {"off", sb::Pruning::kOff},
      {"hard", sb::Pruning::kHardFilterOnly},
      {"full", sb::Pruning::kHardFilterPlusUpperBound}};

  auto* rerank = app.add_subcommand("rerank", "Decode the best slate for every pool");
  auto* verify = app.add_subcommand("verify", "Check decoder optimality against the brute-force oracle");
  auto* count = app.add_subcommand("count", "Count feasible slates per pool");
  auto* bench = app.add_subcommand("bench", "Benchmark strategies on a scenario");
  auto* generate = app.add_subcommand("generate", "Write the pools a scenario generates");

  for (auto* sub : {rerank, verify, count}) {
    sub->add_option("pools", args.input, "Pool file (JSON Lines)")->required();
    sub->add_option("--rules", args.rules, "Rules file")->required();
    sub->add_option("--out", args.out, "Output path (default stdout)");
  }
  for (auto* sub : {rerank, verify}) {
    sub->add_option("--scorer", args.scorer, "Scorer config file");
    sub->add_option("--seed", args.seed, "Scorer seed override");
  }
  for (auto* sub : {bench, generate}) {
    sub->add_option("scenario", args.input, "Scenario file")->required();
    sub->add_option("--seed", args.seed, "Scenario seed override");
    sub->add_option("--out", args.out, "Output path (default stdout)");
  }
  rerank->add_option("--mode", mode, "two-stage | exhaustive")
      ->check(CLI::IsMember({"two-stage", "exhaustive"}));
  rerank->add_option("--pruning", pruning, "off | hard | full")
      ->check(CLI::IsMember({"off", "hard", "full"}));
  verify->add_option("--limit-feasible", limit, "Oracle safety limit on |F|");
  generate->add_option("--trials", trials, "Number of pools to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kIoError;
  }

  try {
    if (*rerank) return cmd_rerank(args, {modes.at(mode), prunings.at(pruning)});
    if (*verify) return cmd_verify(args, limit);
    if (*count) return cmd_count(args);
    if (*bench) return cmd_bench(args);
    if (*generate) return cmd_generate(args, trials);
  } catch (const sb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kIoError;
}
