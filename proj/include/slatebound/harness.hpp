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

// Synthetic pool generation and strategy benchmarking.
//
// Each trial runs four strategies on the same pool:
//   full_permutation     N! orderings of the pool, enumerated for N <= a
//                        cutoff and reported analytically beyond it
//   generator_evaluator  M slates drawn uniformly from F, best one kept
//   cgr_two_stage        decode(kTwoStage, full pruning)
//   cgr_exhaustive       decode(kExhaustiveBounded, full pruning)

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "slatebound/constraints.hpp"
#include "slatebound/decoder.hpp"
#include "slatebound/domain.hpp"
#include "slatebound/io.hpp"
#include "slatebound/oracle.hpp"
#include "slatebound/scorer.hpp"

namespace slatebound {

struct IntRange {
  int lo = 0;
  int hi = 0;
};

struct RealRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct BenchScenario {
  std::string name = "default";
  std::uint64_t seed = 1;
  int trials = 100;
  IntRange organic_length{11, 11};
  IntRange ad_count{1, 6};
  IntRange large_ad_count{0, 0};
  IntRange user_exposure{0, 0};
  std::size_t feature_dim = 4;
  double cpa_fraction = 0.5;
  RealRange bid_value{0.5, 3.0};
  RealRange ad_engagement{0.0, 0.5};
  RealRange organic_engagement{0.2, 1.5};
  RealRange penalty{0.0, 0.4};
  RuleSet rules;
  ReferenceScorerConfig scorer = ReferenceScorerConfig::from_seed(7, 4);
  int ge_samples = 64;
  bool oracle_gap = false;
  std::uint64_t oracle_limit = kDefaultFeasibleLimit;
  int full_permutation_max_n = 8;
  // Optional one-dimensional sweep; empty parameter means a single run.
  std::string sweep_parameter;
  std::vector<int> sweep_values;
};

inline void validate(const BenchScenario& s) {
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::kInvalidScenario, "scenario '" + s.name + "': " + msg);
  };
  if (s.trials < 1) fail("trials must be positive");
  for (auto [name, r] : {std::pair{"organic_length", s.organic_length},
                         std::pair{"ad_count", s.ad_count},
                         std::pair{"large_ad_count", s.large_ad_count},
                         std::pair{"user_exposure", s.user_exposure}})
    if (r.lo < 0 || r.lo > r.hi) fail(std::string(name) + " range is invalid");
  if (s.organic_length.lo < 1) fail("organic_length must be at least 1");
  for (auto [name, r] : {std::pair{"bid_value", s.bid_value},
                         std::pair{"ad_engagement", s.ad_engagement},
                         std::pair{"organic_engagement", s.organic_engagement},
                         std::pair{"penalty", s.penalty}})
    if (!(r.lo >= 0.0 && r.lo <= r.hi))
      fail(std::string(name) + " range is invalid");
  if (s.feature_dim == 0) fail("feature_dim must be positive");
  if (!(s.cpa_fraction >= 0.0 && s.cpa_fraction <= 1.0))
    fail("cpa_fraction must lie in [0, 1]");
  if (s.ge_samples < 1) fail("ge_samples must be positive");
  if (s.scorer.feature_dim != s.feature_dim)
    fail("scorer feature_dim differs from scenario feature_dim");
  try {
    validate(s.rules);
  } catch (const Error& e) {
    fail(e.what());
  }
  if (!s.sweep_parameter.empty()) {
    static const char* kKnown[] = {"ad_count", "organic_length", "pool_size",
                                   "page_size"};
    if (std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* k) {
          return s.sweep_parameter == k;
        }) == std::end(kKnown))
      fail("unknown sweep parameter '" + s.sweep_parameter + "'");
    if (s.sweep_values.empty()) fail("sweep needs at least one value");
  }
}

// Copy of `base` with the sweep parameter pinned to `value`.
inline BenchScenario at_sweep_point(const BenchScenario& base, int value) {
  BenchScenario s = base;
  s.sweep_parameter.clear();
  s.sweep_values.clear();
  if (base.sweep_parameter == "ad_count") {
    s.ad_count = {value, value};
  } else if (base.sweep_parameter == "organic_length") {
    s.organic_length = {value, value};
  } else if (base.sweep_parameter == "pool_size") {
    const int organic = value - base.ad_count.hi - base.large_ad_count.hi;
    if (base.ad_count.lo != base.ad_count.hi ||
        base.large_ad_count.lo != base.large_ad_count.hi || organic < 1)
      throw Error(ErrorCode::kInvalidScenario,
                  "pool_size sweep needs fixed ad counts and room for organics");
    s.organic_length = {organic, organic};
  } else if (base.sweep_parameter == "page_size") {
    s.rules.page_size = value;
    s.rules.max_pos = value;
    s.rules.min_pos = std::min(s.rules.min_pos, value);
    auto& starts = s.rules.large_ad_start_positions;
    starts.erase(std::remove_if(starts.begin(), starts.end(),
                                [&](int p) { return p > value; }),
                 starts.end());
    s.organic_length = {value, value};
  }
  validate(s);
  return s;
}

// Deterministic in (scenario.seed, trial_index).
inline CandidatePool generate_pool(const BenchScenario& scenario,
                                   std::uint64_t trial_index) {
  validate(scenario);
  std::seed_seq seq{static_cast<std::uint32_t>(scenario.seed),
                    static_cast<std::uint32_t>(scenario.seed >> 32),
                    static_cast<std::uint32_t>(trial_index),
                    static_cast<std::uint32_t>(trial_index >> 32)};
  std::mt19937_64 rng(seq);
  auto uniform = [&](RealRange r) {
    return r.lo == r.hi ? r.lo
                        : std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
  };
  auto uniform_int = [&](IntRange r) {
    return std::uniform_int_distribution<int>(r.lo, r.hi)(rng);
  };
  auto make_id = [](char prefix, int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%02d", prefix, i);
    return std::string(buf);
  };

  CandidatePool pool;
  pool.id = scenario.name + "-" + std::to_string(trial_index);
  pool.feature_dim = scenario.feature_dim;
  pool.user_exposure_count = static_cast<std::uint64_t>(
      uniform_int(scenario.user_exposure));
  const int n_org = uniform_int(scenario.organic_length);
  const int n_ads = uniform_int(scenario.ad_count);
  const int n_large = uniform_int(scenario.large_ad_count);

  auto features = [&] {
    std::vector<double> f(scenario.feature_dim);
    for (double& x : f) x = uniform({-1.0, 1.0});
    return f;
  };
  for (int i = 0; i < n_org; ++i) {
    Item item;
    item.id = make_id('o', i);
    item.engagement_value = uniform(scenario.organic_engagement);
    item.features = features();
    pool.organic.push_back(std::move(item));
  }
  auto make_ad = [&](ItemKind kind, std::string id) {
    Item item;
    item.id = std::move(id);
    item.kind = kind;
    item.pricing = std::bernoulli_distribution(scenario.cpa_fraction)(rng)
                       ? Pricing::kCPA
                       : Pricing::kCPM;
    item.bid_value = uniform(scenario.bid_value);
    item.engagement_value = uniform(scenario.ad_engagement);
    item.penalty_coeff = uniform(scenario.penalty);
    item.features = features();
    return item;
  };
  for (int i = 0; i < n_ads; ++i)
    pool.ads.push_back(make_ad(ItemKind::kAd, make_id('a', i)));
  for (int i = 0; i < n_large; ++i)
    pool.large_ads.push_back(make_ad(ItemKind::kLargeAd, make_id('g', i)));
  validate(pool);
  return pool;
}

// Least-squares line y = intercept + slope * x with its R^2.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LinearFit linear_fit(std::span<const double> xs,
                            std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

struct Summary {
  double min = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double p99 = 0.0;
  double max = 0.0;
};

// Nearest-rank percentiles.
inline Summary summarize(std::vector<double> v) {
  Summary s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  auto rank = [&](double q) {
    const auto idx = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(v.size())));
    return v[std::min(v.size() - 1, idx == 0 ? 0 : idx - 1)];
  };
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  s.median = rank(0.5);
  s.p99 = rank(0.99);
  s.min = v.front();
  s.max = v.back();
  return s;
}

struct BenchRow {
  std::string scenario;
  std::string strategy;
  std::optional<int> sweep_value;
  int trials = 0;
  double mean_pool_size = 0.0;  // N
  double mean_ads = 0.0;        // A (ads + large ads)
  int page_size = 0;            // L
  Summary evaluations;
  Summary wall_us;
  double mean_reward = 0.0;
  double compliance_rate = 0.0;
  // Exhaustive optimum minus this strategy's reward.
  std::optional<Summary> gap;
  // full_permutation only: every trial was enumerated rather than computed.
  std::optional<bool> executed;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  // Per trial, two-stage reward gap to the exhaustive optimum (sweep points
  // concatenated in order).
  std::vector<double> two_stage_gaps;
  // Trials where the oracle disagreed with the exhaustive decoder.
  int oracle_mismatches = 0;
  int oracle_checked = 0;
};

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Visits all n! orderings of n items and returns how many it saw.
inline std::uint64_t enumerate_permutations(int n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t count = 0;
  do {
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  return count;
}

namespace detail {

struct StrategySamples {
  std::vector<double> evaluations, wall_us, reward, gap;
  int compliant = 0;
  bool executed = true;
};

inline double micros_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::micro>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

inline void run_point(const BenchScenario& s, std::optional<int> sweep_value,
                      BenchResult& result) {
  const ReferenceScorer scorer(s.scorer);
  StrategySamples perm, ge, two, exh;
  double pool_size_sum = 0.0, ads_sum = 0.0;

  for (int t = 0; t < s.trials; ++t) {
    const CandidatePool pool = generate_pool(s, static_cast<std::uint64_t>(t));
    const int n = static_cast<int>(pool.organic.size() + pool.ad_total());
    pool_size_sum += n;
    ads_sum += static_cast<double>(pool.ad_total());

    auto t0 = std::chrono::steady_clock::now();
    if (n <= s.full_permutation_max_n) {
      perm.evaluations.push_back(
          static_cast<double>(enumerate_permutations(n)));
    } else {
      perm.evaluations.push_back(factorial(n));
      perm.executed = false;
    }
    perm.wall_us.push_back(micros_since(t0));

    t0 = std::chrono::steady_clock::now();
    const DecodeReport exact =
        decode(pool, s.rules, scorer,
               {DecodeMode::kExhaustiveBounded,
                Pruning::kHardFilterPlusUpperBound});
    exh.wall_us.push_back(micros_since(t0));
    exh.evaluations.push_back(static_cast<double>(exact.evaluations));
    exh.reward.push_back(exact.reward.total);
    exh.compliant += is_feasible(exact.chosen, s.rules, pool);

    double optimum = exact.reward.total;
    if (s.oracle_gap) {
      const OracleResult oracle = brute_force(pool, s.rules, scorer, s.oracle_limit);
      ++result.oracle_checked;
      if (!(oracle.best == exact.chosen) ||
          oracle.score.reward.total != exact.reward.total)
        ++result.oracle_mismatches;
      optimum = oracle.score.reward.total;
    }
    exh.gap.push_back(optimum - exact.reward.total);

    t0 = std::chrono::steady_clock::now();
    const DecodeReport fast =
        decode(pool, s.rules, scorer,
               {DecodeMode::kTwoStage, Pruning::kHardFilterPlusUpperBound});
    two.wall_us.push_back(micros_since(t0));
    two.evaluations.push_back(static_cast<double>(fast.evaluations));
    two.reward.push_back(fast.reward.total);
    two.gap.push_back(optimum - fast.reward.total);
    two.compliant += is_feasible(fast.chosen, s.rules, pool);
    result.two_stage_gaps.push_back(optimum - fast.reward.total);

    // Generator-evaluator: sample M members of F with replacement.
    t0 = std::chrono::steady_clock::now();
    const std::vector<Slate> feasible = enumerate_feasible(pool, s.rules);
    std::seed_seq seq{static_cast<std::uint32_t>(s.seed),
                      static_cast<std::uint32_t>(t), 0x9e37u};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, feasible.size() - 1);
    std::optional<double> best_reward;
    const Slate* best_slate = nullptr;
    for (int m = 0; m < s.ge_samples; ++m) {
      const Slate& cand = feasible[pick(rng)];
      const double r = score_slate(cand, pool, scorer).reward.total;
      if (!best_reward || r > *best_reward) {
        best_reward = r;
        best_slate = &cand;
      }
    }
    ge.wall_us.push_back(micros_since(t0));
    ge.evaluations.push_back(s.ge_samples);
    ge.reward.push_back(*best_reward);
    ge.gap.push_back(optimum - *best_reward);
    ge.compliant += is_feasible(*best_slate, s.rules, pool);
  }

  auto row = [&](const char* name, const StrategySamples& samples,
                 bool with_reward) {
    BenchRow r;
    r.scenario = s.name;
    r.strategy = name;
    r.sweep_value = sweep_value;
    r.trials = s.trials;
    r.mean_pool_size = pool_size_sum / s.trials;
    r.mean_ads = ads_sum / s.trials;
    r.page_size = s.rules.page_size;
    r.evaluations = summarize(samples.evaluations);
    r.wall_us = summarize(samples.wall_us);
    if (with_reward) {
      r.mean_reward = summarize(samples.reward).mean;
      r.compliance_rate = static_cast<double>(samples.compliant) / s.trials;
      r.gap = summarize(samples.gap);
    } else {
      r.executed = samples.executed;
    }
    return r;
  };
  result.rows.push_back(row("full_permutation", perm, false));
  result.rows.push_back(row("generator_evaluator", ge, true));
  result.rows.push_back(row("cgr_two_stage", two, true));
  result.rows.push_back(row("cgr_exhaustive", exh, true));
}

}  // namespace detail

// Runs every trial (and every sweep point) of the scenario. Throws
// FeasibleSetTooLarge when oracle_gap is set and an instance is too big.
inline BenchResult run_bench(const BenchScenario& scenario) {
  validate(scenario);
  BenchResult result;
  if (scenario.sweep_parameter.empty()) {
    detail::run_point(scenario, std::nullopt, result);
  } else {
    for (int v : scenario.sweep_values)
      detail::run_point(at_sweep_point(scenario, v), v, result);
  }
  return result;
}

// Rows of one strategy, in sweep order.
inline std::vector<BenchRow> rows_for(const BenchResult& result,
                                      const std::string& strategy) {
  std::vector<BenchRow> out;
  for (const BenchRow& r : result.rows)
    if (r.strategy == strategy) out.push_back(r);
  return out;
}

inline nlohmann::json summary_to_json(const Summary& s) {
  return {{"min", s.min}, {"mean", s.mean}, {"median", s.median},
          {"p99", s.p99}, {"max", s.max}};
}

inline nlohmann::json row_to_json(const BenchRow& r) {
  nlohmann::json j = {{"schema_version", kSchemaVersion},
                      {"scenario", r.scenario},
                      {"strategy", r.strategy},
                      {"sweep_value", nullptr},
                      {"trials", r.trials},
                      {"mean_pool_size", r.mean_pool_size},
                      {"mean_ads", r.mean_ads},
                      {"page_size", r.page_size},
                      {"evaluations", summary_to_json(r.evaluations)},
                      {"wall_us", summary_to_json(r.wall_us)}};
  if (r.sweep_value) j["sweep_value"] = *r.sweep_value;
  if (r.executed) {
    j["executed"] = *r.executed;
  } else {
    j["mean_reward"] = r.mean_reward;
    j["compliance_rate"] = r.compliance_rate;
  }
  if (r.gap) j["optimality_gap"] = summary_to_json(*r.gap);
  return j;
}

inline std::string render_table(const BenchResult& result) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %6s %7s %14s %12s %10s %10s %11s %10s\n",
                "strategy", "sweep", "N", "evals(mean)", "evals(p99)",
                "p99(us)", "reward", "compliance", "gap(max)");
  out << line;
  for (const BenchRow& r : result.rows) {
    const std::string sweep = r.sweep_value ? std::to_string(*r.sweep_value) : "-";
    if (r.executed) {
      std::snprintf(line, sizeof line, "%-20s %6s %7.2f %14.6g %12.6g %10.1f %10s %11s %10s%s\n",
                    r.strategy.c_str(), sweep.c_str(), r.mean_pool_size,
                    r.evaluations.mean, r.evaluations.p99, r.wall_us.p99, "-",
                    "-", "-", *r.executed ? "" : "  (analytic N!)");
    } else {
      std::snprintf(line, sizeof line, "%-20s %6s %7.2f %14.6g %12.6g %10.1f %10.4f %10.1f%% %10.3g\n",
                    r.strategy.c_str(), sweep.c_str(), r.mean_pool_size,
                    r.evaluations.mean, r.evaluations.p99, r.wall_us.p99,
                    r.mean_reward, 100.0 * r.compliance_rate,
                    r.gap ? r.gap->max : 0.0);
    }
    out << line;
  }
  const Summary gaps = summarize(result.two_stage_gaps);
  const auto zero = std::count(result.two_stage_gaps.begin(),
                               result.two_stage_gaps.end(), 0.0);
  std::snprintf(line, sizeof line,
                "\ntwo-stage optimality gap over %zu trials: min %.6g, mean %.6g, "
                "median %.6g, p99 %.6g, max %.6g, exact in %.1f%%\n",
                result.two_stage_gaps.size(), gaps.min, gaps.mean, gaps.median, gaps.p99,
                gaps.max,
                result.two_stage_gaps.empty()
                    ? 0.0
                    : 100.0 * static_cast<double>(zero) /
                          static_cast<double>(result.two_stage_gaps.size()));
  out << line;
  if (result.oracle_checked > 0) {
    std::snprintf(line, sizeof line, "oracle agreement: %d/%d trials\n",
                  result.oracle_checked - result.oracle_mismatches,
                  result.oracle_checked);
    out << line;
  }
  return out.str();
}

inline BenchScenario scenario_from_json(const nlohmann::json& j) {
  using detail::get;
  using detail::get_or;
  detail::require_version(j);
  BenchScenario s;
  auto int_range = [&](const char* key, IntRange fallback) {
    if (!j.contains(key)) return fallback;
    const auto v = get<std::vector<int>>(j, key);
    if (v.size() != 2) detail::schema_error(std::string("'") + key + "' needs [lo, hi]");
    return IntRange{v[0], v[1]};
  };
  auto real_range = [&](const char* key, RealRange fallback) {
    if (!j.contains(key)) return fallback;
    const auto v = get<std::vector<double>>(j, key);
    if (v.size() != 2) detail::schema_error(std::string("'") + key + "' needs [lo, hi]");
    return RealRange{v[0], v[1]};
  };
  s.name = get_or<std::string>(j, "name", s.name);
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  s.trials = get_or<int>(j, "trials", s.trials);
  s.organic_length = int_range("organic_length", s.organic_length);
  s.ad_count = int_range("ad_count", s.ad_count);
  s.large_ad_count = int_range("large_ad_count", s.large_ad_count);
  s.user_exposure = int_range("user_exposure", s.user_exposure);
  s.feature_dim = get_or<std::size_t>(j, "feature_dim", s.feature_dim);
  s.cpa_fraction = get_or<double>(j, "cpa_fraction", s.cpa_fraction);
  s.bid_value = real_range("bid_value", s.bid_value);
  s.ad_engagement = real_range("ad_engagement", s.ad_engagement);
  s.organic_engagement = real_range("organic_engagement", s.organic_engagement);
  s.penalty = real_range("penalty", s.penalty);
  s.rules = rules_from_json(detail::field(j, "rules"));
  s.scorer = scorer_config_from_json(detail::field(j, "scorer"));
  s.ge_samples = get_or<int>(j, "ge_samples", s.ge_samples);
  s.oracle_gap = get_or<bool>(j, "oracle_gap", s.oracle_gap);
  s.oracle_limit = get_or<std::uint64_t>(j, "oracle_limit", s.oracle_limit);
  s.full_permutation_max_n =
      get_or<int>(j, "full_permutation_max_n", s.full_permutation_max_n);
  if (j.contains("sweep")) {
    const auto& sw = j.at("sweep");
    s.sweep_parameter = get<std::string>(sw, "parameter");
    s.sweep_values = get<std::vector<int>>(sw, "values");
  }
  validate(s);
  return s;
}

}  // namespace slatebound
