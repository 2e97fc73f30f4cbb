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

// JSON file formats. Every document carries "schema_version": 1.
//
// Pool file (JSON Lines, one pool per line; blank lines and lines starting
// with '#' are skipped):
//
//   {"schema_version": 1, "pool_id": "p0", "feature_dim": 2,
//    "user_exposure_count": 0,
//    "organic":   [{"id": "o1", "engagement_value": 0.8,
//                   "features": [0.1, -0.3]}, ...],
//    "ads":       [{"id": "a1", "pricing": "CPA", "bid_value": 2.0,
//                   "engagement_value": 0.1, "penalty_coeff": 0.05,
//                   "features": [0.4, 0.2]}, ...],
//    "large_ads": [ same fields as ads ]}
//
// Rules file:
//
//   {"schema_version": 1, "page_size": 11, "max_ads": 2, "min_spacing": 3,
//    "min_pos": 2, "max_pos": 11, "large_ad_span": 2,
//    "large_ad_start_positions": [3, 5, 7], "user_frequency_cap": 20}
//
// "large_ad_start_positions" defaults to every position; an absent or null
// "user_frequency_cap" means no cap.
//
// Scorer file, either explicit:
//
//   {"schema_version": 1, "feature_dim": 2,
//    "exposure": {"weights": [..], "bias": 1.0, "position_decay": 0.1,
//                 "prev_context": [boundary, organic, ad, large_ad],
//                 "next_context": [boundary, organic, ad, large_ad]},
//    "click":    { same fields }}
//
// or seeded: {"schema_version": 1, "feature_dim": 2, "seed": 7}.

#pragma once

#include <istream>
#include <string>
#include <vector>

#include "json.hpp"
#include "slatebound/constraints.hpp"
#include "slatebound/decoder.hpp"
#include "slatebound/domain.hpp"
#include "slatebound/scorer.hpp"

namespace slatebound {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

[[noreturn]] inline void schema_error(const std::string& what) {
  throw Error(ErrorCode::kSchema, what);
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object()) schema_error("expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema_error(std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T get(const json& j, const char* key) {
  const json& v = field(j, key);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    schema_error(std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object()) schema_error("expected an object");
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    schema_error(std::string("field '") + key + "' has the wrong type");
  }
}

inline void require_version(const json& j) {
  const int version = get<int>(j, "schema_version");
  if (version != kSchemaVersion)
    schema_error("unsupported schema_version " + std::to_string(version));
}

inline Item item_from_json(const json& j, ItemKind kind) {
  Item item;
  item.id = get<std::string>(j, "id");
  item.kind = kind;
  const auto pricing = get_or<std::string>(j, "pricing", "CPM");
  if (pricing == "CPA")
    item.pricing = Pricing::kCPA;
  else if (pricing == "CPM")
    item.pricing = Pricing::kCPM;
  else
    schema_error("item '" + item.id + "': unknown pricing '" + pricing + "'");
  item.bid_value = get_or<double>(j, "bid_value", 0.0);
  item.engagement_value = get_or<double>(j, "engagement_value", 0.0);
  item.penalty_coeff = get_or<double>(j, "penalty_coeff", 0.0);
  item.features = get<std::vector<double>>(j, "features");
  return item;
}

inline json item_to_json(const Item& item) {
  json j = {{"id", item.id},
            {"engagement_value", item.engagement_value},
            {"features", item.features}};
  if (is_ad(item.kind)) {
    j["pricing"] = to_string(item.pricing);
    j["bid_value"] = item.bid_value;
    j["penalty_coeff"] = item.penalty_coeff;
  }
  return j;
}

inline LogitParams logit_from_json(const json& j) {
  LogitParams p;
  p.weights = get<std::vector<double>>(j, "weights");
  p.bias = get_or<double>(j, "bias", 0.0);
  p.position_decay = get_or<double>(j, "position_decay", 0.0);
  auto context = [&](const char* key) {
    std::array<double, kContextSlots> c{};
    if (j.contains(key)) {
      const auto v = get<std::vector<double>>(j, key);
      if (v.size() != kContextSlots)
        schema_error(std::string("'") + key + "' needs 4 entries");
      std::copy(v.begin(), v.end(), c.begin());
    }
    return c;
  };
  p.prev_context = context("prev_context");
  p.next_context = context("next_context");
  return p;
}

inline json logit_to_json(const LogitParams& p) {
  return {{"weights", p.weights},
          {"bias", p.bias},
          {"position_decay", p.position_decay},
          {"prev_context", p.prev_context},
          {"next_context", p.next_context}};
}

}  // namespace detail

// Validates the pool; throws kSchema / kInvalidPool / kDimensionMismatch.
inline CandidatePool pool_from_json(const json& j) {
  detail::require_version(j);
  CandidatePool pool;
  pool.id = detail::get_or<std::string>(j, "pool_id", "");
  pool.feature_dim = detail::get<std::size_t>(j, "feature_dim");
  pool.user_exposure_count =
      detail::get_or<std::uint64_t>(j, "user_exposure_count", 0);
  auto list = [&](const char* key, ItemKind kind) {
    std::vector<Item> items;
    if (!j.contains(key)) return items;
    const json& arr = j.at(key);
    if (!arr.is_array()) detail::schema_error(std::string("'") + key + "' must be an array");
    for (const json& e : arr) items.push_back(detail::item_from_json(e, kind));
    return items;
  };
  pool.organic = list("organic", ItemKind::kOrganic);
  pool.ads = list("ads", ItemKind::kAd);
  pool.large_ads = list("large_ads", ItemKind::kLargeAd);
  validate(pool);
  return pool;
}

inline json pool_to_json(const CandidatePool& pool) {
  json j = {{"schema_version", kSchemaVersion},
            {"pool_id", pool.id},
            {"feature_dim", pool.feature_dim},
            {"user_exposure_count", pool.user_exposure_count}};
  for (auto [key, items] :
       {std::pair{"organic", &pool.organic}, std::pair{"ads", &pool.ads},
        std::pair{"large_ads", &pool.large_ads}}) {
    json arr = json::array();
    for (const Item& item : *items) arr.push_back(detail::item_to_json(item));
    j[key] = std::move(arr);
  }
  return j;
}

// Reads a JSON Lines pool file. Syntax errors raise ParseError; any other
// problem raises Error with the offending line number in the message.
inline std::vector<CandidatePool> read_pools(std::istream& in) {
  std::vector<CandidatePool> pools;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    try {
      pools.push_back(pool_from_json(j));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return pools;
}

inline json parse_document(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(0, e.what());
  }
}

inline RuleSet rules_from_json(const json& j) {
  detail::require_version(j);
  RuleSet r;
  r.page_size = detail::get<int>(j, "page_size");
  r.max_ads = detail::get<int>(j, "max_ads");
  r.min_spacing = detail::get<int>(j, "min_spacing");
  r.min_pos = detail::get_or<int>(j, "min_pos", 1);
  r.max_pos = detail::get_or<int>(j, "max_pos", r.page_size);
  r.large_ad_span = detail::get_or<int>(j, "large_ad_span", 1);
  if (j.contains("large_ad_start_positions")) {
    r.large_ad_start_positions =
        detail::get<std::vector<int>>(j, "large_ad_start_positions");
    std::sort(r.large_ad_start_positions.begin(),
              r.large_ad_start_positions.end());
    r.large_ad_start_positions.erase(
        std::unique(r.large_ad_start_positions.begin(),
                    r.large_ad_start_positions.end()),
        r.large_ad_start_positions.end());
  } else {
    for (int s = 1; s <= r.page_size; ++s)
      r.large_ad_start_positions.push_back(s);
  }
  if (j.contains("user_frequency_cap") && !j.at("user_frequency_cap").is_null())
    r.user_frequency_cap = detail::get<std::uint64_t>(j, "user_frequency_cap");
  validate(r);
  return r;
}

inline json rules_to_json(const RuleSet& r) {
  json j = {{"schema_version", kSchemaVersion},
            {"page_size", r.page_size},
            {"max_ads", r.max_ads},
            {"min_spacing", r.min_spacing},
            {"min_pos", r.min_pos},
            {"max_pos", r.max_pos},
            {"large_ad_span", r.large_ad_span},
            {"large_ad_start_positions", r.large_ad_start_positions},
            {"user_frequency_cap", nullptr}};
  if (r.user_frequency_cap) j["user_frequency_cap"] = *r.user_frequency_cap;
  return j;
}

// A "seed" entry draws the parameters from ReferenceScorerConfig::from_seed;
// `seed_override` replaces that seed when set.
inline ReferenceScorerConfig scorer_config_from_json(
    const json& j, std::optional<std::uint64_t> seed_override = std::nullopt) {
  detail::require_version(j);
  const auto dim = detail::get<std::size_t>(j, "feature_dim");
  if (j.contains("seed") || seed_override) {
    const auto seed =
        seed_override ? *seed_override : detail::get<std::uint64_t>(j, "seed");
    return ReferenceScorerConfig::from_seed(seed, dim);
  }
  ReferenceScorerConfig c;
  c.feature_dim = dim;
  c.exposure = detail::logit_from_json(detail::field(j, "exposure"));
  c.click = detail::logit_from_json(detail::field(j, "click"));
  if (c.exposure.weights.size() != dim || c.click.weights.size() != dim)
    throw Error(ErrorCode::kDimensionMismatch,
                "scorer weights must have feature_dim = " +
                    std::to_string(dim) + " entries");
  return c;
}

inline json scorer_config_to_json(const ReferenceScorerConfig& c) {
  return {{"schema_version", kSchemaVersion},
          {"feature_dim", c.feature_dim},
          {"exposure", detail::logit_to_json(c.exposure)},
          {"click", detail::logit_to_json(c.click)}};
}

inline const char* to_string(DecodeMode mode) {
  return mode == DecodeMode::kTwoStage ? "two-stage" : "exhaustive";
}

inline const char* to_string(Pruning pruning) {
  switch (pruning) {
    case Pruning::kOff: return "off";
    case Pruning::kHardFilterOnly: return "hard";
    case Pruning::kHardFilterPlusUpperBound: return "full";
  }
  return "?";
}

inline json report_to_json(const DecodeReport& report,
                           const CandidatePool& pool,
                           const DecodeConfig& config) {
  json violations = json::array();
  for (const Violation& v : report.certificate)
    violations.push_back({{"kind", to_string(v.kind)}, {"detail", v.detail}});
  json scores = json::array();
  for (const ItemScores& s : report.scores)
    scores.push_back({s.p_exp, s.p_clk});
  return {{"schema_version", kSchemaVersion},
          {"pool_id", pool.id},
          {"mode", to_string(config.mode)},
          {"pruning", to_string(config.pruning)},
          {"chosen", cell_ids(report.chosen, pool)},
          {"ad_positions", report.chosen.ad_positions()},
          {"reward",
           {{"total", report.reward.total},
            {"value", report.reward.value},
            {"engagement", report.reward.engagement},
            {"penalty", report.reward.penalty}}},
          {"scores", scores},
          {"evaluations", report.evaluations},
          {"pruned_by_constraint", report.pruned_by_constraint},
          {"pruned_by_bound", report.pruned_by_bound},
          {"feasible_considered", report.feasible_considered},
          {"violations", violations}};
}

}  // namespace slatebound
