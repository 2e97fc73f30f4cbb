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

// Brute-force reference solver. It deliberately shares no generation code
// with PlacementSearch: every ad subset (up to one more ad than K, so the
// load rule is exercised) is tried at every tuple of start positions, the
// slate is built by replaying insert_ad, and check() decides membership.

#pragma once

#include <cstdint>
#include <vector>

#include "slatebound/constraints.hpp"
#include "slatebound/domain.hpp"
#include "slatebound/scorer.hpp"

namespace slatebound {

inline constexpr std::uint64_t kDefaultFeasibleLimit = 1'000'000;

struct OracleResult {
  Slate best;
  SlateScore score;
  std::uint64_t feasible_count = 0;
  std::vector<std::uint64_t> per_k;
};

namespace detail {

// Replays insertions in ascending start order. Returns false when the
// tuple does not describe a reachable slate (overlap, gap before an ad,
// or an ad pushed off the page).
inline bool build_by_insertion(const CandidatePool& pool, const RuleSet& rules,
                               std::vector<Placement> wanted, Slate& out) {
  std::sort(wanted.begin(), wanted.end(),
            [](const Placement& a, const Placement& b) {
              return a.start < b.start;
            });
  Slate slate = organic_page(pool, rules.page_size);
  for (const Placement& p : wanted) {
    try {
      slate = insert_ad(slate, pool, p.ad, p.start, rules.page_size,
                        rules.large_ad_span);
    } catch (const Error&) {
      return false;
    }
  }
  // A later insertion never moves an earlier one (starts ascend), but it
  // can land inside a large ad's span or push cells off the page.
  for (const Placement& p : wanted) {
    if (p.start > static_cast<int>(slate.size()) || slate.at(p.start) != p.ad)
      return false;
    if (p.start > 1 && slate.at(p.start - 1) == p.ad) return false;
  }
  if (slate.ad_count() != static_cast<int>(wanted.size())) return false;
  out = std::move(slate);
  return true;
}

}  // namespace detail

// Throws FeasibleSetTooLarge when count_feasible predicts more than `limit`
// slates.
inline OracleResult brute_force(const CandidatePool& pool,
                                const RuleSet& rules,
                                const SlateScorer& scorer,
                                std::uint64_t limit = kDefaultFeasibleLimit) {
  const FeasibleCount predicted = count_feasible(pool, rules);
  if (predicted.total > limit) throw FeasibleSetTooLarge(predicted.total, limit);

  std::vector<ItemRef> ads;
  for (std::uint32_t i = 0; i < pool.ads.size(); ++i)
    ads.push_back({ItemKind::kAd, i});
  for (std::uint32_t i = 0; i < pool.large_ads.size(); ++i)
    ads.push_back({ItemKind::kLargeAd, i});
  const int n = static_cast<int>(ads.size());
  const int kmax = std::min(n, rules.max_ads + 1);
  const int page = rules.page_size;

  OracleResult result;
  result.per_k.assign(std::min(n, std::max(rules.max_ads, 0)) + 1, 0);
  bool have_best = false;

  auto consider = [&](const Slate& slate, int k) {
    if (!check(slate, rules, pool).empty()) return;
    ++result.feasible_count;
    ++result.per_k.at(k);
    SlateScore score = score_slate(slate, pool, scorer);
    bool take = !have_best;
    if (have_best) {
      const double a = score.reward.total, b = result.score.reward.total;
      take = a > b ||
             (a == b && order_key(slate, pool) < order_key(result.best, pool));
    }
    if (take) {
      have_best = true;
      result.best = slate;
      result.score = std::move(score);
    }
  };

  // Subsets by size as index combinations, start tuples as odometers over
  // [1, page].
  for (int k = 0; k <= kmax; ++k) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      std::vector<int> starts(k, 1);
      while (true) {
        std::vector<Placement> wanted;
        for (int i = 0; i < k; ++i) wanted.push_back({ads[idx[i]], starts[i]});
        Slate slate;
        if (detail::build_by_insertion(pool, rules, wanted, slate))
          consider(slate, k);
        int i = 0;
        while (i < k && starts[i] == page) starts[i++] = 1;
        if (i == k) break;
        ++starts[i];
      }
      int i = k - 1;
      while (i >= 0 && idx[i] == n - k + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return result;
}

}  // namespace slatebound
