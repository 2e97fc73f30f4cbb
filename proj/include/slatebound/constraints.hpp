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

// Hard business constraints: feasibility checking, plus enumeration and
// counting of the feasible slate set F.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slatebound/domain.hpp"

namespace slatebound {

enum class ViolationKind {
  kLoadExceeded,
  kSpacingViolated,
  kPositionOutOfBounds,
  kLargeAdRuleBroken,
  kFrequencyCapHit,
};

inline const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kLoadExceeded: return "LoadExceeded";
    case ViolationKind::kSpacingViolated: return "SpacingViolated";
    case ViolationKind::kPositionOutOfBounds: return "PositionOutOfBounds";
    case ViolationKind::kLargeAdRuleBroken: return "LargeAdRuleBroken";
    case ViolationKind::kFrequencyCapHit: return "FrequencyCapHit";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::string detail;
};

// Gap between two disjoint-or-overlapping cell ranges; 0 when they overlap.
inline int cell_distance(int a_first, int a_last, int b_first, int b_last) {
  if (b_first > a_last) return b_first - a_last;
  if (a_first > b_last) return a_first - b_last;
  return 0;
}

// Every violated rule, in the order: load, spacing, position bounds, large
// ad rules, frequency cap. Empty means the slate is in F.
inline std::vector<Violation> check(const Slate& slate, const RuleSet& rules,
                                    const CandidatePool& pool) {
  std::vector<Violation> out;
  const auto placements = slate.placements();
  const int k = static_cast<int>(placements.size());

  if (k > rules.max_ads)
    out.push_back({ViolationKind::kLoadExceeded,
                   std::to_string(k) + " ads > K = " +
                       std::to_string(rules.max_ads)});

  for (int i = 0; i < k; ++i) {
    const int ai = placements[i].start;
    const int al = ai + slate.span_at(ai) - 1;
    for (int j = i + 1; j < k; ++j) {
      const int bi = placements[j].start;
      const int bl = bi + slate.span_at(bi) - 1;
      const int gap = cell_distance(ai, al, bi, bl);
      if (gap < rules.min_spacing)
        out.push_back({ViolationKind::kSpacingViolated,
                       "ads '" + pool.item(placements[i].ad).id + "' and '" +
                           pool.item(placements[j].ad).id + "' are " +
                           std::to_string(gap) + " apart, need " +
                           std::to_string(rules.min_spacing)});
    }
  }

  for (const Placement& p : placements) {
    const int last = p.start + slate.span_at(p.start) - 1;
    if (p.start < rules.min_pos || last > rules.max_pos)
      out.push_back({ViolationKind::kPositionOutOfBounds,
                     "ad '" + pool.item(p.ad).id + "' occupies [" +
                         std::to_string(p.start) + ", " +
                         std::to_string(last) + "] outside [" +
                         std::to_string(rules.min_pos) + ", " +
                         std::to_string(rules.max_pos) + "]"});
  }

  for (const Placement& p : placements) {
    const int span = slate.span_at(p.start);
    const std::string& id = pool.item(p.ad).id;
    if (p.ad.kind == ItemKind::kLargeAd) {
      if (!rules.large_ad_start_allowed(p.start))
        out.push_back({ViolationKind::kLargeAdRuleBroken,
                       "large ad '" + id + "' may not start at " +
                           std::to_string(p.start)});
      if (span != rules.large_ad_span)
        out.push_back({ViolationKind::kLargeAdRuleBroken,
                       "large ad '" + id + "' spans " + std::to_string(span) +
                           " cells, need " +
                           std::to_string(rules.large_ad_span)});
    } else if (span != 1) {
      out.push_back({ViolationKind::kLargeAdRuleBroken,
                     "ad '" + id + "' spans " + std::to_string(span) +
                         " cells"});
    }
  }

  if (k > 0 && rules.frequency_cap_hit(pool))
    out.push_back({ViolationKind::kFrequencyCapHit,
                   "user has " + std::to_string(pool.user_exposure_count) +
                       " exposures, cap " +
                       std::to_string(*rules.user_frequency_cap)});
  return out;
}

inline bool is_feasible(const Slate& slate, const RuleSet& rules,
                        const CandidatePool& pool) {
  return check(slate, rules, pool).empty();
}

// Rules with every positional restriction lifted. Load bound K and the
// large-ad span are kept so generation stays bounded.
inline RuleSet relaxed(const RuleSet& rules) {
  RuleSet out = rules;
  out.min_spacing = 1;
  out.min_pos = 1;
  out.max_pos = rules.page_size;
  out.large_ad_start_positions.clear();
  for (int s = 1; s <= rules.page_size; ++s)
    out.large_ad_start_positions.push_back(s);
  out.user_frequency_cap.reset();
  return out;
}

// Depth-first generator over ad subsets and start positions. Subsets are
// visited by ascending size, then lexicographically by ad id; within a
// subset, start tuples are visited lexicographically. That is exactly the
// tie-break order of SlateOrderKey, so the first slate of maximal reward
// found by a scan is the preferred one.
//
// Partial placements are extended only while they satisfy the bounds,
// large-ad and spacing rules; the visitor decides whether to descend into
// each partial (for bound pruning) and receives each complete slate.
//
// Visitor interface:
//   bool enter(std::span<const Placement> placed,
//              std::span<const ItemRef> pending);
//   void leaf(std::span<const Placement> placed);   // use build() for the slate
//   void reject();   // a partial or leaf discarded by a hard rule
class PlacementSearch {
 public:
  PlacementSearch(const CandidatePool& pool, const RuleSet& rules)
      : pool_(pool), rules_(rules), catalogue_(ad_catalogue(pool)) {
    starts_.resize(catalogue_.size());
    for (std::size_t i = 0; i < catalogue_.size(); ++i)
      starts_[i] = candidate_starts(catalogue_[i]);
  }

  const CandidatePool& pool() const { return pool_; }
  const RuleSet& rules() const { return rules_; }
  const std::vector<ItemRef>& catalogue() const { return catalogue_; }

  // Largest ad count any feasible slate can have.
  int max_ads() const {
    if (rules_.frequency_cap_hit(pool_)) return 0;
    return std::min<int>(rules_.max_ads, static_cast<int>(catalogue_.size()));
  }

  int span(ItemRef ad) const {
    return ad.kind == ItemKind::kLargeAd ? rules_.large_ad_span : 1;
  }

  // Start positions allowed for `ad` in isolation.
  std::vector<int> candidate_starts(ItemRef ad) const {
    std::vector<int> out;
    const int w = span(ad);
    for (int s = rules_.min_pos; s + w - 1 <= rules_.max_pos; ++s) {
      if (ad.kind == ItemKind::kLargeAd && !rules_.large_ad_start_allowed(s))
        continue;
      out.push_back(s);
    }
    return out;
  }

  const std::vector<int>& starts_of(ItemRef ad) const {
    for (std::size_t i = 0; i < catalogue_.size(); ++i)
      if (catalogue_[i] == ad) return starts_[i];
    throw Error(ErrorCode::kInvalidSlate, "ad not in catalogue");
  }

  // Spacing between `next` and every already placed ad.
  bool compatible(std::span<const Placement> placed, Placement next) const {
    const int nf = next.start, nl = next.start + span(next.ad) - 1;
    for (const Placement& p : placed) {
      const int pf = p.start, pl = p.start + span(p.ad) - 1;
      if (cell_distance(pf, pl, nf, nl) < rules_.min_spacing) return false;
    }
    return true;
  }

  // True when every ad cell lies on the page that results from inserting
  // all of `placed` into the natural list.
  bool fits_page(std::span<const Placement> placed) const {
    int cells = 0, last = 0;
    for (const Placement& p : placed) {
      cells += span(p.ad);
      last = std::max(last, p.start + span(p.ad) - 1);
    }
    const auto len = std::min<std::size_t>(rules_.page_size,
                                           pool_.organic.size() + cells);
    return last <= static_cast<int>(len);
  }

  Slate build(std::span<const Placement> placed) const {
    auto slate = slate_from_placements(pool_, placed, rules_.page_size,
                                       rules_.large_ad_span);
    if (!slate) throw Error(ErrorCode::kInvalidSlate, "placements do not fit");
    return *std::move(slate);
  }

  template <class Visitor>
  void run(Visitor& visitor) const {
    const int kmax = max_ads();
    const int n = static_cast<int>(catalogue_.size());
    std::vector<Placement> placed;
    std::vector<ItemRef> subset;
    std::vector<int> idx;
    for (int k = 0; k <= kmax; ++k) {
      idx.resize(k);
      for (int i = 0; i < k; ++i) idx[i] = i;
      while (true) {
        subset.clear();
        for (int i : idx) subset.push_back(catalogue_[i]);
        placed.clear();
        if (visitor.enter(std::span<const Placement>(placed),
                          std::span<const ItemRef>(subset)))
          extend(placed, subset, visitor);
        // Next k-combination in lexicographic order.
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
  }

  // Explores every completion of `placed` by the ads in `pending`.
  template <class Visitor>
  void extend(std::vector<Placement>& placed, std::span<const ItemRef> pending,
              Visitor& visitor) const {
    if (pending.empty()) {
      if (fits_page(placed))
        visitor.leaf(std::span<const Placement>(placed));
      else
        visitor.reject();
      return;
    }
    const ItemRef ad = pending.front();
    const auto rest = pending.subspan(1);
    for (int s : starts_of(ad)) {
      const Placement next{ad, s};
      if (!compatible(placed, next)) {
        visitor.reject();
        continue;
      }
      placed.push_back(next);
      if (visitor.enter(std::span<const Placement>(placed), rest))
        extend(placed, rest, visitor);
      placed.pop_back();
    }
  }

 private:
  const CandidatePool& pool_;
  const RuleSet& rules_;
  std::vector<ItemRef> catalogue_;
  std::vector<std::vector<int>> starts_;
};

template <class Fn>
void for_each_feasible(const CandidatePool& pool, const RuleSet& rules,
                       Fn&& fn) {
  struct Visitor {
    Fn& fn;
    const PlacementSearch& search;
    bool enter(std::span<const Placement>, std::span<const ItemRef>) {
      return true;
    }
    void leaf(std::span<const Placement> placed) { fn(search.build(placed)); }
    void reject() {}
  };
  const PlacementSearch search(pool, rules);
  Visitor visitor{fn, search};
  search.run(visitor);
}

// All of F in deterministic order: ascending ad count, then lexicographic
// by (ad id tuple, start position tuple).
inline std::vector<Slate> enumerate_feasible(const CandidatePool& pool,
                                             const RuleSet& rules) {
  std::vector<Slate> out;
  for_each_feasible(pool, rules, [&](const Slate& s) { out.push_back(s); });
  return out;
}

struct FeasibleCount {
  std::uint64_t total = 0;
  std::vector<std::uint64_t> per_k;  // index = number of ads

  friend bool operator==(const FeasibleCount&, const FeasibleCount&) = default;
};

// per_k has min(K, number of ads) + 1 entries.
inline FeasibleCount count_feasible(const CandidatePool& pool,
                                    const RuleSet& rules) {
  const int kmax = std::min<int>(rules.max_ads,
                                 static_cast<int>(pool.ad_total()));
  FeasibleCount count;
  count.per_k.assign(std::max(kmax, 0) + 1, 0);
  struct Visitor {
    FeasibleCount& count;
    bool enter(std::span<const Placement>, std::span<const ItemRef>) {
      return true;
    }
    void leaf(std::span<const Placement> placed) {
      ++count.per_k[placed.size()];
      ++count.total;
    }
    void reject() {}
  } visitor{count};
  PlacementSearch(pool, rules).run(visitor);
  return count;
}

}  // namespace slatebound
