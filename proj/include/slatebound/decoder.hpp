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

// Bounded decoding over the feasible slate set.
//
// Two modes are offered. kExhaustiveBounded visits all of F in tie-break
// order with branch-and-bound on an admissible reward bound, so it always
// returns the global optimum. kTwoStage is the production pipeline: pick the
// best single-ad insertion first, then expand only around that winner.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "slatebound/constraints.hpp"
#include "slatebound/domain.hpp"
#include "slatebound/scorer.hpp"

namespace slatebound {

enum class DecodeMode { kTwoStage, kExhaustiveBounded };

// kOff scores every structurally valid candidate and drops infeasible ones
// only at selection time. The other two settings discard infeasible
// candidates before they are scored.
enum class Pruning { kOff, kHardFilterOnly, kHardFilterPlusUpperBound };

struct DecodeConfig {
  DecodeMode mode = DecodeMode::kExhaustiveBounded;
  Pruning pruning = Pruning::kHardFilterPlusUpperBound;
};

struct DecodeReport {
  Slate chosen;
  RewardBreakdown reward;
  std::vector<ItemScores> scores;
  std::uint64_t evaluations = 0;
  std::uint64_t pruned_by_constraint = 0;
  std::uint64_t pruned_by_bound = 0;
  // Distinct feasible slates that were either scored or bound-pruned.
  std::uint64_t feasible_considered = 0;
  // check() of the chosen slate; always empty.
  std::vector<Violation> certificate;
};

// A feasible set of placements plus ads still waiting for a position.
struct PartialSlate {
  std::vector<Placement> placed;
  std::vector<ItemRef> pending;
};

namespace detail {

inline double ad_term_bound(const Item& item, ItemScores env) {
  const double value = item.pricing == Pricing::kCPA
                           ? env.p_clk * env.p_exp * item.bid_value
                           : env.p_exp * item.bid_value;
  return value + env.p_exp * env.p_clk * item.engagement_value;
}

// Tolerance under which a bound is not trusted to beat the incumbent.
inline double prune_slack(double best) {
  return 1e-9 * std::max(1.0, std::abs(best));
}

}  // namespace detail

// Upper bound on the reward of any feasible completion, built only from the
// scorer envelope (no scorer evaluation).
//
// Completing a partial only inserts more ads, so every organic ends at or
// below the cell it fills now and is bounded by its envelope maximised over
// that cell and everything below. Placed ads keep their start. Each pending
// ad gets its best envelope term over the starts still compatible with the
// placed ads. Penalties are bounded below by zero. Returns -inf when some
// pending ad has no compatible start.
inline double envelope_bound(std::span<const Placement> placed,
                             std::span<const ItemRef> pending,
                             const PlacementSearch& search,
                             const SlateScorer& scorer) {
  const CandidatePool& pool = search.pool();
  const int page = search.rules().page_size;
  double bound = 0.0;

  std::vector<char> occupied(page + 1, 0);
  for (const Placement& p : placed) {
    const int span = search.span(p.ad);
    for (int c = p.start; c < p.start + span && c <= page; ++c) occupied[c] = 1;
    const Item& ad = pool.item(p.ad);
    bound += detail::ad_term_bound(ad, scorer.envelope(ad, p.start, pool));
  }

  std::size_t next_organic = 0;
  for (int pos = 1; pos <= page && next_organic < pool.organic.size(); ++pos) {
    if (occupied[pos]) continue;
    const Item& item = pool.organic[next_organic++];
    if (item.engagement_value == 0.0) continue;
    double best = 0.0;
    for (int q = pos; q <= page; ++q) {
      const ItemScores env = scorer.envelope(item, q, pool);
      best = std::max(best, env.p_exp * env.p_clk * item.engagement_value);
    }
    bound += best;
  }

  for (ItemRef ref : pending) {
    const Item& ad = pool.item(ref);
    double best = -std::numeric_limits<double>::infinity();
    for (int s : search.starts_of(ref)) {
      if (!search.compatible(placed, {ref, s})) continue;
      best = std::max(best, detail::ad_term_bound(ad, scorer.envelope(ad, s, pool)));
    }
    bound += best;
  }
  return bound;
}

// Admissible bound for `partial` under `rules`. With nothing pending the
// partial is itself the only completion and its exact reward is returned
// (one scorer evaluation); otherwise the envelope bound is used.
inline double upper_bound(const PartialSlate& partial,
                          const CandidatePool& pool, const RuleSet& rules,
                          const SlateScorer& scorer) {
  if (partial.pending.empty()) {
    auto slate = slate_from_placements(pool, partial.placed, rules.page_size,
                                       rules.large_ad_span);
    if (slate) return score_slate(*slate, pool, scorer).reward.total;
    return -std::numeric_limits<double>::infinity();
  }
  PlacementSearch search(pool, rules);
  return envelope_bound(partial.placed, partial.pending, search, scorer);
}

namespace detail {

// Best slate seen so far under the reward-then-tie-break order.
class Incumbent {
 public:
  explicit Incumbent(const CandidatePool& pool) : pool_(pool) {}

  bool empty() const { return !has_; }
  double total() const { return score_.reward.total; }
  const Slate& slate() const { return slate_; }

  bool offer(const Slate& slate, SlateScore score) {
    if (has_) {
      if (score.reward.total < score_.reward.total) return false;
      if (score.reward.total == score_.reward.total &&
          !(order_key(slate, pool_) < order_key(slate_, pool_)))
        return false;
    }
    has_ = true;
    slate_ = slate;
    score_ = std::move(score);
    return true;
  }

  void fill(DecodeReport& report, const RuleSet& rules) const {
    report.chosen = slate_;
    report.reward = score_.reward;
    report.scores = score_.scores;
    report.certificate = check(slate_, rules, pool_);
  }

  const SlateScore& score() const { return score_; }

 private:
  const CandidatePool& pool_;
  bool has_ = false;
  Slate slate_;
  SlateScore score_;
};

inline std::uint64_t count_completions(const PlacementSearch& search,
                                       std::span<const Placement> placed,
                                       std::span<const ItemRef> pending) {
  struct Counter {
    std::uint64_t n = 0;
    bool enter(std::span<const Placement>, std::span<const ItemRef>) {
      return true;
    }
    void leaf(std::span<const Placement>) { ++n; }
    void reject() {}
  } counter;
  std::vector<Placement> work(placed.begin(), placed.end());
  search.extend(work, pending, counter);
  return counter.n;
}

}  // namespace detail

// Scores every slate of F (or, with kOff, every structurally valid slate
// with at most K ads) and returns the true argmax.
inline DecodeReport decode_exhaustive(const CandidatePool& pool,
                                      const RuleSet& rules,
                                      const SlateScorer& scorer,
                                      Pruning pruning) {
  const RuleSet gen_rules = pruning == Pruning::kOff ? relaxed(rules) : rules;
  const PlacementSearch search(pool, gen_rules);
  DecodeReport report;
  detail::Incumbent best(pool);

  struct Visitor {
    const PlacementSearch& search;
    const RuleSet& rules;
    const CandidatePool& pool;
    const SlateScorer& scorer;
    Pruning pruning;
    DecodeReport& report;
    detail::Incumbent& best;

    bool enter(std::span<const Placement> placed,
               std::span<const ItemRef> pending) {
      if (pruning != Pruning::kHardFilterPlusUpperBound || best.empty())
        return true;
      const double ub = envelope_bound(placed, pending, search, scorer);
      if (ub >= best.total() - detail::prune_slack(best.total())) return true;
      const auto skipped = detail::count_completions(search, placed, pending);
      report.pruned_by_bound += skipped;
      report.feasible_considered += skipped;
      return false;
    }

    void leaf(std::span<const Placement> placed) {
      const Slate slate = search.build(placed);
      const bool feasible = is_feasible(slate, rules, pool);
      if (!feasible && pruning != Pruning::kOff) {
        ++report.pruned_by_constraint;
        return;
      }
      SlateScore score = score_slate(slate, pool, scorer);
      ++report.evaluations;
      if (!feasible) {
        ++report.pruned_by_constraint;
        return;
      }
      ++report.feasible_considered;
      best.offer(slate, std::move(score));
    }

    void reject() { ++report.pruned_by_constraint; }
  } visitor{search, rules, pool, scorer, pruning, report, best};

  search.run(visitor);
  best.fill(report, rules);
  return report;
}

struct Stage1Result {
  Slate intermediate;
  SlateScore intermediate_score;
  Slate no_ad;
  SlateScore no_ad_score;
  std::uint64_t evaluations = 0;
  std::uint64_t pruned_by_constraint = 0;
  std::uint64_t feasible_considered = 0;
};

// Stage I: the no-ad page plus every single insertion of a regular ad at
// each position in [min_pos, max_pos]; the best becomes the intermediate.
inline Stage1Result stage1_insert(const CandidatePool& pool,
                                  const RuleSet& rules,
                                  const SlateScorer& scorer,
                                  Pruning pruning = Pruning::kHardFilterPlusUpperBound) {
  Stage1Result out;
  out.no_ad = organic_page(pool, rules.page_size);
  out.no_ad_score = score_slate(out.no_ad, pool, scorer);
  out.evaluations = 1;
  out.feasible_considered = 1;

  detail::Incumbent best(pool);
  best.offer(out.no_ad, out.no_ad_score);

  const bool post_filter = pruning == Pruning::kOff;
  const int len = static_cast<int>(out.no_ad.size());
  const int lo = post_filter ? 1 : rules.min_pos;
  const int hi = std::min({post_filter ? rules.page_size : rules.max_pos,
                           len + 1, rules.page_size});
  for (ItemRef ad : ad_catalogue(pool)) {
    if (ad.kind != ItemKind::kAd) continue;
    for (int q = lo; q <= hi; ++q) {
      Slate slate = insert_ad(out.no_ad, pool, ad, q, rules.page_size,
                              rules.large_ad_span);
      const bool feasible = is_feasible(slate, rules, pool);
      if (!feasible && !post_filter) {
        ++out.pruned_by_constraint;
        continue;
      }
      SlateScore score = score_slate(slate, pool, scorer);
      ++out.evaluations;
      if (!feasible) {
        ++out.pruned_by_constraint;
        continue;
      }
      ++out.feasible_considered;
      best.offer(slate, std::move(score));
    }
  }
  out.intermediate = best.slate();
  out.intermediate_score = best.score();
  return out;
}

// Stage II: around the intermediate, consider keeping it, stripping it to
// the no-ad page, adding one more ad of either kind, and replacing it with
// a single large ad. Counters cover this stage only, but
// feasible_considered includes the intermediate and the no-ad page.
inline DecodeReport stage2_expand(const Stage1Result& stage1,
                                  const CandidatePool& pool,
                                  const RuleSet& rules,
                                  const SlateScorer& scorer,
                                  const DecodeConfig& config) {
  DecodeReport report;
  detail::Incumbent best(pool);
  best.offer(stage1.intermediate, stage1.intermediate_score);
  best.offer(stage1.no_ad, stage1.no_ad_score);
  report.feasible_considered = stage1.intermediate == stage1.no_ad ? 1 : 2;

  const bool post_filter = config.pruning == Pruning::kOff;
  const bool bound_prune =
      config.pruning == Pruning::kHardFilterPlusUpperBound;
  const PlacementSearch search(pool, rules);

  // Scores one generated candidate, or filters it first.
  auto consider = [&](const Slate& slate) {
    const bool feasible = is_feasible(slate, rules, pool);
    if (!feasible && !post_filter) {
      ++report.pruned_by_constraint;
      return;
    }
    SlateScore score = score_slate(slate, pool, scorer);
    ++report.evaluations;
    if (!feasible) {
      ++report.pruned_by_constraint;
      return;
    }
    ++report.feasible_considered;
    best.offer(slate, std::move(score));
  };
  // Drops a whole family whose bound cannot beat the incumbent. The
  // family's feasible members are still counted as considered.
  auto family_pruned = [&](double bound, const std::vector<Slate>& members) {
    if (!bound_prune ||
        bound >= best.total() - detail::prune_slack(best.total()))
      return false;
    std::uint64_t feasible = 0;
    for (const Slate& s : members) feasible += is_feasible(s, rules, pool);
    report.pruned_by_bound += feasible;
    report.feasible_considered += feasible;
    report.pruned_by_constraint += members.size() - feasible;
    return true;
  };

  const Slate& inter = stage1.intermediate;
  const int inter_ads = inter.ad_count();
  const int page = rules.page_size;

  // Add a second ad to the intermediate.
  if (inter_ads >= 1 && inter_ads + 1 <= rules.max_ads) {
    const auto placed = inter.placements();
    for (ItemRef ad : ad_catalogue(pool)) {
      auto cells = inter.cells();
      if (std::find(cells.begin(), cells.end(), ad) != cells.end()) continue;
      std::vector<Slate> members;
      const int len = static_cast<int>(inter.size());
      for (int q = 1; q <= std::min(len + 1, page); ++q) {
        if (inter.is_continuation(q)) continue;
        Slate s = insert_ad(inter, pool, ad, q, page, rules.large_ad_span);
        if (s.ad_count() != inter_ads + 1) continue;  // pushed an ad off
        members.push_back(std::move(s));
      }
      double bound = -std::numeric_limits<double>::infinity();
      if (bound_prune && !members.empty()) {
        // Existing ads at or after the insertion point shift down by the
        // new ad's span; try every split of the start-ordered placements.
        const std::vector<ItemRef> pending{ad};
        for (std::size_t split = 0; split <= placed.size(); ++split) {
          std::vector<Placement> moved = placed;
          for (std::size_t i = split; i < moved.size(); ++i)
            moved[i].start += search.span(ad);
          bound = std::max(bound, envelope_bound(moved, pending, search, scorer));
        }
      }
      if (family_pruned(bound, members)) continue;
      for (const Slate& s : members) consider(s);
    }
  }

  // Large-ad variants: the no-ad page with one large ad.
  if (rules.max_ads >= 1) {
    for (ItemRef ad : ad_catalogue(pool)) {
      if (ad.kind != ItemKind::kLargeAd) continue;
      std::vector<Slate> members;
      const int len = static_cast<int>(stage1.no_ad.size());
      for (int q = 1; q <= std::min(len + 1, page); ++q) {
        if (!post_filter && !rules.large_ad_start_allowed(q)) {
          ++report.pruned_by_constraint;
          continue;
        }
        members.push_back(insert_ad(stage1.no_ad, pool, ad, q, page,
                                    rules.large_ad_span));
      }
      double bound = -std::numeric_limits<double>::infinity();
      if (bound_prune && !members.empty()) {
        const std::vector<ItemRef> pending{ad};
        bound = envelope_bound({}, pending, search, scorer);
      }
      if (family_pruned(bound, members)) continue;
      for (const Slate& s : members) consider(s);
    }
  }

  best.fill(report, rules);
  return report;
}

inline DecodeReport decode(const CandidatePool& pool, const RuleSet& rules,
                           const SlateScorer& scorer,
                           const DecodeConfig& config = {}) {
  if (config.mode == DecodeMode::kExhaustiveBounded)
    return decode_exhaustive(pool, rules, scorer, config.pruning);
  const Stage1Result s1 = stage1_insert(pool, rules, scorer, config.pruning);
  DecodeReport report = stage2_expand(s1, pool, rules, scorer, config);
  report.evaluations += s1.evaluations;
  report.pruned_by_constraint += s1.pruned_by_constraint;
  // Stage II re-counts the intermediate and the no-ad page.
  report.feasible_considered += s1.feasible_considered -
                                (s1.intermediate == s1.no_ad ? 1 : 2);
  return report;
}

}  // namespace slatebound
