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

// Per-slate probability models and list-level reward aggregation.
//
// A scorer maps a whole slate to exposure/click probabilities for every
// cell. The reward of a slate is
//
//   R = sum_i (V_i + N_i - P_i)
//   V_i = p_clk * p_exp * s   (CPA)      or   p_exp * s   (otherwise)
//   N_i = p_exp * p_clk * n
//   P_i = d * p_exp
//
// summed once per item, position-ascending. Continuation cells of a large
// ad carry the scores of its first cell but contribute no reward terms.

#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "slatebound/domain.hpp"

namespace slatebound {

struct ItemScores {
  double p_exp = 0.0;
  double p_clk = 0.0;

  friend bool operator==(const ItemScores&, const ItemScores&) = default;
};

struct RewardBreakdown {
  std::vector<double> value;       // V_i per position
  std::vector<double> engagement;  // N_i per position
  std::vector<double> penalty;     // P_i per position
  double total = 0.0;
};

// Scorer interface. Implementations must be deterministic and must declare
// an envelope: for every item and start position, an upper bound on the
// probabilities that item can receive there in any slate.
class SlateScorer {
 public:
  virtual ~SlateScorer() = default;

  std::vector<ItemScores> score(const Slate& slate,
                                const CandidatePool& pool) const {
    evaluations_.fetch_add(1, std::memory_order_relaxed);
    return do_score(slate, pool);
  }

  virtual ItemScores envelope(const Item& item, int position,
                              const CandidatePool& pool) const = 0;

  // Number of score() calls made on this scorer so far.
  std::uint64_t evaluations() const {
    return evaluations_.load(std::memory_order_relaxed);
  }

 protected:
  virtual std::vector<ItemScores> do_score(const Slate& slate,
                                           const CandidatePool& pool) const = 0;

 private:
  mutable std::atomic<std::uint64_t> evaluations_{0};
};

// Neighbour classes seen by the local-context term.
enum ContextSlot : int { kBoundary = 0, kOrganicSlot, kAdSlot, kLargeAdSlot };
inline constexpr int kContextSlots = 4;

inline int context_slot(ItemKind kind) {
  switch (kind) {
    case ItemKind::kOrganic: return kOrganicSlot;
    case ItemKind::kAd: return kAdSlot;
    case ItemKind::kLargeAd: return kLargeAdSlot;
  }
  return kBoundary;
}

struct LogitParams {
  std::vector<double> weights;  // one per feature
  double bias = 0.0;
  double position_decay = 0.0;  // logit drop per position below the top
  std::array<double, kContextSlots> prev_context{};
  std::array<double, kContextSlots> next_context{};
};

struct ReferenceScorerConfig {
  std::size_t feature_dim = 1;
  LogitParams exposure;
  LogitParams click;

  // Draws every parameter from a generator seeded with `seed`.
  static ReferenceScorerConfig from_seed(std::uint64_t seed,
                                         std::size_t feature_dim) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) {
      return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    ReferenceScorerConfig config;
    config.feature_dim = feature_dim;
    auto fill = [&](LogitParams& p, double bias_lo, double bias_hi,
                    double decay_hi) {
      p.weights.resize(feature_dim);
      for (double& w : p.weights) w = uniform(-0.6, 0.6);
      p.bias = uniform(bias_lo, bias_hi);
      p.position_decay = uniform(0.0, decay_hi);
      for (double& c : p.prev_context) c = uniform(-0.3, 0.3);
      for (double& c : p.next_context) c = uniform(-0.3, 0.3);
    };
    fill(config.exposure, 0.5, 2.0, 0.25);
    fill(config.click, -2.5, -1.0, 0.1);
    return config;
  }
};

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// p = logistic(w . x + bias - decay * (pos - 1) + prev[ctx] + next[ctx]),
// where the contexts are the kinds of the neighbouring items (a large ad's
// own span is skipped) or the page boundary.
class ReferenceScorer final : public SlateScorer {
 public:
  explicit ReferenceScorer(ReferenceScorerConfig config)
      : config_(std::move(config)) {
    if (config_.feature_dim == 0 ||
        config_.exposure.weights.size() != config_.feature_dim ||
        config_.click.weights.size() != config_.feature_dim)
      throw Error(ErrorCode::kDimensionMismatch,
                  "scorer weights must have feature_dim = " +
                      std::to_string(config_.feature_dim) + " entries");
  }

  const ReferenceScorerConfig& config() const { return config_; }

  ItemScores envelope(const Item& item, int position,
                      const CandidatePool& pool) const override {
    require_dim(pool);
    auto bound = [&](const LogitParams& p) {
      const double prev = position == 1 ? p.prev_context[kBoundary] : max_of(p.prev_context);
      return logistic(base_logit(p, item, position) + prev +
                      max_of(p.next_context));
    };
    return {bound(config_.exposure), bound(config_.click)};
  }

 protected:
  std::vector<ItemScores> do_score(const Slate& slate,
                                   const CandidatePool& pool) const override {
    require_dim(pool);
    const auto cells = slate.cells();
    const int len = static_cast<int>(cells.size());
    std::vector<ItemScores> out(len);
    for (int pos = 1; pos <= len; ++pos) {
      if (slate.is_continuation(pos)) {
        out[pos - 1] = out[pos - 2];
        continue;
      }
      const ItemRef ref = cells[pos - 1];
      int last = pos;
      while (last < len && cells[last] == ref && is_ad(ref.kind)) ++last;
      const int prev = pos == 1 ? kBoundary : context_slot(cells[pos - 2].kind);
      const int next = last == len ? kBoundary : context_slot(cells[last].kind);
      const Item& item = pool.item(ref);
      auto prob = [&](const LogitParams& p) {
        return logistic(base_logit(p, item, pos) + p.prev_context[prev] +
                        p.next_context[next]);
      };
      out[pos - 1] = {prob(config_.exposure), prob(config_.click)};
    }
    return out;
  }

 private:
  void require_dim(const CandidatePool& pool) const {
    if (pool.feature_dim != config_.feature_dim)
      throw Error(ErrorCode::kDimensionMismatch,
                  "pool feature_dim " + std::to_string(pool.feature_dim) +
                      " != scorer feature_dim " +
                      std::to_string(config_.feature_dim));
  }

  static double base_logit(const LogitParams& p, const Item& item,
                           int position) {
    double z = p.bias - p.position_decay * (position - 1);
    for (std::size_t f = 0; f < p.weights.size(); ++f)
      z += p.weights[f] * item.features[f];
    return z;
  }

  static double max_of(const std::array<double, kContextSlots>& a) {
    double m = a[0];
    for (double v : a) m = std::max(m, v);
    return m;
  }

  ReferenceScorerConfig config_;
};

inline RewardBreakdown aggregate_reward(const Slate& slate,
                                        std::span<const ItemScores> scores,
                                        const CandidatePool& pool) {
  if (scores.size() != slate.size())
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(scores.size()) + " scores for a slate of " +
                    std::to_string(slate.size()));
  const std::size_t len = slate.size();
  RewardBreakdown r;
  r.value.assign(len, 0.0);
  r.engagement.assign(len, 0.0);
  r.penalty.assign(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    if (slate.is_continuation(static_cast<int>(i) + 1)) continue;
    const Item& item = pool.item(slate.cells()[i]);
    const double pe = scores[i].p_exp, pc = scores[i].p_clk;
    r.value[i] = is_ad(item.kind) && item.pricing == Pricing::kCPA
                     ? pc * pe * item.bid_value
                     : pe * item.bid_value;
    r.engagement[i] = pe * pc * item.engagement_value;
    r.penalty[i] = item.penalty_coeff * pe;
    r.total += r.value[i] + r.engagement[i] - r.penalty[i];
  }
  return r;
}

struct SlateScore {
  std::vector<ItemScores> scores;
  RewardBreakdown reward;
};

// One scorer evaluation followed by reward aggregation.
inline SlateScore score_slate(const Slate& slate, const CandidatePool& pool,
                              const SlateScorer& scorer) {
  SlateScore out;
  out.scores = scorer.score(slate, pool);
  out.reward = aggregate_reward(slate, out.scores, pool);
  return out;
}

}  // namespace slatebound
