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

// Core data model: items, candidate pools, business rule sets and slates.
//
// A slate is a page of at most `page_size` cells. Organic items keep the
// order they have in the pool; ads are inserted between them. A large ad is
// one item that occupies `large_ad_span` consecutive cells. Positions are
// 1-based everywhere.

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "slatebound/error.hpp"

namespace slatebound {

enum class ItemKind : std::uint8_t { kOrganic, kAd, kLargeAd };
enum class Pricing : std::uint8_t { kCPA, kCPM };

inline bool is_ad(ItemKind kind) { return kind != ItemKind::kOrganic; }

inline const char* to_string(ItemKind kind) {
  switch (kind) {
    case ItemKind::kOrganic: return "organic";
    case ItemKind::kAd: return "ad";
    case ItemKind::kLargeAd: return "large_ad";
  }
  return "?";
}

inline const char* to_string(Pricing pricing) {
  return pricing == Pricing::kCPA ? "CPA" : "CPM";
}

struct Item {
  std::string id;
  ItemKind kind = ItemKind::kOrganic;
  Pricing pricing = Pricing::kCPM;
  double bid_value = 0.0;         // s
  double engagement_value = 0.0;  // n
  double penalty_coeff = 0.0;     // d
  std::vector<double> features;
};

// Addresses an item by the pool list it lives in and its index there.
struct ItemRef {
  ItemKind kind = ItemKind::kOrganic;
  std::uint32_t index = 0;

  friend auto operator<=>(const ItemRef&, const ItemRef&) = default;
};

struct CandidatePool {
  std::string id;
  std::vector<Item> organic;  // upstream-ranked natural list
  std::vector<Item> ads;
  std::vector<Item> large_ads;
  std::size_t feature_dim = 1;
  std::uint64_t user_exposure_count = 0;

  const Item& item(ItemRef ref) const {
    switch (ref.kind) {
      case ItemKind::kOrganic: return organic.at(ref.index);
      case ItemKind::kAd: return ads.at(ref.index);
      case ItemKind::kLargeAd: return large_ads.at(ref.index);
    }
    throw Error(ErrorCode::kInvalidSlate, "bad item reference");
  }

  std::size_t ad_total() const { return ads.size() + large_ads.size(); }
};

// Every ad and large ad in the pool, sorted by id. This is the order used
// for ad-id tuples in enumeration and tie-breaking.
inline std::vector<ItemRef> ad_catalogue(const CandidatePool& pool) {
  std::vector<ItemRef> refs;
  refs.reserve(pool.ad_total());
  for (std::uint32_t i = 0; i < pool.ads.size(); ++i)
    refs.push_back({ItemKind::kAd, i});
  for (std::uint32_t i = 0; i < pool.large_ads.size(); ++i)
    refs.push_back({ItemKind::kLargeAd, i});
  std::sort(refs.begin(), refs.end(), [&](ItemRef a, ItemRef b) {
    return pool.item(a).id < pool.item(b).id;
  });
  return refs;
}

inline void validate(const CandidatePool& pool) {
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::kInvalidPool, "pool '" + pool.id + "': " + msg);
  };
  if (pool.feature_dim == 0) fail("feature_dim must be positive");
  if (pool.organic.empty()) fail("organic list must not be empty");
  std::unordered_set<std::string> seen;
  auto check_list = [&](const std::vector<Item>& items, ItemKind kind) {
    for (const Item& item : items) {
      if (item.kind != kind)
        fail("item '" + item.id + "' has kind " + to_string(item.kind) +
             " but sits in the " + to_string(kind) + " list");
      if (!seen.insert(item.id).second) fail("duplicate id '" + item.id + "'");
      for (double v : {item.bid_value, item.engagement_value,
                       item.penalty_coeff}) {
        if (!(v >= 0.0) || !std::isfinite(v))
          fail("item '" + item.id + "' has a negative or non-finite value");
      }
      if (kind == ItemKind::kOrganic &&
          (item.bid_value != 0.0 || item.penalty_coeff != 0.0))
        fail("organic item '" + item.id + "' must have s = 0 and d = 0");
      if (item.features.size() != pool.feature_dim)
        throw Error(ErrorCode::kDimensionMismatch,
                    "pool '" + pool.id + "': item '" + item.id + "' has " +
                        std::to_string(item.features.size()) +
                        " features, expected " +
                        std::to_string(pool.feature_dim));
    }
  };
  check_list(pool.organic, ItemKind::kOrganic);
  check_list(pool.ads, ItemKind::kAd);
  check_list(pool.large_ads, ItemKind::kLargeAd);
}

struct RuleSet {
  int page_size = 11;  // L
  int max_ads = 2;     // K
  int min_spacing = 1; // delta
  int min_pos = 1;
  int max_pos = 11;
  int large_ad_span = 2;
  std::vector<int> large_ad_start_positions;  // sorted, unique
  // No cap when empty. Otherwise ads are forbidden once
  // user_exposure_count >= cap.
  std::optional<std::uint64_t> user_frequency_cap;

  bool frequency_cap_hit(const CandidatePool& pool) const {
    return user_frequency_cap && pool.user_exposure_count >= *user_frequency_cap;
  }

  bool large_ad_start_allowed(int start) const {
    return std::binary_search(large_ad_start_positions.begin(),
                              large_ad_start_positions.end(), start);
  }
};

inline void validate(const RuleSet& rules) {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidRules, msg);
  };
  if (rules.page_size < 1) fail("page_size must be positive");
  if (rules.max_ads < 0) fail("max_ads must be non-negative");
  if (rules.min_spacing < 1) fail("min_spacing must be at least 1");
  if (!(1 <= rules.min_pos && rules.min_pos <= rules.max_pos &&
        rules.max_pos <= rules.page_size))
    fail("need 1 <= min_pos <= max_pos <= page_size");
  if (rules.large_ad_span < 1 || rules.large_ad_span > rules.page_size)
    fail("large_ad_span must lie in [1, page_size]");
  const auto& starts = rules.large_ad_start_positions;
  if (!std::is_sorted(starts.begin(), starts.end()) ||
      std::adjacent_find(starts.begin(), starts.end()) != starts.end())
    fail("large_ad_start_positions must be sorted and unique");
  for (int s : starts)
    if (s < 1 || s > rules.page_size)
      fail("large ad start position " + std::to_string(s) + " is off the page");
}

// One ad placed with its first cell at `start`.
struct Placement {
  ItemRef ad;
  int start = 0;

  friend auto operator<=>(const Placement&, const Placement&) = default;
};

// Sorted 1-based positions of every ad cell in `cells`.
inline std::vector<int> extract_ad_positions(std::span<const ItemRef> cells) {
  std::vector<int> positions;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (is_ad(cells[i].kind)) positions.push_back(static_cast<int>(i) + 1);
  return positions;
}

class Slate {
 public:
  Slate() = default;
  explicit Slate(std::vector<ItemRef> cells)
      : cells_(std::move(cells)), ad_positions_(extract_ad_positions(cells_)) {}

  std::span<const ItemRef> cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  ItemRef at(int position) const { return cells_.at(position - 1); }
  const std::vector<int>& ad_positions() const { return ad_positions_; }

  // True when `position` continues the span of the item one cell earlier.
  bool is_continuation(int position) const {
    return position > 1 && position <= static_cast<int>(cells_.size()) &&
           is_ad(cells_[position - 1].kind) &&
           cells_[position - 1] == cells_[position - 2];
  }

  // Ads in position order; a large ad appears once, at its first cell.
  std::vector<Placement> placements() const {
    std::vector<Placement> out;
    for (int pos : ad_positions_)
      if (!is_continuation(pos)) out.push_back({cells_[pos - 1], pos});
    return out;
  }

  int ad_count() const {
    int n = 0;
    for (int pos : ad_positions_) n += is_continuation(pos) ? 0 : 1;
    return n;
  }

  // Number of cells occupied by the ad whose first cell is `start`.
  int span_at(int start) const {
    int end = start;
    while (end < static_cast<int>(cells_.size()) &&
           cells_[end] == cells_[start - 1])
      ++end;
    return end - start + 1;
  }

  friend bool operator==(const Slate& a, const Slate& b) {
    return a.cells_ == b.cells_;
  }

 private:
  std::vector<ItemRef> cells_;
  std::vector<int> ad_positions_;
};

// The natural list truncated to the page: the no-ad slate.
inline Slate organic_page(const CandidatePool& pool, int page_size) {
  std::vector<ItemRef> cells;
  const auto n = std::min<std::size_t>(pool.organic.size(), page_size);
  for (std::uint32_t i = 0; i < n; ++i)
    cells.push_back({ItemKind::kOrganic, i});
  return Slate(std::move(cells));
}

// Inserts `ad` so that its first cell lands on `position`, pushing later
// cells down and truncating the page to `page_size`. Large ads take
// `large_ad_span` cells; plain ads take one.
inline Slate insert_ad(const Slate& base, const CandidatePool& pool,
                       ItemRef ad, int position, int page_size,
                       int large_ad_span) {
  if (!is_ad(ad.kind))
    throw Error(ErrorCode::kInvalidSlate,
                "cannot insert organic item '" + pool.item(ad).id + "'");
  const int len = static_cast<int>(base.size());
  if (position < 1 || position > len + 1 || position > page_size)
    throw Error(ErrorCode::kPositionOutOfRange,
                "position " + std::to_string(position) + " outside [1, " +
                    std::to_string(std::min(len + 1, page_size)) + "]");
  auto cells = base.cells();
  if (std::find(cells.begin(), cells.end(), ad) != cells.end())
    throw Error(ErrorCode::kDuplicateItem,
                "ad '" + pool.item(ad).id + "' is already on the slate");
  if (base.is_continuation(position))
    throw Error(ErrorCode::kPositionOutOfRange,
                "position " + std::to_string(position) +
                    " would split a large ad");
  const int span = ad.kind == ItemKind::kLargeAd ? large_ad_span : 1;
  std::vector<ItemRef> out;
  out.reserve(len + span);
  out.insert(out.end(), cells.begin(), cells.begin() + (position - 1));
  out.insert(out.end(), span, ad);
  out.insert(out.end(), cells.begin() + (position - 1), cells.end());
  if (static_cast<int>(out.size()) > page_size) out.resize(page_size);
  return Slate(std::move(out));
}

// Builds the slate that has exactly `placements` (final start positions)
// and organics filling every other cell in pool order. Returns nullopt when
// the placements overlap or some ad cell would fall past the end of the
// page.
inline std::optional<Slate> slate_from_placements(
    const CandidatePool& pool, std::span<const Placement> placements,
    int page_size, int large_ad_span) {
  int ad_cells = 0;
  for (const Placement& p : placements)
    ad_cells += p.ad.kind == ItemKind::kLargeAd ? large_ad_span : 1;
  const int len = static_cast<int>(
      std::min<std::size_t>(page_size, pool.organic.size() + ad_cells));
  std::vector<ItemRef> cells(len, ItemRef{ItemKind::kOrganic,
                                          std::numeric_limits<std::uint32_t>::max()});
  for (const Placement& p : placements) {
    const int span = p.ad.kind == ItemKind::kLargeAd ? large_ad_span : 1;
    if (p.start < 1 || p.start + span - 1 > len) return std::nullopt;
    for (int c = p.start; c < p.start + span; ++c) {
      if (is_ad(cells[c - 1].kind)) return std::nullopt;
      cells[c - 1] = p.ad;
    }
  }
  std::uint32_t next_organic = 0;
  for (ItemRef& cell : cells)
    if (!is_ad(cell.kind)) cell.index = next_organic++;
  return Slate(std::move(cells));
}

// Throws kInvalidSlate unless the slate is structurally sound for `pool`:
// known items, organics form an in-order prefix of the natural list, each
// ad occupies one contiguous run, and the page is no longer than page_size.
inline void validate(const Slate& slate, const CandidatePool& pool,
                     int page_size) {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kInvalidSlate, msg);
  };
  if (static_cast<int>(slate.size()) > page_size) fail("slate exceeds page");
  std::uint32_t next_organic = 0;
  std::vector<ItemRef> seen_ads;
  for (int pos = 1; pos <= static_cast<int>(slate.size()); ++pos) {
    const ItemRef ref = slate.at(pos);
    try {
      (void)pool.item(ref);
    } catch (const std::out_of_range&) {
      fail("position " + std::to_string(pos) + " references a missing item");
    }
    if (!is_ad(ref.kind)) {
      if (ref.index != next_organic)
        fail("organic order broken at position " + std::to_string(pos));
      ++next_organic;
    } else if (!slate.is_continuation(pos)) {
      if (std::find(seen_ads.begin(), seen_ads.end(), ref) != seen_ads.end())
        fail("ad '" + pool.item(ref).id + "' appears twice");
      seen_ads.push_back(ref);
      if (ref.kind == ItemKind::kAd && slate.span_at(pos) != 1)
        fail("ad '" + pool.item(ref).id + "' occupies several cells");
    }
  }
}

// Deterministic preference order between slates of equal reward: fewer
// ads first, then the lexicographically smallest (ad id tuple, start
// position tuple), with ids sorted ascending.
struct SlateOrderKey {
  std::vector<std::string_view> ids;
  std::vector<int> starts;

  friend bool operator<(const SlateOrderKey& a, const SlateOrderKey& b) {
    if (a.ids.size() != b.ids.size()) return a.ids.size() < b.ids.size();
    if (a.ids != b.ids) return a.ids < b.ids;
    return a.starts < b.starts;
  }
  friend bool operator==(const SlateOrderKey&, const SlateOrderKey&) = default;
};

inline SlateOrderKey order_key(const Slate& slate, const CandidatePool& pool) {
  auto placements = slate.placements();
  std::sort(placements.begin(), placements.end(),
            [&](const Placement& a, const Placement& b) {
              return pool.item(a.ad).id < pool.item(b.ad).id;
            });
  SlateOrderKey key;
  for (const Placement& p : placements) {
    key.ids.push_back(pool.item(p.ad).id);
    key.starts.push_back(p.start);
  }
  return key;
}

// Item ids of every cell, large-ad ids repeated across their span.
inline std::vector<std::string> cell_ids(const Slate& slate,
                                         const CandidatePool& pool) {
  std::vector<std::string> ids;
  for (ItemRef ref : slate.cells()) ids.push_back(pool.item(ref).id);
  return ids;
}

}  // namespace slatebound
