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

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace sb = slatebound;
using sb::testing::simple_pool;

namespace {

using Ids = std::vector<std::string>;

// Element-by-element replay: walk the base, emit the ad cells when the
// target position is reached, stop at the page size.
Ids replay_insert(const Ids& base, const std::string& ad, int span, int pos,
                  int page) {
  Ids out;
  std::size_t i = 0;
  for (int cell = 1; static_cast<int>(out.size()) < page; ++cell) {
    if (cell == pos) {
      for (int s = 0; s < span && static_cast<int>(out.size()) < page; ++s)
        out.push_back(ad);
      continue;
    }
    if (i == base.size()) {
      if (cell > pos) break;
      continue;
    }
    out.push_back(base[i++]);
  }
  return out;
}

TEST(InsertAd, ShiftWithoutTruncation) {
  const auto pool = simple_pool(3, 1);
  const auto base = sb::organic_page(pool, 4);
  const auto s = sb::insert_ad(base, pool, {sb::ItemKind::kAd, 0}, 2, 4, 2);
  EXPECT_EQ(sb::cell_ids(s, pool), (Ids{"o1", "a1", "o2", "o3"}));
}

TEST(InsertAd, TruncationDropsLastOrganic) {
  const auto pool = simple_pool(3, 1);
  const auto base = sb::organic_page(pool, 3);
  const auto s = sb::insert_ad(base, pool, {sb::ItemKind::kAd, 0}, 2, 3, 2);
  EXPECT_EQ(sb::cell_ids(s, pool), (Ids{"o1", "a1", "o2"}));
}

TEST(InsertAd, LargeAdSpanTwoWithTruncation) {
  const auto pool = simple_pool(4, 0, 1);
  const auto base = sb::organic_page(pool, 5);
  const auto s = sb::insert_ad(base, pool, {sb::ItemKind::kLargeAd, 0}, 3, 5, 2);
  const Ids expected{"o1", "o2", "g1", "g1", "o3"};
  EXPECT_EQ(sb::cell_ids(s, pool), expected);
  EXPECT_EQ(replay_insert({"o1", "o2", "o3", "o4"}, "g1", 2, 3, 5), expected);
  EXPECT_EQ(s.ad_positions(), (std::vector<int>{3, 4}));
  EXPECT_TRUE(s.is_continuation(4));
  EXPECT_EQ(s.ad_count(), 1);
}

TEST(InsertAd, Errors) {
  const auto pool = simple_pool(3, 2, 1);
  const auto base = sb::organic_page(pool, 5);
  auto code_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const sb::Error& e) {
      return e.code();
    }
    return sb::ErrorCode::kParse;  // sentinel: nothing thrown
  };
  const sb::ItemRef a1{sb::ItemKind::kAd, 0};
  const sb::ItemRef g1{sb::ItemKind::kLargeAd, 0};
  EXPECT_EQ(code_of([&] { sb::insert_ad(base, pool, a1, 0, 5, 2); }),
            sb::ErrorCode::kPositionOutOfRange);
  EXPECT_EQ(code_of([&] { sb::insert_ad(base, pool, a1, 5, 5, 2); }),
            sb::ErrorCode::kPositionOutOfRange);
  const auto with_a1 = sb::insert_ad(base, pool, a1, 2, 5, 2);
  EXPECT_EQ(code_of([&] { sb::insert_ad(with_a1, pool, a1, 4, 5, 2); }),
            sb::ErrorCode::kDuplicateItem);
  EXPECT_EQ(code_of([&] {
              sb::insert_ad(base, pool, {sb::ItemKind::kOrganic, 0}, 1, 5, 2);
            }),
            sb::ErrorCode::kInvalidSlate);
  const auto with_g1 = sb::insert_ad(base, pool, g1, 2, 5, 2);
  EXPECT_EQ(code_of([&] { sb::insert_ad(with_g1, pool, a1, 3, 5, 2); }),
            sb::ErrorCode::kPositionOutOfRange);
}

TEST(InsertAd, AppendAfterAnAdAtTheEnd) {
  const auto pool = simple_pool(1, 2);
  auto s = sb::insert_ad(sb::organic_page(pool, 5), pool, {sb::ItemKind::kAd, 1}, 2, 5, 2);
  EXPECT_FALSE(s.is_continuation(3));
  s = sb::insert_ad(s, pool, {sb::ItemKind::kAd, 0}, 3, 5, 2);
  EXPECT_EQ(sb::cell_ids(s, pool), (Ids{"o1", "a2", "a1"}));
}

TEST(InsertAd, RandomInsertionsKeepOrganicOrderAndLength) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    auto uni = [&](int lo, int hi) {
      return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    const int page = uni(1, 9);
    const int span = uni(1, page);
    const auto pool = simple_pool(uni(1, 9), 3, 2);
    sb::Slate slate = sb::organic_page(pool, page);
    Ids ids = sb::cell_ids(slate, pool);
    std::vector<sb::ItemRef> ads{{sb::ItemKind::kAd, 0},
                                 {sb::ItemKind::kAd, 1},
                                 {sb::ItemKind::kLargeAd, 0},
                                 {sb::ItemKind::kLargeAd, 1},
                                 {sb::ItemKind::kAd, 2}};
    std::shuffle(ads.begin(), ads.end(), rng);
    for (const sb::ItemRef ad : ads) {
      const int len = static_cast<int>(slate.size());
      const int pos = uni(1, std::min(len + 1, page));
      if (slate.is_continuation(pos)) continue;
      const int w = ad.kind == sb::ItemKind::kLargeAd ? span : 1;
      const sb::Slate next = sb::insert_ad(slate, pool, ad, pos, page, span);
      ASSERT_EQ(static_cast<int>(next.size()), std::min(len + w, page));
      const Ids expected = replay_insert(ids, pool.item(ad).id, w, pos, page);
      ASSERT_EQ(sb::cell_ids(next, pool), expected);
      // Organics appear as an in-order prefix of the natural list.
      std::uint32_t want = 0;
      for (const sb::ItemRef c : next.cells()) {
        if (c.kind != sb::ItemKind::kOrganic) continue;
        ASSERT_EQ(c.index, want++);
      }
      ASSERT_EQ(next.ad_positions(), sb::extract_ad_positions(next.cells()));
      slate = next;
      ids = expected;
    }
  }
}

TEST(Slate, FromPlacementsMatchesInsertion) {
  const auto pool = simple_pool(5, 2, 1);
  const std::vector<sb::Placement> placed{{{sb::ItemKind::kAd, 1}, 2},
                                          {{sb::ItemKind::kLargeAd, 0}, 4}};
  const auto s = sb::slate_from_placements(pool, placed, 6, 2);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(sb::cell_ids(*s, pool), (Ids{"o1", "a2", "o2", "g1", "g1", "o3"}));
  EXPECT_FALSE(sb::slate_from_placements(
                   pool, std::vector<sb::Placement>{{{sb::ItemKind::kLargeAd, 0}, 6}},
                   6, 2)
                   .has_value());
  EXPECT_FALSE(sb::slate_from_placements(
                   pool,
                   std::vector<sb::Placement>{{{sb::ItemKind::kAd, 0}, 3},
                                              {{sb::ItemKind::kAd, 1}, 3}},
                   6, 2)
                   .has_value());
}

TEST(Slate, OrderKeyPrefersFewerAdsThenIds) {
  const auto pool = simple_pool(4, 2);
  const auto base = sb::organic_page(pool, 6);
  const sb::ItemRef a1{sb::ItemKind::kAd, 0}, a2{sb::ItemKind::kAd, 1};
  const auto one_a2 = sb::insert_ad(base, pool, a2, 2, 6, 2);
  const auto one_a1_late = sb::insert_ad(base, pool, a1, 4, 6, 2);
  const auto one_a1 = sb::insert_ad(base, pool, a1, 2, 6, 2);
  const auto two = sb::insert_ad(one_a1, pool, a2, 4, 6, 2);
  EXPECT_TRUE(sb::order_key(base, pool) < sb::order_key(one_a2, pool));
  EXPECT_TRUE(sb::order_key(one_a2, pool) < sb::order_key(two, pool));
  EXPECT_TRUE(sb::order_key(one_a1_late, pool) < sb::order_key(one_a2, pool));
  EXPECT_TRUE(sb::order_key(one_a1, pool) < sb::order_key(one_a1_late, pool));
}

TEST(Validate, PoolRules) {
  auto pool = simple_pool(2, 1);
  EXPECT_NO_THROW(sb::validate(pool));
  auto dup = pool;
  dup.ads[0].id = "o1";
  EXPECT_THROW(sb::validate(dup), sb::Error);
  auto monetized = pool;
  monetized.organic[0].bid_value = 1.0;
  EXPECT_THROW(sb::validate(monetized), sb::Error);
  auto negative = pool;
  negative.ads[0].engagement_value = -1.0;
  EXPECT_THROW(sb::validate(negative), sb::Error);
  auto empty = pool;
  empty.organic.clear();
  EXPECT_THROW(sb::validate(empty), sb::Error);
  auto dims = pool;
  dims.ads[0].features = {1.0, 2.0};
  try {
    sb::validate(dims);
    FAIL();
  } catch (const sb::Error& e) {
    EXPECT_EQ(e.code(), sb::ErrorCode::kDimensionMismatch);
  }
}

TEST(Validate, RuleSet) {
  auto rules = sb::testing::open_rules(6, 2, 2);
  EXPECT_NO_THROW(sb::validate(rules));
  auto bad = rules;
  bad.min_pos = 0;
  EXPECT_THROW(sb::validate(bad), sb::Error);
  bad = rules;
  bad.max_pos = 7;
  EXPECT_THROW(sb::validate(bad), sb::Error);
  bad = rules;
  bad.min_spacing = 0;
  EXPECT_THROW(sb::validate(bad), sb::Error);
  bad = rules;
  bad.max_ads = -1;
  EXPECT_THROW(sb::validate(bad), sb::Error);
  bad = rules;
  bad.large_ad_span = 7;
  EXPECT_THROW(sb::validate(bad), sb::Error);
}

TEST(Validate, Slate) {
  const auto pool = simple_pool(3, 1);
  EXPECT_NO_THROW(sb::validate(sb::organic_page(pool, 3), pool, 3));
  const sb::Slate reordered({{sb::ItemKind::kOrganic, 1}, {sb::ItemKind::kOrganic, 0}});
  EXPECT_THROW(sb::validate(reordered, pool, 3), sb::Error);
  const sb::Slate twice({{sb::ItemKind::kAd, 0}, {sb::ItemKind::kOrganic, 0},
                         {sb::ItemKind::kAd, 0}});
  EXPECT_THROW(sb::validate(twice, pool, 3), sb::Error);
  const sb::Slate missing({{sb::ItemKind::kAd, 5}});
  EXPECT_THROW(sb::validate(missing, pool, 3), sb::Error);
}

}  // namespace
