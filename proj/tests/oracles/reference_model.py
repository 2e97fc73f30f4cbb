#!/usr/bin/env python3
# Copyright 2026 The Slatebound Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent model used to freeze expected values in the C++ tests.

Everything here is written from the definitions, not from the C++ code:
slates are built by listing every page layout (ads at cells, organics
filling the rest in order), feasibility is checked rule by rule, and the
reference scorer and reward are evaluated directly.

Usage: reference_model.py POOLS RULES SCORER
Prints, per pool, the optimum slate, its reward (repr), and per-k counts,
then the golden scores for the fixed 5-item slate of pool fx-basic.
"""

import itertools
import json
import math
import sys


def load_pools(path):
    pools = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                pools.append(json.loads(line))
    return pools


def kind_slot(kind):
    return {"organic": 1, "ad": 2, "large_ad": 3}[kind]


def items_by_id(pool):
    out = {}
    for kind, key in (("organic", "organic"), ("ad", "ads"), ("large_ad", "large_ads")):
        for it in pool.get(key, []):
            out[it["id"]] = dict(it, kind=kind)
    return out


def score(cells, items, scorer):
    """cells: list of ids (large ad ids repeated). Returns [(p_exp, p_clk)]."""
    n = len(cells)
    out = []
    for i in range(n):
        if i > 0 and cells[i] == cells[i - 1] and items[cells[i]]["kind"] != "organic":
            out.append(out[-1])
            continue
        j = i
        while j + 1 < n and cells[j + 1] == cells[i]:
            j += 1
        prev = 0 if i == 0 else kind_slot(items[cells[i - 1]]["kind"])
        nxt = 0 if j == n - 1 else kind_slot(items[cells[j + 1]]["kind"])
        it = items[cells[i]]
        probs = []
        for task in ("exposure", "click"):
            p = scorer[task]
            z = p["bias"] - p["position_decay"] * i
            z += sum(w * x for w, x in zip(p["weights"], it["features"]))
            z += p["prev_context"][prev] + p["next_context"][nxt]
            probs.append(1.0 / (1.0 + math.exp(-z)))
        out.append(tuple(probs))
    return out


def reward(cells, items, scores):
    total = 0.0
    for i, cid in enumerate(cells):
        it = items[cid]
        if i > 0 and cells[i - 1] == cid and it["kind"] != "organic":
            continue
        pe, pc = scores[i]
        s = it.get("bid_value", 0.0)
        if it["kind"] != "organic" and it.get("pricing", "CPM") == "CPA":
            v = pc * pe * s
        else:
            v = pe * s
        nn = pe * pc * it.get("engagement_value", 0.0)
        pp = it.get("penalty_coeff", 0.0) * pe
        total += v + nn - pp
    return total


def feasible(placements, items, rules, pool, span):
    """placements: list of (ad_id, start). Rule-by-rule check."""
    k = len(placements)
    if k > rules["max_ads"]:
        return False
    cap = rules.get("user_frequency_cap")
    if k > 0 and cap is not None and pool.get("user_exposure_count", 0) >= cap:
        return False
    ranges = []
    for aid, st in placements:
        w = span if items[aid]["kind"] == "large_ad" else 1
        ranges.append((st, st + w - 1))
        if st < rules["min_pos"] or st + w - 1 > rules["max_pos"]:
            return False
        if items[aid]["kind"] == "large_ad" and st not in rules["large_ad_start_positions"]:
            return False
    for (a0, a1), (b0, b1) in itertools.combinations(ranges, 2):
        gap = b0 - a1 if b0 > a1 else (a0 - b1 if a0 > b1 else 0)
        if gap < rules["min_spacing"]:
            return False
    return True


def all_slates(pool, rules):
    items = items_by_id(pool)
    span = rules["large_ad_span"]
    L = rules["page_size"]
    organic = [o["id"] for o in pool["organic"]]
    ads = sorted(i["id"] for i in pool.get("ads", []) + pool.get("large_ads", []))
    for k in range(0, len(ads) + 1):
        for subset in itertools.combinations(ads, k):
            for starts in itertools.product(range(1, L + 1), repeat=k):
                width = sum(span if items[a]["kind"] == "large_ad" else 1 for a in subset)
                length = min(L, len(organic) + width)
                cells = [None] * length
                ok = True
                for a, st in zip(subset, starts):
                    w = span if items[a]["kind"] == "large_ad" else 1
                    for c in range(st, st + w):
                        if c > length or cells[c - 1] is not None:
                            ok = False
                            break
                        cells[c - 1] = a
                    if not ok:
                        break
                if not ok:
                    continue
                it = iter(organic)
                cells = [c if c is not None else next(it) for c in cells]
                placements = list(zip(subset, starts))
                if feasible(placements, items, rules, pool, span):
                    yield k, subset, starts, cells


def main():
    pools = load_pools(sys.argv[1])
    rules = json.load(open(sys.argv[2]))
    rules.setdefault("large_ad_start_positions", list(range(1, rules["page_size"] + 1)))
    scorer = json.load(open(sys.argv[3]))
    for pool in pools:
        items = items_by_id(pool)
        best = None
        per_k = {}
        for k, subset, starts, cells in all_slates(pool, rules):
            per_k[k] = per_k.get(k, 0) + 1
            r = reward(cells, items, score(cells, items, scorer))
            key = (k, subset, starts)
            if best is None or r > best[0] or (r == best[0] and key < best[1]):
                best = (r, key, cells)
        print(pool["pool_id"], best[2], repr(best[0]), [per_k.get(k, 0) for k in sorted(per_k)])
    basic = next(p for p in pools if p["pool_id"] == "fx-basic")
    items = items_by_id(basic)
    cells = ["o1", "a1", "o2", "o3", "o4"]
    sc = score(cells, items, scorer)
    print("golden", cells)
    for pe, pc in sc:
        print(repr(pe), repr(pc))
    print("golden_reward", repr(reward(cells, items, sc)))


if __name__ == "__main__":
    main()
