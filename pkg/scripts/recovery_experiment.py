#!/usr/bin/env python3
"""Directional experiment: corrupt proper-noun slot values with random
character edits and measure how much fuzzy recovery against the noun
database repairs, as slot error rate before/after and per edit count.

    python3 scripts/recovery_experiment.py --names 400 --seed 11
"""

from __future__ import annotations

import argparse
import random

from dstkit.corpus import Schema, SlotDef
from dstkit.metrics import slot_metrics
from dstkit.postproc import NounDatabase, postprocess_state

HEADS = [
    "golden", "silver", "riverside", "panang", "jasmine", "saffron", "lucky",
    "garden", "imperial", "crystal", "sunrise", "emerald", "harbour", "village",
    "blossom", "copper", "amber", "willow", "meadow", "cinnamon",
]
TAILS = [
    "palace", "kitchen", "brasserie", "tavern", "bistro", "cottage", "corner",
    "terrace", "pavilion", "gardens", "lounge", "parlour", "chamber", "castle",
    "courtyard", "galley", "cellar", "larder", "orchard", "manor",
]


def edit(name: str, rng: random.Random, times: int) -> str:
    letters = "abcdefghijklmnopqrstuvwxyz"
    chars = list(name)
    for _ in range(times):
        op = rng.choice(("insert", "delete", "substitute"))
        if op == "insert":
            chars.insert(rng.randint(0, len(chars)), rng.choice(letters))
        elif op == "delete" and chars:
            del chars[rng.randrange(len(chars))]
        else:
            pos = rng.randrange(len(chars))
            chars[pos] = rng.choice([c for c in letters if c != chars[pos]])
    return "".join(chars).strip() or name


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--names", type=int, default=400)
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--min-ratio", type=float, default=0.8)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    schema = Schema((SlotDef("restaurant-name", "name of the restaurant"),))
    pool = sorted({f"{h} {t}" for h in HEADS for t in TAILS})
    names = rng.sample(pool, min(args.names, len(pool)))
    db = NounDatabase({"restaurant-name": frozenset(names)})

    print(f"{len(names)} names, threshold {args.min_ratio}")
    print(f"{'edits':>5} {'ser before':>11} {'ser after':>10} {'recovered':>10}")
    for edits in (1, 2, 3):
        golds, before, after = [], [], []
        recovered = 0
        for name in names:
            noisy = edit(name, rng, edits)
            state, _ = postprocess_state(
                {"restaurant-name": noisy}, db, schema, args.min_ratio
            )
            golds.append({"restaurant-name": name})
            before.append({"restaurant-name": noisy})
            after.append(state)
            recovered += state["restaurant-name"] == name
        *_, ser_before = slot_metrics(before, golds)
        *_, ser_after = slot_metrics(after, golds)
        print(f"{edits:>5} {ser_before:>10.1%} {ser_after:>9.1%} "
              f"{recovered / len(names):>9.1%}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
