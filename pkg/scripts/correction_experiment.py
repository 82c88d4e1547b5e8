#!/usr/bin/env python3
"""Directional experiment: corrupt clean sentences with full-strength
format noise, then measure the sentence error rate before and after the
deterministic corrector, with and without special-character stripping.

    python3 scripts/correction_experiment.py --size 500 --seed 7
"""

from __future__ import annotations

import argparse
import random

from dstkit.correction import build_lexicon, correct_text, sentence_error_rate
from dstkit.noise import NoiseConfig, corrupt_utterance

TEMPLATES = [
    "i'd like a table at {time} please",
    "i'm looking for a cheap restaurant in the centre",
    "don't book anything before {time}",
    "we won't need parking at the hotel",
    "it doesn't matter if the train leaves at {time}",
    "can't you find one that arrives by {time}",
    "they're open until {time} i think",
    "that's fine let's meet at {time}",
    "i've heard the guesthouse isn't far from the station",
    "you're sure there aren't any rooms at {time}",
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=500)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    noise = NoiseConfig(strip_special_chars=1.0, spell_out_times=1.0, confusion_table={})
    references = []
    for i in range(args.size):
        stamp = f"{rng.randint(1, 12):02d}:{rng.randint(0, 59):02d}"
        references.append(TEMPLATES[i % len(TEMPLATES)].replace("{time}", stamp))
    corrupted = [corrupt_utterance(t, noise, f"u{i}") for i, t in enumerate(references)]
    lexicon = build_lexicon(w for t in references for w in t.split())
    corrected = [correct_text(t, lexicon) for t in corrupted]

    raw = list(zip(corrupted, references))
    fixed = list(zip(corrected, references))
    print(f"{args.size} sentences, full-strength format corruption")
    print(f"{'condition':<28} {'raw asr':>8} {'corrected':>10}")
    for label, strip in (("exact match", False), ("special chars removed", True)):
        before = sentence_error_rate(raw, strip_special=strip).sentence_error_rate
        after = sentence_error_rate(fixed, strip_special=strip).sentence_error_rate
        print(f"{label:<28} {before:>7.1%} {after:>10.1%}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
