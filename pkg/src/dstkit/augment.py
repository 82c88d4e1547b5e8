"""Corpus multiplication by consistent slot-value substitution.

Each produced variant dialogue rewrites some non-categorical slot values
(those that appear verbatim in at least one utterance) to pool-drawn
replacements, in every utterance text and every state of the dialogue, so
utterances and states stay mutually consistent. Substitution is
word-boundary anchored ("centre" never fires inside "centres"); when two
values overlap in the text the longer one wins and overlapped spans are
skipped. All choices are stable hashes of (seed, dialogue id, variant,
slot), so runs repeat bit-exactly.
"""

from __future__ import annotations

import logging
import re
from functools import partial
from typing import Iterable

from .corpus import Dialogue, Schema, Turn
from .hashrand import pick_index
from .parallel import pmap
from .postproc import NounDatabase

log = logging.getLogger(__name__)

_BOUNDARY = r"(?<![a-z0-9]){}(?![a-z0-9])"


def _boundary_re(value: str) -> re.Pattern[str]:
    return re.compile(_BOUNDARY.format(re.escape(value)))


def _appears(value: str, text: str) -> bool:
    return _boundary_re(value).search(text) is not None


def _substitutable_values(
    dialogue: Dialogue, schema: Schema
) -> list[tuple[str, str]]:
    """Distinct (slot, value) pairs eligible for substitution: slot is
    non-categorical and the value occurs verbatim in some utterance."""
    pairs: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    texts = [text for turn in dialogue.turns for text in turn.texts.values()]
    for turn in dialogue.user_turns():
        for slot, value in (turn.state or {}).items():
            if (slot, value) in seen:
                continue
            seen.add((slot, value))
            if schema.by_name(slot).categorical:
                continue
            if any(_appears(value, text) for text in texts):
                pairs.append((slot, value))
    return pairs


def _choose_replacement(
    pool: frozenset[str], old: str, seed: int, key: tuple
) -> str | None:
    # exclude the old value and anything nested with it, which would defeat
    # the word-boundary consistency check
    candidates = sorted(
        c for c in pool
        if c != old and not _appears(old, c) and not _appears(c, old)
    )
    if not candidates:
        return None
    return candidates[pick_index(len(candidates), seed, *key)]


def _substitute_text(text: str, plan: list[tuple[str, str]]) -> str:
    """Apply old->new replacements, longer old values first, skipping spans
    that overlap an earlier (longer) match."""
    spans: list[tuple[int, int, str]] = []
    for old, new in sorted(plan, key=lambda p: (-len(p[0]), p[0])):
        for m in _boundary_re(old).finditer(text):
            if any(m.start() < e and s < m.end() for s, e, _ in spans):
                continue
            spans.append((m.start(), m.end(), new))
    if not spans:
        return text
    spans.sort()
    out: list[str] = []
    cursor = 0
    for start, end, new in spans:
        out.append(text[cursor:start])
        out.append(new)
        cursor = end
    out.append(text[cursor:])
    return "".join(out)


def augment_dialogue(
    dialogue: Dialogue,
    schema: Schema,
    value_pool: NounDatabase,
    factor: int,
    seed: int,
) -> list[Dialogue]:
    """Return factor variants; variant 0 is the original dialogue. Values
    without a usable pool are left unchanged everywhere (and logged)."""
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    eligible = _substitutable_values(dialogue, schema)
    variants = [dialogue]
    for k in range(1, factor):
        replacement_by_old: dict[str, str] = {}
        for slot, old in eligible:
            if old in replacement_by_old:
                continue  # another slot shares this surface string
            pool = value_pool.entries.get(slot)
            if not pool:
                log.info(
                    "dialogue %s variant %d: no pool for %s, value %r kept",
                    dialogue.id, k, slot, old,
                )
                continue
            new = _choose_replacement(pool, old, seed, (dialogue.id, k, slot, old))
            if new is not None:
                replacement_by_old[old] = new
        plan = list(replacement_by_old.items())
        turns = []
        for turn in dialogue.turns:
            texts = {v: _substitute_text(t, plan) for v, t in turn.texts.items()}
            state = None
            if turn.state is not None:
                state = {}
                for slot, value in turn.state.items():
                    if value in replacement_by_old and not schema.by_name(slot).categorical:
                        state[slot] = replacement_by_old[value]
                    else:
                        state[slot] = value
            turns.append(Turn(speaker=turn.speaker, texts=texts, state=state))
        variants.append(Dialogue(id=f"{dialogue.id}~aug{k}", turns=turns))
    return variants


def augment_corpus(
    dialogues: Iterable[Dialogue],
    schema: Schema,
    value_pool: NounDatabase,
    factor: int,
    seed: int,
    workers: int = 1,
) -> list[Dialogue]:
    fn = partial(
        augment_dialogue, schema=schema, value_pool=value_pool, factor=factor, seed=seed
    )
    out: list[Dialogue] = []
    for group in pmap(fn, list(dialogues), workers):
        out.extend(group)
    return out


def check_augmented(original: Dialogue, variant: Dialogue) -> list[str]:
    """Consistency violations between an original dialogue and one of its
    augmented variants; empty list means fully consistent."""
    problems: list[str] = []
    if len(original.turns) != len(variant.turns):
        return [f"{variant.id}: turn count changed"]
    for i, (a, b) in enumerate(zip(original.turns, variant.turns)):
        if a.speaker != b.speaker:
            problems.append(f"{variant.id} turn {i}: speaker changed")
        if set(a.texts) != set(b.texts):
            problems.append(f"{variant.id} turn {i}: variant set changed")
        if (a.state is None) != (b.state is None):
            problems.append(f"{variant.id} turn {i}: state presence changed")
        elif a.state is not None and set(a.state) != set(b.state or {}):
            problems.append(f"{variant.id} turn {i}: state keys changed")
    # derive the substitution set from state diffs
    substitutions: set[tuple[str, str, str]] = set()
    for a, b in zip(original.user_turns(), variant.user_turns()):
        for slot, old in (a.state or {}).items():
            new = (b.state or {}).get(slot)
            if new is not None and new != old:
                substitutions.add((slot, old, new))
    original_texts = [t for turn in original.turns for t in turn.texts.values()]
    variant_texts = [t for turn in variant.turns for t in turn.texts.values()]
    for slot, old, new in sorted(substitutions):
        for b in variant.user_turns():
            if (b.state or {}).get(slot) == old:
                problems.append(f"{variant.id}: {slot} still carries {old!r}")
        old_appeared = any(_appears(old, t) for t in original_texts)
        new_appears = any(_appears(new, t) for t in variant_texts)
        if old_appeared != new_appears:
            problems.append(
                f"{variant.id}: replacement {new!r} for {old!r} not mirrored in text"
            )
        if any(_appears(old, t) for t in variant_texts):
            problems.append(f"{variant.id}: text still mentions {old!r}")
    return problems
