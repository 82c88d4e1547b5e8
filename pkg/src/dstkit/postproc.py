"""Fuzzy recovery of proper-noun slot values against a noun database.

Similarity is the Levenshtein distance ratio 1 - d/max(|a|,|b|): symmetric
(unlike Gestalt pattern matching), bounded to [0,1], and cheap enough to
scan whole value inventories. Comparison is on whole values, not tokens,
because proper names corrupt across word boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .corpus import DialogueState, Schema
from .errors import DataError
from .textnorm import canonicalize


def levenshtein_distance(a: str, b: str) -> int:
    """Minimum number of unit-cost insertions, deletions, and
    substitutions transforming a into b."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def similarity_ratio(a: str, b: str) -> float:
    """1 - distance/max(len); 1.0 when both strings are empty."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein_distance(a, b) / longest


@dataclass(frozen=True)
class NounDatabase:
    """Per-slot inventories of canonical proper-noun values."""

    entries: dict[str, frozenset[str]]

    def __post_init__(self) -> None:
        for slot, values in self.entries.items():
            if not values:
                raise DataError(f"noun database has empty entry for {slot!r}")
            for v in values:
                if not v or v != canonicalize(v):
                    raise DataError(f"noun database value not canonical: {v!r}")


@dataclass(frozen=True)
class Recovery:
    slot: str
    before: str
    after: str
    ratio: float


def load_noun_db(path: str | Path, schema: Schema | None = None) -> NounDatabase:
    """Load TSV lines "slot<TAB>value"; duplicates ignored."""
    path = Path(path)
    entries: dict[str, set[str]] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        if "\t" not in line:
            raise DataError(f"{path}:{lineno}: expected 'slot<TAB>value'")
        slot, value = line.split("\t", 1)
        slot = slot.strip()
        if schema is not None and slot not in schema:
            raise DataError(f"{path}:{lineno}: unknown slot {slot!r}")
        value = canonicalize(value)
        if not value:
            raise DataError(f"{path}:{lineno}: empty value")
        entries.setdefault(slot, set()).add(value)
    return NounDatabase({slot: frozenset(vals) for slot, vals in entries.items()})


def recover_value(
    slot: str, value: str, db: NounDatabase, min_ratio: float = 0.8
) -> tuple[str, bool]:
    """Snap a value onto the slot's inventory.

    Exact members pass through unchanged. Otherwise the entry with the
    highest ratio wins (ties broken by lexicographic order) provided the
    ratio reaches min_ratio; else the value is returned unmatched.
    """
    if not 0 < min_ratio <= 1:
        raise ValueError(f"min_ratio must be in (0, 1], got {min_ratio}")
    candidates = db.entries.get(slot)
    if candidates is None:
        return value, False
    if value in candidates:
        return value, True
    best = None
    best_ratio = 0.0
    for entry in sorted(candidates):
        ratio = similarity_ratio(value, entry)
        if ratio > best_ratio:
            best, best_ratio = entry, ratio
    if best is not None and best_ratio >= min_ratio:
        return best, True
    return value, False


def postprocess_state(
    state: DialogueState,
    db: NounDatabase,
    schema: Schema,
    min_ratio: float = 0.8,
) -> tuple[DialogueState, list[Recovery]]:
    """Apply recover_value to every non-categorical assignment whose slot
    has a database entry. Categorical and database-absent slots pass
    through untouched. Recoveries record only actual changes."""
    out: DialogueState = {}
    recoveries: list[Recovery] = []
    for slot, value in state.items():
        if slot in db.entries and slot in schema and not schema.by_name(slot).categorical:
            recovered, matched = recover_value(slot, value, db, min_ratio)
            if matched and recovered != value:
                recoveries.append(
                    Recovery(slot, value, recovered, similarity_ratio(value, recovered))
                )
            out[slot] = recovered
        else:
            out[slot] = value
    return out, recoveries
