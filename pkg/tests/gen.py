"""Seeded random generators for schemas, states, corpora, and aligned
state lists."""

from __future__ import annotations

import random

from dstkit.corpus import SYSTEM, USER, Dialogue, Schema, SlotDef, Turn

_DOMAINS = ["hotel", "restaurant", "train", "taxi", "attraction", "bus", "hospital"]
_SLOT_WORDS = [
    "name", "area", "type", "stars", "food", "day", "people", "stay",
    "pricerange", "departure", "destination", "leaveat", "arriveby", "parking",
]
_VALUE_WORDS = [
    "bangkok", "city", "golden", "palace", "curry", "garden", "north", "south",
    "centre", "east", "west", "cheap", "expensive", "moderate", "guesthouse",
    "hotel", "monday", "tuesday", "cambridge", "london", "street", "house",
    "riverside", "gallery", "museum", "thai", "indian", "british",
]


def random_schema(rng: random.Random, max_slots: int = 12) -> Schema:
    n = rng.randint(1, max_slots)
    names = set()
    slots = []
    while len(slots) < n:
        name = f"{rng.choice(_DOMAINS)}-{rng.choice(_SLOT_WORDS)}"
        if name in names:
            continue
        names.add(name)
        if rng.random() < 0.4:
            count = rng.randint(2, 5)
            values = rng.sample(_VALUE_WORDS, count)
            slots.append(SlotDef(name, f"the {name.split('-', 1)[1]} slot", tuple(values)))
        else:
            slots.append(SlotDef(name, f"the {name.split('-', 1)[1]} slot"))
    return Schema(tuple(slots))


def random_value(rng: random.Random) -> str:
    words = rng.sample(_VALUE_WORDS, rng.randint(1, 3))
    if rng.random() < 0.2:
        words.append(str(rng.randint(1, 30)))
    return " ".join(words)


def random_state(rng: random.Random, schema: Schema, p_assign: float = 0.6) -> dict:
    state = {}
    for slot in schema.slots:
        if rng.random() >= p_assign:
            continue
        if slot.categorical:
            state[slot.name] = rng.choice(slot.values)
        else:
            state[slot.name] = random_value(rng)
    return state


def random_text(rng: random.Random) -> str:
    return " ".join(rng.choice(_VALUE_WORDS) for _ in range(rng.randint(1, 10)))


def random_corpus(rng: random.Random, schema: Schema, dialogues: int = 3) -> list[Dialogue]:
    out = []
    for d in range(dialogues):
        turns = []
        state: dict = {}
        for i in range(rng.randint(1, 4)):
            state.update(random_state(rng, schema, p_assign=0.3))
            turns.append(Turn(USER, {"transcript": random_text(rng)}, dict(state)))
            if rng.random() < 0.8:
                turns.append(Turn(SYSTEM, {"transcript": random_text(rng)}))
            else:
                break
        out.append(Dialogue(f"d{d:03d}", turns))
    return out


def random_aligned_lists(
    rng: random.Random, turns: int | None = None
) -> tuple[list[dict], list[dict]]:
    """Aligned (preds, golds) with partial agreement, guaranteed to have at
    least one gold slot overall."""
    schema = random_schema(rng, max_slots=8)
    turns = turns or rng.randint(1, 12)
    preds, golds = [], []
    for _ in range(turns):
        gold = random_state(rng, schema)
        pred = {}
        for slot, value in gold.items():
            roll = rng.random()
            if roll < 0.6:
                pred[slot] = value
            elif roll < 0.8:
                pred[slot] = random_value(rng)  # value error
            # else underestimate: drop the slot
        for slot in schema.slots:
            if slot.name not in gold and rng.random() < 0.15:
                pred[slot.name] = random_value(rng)  # overestimate
        preds.append(pred)
        golds.append(gold)
    if not any(golds):
        golds[0] = {schema.slots[0].name: "anchor"}
    return preds, golds
