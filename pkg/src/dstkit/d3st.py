"""Indexed-description prompt serialization and state-string parsing.

Model input: "<i>:<description>" fragments in slot order, each categorical
slot immediately followed by "<i><letter>) <value>" options, then the
dialogue as "[user] ..." / "[system] ..." segments. Target: "[states]"
followed by "<i>:<value>" fragments for open slots and "<i>:<i><letter>"
index-picking fragments for categorical ones. Target fragment order is
shuffleable so a trained generator never learns a fixed slot order; slot
description order can be shuffled too but is stable by default.

Parsing is the exact inverse on well-formed strings and never throws on
model output: malformed fragments are skipped and surface as ParseIssues.
"""

from __future__ import annotations

import hashlib
import json
import random
import re
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import SYSTEM, USER, Dialogue, DialogueState, Schema
from .errors import DataError
from .textnorm import canonicalize

_LETTERS = string.ascii_lowercase
_FRAGMENT_START = re.compile(r"(?:(?<=\s)|^)(\d+):")
_CATEGORICAL_VALUE = re.compile(r"^(\d+)\s*([a-z])$")
STATES_PREFIX = "[states]"


@dataclass(frozen=True)
class PromptExample:
    input_text: str
    slot_index_map: dict[int, str]
    categorical_letter_map: dict[tuple[int, str], str]
    target_text: str | None = None


@dataclass(frozen=True)
class ParseIssue:
    kind: str  # unknown-index | unknown-letter | duplicate-index | malformed-fragment | junk
    fragment: str


def build_prompt(
    schema: Schema,
    history: Sequence[tuple[str, str]],
    variant_rng: int | None = None,
) -> PromptExample:
    """Serialize slot descriptions plus dialogue history into one input
    string. Slot indices follow schema order unless variant_rng seeds a
    shuffle of the description order."""
    if not history:
        raise ValueError("history must not be empty")
    slots = list(schema.slots)
    if variant_rng is not None:
        random.Random(variant_rng).shuffle(slots)
    pieces: list[str] = []
    index_map: dict[int, str] = {}
    letter_map: dict[tuple[int, str], str] = {}
    for i, slot in enumerate(slots):
        index_map[i] = slot.name
        pieces.append(f"{i}:{slot.description}")
        for j, value in enumerate(slot.values):
            letter_map[(i, _LETTERS[j])] = value
            pieces.append(f"{i}{_LETTERS[j]}) {value}")
    for speaker, text in history:
        tag = speaker.upper()
        if tag not in (USER, SYSTEM):
            raise ValueError(f"unknown speaker {speaker!r}")
        pieces.append(f"[{tag.lower()}] {canonicalize(text)}")
    return PromptExample(
        input_text=" ".join(pieces),
        slot_index_map=index_map,
        categorical_letter_map=letter_map,
    )


def build_target(
    state: DialogueState,
    prompt: PromptExample,
    order_seed: int | None = None,
) -> str:
    """Serialize a state against a prompt's index assignment. Categorical
    values are encoded by index-picking; fragment order is ascending index
    or a seeded permutation."""
    name_to_index = {name: i for i, name in prompt.slot_index_map.items()}
    letters_by_index: dict[int, dict[str, str]] = {}
    for (i, letter), value in prompt.categorical_letter_map.items():
        letters_by_index.setdefault(i, {})[value] = letter
    fragments: list[str] = []
    for name in state:
        if name not in name_to_index:
            raise ValueError(f"state slot {name!r} not covered by the prompt")
    for index in sorted(name_to_index[name] for name in state):
        name = prompt.slot_index_map[index]
        value = state[name]
        if index in letters_by_index:
            letter = letters_by_index[index].get(value)
            if letter is None:
                raise ValueError(
                    f"value {value!r} not in the option list of {name!r}"
                )
            fragments.append(f"{index}:{index}{letter}")
        else:
            fragments.append(f"{index}:{value}")
    if order_seed is not None:
        random.Random(order_seed).shuffle(fragments)
    if not fragments:
        return STATES_PREFIX
    return STATES_PREFIX + " " + " ".join(fragments)


def parse_state_string(
    output: str,
    prompt: PromptExample,
    schema: Schema,
) -> tuple[DialogueState, list[ParseIssue]]:
    """Inverse of build_target on well-formed input; never raises on model
    output. Unknown indices/letters and malformed fragments are skipped
    with an issue each; a duplicated index keeps its last value."""
    issues: list[ParseIssue] = []
    text = output.strip()
    if text.startswith(STATES_PREFIX):
        text = text[len(STATES_PREFIX):].strip()
    if not text:
        return {}, issues
    starts = list(_FRAGMENT_START.finditer(text))
    if not starts:
        issues.append(ParseIssue("junk", text))
        return {}, issues
    if text[: starts[0].start()].strip():
        issues.append(ParseIssue("junk", text[: starts[0].start()].strip()))
    state: DialogueState = {}
    seen: set[int] = set()
    for n, match in enumerate(starts):
        end = starts[n + 1].start() if n + 1 < len(starts) else len(text)
        fragment = text[match.start(): end].strip()
        index = int(match.group(1))
        value_part = text[match.end(): end].strip()
        name = prompt.slot_index_map.get(index)
        if name is None:
            issues.append(ParseIssue("unknown-index", fragment))
            continue
        is_categorical = any(i == index for i, _ in prompt.categorical_letter_map)
        if is_categorical:
            m = _CATEGORICAL_VALUE.match(value_part)
            if m is None or int(m.group(1)) != index:
                issues.append(ParseIssue("malformed-fragment", fragment))
                continue
            value = prompt.categorical_letter_map.get((index, m.group(2)))
            if value is None:
                issues.append(ParseIssue("unknown-letter", fragment))
                continue
        else:
            value = canonicalize(value_part)
            if not value:
                issues.append(ParseIssue("malformed-fragment", fragment))
                continue
        if index in seen:
            issues.append(ParseIssue("duplicate-index", fragment))
        seen.add(index)
        state[name] = value
    return state, issues


# -- per-turn example export --


def _history_for_turn(
    dialogue: Dialogue, turn_index: int, variant: str
) -> list[tuple[str, str]]:
    history: list[tuple[str, str]] = []
    for turn in dialogue.turns[: turn_index + 1]:
        text = turn.texts.get(variant)
        if text is None:
            raise DataError(
                f"dialogue {dialogue.id!r} lacks variant {variant!r} in a turn"
            )
        history.append((turn.speaker, text))
    return history


def build_examples(
    dialogues: Iterable[Dialogue],
    schema: Schema,
    variant: str = "transcript",
    target_order_seed: int | None = None,
    shuffle_slots_seed: int | None = None,
) -> list[dict]:
    """One export record per user turn: prompt input, gold target, and the
    index maps needed to decode model output later. Per-example seeds are
    derived from the base seeds so records stay independent."""
    records: list[dict] = []
    for dialogue in dialogues:
        user_index = 0
        for i, turn in enumerate(dialogue.turns):
            if turn.speaker != USER:
                continue
            example_key = f"{dialogue.id}/{user_index}"
            variant_rng = (
                None
                if shuffle_slots_seed is None
                else hash_seed(shuffle_slots_seed, example_key)
            )
            prompt = build_prompt(
                schema, _history_for_turn(dialogue, i, variant), variant_rng
            )
            order_seed = (
                None
                if target_order_seed is None
                else hash_seed(target_order_seed, example_key)
            )
            target = build_target(turn.state or {}, prompt, order_seed)
            records.append(
                {
                    "dialogue_id": dialogue.id,
                    "turn_index": user_index,
                    "variant": variant,
                    "input_text": prompt.input_text,
                    "target_text": target,
                    "slot_index_map": {
                        str(i): name for i, name in prompt.slot_index_map.items()
                    },
                    "categorical_letter_map": {
                        f"{i}{letter}": value
                        for (i, letter), value in prompt.categorical_letter_map.items()
                    },
                }
            )
            user_index += 1
    return records


def hash_seed(base: int, key: str) -> int:
    """Stable per-example seed derivation."""
    digest = hashlib.blake2b(f"{base}\x1f{key}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def prompt_from_record(record: dict) -> PromptExample:
    index_map = {int(k): v for k, v in record["slot_index_map"].items()}
    letter_map: dict[tuple[int, str], str] = {}
    for key, value in record.get("categorical_letter_map", {}).items():
        letter_map[(int(key[:-1]), key[-1])] = value
    return PromptExample(
        input_text=record["input_text"],
        slot_index_map=index_map,
        categorical_letter_map=letter_map,
        target_text=record.get("target_text"),
    )


def write_examples(records: Iterable[dict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    out = []
    for lineno, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), 1
    ):
        if not line.strip():
            continue
        try:
            out.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{lineno}: bad JSON record: {exc}") from None
    return out
