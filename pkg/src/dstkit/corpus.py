"""Dialogue corpus model plus line-oriented schema/corpus file IO.

File grammars are documented in docs/formats.md. All text and values are
canonicalized at load (lowercase, single-spaced), so downstream modules
always compare canonical forms. A state value of "none" means "slot not
set" and is stored as key absence; "dontcare" is an ordinary value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import DataError
from .textnorm import canonicalize

USER = "USER"
SYSTEM = "SYSTEM"
TRANSCRIPT = "transcript"
# Conventional variant names; any [a-z0-9-] name is legal.
RESERVED_VARIANTS = (
    "transcript", "tts-verbatim", "human-verbatim", "human-paraphrased", "corrected",
)

DialogueState = dict[str, str]

_SLOT_NAME = re.compile(r"^[a-z][a-z0-9]*-[a-z][a-z0-9 ]*$")
_VARIANT_NAME = re.compile(r"^[a-z][a-z0-9-]*$")
_NONE_VALUE = "none"
_MAX_CATEGORICAL = 26  # one letter per option


@dataclass(frozen=True)
class SlotDef:
    """One slot: a name like "hotel-type", a description, and, for
    categorical slots, the ordered closed value list."""

    name: str
    description: str
    values: tuple[str, ...] = ()

    @property
    def categorical(self) -> bool:
        return bool(self.values)


@dataclass(frozen=True)
class Schema:
    slots: tuple[SlotDef, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for slot in self.slots:
            if not _SLOT_NAME.match(slot.name):
                raise DataError(
                    f"slot name {slot.name!r} must be lowercase '<domain>-<slot>'"
                )
            if slot.name in seen:
                raise DataError(f"duplicate slot name {slot.name!r}")
            seen.add(slot.name)
            if slot.values:
                if len(slot.values) < 2:
                    raise DataError(
                        f"categorical slot {slot.name!r} needs at least 2 values"
                    )
                if len(set(slot.values)) != len(slot.values):
                    raise DataError(f"slot {slot.name!r} repeats a value")
                if len(slot.values) > _MAX_CATEGORICAL:
                    raise DataError(
                        f"slot {slot.name!r} has more than {_MAX_CATEGORICAL} values"
                    )

    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.slots)

    def by_name(self, name: str) -> SlotDef:
        for slot in self.slots:
            if slot.name == name:
                return slot
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(s.name == name for s in self.slots)

    def __len__(self) -> int:
        return len(self.slots)


@dataclass
class Turn:
    speaker: str  # USER or SYSTEM
    texts: dict[str, str]  # variant name -> canonical text
    state: DialogueState | None = None  # cumulative gold state, USER turns only


@dataclass
class Dialogue:
    id: str
    turns: list[Turn] = field(default_factory=list)

    def user_turns(self) -> list[Turn]:
        return [t for t in self.turns if t.speaker == USER]


@dataclass(frozen=True)
class AlignedWord:
    word: str
    frame: int


AlignedWords = list[AlignedWord]


# -- validation --


def validate_state(state: DialogueState, schema: Schema, where: str = "state") -> None:
    for name, value in state.items():
        if name not in schema:
            raise DataError(f"{where}: unknown slot {name!r}")
        if not value or value != canonicalize(value):
            raise DataError(f"{where}: value for {name!r} not canonical: {value!r}")
        if value == _NONE_VALUE:
            raise DataError(f"{where}: {name!r} uses sentinel 'none'; omit the key")


def validate_dialogue(dialogue: Dialogue, schema: Schema) -> None:
    if not dialogue.turns:
        raise DataError(f"dialogue {dialogue.id!r} has no turns")
    for i, turn in enumerate(dialogue.turns):
        where = f"dialogue {dialogue.id!r} turn {i}"
        expected = USER if i % 2 == 0 else SYSTEM
        if turn.speaker != expected:
            raise DataError(f"{where}: speakers must alternate starting with USER")
        if TRANSCRIPT not in turn.texts:
            raise DataError(f"{where}: missing 'transcript' variant")
        if turn.speaker == USER:
            if turn.state is None:
                raise DataError(f"{where}: user turn has no state")
            validate_state(turn.state, schema, where)
        elif turn.state is not None:
            raise DataError(f"{where}: system turn carries a state")


def cumulative_violations(dialogue: Dialogue) -> list[str]:
    """Report user turns whose state drops keys present at the previous
    user turn. States are expected to only grow or overwrite; violations
    are reported, never repaired."""
    out: list[str] = []
    states = [t.state or {} for t in dialogue.user_turns()]
    for i in range(1, len(states)):
        dropped = sorted(set(states[i - 1]) - set(states[i]))
        if dropped:
            out.append(
                f"dialogue {dialogue.id!r} user turn {i} drops keys: {', '.join(dropped)}"
            )
    return out


def state_at_turn(dialogue: Dialogue, user_turn_index: int) -> DialogueState:
    """Gold cumulative state at the given user turn (0-based over user turns)."""
    turns = dialogue.user_turns()
    if not 0 <= user_turn_index < len(turns):
        raise IndexError(
            f"user turn index {user_turn_index} out of range for "
            f"dialogue {dialogue.id!r} with {len(turns)} user turns"
        )
    return dict(turns[user_turn_index].state or {})


# -- schema file IO --


def parse_schema(text: str, source: str = "<schema>") -> Schema:
    slots: list[tuple[str, str, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("slot "):
            body = line[len("slot "):]
            if " | " not in body:
                raise DataError(f"{source}:{lineno}: slot line needs ' | '")
            name, desc = body.split(" | ", 1)
            slots.append((name.strip(), canonicalize(desc), []))
        elif line.startswith("value "):
            if not slots:
                raise DataError(f"{source}:{lineno}: value line before any slot")
            slots[-1][2].append(canonicalize(line[len("value "):]))
        else:
            raise DataError(f"{source}:{lineno}: unrecognized line {line!r}")
    return Schema(tuple(SlotDef(n, d, tuple(v)) for n, d, v in slots))


def load_schema(path: str | Path) -> Schema:
    path = Path(path)
    return parse_schema(path.read_text(encoding="utf-8"), source=str(path))


def render_schema(schema: Schema) -> str:
    lines: list[str] = []
    for slot in schema.slots:
        lines.append(f"slot {slot.name} | {slot.description}")
        for value in slot.values:
            lines.append(f"  value {value}")
    return "\n".join(lines) + "\n"


def write_schema(schema: Schema, path: str | Path) -> None:
    Path(path).write_text(render_schema(schema), encoding="utf-8")


# -- corpus file IO --


def _parse_state_line(body: str, schema: Schema, where: str) -> DialogueState:
    state: DialogueState = {}
    body = body.strip()
    if not body:
        return state
    for pair in body.split(";"):
        pair = pair.strip()
        if not pair:
            continue
        if "=" not in pair:
            raise DataError(f"{where}: state pair {pair!r} has no '='")
        name, value = pair.split("=", 1)
        name = name.strip()
        value = canonicalize(value)
        if name not in schema:
            raise DataError(f"{where}: unknown slot {name!r}")
        if name in state:
            raise DataError(f"{where}: slot {name!r} assigned twice")
        if value == _NONE_VALUE:
            continue  # 'none' means unset
        if not value:
            raise DataError(f"{where}: empty value for slot {name!r}")
        state[name] = value
    return state


def parse_corpus(text: str, schema: Schema, source: str = "<corpus>") -> list[Dialogue]:
    dialogues: list[Dialogue] = []
    ids: set[str] = set()
    current: Dialogue | None = None
    turn: Turn | None = None

    def flush() -> None:
        if current is not None:
            validate_dialogue(current, schema)
            dialogues.append(current)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        loc = f"{source}:{lineno}"
        if not line or line.startswith("#"):
            continue
        if line.startswith("dialogue "):
            flush()
            did = line[len("dialogue "):].strip()
            if not did:
                raise DataError(f"{loc}: empty dialogue id")
            if did in ids:
                raise DataError(f"{loc}: duplicate dialogue id {did!r}")
            ids.add(did)
            current = Dialogue(id=did)
            turn = None
        elif line.startswith("turn "):
            if current is None:
                raise DataError(f"{loc}: turn before any dialogue")
            speaker = line[len("turn "):].strip().upper()
            if speaker not in (USER, SYSTEM):
                raise DataError(f"{loc}: speaker must be user or system")
            turn = Turn(speaker=speaker, texts={})
            current.turns.append(turn)
        elif line.startswith("text "):
            if turn is None:
                raise DataError(f"{loc}: text line outside a turn")
            body = line[len("text "):]
            if " | " not in body:
                raise DataError(f"{loc}: text line needs '<variant> | <text>'")
            variant, content = body.split(" | ", 1)
            variant = variant.strip()
            if not _VARIANT_NAME.match(variant):
                raise DataError(f"{loc}: bad variant name {variant!r}")
            if variant in turn.texts:
                raise DataError(f"{loc}: variant {variant!r} repeated in turn")
            turn.texts[variant] = canonicalize(content)
        elif line == "state" or line.startswith("state "):
            if turn is None:
                raise DataError(f"{loc}: state line outside a turn")
            if turn.state is not None:
                raise DataError(f"{loc}: second state line in turn")
            turn.state = _parse_state_line(line[len("state"):], schema, loc)
        else:
            raise DataError(f"{loc}: unrecognized line {line!r}")
    flush()
    return dialogues


def load_corpus(path: str | Path, schema: Schema) -> list[Dialogue]:
    path = Path(path)
    return parse_corpus(path.read_text(encoding="utf-8"), schema, source=str(path))


def render_corpus(dialogues: Iterable[Dialogue]) -> str:
    """Canonical corpus text: variants with 'transcript' first then sorted,
    state pairs alphabetized. Loading this back round-trips exactly."""
    lines: list[str] = []
    for dialogue in dialogues:
        lines.append(f"dialogue {dialogue.id}")
        for turn in dialogue.turns:
            lines.append(f"turn {turn.speaker.lower()}")
            order = sorted(turn.texts, key=lambda v: (v != TRANSCRIPT, v))
            for variant in order:
                lines.append(f"  text {variant} | {turn.texts[variant]}")
            if turn.speaker == USER:
                pairs = "; ".join(
                    f"{k}={v}" for k, v in sorted((turn.state or {}).items())
                )
                lines.append(f"  state {pairs}".rstrip())
    return "\n".join(lines) + "\n"


def write_corpus(dialogues: Iterable[Dialogue], path: str | Path) -> None:
    Path(path).write_text(render_corpus(dialogues), encoding="utf-8")


# -- ASR time alignments --


def parse_time_alignment(text: str) -> AlignedWords:
    """Parse "w:while t:2 w:in t:5" word/frame pair strings."""
    tokens = text.split()
    if len(tokens) % 2 != 0:
        raise DataError("time alignment has a dangling entry")
    out: AlignedWords = []
    last = -1
    for i in range(0, len(tokens), 2):
        wtok, ttok = tokens[i], tokens[i + 1]
        if not wtok.startswith("w:") or not ttok.startswith("t:"):
            raise DataError(f"malformed alignment pair {wtok!r} {ttok!r}")
        word = wtok[2:]
        try:
            frame = int(ttok[2:])
        except ValueError:
            raise DataError(f"non-integer frame in {ttok!r}") from None
        if frame < 0:
            raise DataError(f"negative frame in {ttok!r}")
        if frame < last:
            raise DataError(f"frames decrease at {wtok!r} ({frame} < {last})")
        out.append(AlignedWord(word, frame))
        last = frame
    return out


def render_time_alignment(words: AlignedWords) -> str:
    return " ".join(f"w:{w.word} t:{w.frame}" for w in words)
