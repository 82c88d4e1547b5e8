"""Deterministic ASR-noise channel for clean transcripts.

Three error classes are simulated: special-character loss, clock times
replaced by their spoken words, and word-level confusions from a lookup
table. Per token the clock rule is evaluated first so that the stripping
rule can act on its output (an o'clock apostrophe is strippable like any
other). Every random draw is a stable hash of (seed, stream key, rule,
token index), so corrupting one token never shifts the randomness of its
neighbours and any partitioning of a corpus yields identical results.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Iterable

from .clockwords import is_time_token, spell_time
from .corpus import TRANSCRIPT, Dialogue, Turn
from .errors import ConfigError, DataError
from .hashrand import draw_unit, pick_index
from .parallel import pmap
from .textnorm import has_special_chars, strip_special_chars

# Word confusions in the flavour of travel-booking ASR output. A stand-in
# class: real recognizers confuse phonetically, this table just gives the
# channel plausible teeth. Users supply their own table for serious runs.
DEFAULT_CONFUSIONS: dict[str, tuple[str, ...]] = {
    "bangkok": ("bangok", "bankok"),
    "centre": ("center",),
    "cambridge": ("cambrige",),
    "guesthouse": ("guest house",),
    "expensive": ("expansive",),
    "moderate": ("moderat",),
    "cheap": ("chip",),
    "restaurant": ("restarant",),
    "hotel": ("hotell",),
    "parking": ("packing",),
    "wifi": ("wi fi",),
    "internet": ("inter net",),
    "thai": ("tie",),
    "indian": ("indean",),
    "italian": ("italien",),
    "chinese": ("chines",),
    "portuguese": ("portugese",),
    "mediterranean": ("mediteranean",),
    "vegetarian": ("vegitarian",),
    "gastropub": ("gastro pub",),
    "fenditton": ("fen ditton",),
    "chesterton": ("chester ton",),
    "arbury": ("arberry",),
    "museum": ("musium",),
    "theatre": ("theater",),
    "college": ("colege",),
    "church": ("churh",),
    "street": ("streat",),
    "avenue": ("avenew",),
    "road": ("rode",),
    "north": ("nort",),
    "south": ("sout",),
    "east": ("eest",),
    "west": ("vest",),
    "tuesday": ("tues day",),
    "wednesday": ("wendsday",),
    "thursday": ("thurs day",),
    "saturday": ("satur day",),
    "leicester": ("lester",),
    "gloucester": ("gloster",),
    "peterborough": ("peter borough",),
    "stansted": ("stanstead",),
    "broxbourne": ("brox bourne",),
    "stevenage": ("steven age",),
    "birmingham": ("burming ham",),
    "norwich": ("nor witch",),
    "guesthouses": ("guest houses",),
    "postcode": ("post code",),
    "anywhere": ("any where",),
    "downtown": ("down town",),
}

_SEGMENTS = re.compile(r"(\s+)")
_WS_RUN = re.compile(r"\s+")


@dataclass(frozen=True)
class NoiseConfig:
    strip_special_chars: float = 0.0
    spell_out_times: float = 0.0
    word_confusion: float = 0.0
    confusion_table: dict[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_CONFUSIONS)
    )
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("strip_special_chars", "spell_out_times", "word_confusion"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {p}")
        for word, alts in self.confusion_table.items():
            if not alts:
                raise ConfigError(f"confusion list for {word!r} is empty")


def corrupt_utterance(text: str, config: NoiseConfig, stream_key: str) -> str:
    """Corrupt one utterance. Pure in (text, config, stream_key)."""
    parts = _SEGMENTS.split(text)
    out: list[str] = []
    changed = False
    index = 0  # counts word tokens; keys every draw
    for part in parts:
        if part == "" or part.isspace():
            out.append(part)
            continue
        token = part
        if is_time_token(token) and draw_unit(
            config.seed, stream_key, "time", index
        ) < config.spell_out_times:
            token = spell_time(token)
        if has_special_chars(token) and draw_unit(
            config.seed, stream_key, "strip", index
        ) < config.strip_special_chars:
            token = strip_special_chars(token)
        words = []
        for j, word in enumerate(token.split()):
            alts = config.confusion_table.get(word)
            if alts and draw_unit(
                config.seed, stream_key, "confuse", index, j
            ) < config.word_confusion:
                word = alts[pick_index(len(alts), config.seed, stream_key, "pick", index, j)]
            words.append(word)
        token = " ".join(words)
        if token != part:
            changed = True
        out.append(token)
        index += 1
    if not changed:
        return text
    return _WS_RUN.sub(" ", "".join(out)).strip()


def _corrupt_dialogue(
    dialogue: Dialogue, config: NoiseConfig, target_variant: str
) -> Dialogue:
    turns = []
    for i, turn in enumerate(dialogue.turns):
        if TRANSCRIPT not in turn.texts:
            raise DataError(
                f"dialogue {dialogue.id!r} turn {i} has no 'transcript' variant"
            )
        if target_variant in turn.texts:
            raise DataError(
                f"dialogue {dialogue.id!r} turn {i} already has variant "
                f"{target_variant!r}; refusing to overwrite"
            )
        texts = dict(turn.texts)
        texts[target_variant] = corrupt_utterance(
            turn.texts[TRANSCRIPT], config, f"{dialogue.id}/{i}"
        )
        turns.append(Turn(speaker=turn.speaker, texts=texts, state=turn.state))
    return Dialogue(id=dialogue.id, turns=turns)


def corrupt_corpus(
    corpus: Iterable[Dialogue],
    config: NoiseConfig,
    target_variant: str,
    workers: int = 1,
) -> list[Dialogue]:
    """Add target_variant = corrupted transcript to every turn. States are
    untouched; an existing target variant is an error, never overwritten."""
    fn = partial(_corrupt_dialogue, config=config, target_variant=target_variant)
    return pmap(fn, list(corpus), workers)


# -- config file IO --


def load_confusion_table(path: str | Path) -> dict[str, tuple[str, ...]]:
    """TSV lines "word<TAB>alt1,alt2,..."."""
    path = Path(path)
    table: dict[str, tuple[str, ...]] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        if "\t" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'word<TAB>alternatives'")
        word, alts = line.split("\t", 1)
        entries = tuple(a.strip() for a in alts.split(",") if a.strip())
        if not entries:
            raise ConfigError(f"{path}:{lineno}: no alternatives for {word!r}")
        table[word.strip()] = entries
    return table


_FLOAT_KEYS = ("strip_special_chars", "spell_out_times", "word_confusion")


def load_noise_config(path: str | Path) -> NoiseConfig:
    """key=value file; 'confusion_table' names a TSV relative to the file,
    or 'default' for the built-in table."""
    path = Path(path)
    kwargs: dict[str, object] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in _FLOAT_KEYS:
            try:
                kwargs[key] = float(value)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: bad number {value!r}") from None
        elif key == "seed":
            try:
                kwargs[key] = int(value)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: bad seed {value!r}") from None
        elif key == "confusion_table":
            if value == "default":
                kwargs[key] = dict(DEFAULT_CONFUSIONS)
            else:
                kwargs[key] = load_confusion_table(path.parent / value)
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return NoiseConfig(**kwargs)  # type: ignore[arg-type]
