"""Deterministic ASR error correction and the sentence error rate.

Two repair passes: normalize_format fixes token shapes (spelled-out clock
times back to HH:MM, dropped-apostrophe contractions), then
lexicon_correct respells out-of-vocabulary tokens against a word list by
edit-distance ratio. Format repair runs first because it removes spurious
OOV tokens before the lexicon pass sees them. Neural correction models
plug in through the adapter wire protocol instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .adapter import AdapterClient, AdapterEndpoint, AdapterFailure
from .clockwords import match_spelled_time
from .corpus import Dialogue, Schema
from .errors import DataError
from .postproc import similarity_ratio
from .textnorm import canonicalize, strip_special_chars

# Closed table of apostrophe-dropped contractions. Bare forms that are
# themselves common words ("its", "were", "well") are deliberately absent;
# the remaining risky ones ("ill", "lets") can be guarded by a lexicon.
CONTRACTIONS: dict[str, str] = {
    "im": "i'm",
    "id": "i'd",
    "ive": "i've",
    "ill": "i'll",
    "dont": "don't",
    "doesnt": "doesn't",
    "didnt": "didn't",
    "cant": "can't",
    "wont": "won't",
    "couldnt": "couldn't",
    "wouldnt": "wouldn't",
    "shouldnt": "shouldn't",
    "isnt": "isn't",
    "arent": "aren't",
    "wasnt": "wasn't",
    "werent": "weren't",
    "havent": "haven't",
    "hasnt": "hasn't",
    "hadnt": "hadn't",
    "youre": "you're",
    "youll": "you'll",
    "youve": "you've",
    "youd": "you'd",
    "theyre": "they're",
    "theyll": "they'll",
    "theyve": "they've",
    "theres": "there's",
    "thats": "that's",
    "whats": "what's",
    "whos": "who's",
    "wheres": "where's",
    "heres": "here's",
    "lets": "let's",
    "hes": "he's",
    "shes": "she's",
}


@dataclass(frozen=True)
class Lexicon:
    """Target vocabulary for respelling. Protected entries (and any token
    containing a digit) are never rewritten."""

    entries: frozenset[str]
    protected: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.protected <= self.entries:
            raise DataError("protected words must be lexicon entries")


def build_lexicon(words: Iterable[str], protected: Iterable[str] = ()) -> Lexicon:
    entries = {canonicalize(w) for w in words if canonicalize(w)}
    protect = {canonicalize(w) for w in protected if canonicalize(w)}
    return Lexicon(frozenset(entries | protect), frozenset(protect))


def load_lexicon(path: str | Path) -> Lexicon:
    """Word list, one entry per line; "protect <word>" marks it protected."""
    words: list[str] = []
    protected: list[str] = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("protect "):
            protected.append(line[len("protect "):])
        else:
            words.append(line)
    return build_lexicon(words, protected)


_EDGE_PUNCT = ".,?:;!"


def lexicon_from_corpus(
    dialogues: Iterable[Dialogue],
    schema: Schema | None = None,
    variant: str = "transcript",
) -> Lexicon:
    """Harvest a lexicon from corpus texts; schema slot values become
    protected words. Edge punctuation is trimmed so "prefer?" contributes
    "prefer", but internal apostrophes and hyphens survive."""
    words: set[str] = set()
    for dialogue in dialogues:
        for turn in dialogue.turns:
            text = turn.texts.get(variant)
            if text:
                words.update(w.strip(_EDGE_PUNCT) for w in text.split())
    protected: set[str] = set()
    if schema is not None:
        for slot in schema.slots:
            for value in slot.values:
                protected.update(value.split())
    return build_lexicon(words | protected, protected)


def normalize_format(text: str, lexicon: Lexicon | None = None) -> str:
    """Rewrite spelled-out clock times to HH:MM and restore dropped
    contractions. Idempotent. When a lexicon is given, bare forms that are
    real lexicon words are left alone."""
    tokens = text.split()
    out: list[str] = []
    i = 0
    while i < len(tokens):
        matched = match_spelled_time(tokens, i)
        if matched is not None:
            hhmm, consumed = matched
            out.append(hhmm)
            i += consumed
            continue
        token = tokens[i]
        repaired = CONTRACTIONS.get(token)
        if repaired is not None and (lexicon is None or token not in lexicon.entries):
            token = repaired
        out.append(token)
        i += 1
    return " ".join(out)


def _protected_shape(token: str) -> bool:
    return any(ch.isdigit() for ch in token)


def _correct_token(token: str, lexicon: Lexicon, min_ratio: float) -> str:
    if token in lexicon.entries or _protected_shape(token):
        return token
    slack = 1.0 - min_ratio
    best_ratio = 0.0
    best: list[str] = []
    for entry in sorted(lexicon.entries):
        # ratio >= min_ratio needs |len(e)-len(t)| <= slack * max len
        if abs(len(entry) - len(token)) > slack * max(len(entry), len(token)):
            continue
        ratio = similarity_ratio(token, entry)
        if ratio > best_ratio:
            best_ratio, best = ratio, [entry]
        elif ratio == best_ratio:
            best.append(entry)
    if best_ratio >= min_ratio and len(best) == 1:
        return best[0]
    return token  # no candidate, or tie: never guess


def lexicon_correct(text: str, lexicon: Lexicon, min_ratio: float = 0.8) -> str:
    """Replace each out-of-lexicon token by the unique closest entry with
    similarity ratio >= min_ratio. In-lexicon, protected, and digit-bearing
    tokens never change."""
    if not 0 < min_ratio <= 1:
        raise ValueError(f"min_ratio must be in (0, 1], got {min_ratio}")
    return " ".join(_correct_token(t, lexicon, min_ratio) for t in text.split())


def correct_text(text: str, lexicon: Lexicon, min_ratio: float = 0.8) -> str:
    """The full deterministic corrector: format repair then respelling."""
    return lexicon_correct(normalize_format(text, lexicon), lexicon, min_ratio)


def correct_with_adapter(
    texts: Sequence[str],
    adapter: AdapterEndpoint | AdapterClient,
) -> tuple[list[str | None], list[AdapterFailure]]:
    """Send texts through an external corrector process. One output per
    input, order preserved by request id; failed items are None in the
    output list with a failure record carrying the input index."""
    if isinstance(adapter, AdapterClient):
        return adapter.request(texts, task="correct")
    with AdapterClient(adapter) as client:
        return client.request(texts, task="correct")


@dataclass(frozen=True)
class CorrectionReport:
    pairs_total: int
    pairs_incorrect: int

    @property
    def sentence_error_rate(self) -> float:
        return self.pairs_incorrect / self.pairs_total


def sentence_error_rate(
    pairs: Sequence[tuple[str, str]], strip_special: bool = False
) -> CorrectionReport:
    """Fraction of (hypothesis, reference) pairs that differ after
    canonicalization, optionally after stripping special characters from
    both sides first."""
    if not pairs:
        raise ValueError("sentence_error_rate needs at least one pair")
    incorrect = 0
    for hyp, ref in pairs:
        hyp, ref = canonicalize(hyp), canonicalize(ref)
        if strip_special:
            hyp, ref = strip_special_chars(hyp), strip_special_chars(ref)
        if hyp != ref:
            incorrect += 1
    return CorrectionReport(pairs_total=len(pairs), pairs_incorrect=incorrect)
