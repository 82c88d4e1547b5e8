"""Canonical text form shared by every stage: lowercase, single-spaced, trimmed."""

from __future__ import annotations

import re

# Characters speech recognizers tend to drop. The hyphen is replaced by a
# space, the rest vanish outright.
SPECIAL_CHARS = "',.:?-"
_DROPPED = "',.:?"
_WS_RUN = re.compile(r"\s+")


def canonicalize(text: str) -> str:
    """Lowercase, collapse whitespace runs to single spaces, trim."""
    return _WS_RUN.sub(" ", text.strip()).lower()


def has_special_chars(text: str) -> bool:
    return any(ch in text for ch in SPECIAL_CHARS)


def strip_special_chars(text: str) -> str:
    """Remove the special-character set; hyphens become spaces."""
    text = text.replace("-", " ")
    for ch in _DROPPED:
        text = text.replace(ch, "")
    return _WS_RUN.sub(" ", text).strip()
