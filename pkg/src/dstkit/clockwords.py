"""Spoken clock times: HH:MM tokens to English words and back.

The spoken rendering carries no am/pm, so only hours 01-12 round-trip;
13-23 are rendered on the 12-hour dial and cannot be recovered exactly.
The parser therefore maps word forms back into the 01:00-12:59 range.
"""

from __future__ import annotations

import re
from typing import Sequence

_UNITS = ("one", "two", "three", "four", "five", "six", "seven", "eight", "nine")
_TEENS = (
    "ten", "eleven", "twelve", "thirteen", "fourteen",
    "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
)
_TENS = {20: "twenty", 30: "thirty", 40: "forty", 50: "fifty"}

TIME_TOKEN = re.compile(r"^([01]?\d|2[0-3]):([0-5]\d)$")


def is_time_token(token: str) -> bool:
    return TIME_TOKEN.match(token) is not None


def _hour_word(hour: int) -> str:
    hour = hour % 12
    if hour == 0:
        return "twelve"
    return _UNITS[hour - 1] if hour <= 9 else _TEENS[hour - 10]


def _minute_words(minute: int) -> str:
    if minute == 0:
        return "o'clock"
    if minute < 10:
        return "oh " + _UNITS[minute - 1]
    if minute < 20:
        return _TEENS[minute - 10]
    tens, unit = divmod(minute, 10)
    word = _TENS[tens * 10]
    return word if unit == 0 else f"{word} {_UNITS[unit - 1]}"


def spell_time(token: str) -> str:
    """Render an HH:MM token as spoken words ("08:15" -> "eight fifteen")."""
    m = TIME_TOKEN.match(token)
    if m is None:
        raise ValueError(f"not a clock token: {token!r}")
    return f"{_hour_word(int(m.group(1)))} {_minute_words(int(m.group(2)))}"


_HOURS = {_hour_word(h): h for h in range(1, 13)}
_MINUTE_PHRASES: dict[tuple[str, ...], int] = {
    tuple(_minute_words(m).split()): m for m in range(60)
}
_MINUTE_PHRASES[("oclock",)] = 0  # apostrophe-stripped form


def match_spelled_time(tokens: Sequence[str], start: int) -> tuple[str, int] | None:
    """Match a spelled time beginning at tokens[start].

    Returns (HH:MM, tokens consumed) or None. The longest minute phrase
    wins, so "eight twenty five" is 08:25 rather than 08:20 plus "five".
    """
    hour = _HOURS.get(tokens[start])
    if hour is None:
        return None
    rest = tokens[start + 1 : start + 3]
    for take in (2, 1):
        phrase = tuple(rest[:take])
        if len(phrase) == take and phrase in _MINUTE_PHRASES:
            return f"{hour:02d}:{_MINUTE_PHRASES[phrase]:02d}", take + 1
    return None
