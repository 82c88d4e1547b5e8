"""Counter-style randomness from stable hashes.

Every draw is keyed by (seed, *key), so results never depend on call
order, Python's hash seed, or how work is partitioned across workers.
"""

from __future__ import annotations

import hashlib


def _digest(seed: int, key: tuple[object, ...]) -> int:
    payload = "\x1f".join(str(k) for k in (seed, *key)).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


def draw_unit(seed: int, *key: object) -> float:
    """Uniform [0, 1)."""
    return _digest(seed, key) / 2**64


def pick_index(n: int, seed: int, *key: object) -> int:
    """Uniform choice from range(n)."""
    return _digest(seed, key) % n
