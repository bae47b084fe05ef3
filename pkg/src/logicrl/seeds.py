"""Deterministic sub-seed derivation.

All randomized components derive child seeds as a pure function of a
master seed and a label, so replays are portable and parallelizable:

    child = first 8 bytes (big-endian) of SHA-256(f"{master}:{label}")

Labels are either dataset indices or short strings like "iter3/rollout12".
"""

from __future__ import annotations

import hashlib


def derive_seed(master: int, label: object) -> int:
    """64-bit child seed, a pure function of (master, label)."""
    digest = hashlib.sha256(f"{master}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
