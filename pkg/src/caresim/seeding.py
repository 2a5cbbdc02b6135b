"""Deterministic seed derivation for independent random streams.

Child seeds are derived from a label tuple via SHA-256 so that parallel
evaluation of rollout i equals serial evaluation, and so that training,
snapshot evaluation, and simulation never share a stream by accident.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(*parts: int | str) -> int:
    """Stable 63-bit seed from a sequence of ints/strings."""
    text = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def spawn_rng(*parts: int | str) -> random.Random:
    return random.Random(derive_seed(*parts))
