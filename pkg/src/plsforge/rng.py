"""Keyed hashing used wherever randomness has to be reproducible from a seed."""

from __future__ import annotations

import hashlib
import random

_KEY = b"plsforge-prf"


def _digest(parts: tuple, size: int) -> bytes:
    h = hashlib.blake2b(digest_size=size, key=_KEY)
    h.update(repr(parts).encode())
    return h.digest()


def derive_seed(seed: int, *context: object) -> int:
    """A 64-bit seed for a named sub-stream of ``seed``."""
    return int.from_bytes(_digest((seed,) + context, 8), "big")


def hash_index(k: int, *parts: object) -> int:
    """Uniform index in range(k) determined by ``parts``.

    A 128-bit digest reduced mod k; the bias is below 2**-100 for any k we use.
    """
    if k < 1:
        raise ValueError("empty range")
    return int.from_bytes(_digest(parts, 16), "big") % k


def stream(seed: int, *context: object) -> random.Random:
    return random.Random(derive_seed(seed, *context))
