"""Deterministic random-stream derivation.

Every stochastic routine takes an explicit numpy Generator. Streams are derived
from (global seed, *keys) so that per-tree / per-replicate results do not
depend on iteration order or worker count: the same key tuple always yields
the same stream.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["key_hash", "substream"]


def key_hash(key: str | int) -> int:
    """Stable 64-bit integer for a stream key.

    Strings are hashed with blake2b (python's hash() is salted per process and
    must not leak into anything reproducible).
    """
    if isinstance(key, (int, np.integer)):
        return int(key) & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def substream(seed: int, *keys: str | int) -> np.random.Generator:
    """Generator for the stream identified by (seed, *keys)."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [key_hash(k) for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))
