"""Deterministic substream derivation.

Every random decision in the toolkit draws from a generator derived from a
64-bit seed plus a chain of string labels, so independent steps (generator
blocks, split steps, strata, pipeline stages) can be re-run in isolation and
still reproduce bit-for-bit. Derivation goes through SHA-256, not Python's
hash(), so results are stable across processes and platforms.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _digest(seed: int, labels: tuple) -> bytes:
    h = hashlib.sha256()
    h.update(str(int(seed)).encode())
    for lab in labels:
        h.update(b"\x00")
        h.update(str(lab).encode())
    return h.digest()


def substream(seed: int, *labels) -> np.random.Generator:
    """A numpy Generator keyed by (seed, labels...)."""
    entropy = int.from_bytes(_digest(seed, labels)[:16], "little")
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(seed: int, *labels) -> int:
    """A 63-bit integer seed keyed by (seed, labels...), for nested use."""
    return int.from_bytes(_digest(seed, labels)[:8], "little") >> 1
