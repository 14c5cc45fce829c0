"""Deterministic per-node random streams.

Every chart of a lazily sampled surface owns an independent stream keyed by
``(global seed, chart path, label)`` through a stable 128-bit mix into a
Philox counter-based generator.  A stream is an infinite, replayable sequence
of float64 draws: re-creating it and consuming the same prefix yields the
same values on every platform and numpy release, which is what makes budget
expansion bytewise consistent with direct sampling.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

_CHUNK = 256


def stream_key(seed: int, path: tuple[int, ...], label: str = "") -> int:
    """Stable 128-bit key for the (seed, chart path, label) stream."""
    text = f"{seed}:{','.join(map(str, path))}:{label}"
    digest = hashlib.blake2b(text.encode("ascii"), digest_size=16).digest()
    return int.from_bytes(digest, "little")


def derive_seed(base_seed: int, index: int, label: str = "trial") -> int:
    """64-bit child seed for trial fan-out; disjoint streams per index."""
    text = f"{base_seed}|{label}|{index}"
    digest = hashlib.blake2b(text.encode("ascii"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


class Stream:
    """Buffered scalar draws from one keyed Philox generator.

    Draw order is part of the surface's serialized identity; only append new
    draw kinds, never reorder call sites.
    """

    def __init__(self, seed: int, path: tuple[int, ...] = (), label: str = ""):
        self.key = stream_key(seed, path, label)
        self._gen = np.random.Generator(np.random.Philox(key=self.key))
        self._buf = np.empty(0)
        self._pos = 0

    def uniform(self) -> float:
        """Next float64 in [0, 1)."""
        if self._pos >= len(self._buf):
            self._buf = self._gen.random(_CHUNK)
            self._pos = 0
        value = float(self._buf[self._pos])
        self._pos += 1
        return value

    def exponential(self) -> float:
        """Unit-rate exponential draw."""
        # -log1p(-u) maps u in [0,1) to [0, inf) without losing small values.
        return -math.log1p(-self.uniform())

    def angle(self) -> float:
        """Uniform direction in [0, 2*pi)."""
        return 2.0 * math.pi * self.uniform()
