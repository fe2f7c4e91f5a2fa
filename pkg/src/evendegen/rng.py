"""Reproducible random streams.

Every stream is a numpy ``Generator`` driven by the Philox4x64 counter-based
bit generator, keyed by ``SeedSequence(master_seed, spawn_key=(stream_id,))``.
Equal ``(master_seed, stream_id)`` pairs give identical draws; distinct stream
ids give independent streams, so parallel trials use ``stream_id = trial``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class RandomSource:
    master_seed: int
    stream_id: int = 0
    gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.master_seed < 0 or self.stream_id < 0:
            raise ValueError("seed and stream id must be non-negative")
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_id,))
        self.gen = np.random.Generator(np.random.Philox(seq))

    def child(self, stream_id: int) -> "RandomSource":
        """Stream with the same master seed and a different id."""
        return RandomSource(self.master_seed, stream_id)

    def spawn(self) -> "RandomSource":
        """Derive an independent stream from this one's current state."""
        return RandomSource(int(self.gen.integers(0, 2**63)), 0)

    def random(self, size=None):
        return self.gen.random(size)

    def integers(self, low, high=None, size=None):
        return self.gen.integers(low, high, size=size)

    def permutation(self, x):
        return self.gen.permutation(x)


def as_source(rng: RandomSource | int | None, default_seed: int = 0) -> RandomSource:
    if isinstance(rng, RandomSource):
        return rng
    if rng is None:
        return RandomSource(default_seed)
    return RandomSource(int(rng))
