# phasefuse/rng.py
"""Reproducible random streams.

Every stochastic operation in the package takes an explicit ``RngStream``.
Streams are keyed by (master_seed, stream_index, sub-key path) through
numpy's ``SeedSequence``, so the draw sequence is a pure function of the key
and independent of scheduling or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """A named, splittable random stream.

    Identical (master_seed, stream_index, key) always produces an identical
    generator. ``child(k)`` derives statistically independent sub-streams,
    so parallel trials stay reproducible regardless of execution order.
    """

    master_seed: int
    stream_index: int = 0
    key: tuple = field(default=())

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(
            entropy=self.master_seed,
            spawn_key=(self.stream_index, *self.key),
        )
        return np.random.default_rng(seq)

    def child(self, k: int) -> "RngStream":
        """Derive the k-th independent sub-stream."""
        return RngStream(self.master_seed, self.stream_index, self.key + (k,))
