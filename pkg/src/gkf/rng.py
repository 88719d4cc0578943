"""Reproducible random streams.

Streams are addressed by (seed, stream_id, lane); identical addresses
reproduce identical draws.  Child streams extend the spawn key with a new
coordinate instead of shifting the stream id, so children of distinct
streams can never collide.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0
    lane: tuple[int, ...] = field(default=())

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.stream_id, *self.lane)
        )
        return np.random.default_rng(ss)

    def child(self, index: int) -> "RngStream":
        return RngStream(self.seed, self.stream_id, (*self.lane, index))
