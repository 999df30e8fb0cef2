"""Reproducible random streams.

A stream is named by ``(master_seed, key)`` where ``key`` is a tuple of
non-negative integers (trial index, repeat index, ...). Streams are
Philox counter-based generators keyed through ``SeedSequence`` spawn
keys, so any stream can be rebuilt without drawing from any other.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

GENERATOR_NAME = "numpy.random.Philox(SeedSequence(master_seed, spawn_key=key))"
SEED_ENV_VAR = "REPEATSTAT_SEED"
FALLBACK_SEED = 20240917

_MASK64 = (1 << 64) - 1


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return FALLBACK_SEED
    return int(raw, 0) & _MASK64


@dataclass(frozen=True)
class RngSpec:
    master_seed: int
    key: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.master_seed <= _MASK64:
            raise ValueError("master_seed must fit in 64 unsigned bits")
        if any(k < 0 for k in self.key):
            raise ValueError("stream key entries must be non-negative")

    @property
    def stream_id(self) -> int:
        return self.key[-1] if self.key else 0

    def derive(self, *index: int) -> "RngSpec":
        return RngSpec(self.master_seed, self.key + tuple(int(i) for i in index))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.key)
        return np.random.Generator(np.random.Philox(seq))

    def seed64(self) -> int:
        """A single 64-bit integer drawn from this stream."""
        return int(self.generator().integers(0, _MASK64, dtype=np.uint64, endpoint=True))

    def as_dict(self) -> dict:
        return {"master_seed": self.master_seed, "key": list(self.key),
                "generator": GENERATOR_NAME}
