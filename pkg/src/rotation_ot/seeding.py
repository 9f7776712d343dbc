"""Deterministic per-trial random streams.

Generator: numpy ``PCG64``.  Stream split: trial ``i`` of an experiment with
master seed ``M`` is seeded with ``mix64(M + (i + 1) * GOLDEN mod 2**64)``
where ``mix64`` is the SplitMix64 finalizer.  Both steps are bijections on
64-bit integers, so distinct trials always get distinct seeds.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    if trial_index < 0:
        raise ValueError("trial index must be >= 0")
    return mix64(master_seed + (trial_index + 1) * GOLDEN)


def derive_trial_seeds(master_seed: int, count: int) -> np.ndarray:
    """Vectorised ``derive_trial_seed`` for indices ``0..count-1`` (uint64)."""
    with np.errstate(over="ignore"):
        i = np.arange(1, count + 1, dtype=np.uint64)
        z = np.uint64(master_seed & MASK64) + i * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    return make_rng(derive_trial_seed(master_seed, trial_index))


def substream_seed(master_seed: int, label: str) -> int:
    """Master seed for an auxiliary stream (e.g. per-key draws) of an experiment."""
    tag = int.from_bytes(label.encode()[:8].ljust(8, b"\0"), "big")
    return mix64(master_seed ^ mix64(tag))
