"""Counter-based per-position random streams.

Every stochastic operation in this package takes an explicit 64-bit seed.
Sequence-valued operations derive one independent value per position by
hashing (seed, position) with the splitmix64 finalizer, so results do not
depend on how a sequence is chunked or parallelized.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(x: np.ndarray | int) -> np.ndarray:
    """splitmix64 finalizer, vectorized over uint64 arrays."""
    z = np.asarray(x, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def position_stream(seed: int, n: int) -> np.ndarray:
    """n uint64 values, value i a pure function of (seed, i)."""
    idx = np.arange(1, n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return splitmix64(np.uint64(seed % (1 << 64)) + idx * _GAMMA)


def derive_seed(seed: int, stream: int) -> int:
    """A child 64-bit seed for sub-stream `stream` of `seed`."""
    return int(position_stream(seed, stream + 1)[stream])
