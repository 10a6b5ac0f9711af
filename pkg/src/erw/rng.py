"""Counter-based pseudo-random numbers for reproducible parallel simulation.

Every uniform consumed by the simulator is a pure function of a 64-bit
stream key and a draw counter, and stream keys are in turn a pure function
of (master seed, replicate index).  Nothing is stateful, so results cannot
depend on chunking, vectorisation width, or thread count.

The mixer is the splitmix64 finalizer (the SplittableRandom core), which is
bijective on 64-bit words and passes BigCrush.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

# Increment of the splitmix64 sequence (odd, so it generates Z/2^64).
GOLDEN = 0x9E3779B97F4A7C15

_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB

_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_UC1 = np.uint64(_C1)
_UC2 = np.uint64(_C2)
_UGOLDEN = np.uint64(GOLDEN)

# (v >> 11) is a 53-bit integer; +0.5 keeps the result strictly inside (0, 1),
# which protects inverse-CDF transforms from hitting 0 or 1 exactly.
_TO_UNIT = 2.0 ** -53


def mix64(z: int) -> int:
    """splitmix64 finalizer of a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _C1) & MASK64
    z = ((z ^ (z >> 27)) * _C2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    # uint64 array arithmetic wraps mod 2^64, which is exactly what we want
    z = z.copy()
    z ^= z >> _U30
    z *= _UC1
    z ^= z >> _U27
    z *= _UC2
    z ^= z >> _U31
    return z


def replicate_key(master_seed: int, index: int) -> int:
    """Stream key for one replicate, a stateless mix of seed and index."""
    return mix64((master_seed & MASK64) ^ mix64((index + 1) * GOLDEN))


def replicate_keys(master_seed: int, start: int, count: int) -> np.ndarray:
    """Stream keys for replicates start .. start+count-1 as a uint64 array."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    return _mix64_array(np.uint64(master_seed & MASK64) ^ _mix64_array(idx * _UGOLDEN))


def uniform_draw(key: int, counter: int) -> float:
    """Uniform in (0, 1) for draw number `counter` of stream `key`."""
    v = mix64(key + (counter + 1) * GOLDEN)
    return ((v >> 11) + 0.5) * _TO_UNIT


def uniform_draws(keys: np.ndarray, counter: int) -> np.ndarray:
    """Vectorised `uniform_draw` across many streams at one counter."""
    offset = np.uint64(((counter + 1) * GOLDEN) & MASK64)
    v = _mix64_array(keys + offset)
    return ((v >> _U11).astype(np.float64) + 0.5) * _TO_UNIT


def parse_seed(text: str) -> int:
    """Parse a master seed given as decimal or 0x-prefixed hex."""
    value = int(text.strip(), 0)
    if value < 0:
        raise ValueError(f"seed must be non-negative, got {text!r}")
    return value & MASK64
