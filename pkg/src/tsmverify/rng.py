"""Deterministic SplitMix64 generator.

Output ``k`` (0-based) of a stream seeded with ``seed`` is
``mix(seed + (k + 1) * GAMMA)`` with wrap-around 64-bit arithmetic, so any
block of outputs can be produced with one vectorised numpy expression.
Floats take the top 53 bits: ``(z >> 11) * 2**-53``, uniform on [0, 1).
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
_MASK = (1 << 64) - 1

_G = np.uint64(GAMMA)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / (1 << 53)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def splitmix64_scalar(state: int) -> tuple[int, int]:
    """Reference scalar step: returns ``(new_state, output)``."""
    state = (state + GAMMA) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int = 0):
        self.state = int(seed) & _MASK

    def next_u64(self, size: int) -> np.ndarray:
        steps = np.arange(1, size + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + steps * _G
            out = _mix(z)
        self.state = (self.state + size * GAMMA) & _MASK
        return out

    def random(self, size: int | None = None):
        """Uniform floats on [0, 1); a scalar when ``size`` is None."""
        n = 1 if size is None else int(size)
        if n == 0:
            return np.empty(0, dtype=np.float64)
        u = (self.next_u64(n) >> _S11).astype(np.float64) * _INV53
        return float(u[0]) if size is None else u

    def integers(self, high: int, size: int) -> np.ndarray:
        """Integers uniform on [0, high) (modulo bias below 2**-40 for small ``high``)."""
        return (self.next_u64(size) % np.uint64(high)).astype(np.int64)

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates shuffle of ``range(n)`` driven by this stream."""
        perm = np.arange(n)
        if n < 2:
            return perm
        u = self.random(n - 1)
        for k, i in enumerate(range(n - 1, 0, -1)):
            j = int(u[k] * (i + 1))
            perm[i], perm[j] = perm[j], perm[i]
        return perm
