"""Counter-based uniform streams.

Every trial owns an independent stream keyed by ``(seed, trial)``::

    key   = mix64(seed ^ trial)
    state = four successive splitmix64 outputs starting from ``key``
    x_i   = xoshiro256++ output number i
    u_i   = ((x_i >> 12) + 0.5) * 2**-52          # strictly inside (0, 1)

Sweeps first derive a per-grid-point seed with :func:`lane_seed`. Slot ``i`` of
a stream is the radius draw of vertex ``i``; the simulators never consume the
stream out of order, so a trial is a pure function of ``(seed, trial)``.

The pure-Python functions here are the reference; the numba kernels in
``rumour._kernels`` reimplement them and are tested bit-for-bit against them.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
TWO_M52 = 2.0**-52


def mix64(z: int) -> int:
    """splitmix64 finalizer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns ``(new_state, output)``."""
    state = (state + GAMMA) & MASK64
    return state, mix64(state)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


def lane_seed(seed: int, lane: int) -> int:
    """Seed for sub-experiment ``lane`` (e.g. a sweep grid index)."""
    return mix64(seed ^ mix64((lane + 1) * GAMMA))


def trial_key(seed: int, trial: int) -> int:
    return mix64((seed ^ trial) & MASK64)


def xoshiro_state(key: int) -> list[int]:
    s = []
    state = key
    for _ in range(4):
        state, out = splitmix64(state)
        s.append(out)
    return s


def xoshiro_next(s: list[int]) -> int:
    """xoshiro256++ step; mutates ``s`` in place."""
    result = (_rotl((s[0] + s[3]) & MASK64, 23) + s[0]) & MASK64
    t = (s[1] << 17) & MASK64
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


def to_uniform(x: int) -> float:
    return ((x >> 12) + 0.5) * TWO_M52


def raw_outputs(seed: int, trial: int, count: int) -> list[int]:
    s = xoshiro_state(trial_key(seed, trial))
    return [xoshiro_next(s) for _ in range(count)]


class TrialStream:
    """Lazily generated uniform stream of one trial, indexable by slot."""

    def __init__(self, seed: int, trial: int = 0):
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.trial = trial
        self._state = xoshiro_state(trial_key(seed, trial))
        self._values: list[float] = []

    def __getitem__(self, slot: int) -> float:
        while len(self._values) <= slot:
            self._values.append(to_uniform(xoshiro_next(self._state)))
        return self._values[slot]

    def take(self, count: int) -> np.ndarray:
        self[count - 1]
        return np.array(self._values[:count])
