"""Counter-based deterministic random bits.

Draws are produced by the SplitMix64 output finalizer applied to a mixed
key, never by advancing shared state, so the value attached to a key is
independent of evaluation order and of how work is split across workers:

    draw(seed, key) = lowest bit of splitmix64(splitmix64(seed) XOR key)

Per-prime signs for the random multiplicative model use key = p; per-trial
streams derive a sub-seed with key = trial index first.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer of a 64-bit value."""
    z = (x + _GAMMA) & _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def mix(seed: int, key: int) -> int:
    """Order-independent 64-bit draw for (seed, key)."""
    return splitmix64(splitmix64(seed & _MASK) ^ (key & _MASK))


def trial_seed(seed: int, trial: int) -> int:
    """Derived seed for one Monte Carlo trial."""
    return mix(seed, trial)


def prime_sign(seed: int, p: int) -> int:
    """+1 or -1 attached to prime p under the given (possibly derived) seed."""
    return 1 if mix(seed, p) & 1 else -1


def prime_signs_matrix(seeds: np.ndarray, p: int) -> np.ndarray:
    """Signs for one prime across many derived seeds (int8 column)."""
    with np.errstate(over="ignore"):
        z = (seeds.astype(np.uint64) ^ np.uint64(p)) + np.uint64(_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
        z = z ^ (z >> np.uint64(31))
    return np.where(z & np.uint64(1), 1, -1).astype(np.int8)


def presplit_seeds(seed: int, trials: int) -> np.ndarray:
    """splitmix64(trial_seed) for each trial, ready for prime_signs_matrix."""
    return np.array(
        [splitmix64(trial_seed(seed, t)) for t in range(trials)], dtype=np.uint64
    )
