"""Counter-based random words.

Every draw is a pure function of ``(seed, trial, index)``, so any subset of
trials can be regenerated independently and in any order. The mixer is the
SplitMix64 finalizer applied twice (once to key the trial, once to key the
draw within it).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    z = z + _GAMMA
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def words(seed: int, trials: np.ndarray, n: int, offset: int = 0) -> np.ndarray:
    """Random uint64 words, shape ``(len(trials), n)``.

    Row ``r`` holds draws ``offset .. offset+n-1`` of trial ``trials[r]``.
    """
    trials = np.asarray(trials, dtype=np.uint64).reshape(-1, 1)
    seed_word = np.array([seed & MASK64], dtype=np.uint64)
    trial_key = _mix(_mix(seed_word) ^ _mix(trials))
    draws = np.arange(offset, offset + n, dtype=np.uint64).reshape(1, -1)
    return _mix(trial_key ^ (draws * _GAMMA))


@dataclass(frozen=True)
class TrialStream:
    """The stream belonging to one trial: draws are addressed by position."""

    seed: int
    trial: int = 0
    offset: int = 0

    def take(self, n: int) -> np.ndarray:
        return words(self.seed, np.array([self.trial]), n, self.offset)[0]

    def advanced(self, n: int) -> TrialStream:
        return TrialStream(self.seed, self.trial, self.offset + n)
