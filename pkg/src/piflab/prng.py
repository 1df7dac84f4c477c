"""Deterministic 64-bit counter-based pseudo-randomness.

Every simulated random quantity in this package is derived from one fixed
generator so that identical inputs reproduce identical outputs bit for bit,
across platforms and across scalar/vectorized code paths.

The generator is the splitmix64 finalizer applied to explicitly constructed
64-bit keys:

* ``hash64(w0, w1, ...)`` folds a sequence of words into a key by repeated
  ``finalize64(state + GOLDEN + word)`` steps.
* A stream keyed by ``base = hash64(...)`` yields word ``i`` as
  ``finalize64(base + (i + 1) * GOLDEN)``; streams are split by mixing extra
  words (for example a trial index) into the key.
* ``uniform01`` maps a word to a float in [0, 1) using its top 53 bits.

Scalar helpers operate on Python ints; the ``np_*`` variants perform the same
arithmetic on ``numpy`` uint64 arrays and produce identical values.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def finalize64(z: int) -> int:
    """splitmix64 finalizer on a 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def chain64(state: int, word: int) -> int:
    """One fold step: absorb ``word`` into ``state``."""
    return finalize64((state + GOLDEN + (word & MASK64)) & MASK64)


def hash64(*words: int) -> int:
    """Fold ``words`` into a 64-bit key (left fold of ``chain64`` from 0)."""
    state = 0
    for word in words:
        state = chain64(state, word)
    return state


def word_at(base: int, counter: int) -> int:
    """Word ``counter`` of the counter-based stream keyed by ``base``."""
    return finalize64((base + (counter + 1) * GOLDEN) & MASK64)


def uniform01(word: int) -> float:
    """Map a 64-bit word to a float in [0, 1) via its top 53 bits."""
    return (word >> 11) * 2.0**-53


def uniform_at(base: int, counter: int) -> float:
    return uniform01(word_at(base, counter))


# Vectorized equivalents.  All operate on uint64 arrays; unsigned arithmetic
# wraps mod 2**64 exactly as the masked scalar versions do.

_NP_GOLDEN = np.uint64(GOLDEN)
_NP_MIX1 = np.uint64(_MIX1)
_NP_MIX2 = np.uint64(_MIX2)


def np_finalize64(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> np.uint64(30))) * _NP_MIX1
    z = (z ^ (z >> np.uint64(27))) * _NP_MIX2
    return z ^ (z >> np.uint64(31))


def np_chain64(state: np.ndarray, word: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=np.uint64)
    word = np.asarray(word, dtype=np.uint64)
    return np_finalize64(state + _NP_GOLDEN + word)


def np_hash64(columns: Sequence[np.ndarray | int]) -> np.ndarray:
    """Vectorized ``hash64``: fold the given word columns elementwise."""
    state = None
    for col in columns:
        col = np.asarray(col, dtype=np.uint64)
        if state is None:
            state = np.zeros(col.shape, dtype=np.uint64)
        state = np_chain64(state, col)
    if state is None:
        raise ValueError("np_hash64 needs at least one column")
    return state


def np_words(base: np.ndarray | int, counters: np.ndarray) -> np.ndarray:
    base = np.asarray(base, dtype=np.uint64)
    counters = np.asarray(counters, dtype=np.uint64)
    return np_finalize64(base + (counters + np.uint64(1)) * _NP_GOLDEN)


def np_uniform01(words: np.ndarray) -> np.ndarray:
    return (words >> np.uint64(11)).astype(np.float64) * 2.0**-53


class CounterRng:
    """Sequential view over one stream. Cheap, deterministic, not thread-safe."""

    def __init__(self, *key: int) -> None:
        self._base = hash64(*key) if key else hash64(0)
        self._counter = 0

    def next_word(self) -> int:
        word = word_at(self._base, self._counter)
        self._counter += 1
        return word

    def uniform(self) -> float:
        return uniform01(self.next_word())

    def randrange(self, n: int) -> int:
        """Integer in [0, n) via 128-bit multiply-shift (bias < n / 2**64)."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        return (self.next_word() * n) >> 64

    def choice(self, seq: Sequence):
        return seq[self.randrange(len(seq))]

    def token(self, length: int, alphabet: str) -> str:
        return "".join(alphabet[self.randrange(len(alphabet))] for _ in range(length))


def spawn_keys(base_key: int, count: int) -> np.ndarray:
    """Derive ``count`` independent stream keys from ``base_key`` by index."""
    idx = np.arange(count, dtype=np.uint64)
    return np_hash64([np.full(count, base_key & MASK64, dtype=np.uint64), idx])
