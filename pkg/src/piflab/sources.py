"""Seeded samplers for structured random symbol sources.

Two source families over integer alphabets:

* ``SvSourceSpec``: a length-n sequence over {0..A-1} in which every
  conditional probability, given any prefix, lies in the band
  [delta, 1 - (A-1) * delta].  The conditional at each prefix is fixed by a
  named policy, so the source is a well-defined process and sampling it is
  reproducible:

    - "uniform":        every conditional is exactly 1/A.
    - "extreme":        the symbol equal to (sum of prefix) mod A receives the
                        band ceiling 1 - (A-1) * delta, all others the floor
                        delta.  With delta = 0 this pins the whole sequence.
    - "seeded-random":  a simplex point is derived from a keyed hash of the
                        prefix (exponential weights from the hash, normalized)
                        and then contracted into the band via
                        p = delta + (1 - A * delta) * q.

* ``IndepSourceSpec``: independent positions, each with its own probability
  vector eta_i (zeros allowed; these are source laws, not targets).

All randomness flows through the package's counter-based generator; batch and
single-string sampling paths produce bit-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import CategoricalDist, DistributionError
from .prng import hash64, np_chain64, np_hash64, np_uniform01, np_words

_POLICIES = ("uniform", "extreme", "seeded-random")
_BAND_TOL = 1e-9
_VEC_TOL = 1e-9


class SourceError(ValueError):
    """Invalid source specification or sampler state."""


@dataclass(frozen=True)
class SvSourceSpec:
    """Band-bounded conditional source over {0..alphabet_size-1}."""

    alphabet_size: int
    delta: float
    length: int
    policy: str
    policy_seed: int = 0

    def __post_init__(self) -> None:
        if self.alphabet_size < 2:
            raise SourceError("alphabet_size must be >= 2")
        if not 0.0 <= self.delta <= 1.0 / self.alphabet_size:
            raise SourceError("delta must lie in [0, 1/alphabet_size]")
        if self.length < 1:
            raise SourceError("length must be >= 1")
        if self.policy not in _POLICIES:
            raise SourceError(f"policy must be one of {_POLICIES}")

    @property
    def band(self) -> tuple[float, float]:
        return (self.delta, 1.0 - (self.alphabet_size - 1) * self.delta)

    def to_dict(self) -> dict:
        return {
            "kind": "sv",
            "alphabet_size": self.alphabet_size,
            "delta": self.delta,
            "length": self.length,
            "policy": self.policy,
            "policy_seed": self.policy_seed,
        }


def _as_prob_vector(eta: Sequence[float] | CategoricalDist) -> tuple[float, ...]:
    if isinstance(eta, CategoricalDist):
        return eta.probs
    vec = tuple(float(p) for p in eta)
    if len(vec) < 1:
        raise SourceError("probability vector must be non-empty")
    if any(p < 0.0 for p in vec):
        raise SourceError("probabilities must be >= 0")
    if abs(math.fsum(vec) - 1.0) > _VEC_TOL:
        raise SourceError(f"probabilities sum to {math.fsum(vec)}, not 1")
    return vec


@dataclass(frozen=True)
class IndepSourceSpec:
    """Independent positions; etas[i] is the law of symbol i."""

    etas: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "etas", tuple(_as_prob_vector(eta) for eta in self.etas)
        )
        if len(self.etas) < 1:
            raise SourceError("need at least one position")

    @property
    def length(self) -> int:
        return len(self.etas)

    @classmethod
    def iid(
        cls, eta: Sequence[float] | CategoricalDist, length: int
    ) -> "IndepSourceSpec":
        vec = _as_prob_vector(eta)
        return cls(tuple(vec for _ in range(length)))

    def to_dict(self) -> dict:
        return {"kind": "independent", "etas": [list(e) for e in self.etas]}


def source_from_dict(data: dict) -> SvSourceSpec | IndepSourceSpec:
    kind = data.get("kind")
    if kind == "sv":
        return SvSourceSpec(
            alphabet_size=data["alphabet_size"],
            delta=data["delta"],
            length=data["length"],
            policy=data["policy"],
            policy_seed=data.get("policy_seed", 0),
        )
    if kind == "independent":
        return IndepSourceSpec(tuple(tuple(e) for e in data["etas"]))
    raise SourceError(f"unknown source kind {kind!r}")


def _band_check(spec: SvSourceSpec, probs: np.ndarray) -> None:
    lo, hi = spec.band
    if probs.min() < lo - _BAND_TOL or probs.max() > hi + _BAND_TOL:
        raise SourceError(
            f"conditional left the band [{lo}, {hi}]: "
            f"min={probs.min()}, max={probs.max()}"
        )


def _seeded_conditionals(spec: SvSourceSpec, states: np.ndarray) -> np.ndarray:
    """Band-contracted simplex points keyed by prefix-hash states (K,) -> (K, A)."""
    a = spec.alphabet_size
    words = np_words(states[:, None], np.arange(a, dtype=np.uint64)[None, :])
    u = np_uniform01(words)
    weights = -np.log1p(-u)
    totals = weights.sum(axis=1)
    q = np.empty_like(weights)
    ok = totals > 0.0
    q[ok] = weights[ok] / totals[ok, None]
    q[~ok] = 1.0 / a
    return spec.delta + (1.0 - a * spec.delta) * q


def sv_conditional(spec: SvSourceSpec, prefix: Sequence[int]) -> tuple[float, ...]:
    """The conditional distribution of the next symbol after ``prefix``."""
    a = spec.alphabet_size
    if any(not 0 <= x < a for x in prefix):
        raise SourceError("prefix symbols must lie in [0, alphabet_size)")
    lo, hi = spec.band
    if spec.policy == "uniform":
        probs = np.full(a, 1.0 / a)
    elif spec.policy == "extreme":
        probs = np.full(a, lo)
        probs[sum(prefix) % a] = hi
    else:
        state = np.array([hash64(spec.policy_seed, *prefix)], dtype=np.uint64)
        probs = _seeded_conditionals(spec, state)[0]
    _band_check(spec, probs)
    return tuple(float(p) for p in probs)


def sample_sv_batch(spec: SvSourceSpec, seeds: Sequence[int]) -> np.ndarray:
    """Sample one string per seed; returns an int64 array of shape (K, n)."""
    k = len(seeds)
    if k == 0:
        raise SourceError("need at least one seed")
    a, n = spec.alphabet_size, spec.length
    lo, hi = spec.band
    trial_base = np_hash64([np.asarray(seeds, dtype=np.uint64)])
    policy_state = np.full(k, hash64(spec.policy_seed), dtype=np.uint64)
    running = np.zeros(k, dtype=np.int64)
    out = np.empty((k, n), dtype=np.int64)
    rows = np.arange(k)
    for i in range(n):
        if spec.policy == "uniform":
            probs = np.full((k, a), 1.0 / a)
        elif spec.policy == "extreme":
            probs = np.full((k, a), lo)
            probs[rows, running % a] = hi
        else:
            probs = _seeded_conditionals(spec, policy_state)
        _band_check(spec, probs)
        u = np_uniform01(np_words(trial_base, np.full(k, i, dtype=np.uint64)))
        cdf = np.cumsum(probs, axis=1)
        sym = np.minimum((u[:, None] >= cdf).sum(axis=1), a - 1)
        out[:, i] = sym
        running += sym
        policy_state = np_chain64(policy_state, sym.astype(np.uint64))
    return out


def sample_sv_string(spec: SvSourceSpec, seed: int) -> tuple[int, ...]:
    """Sample one string; identical to row 0 of a batch with the same seed."""
    return tuple(int(x) for x in sample_sv_batch(spec, [seed])[0])


def sample_indep_batch(spec: IndepSourceSpec, seeds: Sequence[int]) -> np.ndarray:
    """Sample one string per seed from the independent source."""
    k = len(seeds)
    if k == 0:
        raise SourceError("need at least one seed")
    n = spec.length
    trial_base = np_hash64([np.asarray(seeds, dtype=np.uint64)])
    out = np.empty((k, n), dtype=np.int64)
    for i, eta in enumerate(spec.etas):
        cdf = np.cumsum(np.asarray(eta, dtype=np.float64))
        u = np_uniform01(np_words(trial_base, np.full(k, i, dtype=np.uint64)))
        sym = np.minimum(np.searchsorted(cdf, u, side="right"), len(eta) - 1)
        out[:, i] = sym
    return out


def sample_indep_string(spec: IndepSourceSpec, seed: int) -> tuple[int, ...]:
    return tuple(int(x) for x in sample_indep_batch(spec, [seed])[0])


def sv_renyi_entropy_bounds(
    alphabet_size: int, delta: float, length: int
) -> tuple[float, float]:
    """Bounds on the collision (Renyi-2) entropy of the string law, in bits.

    lower = -n * log2((1 - (A-1) * delta)^2 + (A-1) * delta^2)
    upper =  n * log2(A)
    """
    spec = SvSourceSpec(alphabet_size, delta, length, "uniform")
    a, n = spec.alphabet_size, spec.length
    base = (1.0 - (a - 1) * delta) ** 2 + (a - 1) * delta**2
    return -n * math.log2(base), n * math.log2(a)


def embed_mod(eta: Sequence[float], modulus: int) -> np.ndarray:
    """Push a law on {0..A-1} to Z_modulus by reducing outcomes mod modulus."""
    if modulus < 2:
        raise SourceError("modulus must be >= 2")
    vec = np.asarray(eta, dtype=np.float64)
    out = np.zeros(modulus)
    for j, p in enumerate(vec):
        out[j % modulus] += p
    return out


def exact_sum_mod_distribution(spec: IndepSourceSpec, modulus: int) -> np.ndarray:
    """Exact law of (sum of symbols) mod ``modulus`` via circular convolution.

    Returns a probability vector indexed by residue; the entries sum to 1
    within 1e-12.  Cost is O(n * modulus * alphabet).
    """
    law = np.zeros(modulus)
    law[0] = 1.0
    for eta in spec.etas:
        step = embed_mod(eta, modulus)
        new = np.zeros(modulus)
        for j in range(modulus):
            if step[j] != 0.0:
                new += step[j] * np.roll(law, j)
        law = new
    if abs(law.sum() - 1.0) > 1e-12:
        raise SourceError(f"convolution mass drifted to {law.sum()}")
    return law


def sum_law_as_dist(law: np.ndarray) -> CategoricalDist:
    """Wrap an exact sum law as a labeled distribution (requires positivity)."""
    labels = tuple(str(i) for i in range(len(law)))
    try:
        return CategoricalDist(labels, tuple(float(p) for p in law))
    except DistributionError as exc:
        raise SourceError(f"law is not a valid target: {exc}") from exc
