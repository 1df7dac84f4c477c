"""Monte-Carlo checks that the closed-form bounds hold empirically.

Each verifier repeats an experiment ``reps`` times, counts how often the
empirical TV to uniform exceeds the bound, and passes when the violation
rate stays within the theoretical allowance plus a 3-sigma sampling margin:

    rate <= allowed + 3 * sqrt(allowed / reps)

where ``allowed`` is delta' + delta'' for the hashing bound and delta' for
the sum-mod bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .bounds import BoundError, sum_mod_bound, sv_hash_bound
from .extractors import sample_affine_params
from .prng import hash64, np_hash64
from .sources import (
    IndepSourceSpec,
    SvSourceSpec,
    exact_sum_mod_distribution,
    sample_indep_batch,
    sample_sv_batch,
)

DEFAULT_HASH_PRIME = 2147483647


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of a bound verification run."""

    repetitions: int
    violations: int
    violation_rate: float
    allowed_rate: float
    margin: float
    passed: bool
    bound_value: float
    per_rep_tv: tuple[float, ...]
    params: dict

    def to_dict(self) -> dict:
        return {
            "repetitions": self.repetitions,
            "violations": self.violations,
            "violation_rate": self.violation_rate,
            "allowed_rate": self.allowed_rate,
            "margin": self.margin,
            "passed": self.passed,
            "bound_value": self.bound_value,
            "per_rep_tv": list(self.per_rep_tv),
            "params": dict(self.params),
        }


def _empirical_tv_to_uniform(values: np.ndarray, buckets: int) -> float:
    counts = np.bincount(values, minlength=buckets)
    freq = counts / len(values)
    return 0.5 * float(np.abs(freq - 1.0 / buckets).sum())


def _finish(
    reps: int,
    tvs: list[float],
    bound: float,
    allowed: float,
    params: dict,
) -> VerificationReport:
    violations = sum(1 for tv in tvs if tv > bound)
    rate = violations / reps
    margin = 3.0 * math.sqrt(allowed / reps)
    return VerificationReport(
        repetitions=reps,
        violations=violations,
        violation_rate=rate,
        allowed_rate=allowed,
        margin=margin,
        passed=rate <= allowed + margin,
        bound_value=bound,
        per_rep_tv=tuple(tvs),
        params=params,
    )


def verify_sv_hash_bound(
    alphabet_size: int,
    delta: float,
    length: int,
    buckets: int,
    trials: int,
    delta_prime: float,
    delta_dblprime: float,
    reps: int,
    seed: int = 0,
    policy: str = "seeded-random",
    prime: int = DEFAULT_HASH_PRIME,
) -> VerificationReport:
    """Sample source strings, hash them with fresh affine parameters each
    repetition, and compare the empirical TV to uniform with the bound."""
    if reps < 1:
        raise BoundError("reps must be >= 1")
    spec = SvSourceSpec(alphabet_size, delta, length, policy, policy_seed=seed)
    report = sv_hash_bound(
        alphabet_size, delta, length, buckets, trials, delta_prime, delta_dblprime
    )
    bound = report.bound_value
    trial_idx = np.arange(trials, dtype=np.uint64)
    tvs = []
    for rep in range(reps):
        rep_key = hash64(seed, rep)
        a, b = sample_affine_params(prime, rep_key)
        seeds = np_hash64([np.full(trials, rep_key, dtype=np.uint64), trial_idx])
        strings = sample_sv_batch(spec, seeds)
        # Horner value of the symbol string mod p, then the affine map.
        h = np.zeros(trials, dtype=np.int64)
        for i in range(length):
            h = (h * alphabet_size + strings[:, i]) % prime
        hashed = ((a * h + b) % prime) % buckets
        tvs.append(_empirical_tv_to_uniform(hashed, buckets))
    allowed = delta_prime + delta_dblprime
    params = dict(report.params)
    params.update({"reps": reps, "seed": seed, "policy": policy, "prime": prime})
    return _finish(reps, tvs, bound, allowed, params)


def verify_sum_mod_bound(
    etas: Sequence[Sequence[float]],
    modulus: int,
    trials: int,
    delta_prime: float,
    reps: int,
    seed: int = 0,
) -> VerificationReport:
    """Sample independent symbol strings, sum them mod M, and compare the
    empirical TV to uniform with the bound.

    Also cross-checks the exact convolution law: its TV to uniform must not
    exceed the distribution term.
    """
    if reps < 1:
        raise BoundError("reps must be >= 1")
    spec = IndepSourceSpec(tuple(tuple(float(p) for p in eta) for eta in etas))
    report = sum_mod_bound(etas, modulus, trials, delta_prime)
    bound = report.bound_value
    first = report.term_breakdown["first_term"]
    law = exact_sum_mod_distribution(spec, modulus)
    exact_tv = 0.5 * float(np.abs(law - 1.0 / modulus).sum())
    exact_ok = exact_tv <= first + 1e-12
    trial_idx = np.arange(trials, dtype=np.uint64)
    tvs = []
    for rep in range(reps):
        rep_key = hash64(seed, rep)
        seeds = np_hash64([np.full(trials, rep_key, dtype=np.uint64), trial_idx])
        strings = sample_indep_batch(spec, seeds)
        sums = strings.sum(axis=1) % modulus
        tvs.append(_empirical_tv_to_uniform(sums, modulus))
    params = dict(report.params)
    params.update({"reps": reps, "seed": seed, "exact_tv": exact_tv})
    out = _finish(reps, tvs, bound, delta_prime, params)
    if not exact_ok:
        out = replace(out, passed=False)
    return out
