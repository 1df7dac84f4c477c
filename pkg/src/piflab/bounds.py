"""Closed-form bounds on how far extracted values sit from uniform.

Two bound families, each reported as a ``BoundReport`` whose value is the sum
of a distribution term and a finite-sample term:

* ``sv_hash_bound``: strings from a band-bounded conditional source over an
  alphabet of size A are hashed into M buckets with a pairwise-independent
  affine family.  The distribution term follows from the leftover hash lemma
  driven by the source's collision entropy,

      sqrt(M) / (2 * delta'') * base^(n/2),
      base = (1 - (A-1) * delta)^2 + (A-1) * delta^2,

  and holds for all but a delta''-fraction of hash draws.

* ``sum_mod_bound``: independent symbols are summed mod M.  For prime M the
  distribution term is

      sqrt(M - 1) / 2 * prod_i (2 * tv(eta_i, uniform on Z_M)),

  and for composite M the divisor form of ``sum_mod_bound_general`` is used:

      1/2 * sqrt(sum_{d | M, d > 1} totient(d)
                 * prod_i (2 * tv(push_d(eta_i), uniform on Z_d))^2),

  where push_d reduces a law on Z_M to Z_d.  A sharper Fourier variant
  replaces each totient(d) * prod(...)^2 with the sum over t coprime to d of
  prod_i |fourier coefficient t of push_d(eta_i)|^2.

The finite-sample term is the Weissman-style empirical deviation

    sqrt( ln((2^M - 2) / delta') / (K * phi(pi)) ),

with phi(x) = ln((1-x)/x) / (1 - 2x) (continuously extended to phi(1/2) = 2)
and pi the largest mass m such that some bucket subset S has
min(P(S), 1 - P(S)) = m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import CategoricalDist, EmpiricalDist
from .extractors import is_prime
from .sources import IndepSourceSpec, embed_mod, exact_sum_mod_distribution

_PHI_SERIES_CUTOFF = 1e-6


class BoundError(ValueError):
    """Invalid bound parameters."""


class UnsupportedSizeError(BoundError):
    """Exact subset enumeration requested beyond its supported size."""


@dataclass(frozen=True)
class BoundReport:
    """A bound value with its named components and the inputs that set them."""

    bound_value: float
    term_breakdown: dict
    params: dict

    def to_dict(self) -> dict:
        return {
            "bound_value": self.bound_value,
            "term_breakdown": dict(self.term_breakdown),
            "params": dict(self.params),
        }


def _as_probs(dist) -> np.ndarray:
    if isinstance(dist, (CategoricalDist, EmpiricalDist)):
        return np.asarray(dist.probs, dtype=np.float64)
    return np.asarray(dist, dtype=np.float64)


def weissman_phi(x: float) -> float:
    """phi(x) = ln((1-x)/x) / (1-2x) on (0, 1/2]; phi(1/2) = 2 by continuity.

    Near the removable singularity (|x - 1/2| < 1e-6) the even series
    2 * (1 + u^2/3 + u^4/5), u = 1 - 2x, is used.
    """
    if not 0.0 < x <= 0.5:
        raise BoundError("phi is defined for 0 < x <= 1/2")
    u = 1.0 - 2.0 * x
    if abs(x - 0.5) < _PHI_SERIES_CUTOFF:
        return 2.0 * (1.0 + u * u / 3.0 + u**4 / 5.0)
    return math.log((1.0 - x) / x) / u


def balanced_subset_mass(dist) -> float:
    """max over subsets S of min(P(S), 1 - P(S)).

    Equal to 1/2 - min_S |P(S) - 1/2|.  Uniform inputs use the closed form
    floor(m/2) / m for any size; other inputs are enumerated exactly via a
    meet-in-the-middle subset-sum search, supported up to m = 24.
    """
    probs = _as_probs(dist)
    m = len(probs)
    if m < 2:
        raise BoundError("need at least two outcomes")
    if np.ptp(probs) <= 1e-12:
        return (m // 2) / m
    if m > 24:
        raise UnsupportedSizeError(
            f"exact subset enumeration supports up to 24 outcomes, got {m}"
        )
    left, right = probs[: m // 2], probs[m // 2 :]

    def _subset_sums(vec: np.ndarray) -> np.ndarray:
        sums = np.zeros(1)
        for p in vec:
            sums = np.concatenate([sums, sums + p])
        return sums

    sums_l = _subset_sums(left)
    sums_r = np.sort(_subset_sums(right))
    targets = 0.5 - sums_l
    idx = np.searchsorted(sums_r, targets)
    best = math.inf
    for shift in (-1, 0):
        j = np.clip(idx + shift, 0, len(sums_r) - 1)
        best = min(best, np.abs(sums_l + sums_r[j] - 0.5).min())
    return 0.5 - best


def finite_sample_term(
    buckets: int, trials: int, balanced_mass: float, delta_prime: float
) -> float:
    """sqrt( ln((2^M - 2)/delta') / (K * phi(pi)) ), computed overflow-safe."""
    if buckets < 2:
        raise BoundError("buckets must be >= 2")
    if trials < 1:
        raise BoundError("trials must be >= 1")
    if not 0.0 < delta_prime < 1.0:
        raise BoundError("delta_prime must lie in (0, 1)")
    # ln(2^M - 2) = M * ln 2 + ln(1 - 2^(1-M)) avoids forming 2^M.
    log_subsets = buckets * math.log(2.0) + math.log1p(-(2.0 ** (1 - buckets)))
    return math.sqrt(
        (log_subsets - math.log(delta_prime)) / (trials * weissman_phi(balanced_mass))
    )


def collision_base(alphabet_size: int, delta: float) -> float:
    """Per-symbol collision mass ceiling (1-(A-1)d)^2 + (A-1)d^2 for the band."""
    if alphabet_size < 2:
        raise BoundError("alphabet_size must be >= 2")
    if not 0.0 <= delta <= 1.0 / alphabet_size:
        raise BoundError("delta must lie in [0, 1/alphabet_size]")
    a = alphabet_size
    return (1.0 - (a - 1) * delta) ** 2 + (a - 1) * delta**2


def sv_hash_bound(
    alphabet_size: int,
    delta: float,
    length: int,
    buckets: int,
    trials: int,
    delta_prime: float,
    delta_dblprime: float,
) -> BoundReport:
    """Bound on the empirical TV to uniform after affine hashing into buckets.

    The finite-sample term plugs in the balanced mass of the uniform bucket
    law, floor(M/2)/M; the hashed law it stands in for is within the (tiny)
    distribution term of uniform.
    """
    if length < 1:
        raise BoundError("length must be >= 1")
    if buckets < 2:
        raise BoundError("buckets must be >= 2")
    if not 0.0 < delta_dblprime < 1.0:
        raise BoundError("delta_dblprime must lie in (0, 1)")
    base = collision_base(alphabet_size, delta)
    log_first = (
        0.5 * math.log(buckets)
        - math.log(2.0 * delta_dblprime)
        + 0.5 * length * math.log(base)
    )
    first = math.exp(log_first)
    pi = (buckets // 2) / buckets
    fs = finite_sample_term(buckets, trials, pi, delta_prime)
    return BoundReport(
        bound_value=first + fs,
        term_breakdown={"first_term": first, "finite_sample_term": fs},
        params={
            "alphabet_size": alphabet_size,
            "delta": delta,
            "length": length,
            "buckets": buckets,
            "trials": trials,
            "delta_prime": delta_prime,
            "delta_dblprime": delta_dblprime,
            "balanced_mass": pi,
        },
    )


def pushforward_mod(eta: Sequence[float], divisor: int) -> np.ndarray:
    """Reduce a law on Z_M to Z_d for d | M by summing residue classes."""
    vec = np.asarray(eta, dtype=np.float64)
    m = len(vec)
    if divisor < 1 or m % divisor != 0:
        raise BoundError(f"{divisor} does not divide the modulus {m}")
    return vec.reshape(m // divisor, divisor).sum(axis=0)


def dft_magnitudes(eta: Sequence[float]) -> np.ndarray:
    """|sum_x eta(x) e^(2 pi i k x / d)| for k = 0..d-1; index 0 is always 1."""
    return np.abs(np.fft.fft(np.asarray(eta, dtype=np.float64)))


def divisors(n: int) -> tuple[int, ...]:
    out = [d for d in range(1, n + 1) if n % d == 0]
    return tuple(out)


def euler_phi(n: int) -> int:
    count = 0
    for t in range(1, n + 1):
        if math.gcd(t, n) == 1:
            count += 1
    return count


def _tv_to_uniform(vec: np.ndarray) -> float:
    return 0.5 * float(np.abs(vec - 1.0 / len(vec)).sum())


def _embedded_etas(etas: Sequence[Sequence[float]], modulus: int) -> list[np.ndarray]:
    if len(etas) < 1:
        raise BoundError("need at least one symbol law")
    return [embed_mod(eta, modulus) for eta in etas]


def sum_mod_bound_general(etas: Sequence[Sequence[float]], modulus: int) -> BoundReport:
    """Divisor-sum distribution bound for sums mod M (any M >= 2).

    ``term_breakdown`` carries both the totient form (the bound value) and
    the sharper Fourier form.
    """
    if modulus < 2:
        raise BoundError("modulus must be >= 2")
    embedded = _embedded_etas(etas, modulus)
    totient_sum = 0.0
    fourier_sum = 0.0
    for d in divisors(modulus):
        if d <= 1:
            continue
        pushed = [pushforward_mod(vec, d) for vec in embedded]
        prod_tv = 1.0
        for vec in pushed:
            prod_tv *= 2.0 * _tv_to_uniform(vec)
        totient_sum += euler_phi(d) * prod_tv**2
        mags = [dft_magnitudes(vec) for vec in pushed]
        for t in range(1, d):
            if math.gcd(t, d) != 1:
                continue
            prod_sq = 1.0
            for mag in mags:
                prod_sq *= float(mag[t]) ** 2
            fourier_sum += prod_sq
    totient_form = 0.5 * math.sqrt(totient_sum)
    fourier_form = 0.5 * math.sqrt(fourier_sum)
    return BoundReport(
        bound_value=totient_form,
        term_breakdown={
            "first_term": totient_form,
            "fourier_form": fourier_form,
            "finite_sample_term": 0.0,
        },
        params={"modulus": modulus, "positions": len(embedded)},
    )


def sum_mod_bound(
    etas: Sequence[Sequence[float]],
    modulus: int,
    trials: int,
    delta_prime: float,
) -> BoundReport:
    """Distribution term plus finite-sample term for sums mod M.

    Prime M uses sqrt(M-1)/2 * prod(2 * tv); composite M routes through the
    general divisor form.  The finite-sample term plugs in the balanced mass
    of the exact sum law (computable here by convolution) when M <= 24, and
    the uniform closed form otherwise.
    """
    if modulus < 2:
        raise BoundError("modulus must be >= 2")
    embedded = _embedded_etas(etas, modulus)
    if is_prime(modulus):
        log_terms = []
        zero = False
        for vec in embedded:
            tv = 2.0 * _tv_to_uniform(vec)
            if tv == 0.0:
                zero = True
                break
            log_terms.append(math.log(tv))
        if zero:
            first = 0.0
        else:
            first = math.exp(
                0.5 * math.log(modulus - 1) - math.log(2.0) + math.fsum(log_terms)
            )
        route = "prime"
    else:
        first = sum_mod_bound_general(etas, modulus).bound_value
        route = "composite"
    spec = IndepSourceSpec(tuple(tuple(float(p) for p in eta) for eta in etas))
    if modulus <= 24:
        pi = balanced_subset_mass(exact_sum_mod_distribution(spec, modulus))
    else:
        pi = (modulus // 2) / modulus
    pi = max(pi, 1e-12)
    fs = finite_sample_term(modulus, trials, pi, delta_prime)
    return BoundReport(
        bound_value=first + fs,
        term_breakdown={"first_term": first, "finite_sample_term": fs},
        params={
            "modulus": modulus,
            "positions": len(embedded),
            "trials": trials,
            "delta_prime": delta_prime,
            "route": route,
            "balanced_mass": pi,
        },
    )


def renyi_entropy(dist) -> float:
    """Collision (Renyi-2) entropy in bits: -log2 sum_i p_i^2."""
    probs = _as_probs(dist)
    return -math.log2(float(np.square(probs).sum()))


def min_entropy(dist) -> float:
    """Min-entropy in bits: -log2 max_i p_i."""
    probs = _as_probs(dist)
    return -math.log2(float(probs.max()))
