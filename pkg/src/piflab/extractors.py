"""Deterministic string-to-integer extractors and integer-to-label mappers.

An extractor turns a seed string into a value in a known range [0, R):

* sum_mod:      sum of Unicode code points, mod m.
* rolling_hash: Horner evaluation h <- (h * base + code) mod m.
* affine_hash:  Carter-Wegman style pairwise-independent family.  The string
  is reduced to x in Z_p via Horner with base 1114112 (the code-point space),
  then mapped to ((a * x + b) mod p) mod buckets, with p prime,
  a in [1, p - 1] and b in [0, p - 1].

A mapper turns a value in [0, R) into an action label:

* ModBucket:    index = value mod m; valid for uniform targets only.
* CdfThreshold: partition [0, N) into consecutive half-open blocks whose sizes
  are the largest-remainder rounding of N * p_i; the block containing the
  value selects the label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .distributions import CategoricalDist
from .prng import MASK64, hash64, word_at

CODE_POINT_SPACE = 0x110000

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class ExtractorError(ValueError):
    """Invalid extractor input or parameters."""


class MapperError(ValueError):
    """Invalid mapper input or parameters."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n < 2**64."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _check_nonempty(s: str) -> None:
    if not s:
        raise ExtractorError("seed string must be non-empty")


def sum_mod(s: str, modulus: int) -> int:
    """Sum of code points mod ``modulus``."""
    _check_nonempty(s)
    if modulus < 2:
        raise ExtractorError("modulus must be >= 2")
    return sum(ord(c) for c in s) % modulus


def rolling_hash(s: str, base: int, modulus: int) -> int:
    """Horner hash: h <- (h * base + code) mod modulus, over the code points."""
    _check_nonempty(s)
    if base < 2 or modulus < 2:
        raise ExtractorError("base and modulus must be >= 2")
    h = 0
    for c in s:
        h = (h * base + ord(c)) % modulus
    return h


def string_value_mod(s: str, p: int) -> int:
    """Base-1114112 integer value of ``s`` reduced mod ``p`` via Horner."""
    _check_nonempty(s)
    x = 0
    for c in s:
        x = (x * CODE_POINT_SPACE + ord(c)) % p
    return x


def _check_affine_params(p: int, a: int, b: int, buckets: int) -> None:
    if not is_prime(p):
        raise ExtractorError(f"modulus {p} is not prime")
    if not 1 <= a <= p - 1:
        raise ExtractorError("need 1 <= a <= p - 1")
    if not 0 <= b <= p - 1:
        raise ExtractorError("need 0 <= b <= p - 1")
    if not 2 <= buckets <= p:
        raise ExtractorError("need 2 <= buckets <= p")


def affine_hash(s: str, p: int, a: int, b: int, buckets: int) -> int:
    """((a * x + b) mod p) mod buckets with x the Horner value of ``s``."""
    _check_affine_params(p, a, b, buckets)
    x = string_value_mod(s, p)
    return affine_map(x, p, a, b, buckets)


def affine_map(x: int, p: int, a: int, b: int, buckets: int) -> int:
    """Affine hash of an already-reduced value x in Z_p."""
    return ((a * x + b) % p) % buckets


def sample_affine_params(p: int, seed: int) -> tuple[int, int]:
    """Deterministically draw a uniform (a, b), a in [1, p-1], b in [0, p-1].

    Rejection sampling over 64-bit words; for p = 2 this forces a = 1.
    """
    if not is_prime(p):
        raise ExtractorError(f"modulus {p} is not prime")
    if p >= 1 << 63:
        raise ExtractorError("prime too large for 64-bit sampling")
    base = hash64(seed & MASK64, p)

    def _draw(bound: int, counter_start: int) -> int:
        # Accept words below the largest multiple of ``bound`` in 2**64.
        limit = (1 << 64) - ((1 << 64) % bound)
        counter = counter_start
        while True:
            w = word_at(base, counter)
            counter += 1
            if w < limit:
                return w % bound

    a = 1 + _draw(p - 1, 0) if p > 2 else 1
    b = _draw(p, 1 << 20)
    return a, b


@dataclass(frozen=True)
class SumMod:
    modulus: int

    def __post_init__(self) -> None:
        if self.modulus < 2:
            raise ExtractorError("modulus must be >= 2")

    @property
    def range_size(self) -> int:
        return self.modulus

    def extract(self, s: str) -> int:
        return sum_mod(s, self.modulus)


@dataclass(frozen=True)
class RollingHash:
    base: int
    modulus: int

    def __post_init__(self) -> None:
        if self.base < 2 or self.modulus < 2:
            raise ExtractorError("base and modulus must be >= 2")

    @property
    def range_size(self) -> int:
        return self.modulus

    def extract(self, s: str) -> int:
        return rolling_hash(s, self.base, self.modulus)


@dataclass(frozen=True)
class AffineHash:
    prime: int
    a: int
    b: int
    buckets: int

    def __post_init__(self) -> None:
        _check_affine_params(self.prime, self.a, self.b, self.buckets)

    @property
    def range_size(self) -> int:
        return self.buckets

    def extract(self, s: str) -> int:
        return affine_hash(s, self.prime, self.a, self.b, self.buckets)


ExtractorSpec = Union[SumMod, RollingHash, AffineHash]

_EXTRACTOR_VARIANTS = {
    "sum_mod": SumMod,
    "rolling_hash": RollingHash,
    "affine_hash": AffineHash,
}


def extractor_to_dict(spec: ExtractorSpec) -> dict:
    for name, cls in _EXTRACTOR_VARIANTS.items():
        if isinstance(spec, cls):
            d = {"variant": name}
            d.update({k: getattr(spec, k) for k in spec.__dataclass_fields__})
            return d
    raise ExtractorError(f"unknown extractor {spec!r}")


def extractor_from_dict(data: dict) -> ExtractorSpec:
    try:
        variant = data["variant"]
    except KeyError:
        raise ExtractorError("extractor spec missing 'variant'") from None
    try:
        cls = _EXTRACTOR_VARIANTS[variant]
    except KeyError:
        raise ExtractorError(f"unknown extractor variant {variant!r}") from None
    kwargs = {k: v for k, v in data.items() if k != "variant"}
    return cls(**kwargs)


@dataclass(frozen=True)
class ModBucket:
    """index = value mod number-of-labels; uniform targets only."""

    def map(self, value: int, range_size: int, target: CategoricalDist) -> int:
        m = target.m
        if any(abs(p - 1.0 / m) > 1e-9 for p in target.probs):
            raise MapperError("ModBucket requires a uniform target")
        if value < 0 or value >= range_size:
            raise MapperError(f"value {value} outside [0, {range_size})")
        return value % m


@dataclass(frozen=True)
class CdfThreshold:
    """Largest-remainder CDF blocks over [0, resolution)."""

    resolution: int

    def __post_init__(self) -> None:
        if self.resolution < 2:
            raise MapperError("resolution must be >= 2")

    def map(self, value: int, range_size: int, target: CategoricalDist) -> int:
        if range_size != self.resolution:
            raise MapperError(
                f"extractor range {range_size} != mapper resolution {self.resolution}"
            )
        if value < 0 or value >= range_size:
            raise MapperError(f"value {value} outside [0, {range_size})")
        blocks = cdf_blocks(target, self.resolution)
        upper = 0
        for i, size in enumerate(blocks):
            upper += size
            if value < upper:
                return i
        raise MapperError("unreachable: blocks sum to resolution")


MapperSpec = Union[ModBucket, CdfThreshold]


def mapper_to_dict(spec: MapperSpec) -> dict:
    if isinstance(spec, ModBucket):
        return {"variant": "mod_bucket"}
    if isinstance(spec, CdfThreshold):
        return {"variant": "cdf_threshold", "resolution": spec.resolution}
    raise MapperError(f"unknown mapper {spec!r}")


def mapper_from_dict(data: dict) -> MapperSpec:
    variant = data.get("variant")
    if variant == "mod_bucket":
        return ModBucket()
    if variant == "cdf_threshold":
        try:
            return CdfThreshold(resolution=data["resolution"])
        except KeyError:
            raise MapperError("cdf_threshold spec missing 'resolution'") from None
    raise MapperError(f"unknown mapper variant {variant!r}")


def cdf_blocks(target: CategoricalDist, resolution: int) -> tuple[int, ...]:
    """Largest-remainder rounding of resolution * p_i; sizes sum exactly.

    Ties in the fractional parts are broken by label position, so the
    allocation is deterministic.
    """
    if resolution < target.m:
        raise MapperError("resolution must be >= number of labels")
    raw = [resolution * p for p in target.probs]
    sizes = [math.floor(r) for r in raw]
    leftover = resolution - sum(sizes)
    order = sorted(range(target.m), key=lambda i: (-(raw[i] - sizes[i]), i))
    for i in order[:leftover]:
        sizes[i] += 1
    return tuple(sizes)


def map_uniform_to_target(
    value: int, range_size: int, target: CategoricalDist, mapper: MapperSpec
) -> str:
    """Map a uniform value in [0, range_size) to a target label."""
    return target.labels[mapper.map(value, range_size, target)]


def extract_value(s: str, extractor: ExtractorSpec) -> tuple[int, int]:
    """Run an extractor; returns (value, range_size)."""
    return extractor.extract(s), extractor.range_size


def extract_action(
    s: str,
    extractor: ExtractorSpec,
    mapper: MapperSpec,
    target: CategoricalDist,
) -> str:
    """Full pipeline: seed string -> value -> action label."""
    value, range_size = extract_value(s, extractor)
    return map_uniform_to_target(value, range_size, target, mapper)
