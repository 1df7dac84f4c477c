"""Categorical targets, empirical counts, and the scores that compare them.

A target is a strictly positive probability vector over an ordered set of
distinct action labels.  An empirical distribution is a vector of counts over
the same labels.  All comparison scores require the two label tuples to be
identical, in identical order.

Scores (natural log throughout, with the convention 0 * ln 0 = 0):

* total variation       tv(p, q)  = (1/2) * sum_i |p_i - q_i|
* KL divergence         kl(p, q)  = sum_i p_i * ln(p_i / q_i)
* Jensen-Shannon        js(p, q)  = (kl(p, m) + kl(q, m)) / 2,  m = (p + q)/2
* Cohen's effect size   w(o, e)   = sqrt(sum_i (o_i - e_i)^2 / e_i)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

_SUM_TOL = 1e-9


class DistributionError(ValueError):
    """Invalid distribution contents."""


class LabelMismatchError(DistributionError):
    """Two distributions do not share an identical ordered label set."""


class UnknownActionError(DistributionError):
    """An action string does not appear in the label set."""

    def __init__(self, action: str, index: int) -> None:
        super().__init__(f"action {action!r} at position {index} is not a known label")
        self.action = action
        self.index = index


@dataclass(frozen=True)
class CategoricalDist:
    """Target distribution: distinct labels, strictly positive probs, sum 1."""

    labels: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(str(l) for l in self.labels))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if len(self.labels) < 2:
            raise DistributionError("need at least two labels")
        if len(set(self.labels)) != len(self.labels):
            raise DistributionError("labels must be distinct")
        if len(self.labels) != len(self.probs):
            raise DistributionError("labels and probs differ in length")
        if any(p <= 0.0 for p in self.probs):
            raise DistributionError("every probability must be > 0")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > _SUM_TOL:
            raise DistributionError(f"probabilities sum to {total}, not 1")

    @property
    def m(self) -> int:
        return len(self.labels)

    @classmethod
    def uniform(cls, labels: Sequence[str]) -> "CategoricalDist":
        n = len(labels)
        return cls(tuple(labels), tuple(1.0 / n for _ in range(n)))

    @classmethod
    def over_residues(cls, modulus: int) -> "CategoricalDist":
        """Uniform target over Z_modulus with decimal-string labels."""
        return cls.uniform(tuple(str(i) for i in range(modulus)))

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "probs": list(self.probs)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CategoricalDist":
        try:
            return cls(tuple(data["labels"]), tuple(data["probs"]))
        except KeyError as exc:
            raise DistributionError(f"missing key {exc.args[0]!r}") from exc

    @classmethod
    def from_json(cls, text: str) -> "CategoricalDist":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class EmpiricalDist:
    """Observed counts over an ordered label set; total must be >= 1."""

    labels: tuple[str, ...]
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(str(l) for l in self.labels))
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if len(self.labels) < 2:
            raise DistributionError("need at least two labels")
        if len(set(self.labels)) != len(self.labels):
            raise DistributionError("labels must be distinct")
        if len(self.labels) != len(self.counts):
            raise DistributionError("labels and counts differ in length")
        if any(c < 0 for c in self.counts):
            raise DistributionError("counts must be >= 0")
        if sum(self.counts) < 1:
            raise DistributionError("total count must be >= 1")

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def probs(self) -> tuple[float, ...]:
        total = self.total
        return tuple(c / total for c in self.counts)

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "counts": list(self.counts)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "EmpiricalDist":
        try:
            return cls(tuple(data["labels"]), tuple(data["counts"]))
        except KeyError as exc:
            raise DistributionError(f"missing key {exc.args[0]!r}") from exc

    @classmethod
    def from_json(cls, text: str) -> "EmpiricalDist":
        return cls.from_dict(json.loads(text))


Dist = Union[CategoricalDist, EmpiricalDist]


def probs_of(dist: Dist) -> tuple[float, ...]:
    """Probability view of either distribution kind."""
    return dist.probs


def _check_labels(p: Dist, q: Dist) -> None:
    if p.labels != q.labels:
        raise LabelMismatchError(f"label sets differ: {p.labels} vs {q.labels}")


def tv_distance(p: Dist, q: Dist) -> float:
    """Total variation distance, in [0, 1]."""
    _check_labels(p, q)
    return 0.5 * math.fsum(abs(a - b) for a, b in zip(probs_of(p), probs_of(q)))


def kl_divergence(p: Dist, target: CategoricalDist) -> float:
    """KL(p || target) in nats; terms with p_i = 0 contribute 0."""
    _check_labels(p, target)
    if any(t <= 0.0 for t in probs_of(target)):
        raise DistributionError("KL target must be strictly positive")
    return math.fsum(
        a * math.log(a / b) for a, b in zip(probs_of(p), probs_of(target)) if a > 0.0
    )


def js_divergence(p: Dist, q: Dist) -> float:
    """Jensen-Shannon divergence in nats; symmetric, bounded by ln 2."""
    _check_labels(p, q)
    pa, qa = probs_of(p), probs_of(q)
    mid = tuple(0.5 * (a + b) for a, b in zip(pa, qa))

    def _kl_to_mid(xs: tuple[float, ...]) -> float:
        return math.fsum(x * math.log(x / m) for x, m in zip(xs, mid) if x > 0.0)

    return 0.5 * (_kl_to_mid(pa) + _kl_to_mid(qa))


def effect_size_w(observed: Dist, expected: CategoricalDist) -> float:
    """Cohen's w between an observed and an expected distribution."""
    _check_labels(observed, expected)
    if any(e <= 0.0 for e in probs_of(expected)):
        raise DistributionError("expected distribution must be strictly positive")
    return math.sqrt(
        math.fsum(
            (o - e) ** 2 / e for o, e in zip(probs_of(observed), probs_of(expected))
        )
    )


def empirical_from_actions(
    labels: Sequence[str], actions: Iterable[str]
) -> EmpiricalDist:
    """Tally an action sequence into counts over ``labels``."""
    labels = tuple(labels)
    index = {label: i for i, label in enumerate(labels)}
    counts = [0] * len(labels)
    for i, action in enumerate(actions):
        if action not in index:
            raise UnknownActionError(action, i)
        counts[index[action]] += 1
    return EmpiricalDist(labels, tuple(counts))


def summarize(values: Sequence[float]) -> tuple[float, float]:
    """Mean and sample standard deviation (n - 1); std is 0 for n = 1."""
    n = len(values)
    if n == 0:
        raise ValueError("summarize needs at least one value")
    mean = math.fsum(values) / n
    if n == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)
