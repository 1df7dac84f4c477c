"""Sequence complexity measures: LZ76 phrase counting and DEFLATE ratio.

``lz76_phrase_count`` uses the exhaustive-history parsing: scanning left to
right, the current phrase keeps growing while it can be copied from the
extended history (everything before the phrase plus the phrase minus its last
symbol); each failure, and the final pending chunk, closes a phrase.

``normalized_lz`` divides by the asymptotic phrase count of an unpredictable
sequence: c(n) * log_alpha(n) / n.

``compression_ratio`` is compressed size over original size under a
DEFLATE-format compressor (zlib) at its default level.  Tiny inputs may
exceed 1 because of container overhead.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Sequence


class ComplexityError(ValueError):
    """Invalid complexity-measure input."""


@dataclass(frozen=True)
class ComplexityReport:
    phrase_count: int
    normalized_lz: float
    original_bytes: int
    compressed_bytes: int
    compression_ratio: float

    def to_dict(self) -> dict:
        return {
            "phrase_count": self.phrase_count,
            "normalized_lz": self.normalized_lz,
            "original_bytes": self.original_bytes,
            "compressed_bytes": self.compressed_bytes,
            "compression_ratio": self.compression_ratio,
        }


def lz76_phrase_count(s: str) -> int:
    """Number of phrases in the exhaustive-history parsing of ``s``."""
    n = len(s)
    if n == 0:
        raise ComplexityError("sequence must be non-empty")
    count = 1
    pos = 1
    while pos < n:
        length = 1
        while pos + length <= n and s[pos : pos + length] in s[: pos + length - 1]:
            length += 1
        count += 1
        pos += length
    return count


def normalized_lz(s: str, alphabet_size: int) -> float:
    """c(n) * log_alpha(n) / n; about 1 for unpredictable sequences."""
    if alphabet_size < 2:
        raise ComplexityError("alphabet_size must be >= 2")
    n = len(s)
    if n < 2:
        raise ComplexityError("need at least two symbols")
    return lz76_phrase_count(s) * (math.log(n) / math.log(alphabet_size)) / n


def compression_ratio(data: bytes) -> float:
    """len(deflate(data)) / len(data) at the default compression level."""
    if len(data) == 0:
        raise ComplexityError("data must be non-empty")
    return len(zlib.compress(data)) / len(data)


def analyze(s: str, alphabet_size: int | None = None) -> ComplexityReport:
    """All measures for one sequence.

    When ``alphabet_size`` is omitted, the number of distinct symbols
    (at least 2) is used for the normalization.
    """
    if len(s) < 2:
        raise ComplexityError("need at least two symbols")
    alpha = alphabet_size if alphabet_size is not None else max(2, len(set(s)))
    raw = s.encode("utf-8")
    compressed = len(zlib.compress(raw))
    return ComplexityReport(
        phrase_count=lz76_phrase_count(s),
        normalized_lz=normalized_lz(s, alpha),
        original_bytes=len(raw),
        compressed_bytes=compressed,
        compression_ratio=compressed / len(raw),
    )
