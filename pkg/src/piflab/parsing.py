"""Rule-based response parsing: tagged block extraction and answer matching.

``parse_tagged`` returns the trimmed payload of the first well-formed
``<tag>...</tag>`` block, or None when no closed block exists.

``parse_pif_answer`` resolves the answer block against a label set.  The
payload is trimmed, casefolded, and stripped of surrounding punctuation,
then matched (1) by exact equality with a normalized label, falling back to
(2) unique whole-word containment of a label in the payload.  Every failure
mode raises a dedicated error type, so any input yields exactly one of:
a label, MissingTagError, NoMatchError, or AmbiguousMatchError.
"""

from __future__ import annotations

import re
import string
from typing import Sequence


class ParseError(ValueError):
    """Base class for response parsing failures."""

    def __init__(self, message: str, raw_text: str = "") -> None:
        super().__init__(message)
        self.raw_text = raw_text


class MissingTagError(ParseError):
    """No well-formed tagged block found."""


class NoMatchError(ParseError):
    """The answer payload matches no label."""


class AmbiguousMatchError(ParseError):
    """The answer payload matches more than one label."""


_STRIP_CHARS = string.whitespace + string.punctuation


def parse_tagged(text: str, tag: str) -> str | None:
    """First well-formed <tag>...</tag> payload, trimmed; None if absent."""
    pattern = re.compile(
        f"<{re.escape(tag)}>(.*?)</{re.escape(tag)}>", re.DOTALL
    )
    match = pattern.search(text)
    if match is None:
        return None
    return match.group(1).strip()


def normalize_answer(text: str) -> str:
    """Trim, strip surrounding punctuation, casefold."""
    return text.strip().strip(_STRIP_CHARS).casefold()


def parse_pif_answer(text: str, labels: Sequence[str]) -> str:
    """Resolve the <answer> block of ``text`` to one of ``labels``."""
    if len(labels) == 0:
        raise ValueError("labels must be non-empty")
    payload = parse_tagged(text, "answer")
    if payload is None:
        raise MissingTagError("no well-formed <answer> block", raw_text=text)
    normalized = normalize_answer(payload)
    exact = [l for l in labels if normalized == l.casefold()]
    if len(exact) == 1:
        return exact[0]
    if len(exact) > 1:
        raise AmbiguousMatchError(
            f"answer {payload!r} equals several labels", raw_text=text
        )
    contained = [
        l
        for l in labels
        if re.search(
            r"(?<!\w)" + re.escape(l.casefold()) + r"(?!\w)", normalized
        )
    ]
    if len(contained) == 1:
        return contained[0]
    if len(contained) > 1:
        raise AmbiguousMatchError(
            f"answer {payload!r} contains several labels", raw_text=text
        )
    raise NoMatchError(f"answer {payload!r} matches no label", raw_text=text)
