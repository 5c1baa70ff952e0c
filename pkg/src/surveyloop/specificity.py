"""Rule-based detection of concrete detail in free-text responses.

Three binary signals are extracted from the raw (case-preserving) text:

* temporal: weekday or month names, a small relative-time lexicon,
  "last"/"next" followed by a time unit, four-digit years, clock times.
* spatial: a location preposition (in/at/on/near) followed within two
  tokens by a capitalized token (date words and the pronoun "I" excluded)
  or anywhere later by a place word from the spatial lexicon.
* entities: capitalized tokens that do not open a sentence (excluding the
  pronoun "I" and its contractions), or course-code tokens such as "CS101".

Each signal reports presence, not counts. Word lists ship as plain text
files and can be swapped via constructor paths.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Protocol

TEMPORAL_RESOURCE = "temporal_words.txt"
SPATIAL_RESOURCE = "spatial_words.txt"

LOCATION_PREPOSITIONS = frozenset({"in", "at", "on", "near"})

# Units that make "last X" / "next X" a concrete time reference.
TIME_UNITS = frozenset({
    "week", "weeks", "weekend", "month", "months", "year", "years",
    "semester", "term", "quarter", "night", "summer", "fall", "spring",
    "winter", "morning", "evening",
})

_YEAR_RE = re.compile(r"^(19|20)\d{2}$")
_CLOCK_RE = re.compile(r"^\d{1,2}(:\d{2})?(am|pm)$|^\d{1,2}:\d{2}$", re.IGNORECASE)
_COURSE_CODE_RE = re.compile(r"^[A-Za-z]{2,4}-?\d{2,4}$")

_SENTENCE_END = (".", "!", "?")


@dataclass(frozen=True)
class SpecificityFlags:
    """Presence indicators for the three detail categories."""

    entities: int
    temporal: int
    spatial: int

    def __post_init__(self) -> None:
        for name in ("entities", "temporal", "spatial"):
            if getattr(self, name) not in (0, 1):
                raise ValueError(f"{name} flag must be 0 or 1")

    @property
    def total(self) -> int:
        return self.entities + self.temporal + self.spatial


class SpecificityDetector(Protocol):
    """Anything that maps raw text to three presence flags."""

    concurrency_safe: bool

    def detect(self, raw: str) -> SpecificityFlags: ...


def _load_words(path: str | Path | None, resource: str) -> frozenset[str]:
    if path is None:
        text = resources.files("surveyloop.data").joinpath(resource).read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def _strip_token(token: str) -> str:
    return token.strip(string.punctuation)


def _is_capitalized(token: str) -> bool:
    return bool(token) and token[0].isupper()


def _is_pronoun_i(token: str) -> bool:
    return token == "I" or token.startswith("I'")


class RuleSpecificityDetector:
    """Deterministic detector driven by word lists and token patterns."""

    concurrency_safe = True

    def __init__(
        self,
        temporal_path: str | Path | None = None,
        spatial_path: str | Path | None = None,
    ):
        self.temporal_words = _load_words(temporal_path, TEMPORAL_RESOURCE)
        self.spatial_words = _load_words(spatial_path, SPATIAL_RESOURCE)

    def detect(self, raw: str) -> SpecificityFlags:
        raw_tokens = raw.split()
        tokens = [_strip_token(t) for t in raw_tokens]
        lower = [t.lower() for t in tokens]
        return SpecificityFlags(
            entities=int(self._has_entity(raw_tokens, tokens)),
            temporal=int(self._has_temporal(lower)),
            spatial=int(self._has_spatial(tokens, lower)),
        )

    def _has_temporal(self, lower: list[str]) -> bool:
        for i, tok in enumerate(lower):
            if tok in self.temporal_words:
                return True
            if tok in ("last", "next") and i + 1 < len(lower) and lower[i + 1] in TIME_UNITS:
                return True
            if _YEAR_RE.match(tok) or _CLOCK_RE.match(tok):
                return True
        return False

    def _has_spatial(self, tokens: list[str], lower: list[str]) -> bool:
        for i, tok in enumerate(lower):
            if tok not in LOCATION_PREPOSITIONS:
                continue
            # Lexicon place words count anywhere later ("at the dining hall"),
            # noun phrases can push them past a fixed window.
            for j in range(i + 1, len(tokens)):
                if lower[j] in self.spatial_words:
                    return True
            for j in range(i + 1, min(i + 3, len(tokens))):
                # Capitalized follower suggests a named place, except when it
                # is a date word ("on Monday" is temporal, not spatial) or the
                # pronoun "I", which is capitalized by orthography alone.
                if (
                    _is_capitalized(tokens[j])
                    and lower[j] not in self.temporal_words
                    and not _is_pronoun_i(tokens[j])
                ):
                    return True
        return False

    def _has_entity(self, raw_tokens: list[str], tokens: list[str]) -> bool:
        sentence_start = True
        for raw_tok, tok in zip(raw_tokens, tokens):
            if tok:
                if _COURSE_CODE_RE.match(tok):
                    return True
                if not sentence_start and _is_capitalized(tok) and not _is_pronoun_i(tok):
                    return True
            sentence_start = raw_tok.endswith(_SENTENCE_END)
        return False
