"""Four-dimension quality scoring for a single free-text response.

A response is scored on length, self-disclosure, emotion, and specificity,
each normalized to [0, 1], then combined into a weighted composite. Length
and disclosure are capped at corpus 75th-percentile values (29 words, 3
first-person pronouns). Emotion is the magnitude of the sentiment compound;
specificity is the fraction of detail categories present.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Protocol

from .specificity import RuleSpecificityDetector, SpecificityDetector, SpecificityFlags

LENGTH_CAP_WORDS = 29
DISCLOSURE_CAP_PRONOUNS = 3

W_LENGTH = 0.20
W_DISCLOSURE = 0.20
W_EMOTION = 0.35
W_SPECIFICITY = 0.25

COMPOSITE_TOLERANCE = 1e-12

FIRST_PERSON_PRONOUNS = frozenset({
    "i", "me", "my", "mine", "myself",
    "we", "us", "our", "ours", "ourselves",
})


class ScoringError(Exception):
    """A dimension scorer failed; carries which dimension broke."""

    def __init__(self, dimension: str, message: str):
        super().__init__(f"{dimension}: {message}")
        self.dimension = dimension


class SentimentScorer(Protocol):
    """Anything producing a compound valence in [-1, 1] for raw text."""

    concurrency_safe: bool

    def compound(self, text: str) -> float: ...


def tokenize(raw: str) -> list[str]:
    """Whitespace split, strip edge punctuation, lowercase; drops empty residue."""
    tokens = []
    for tok in raw.split():
        stripped = tok.strip(string.punctuation)
        if stripped:
            tokens.append(stripped.lower())
    return tokens


@dataclass(frozen=True)
class ResponseText:
    """A raw response plus its deterministic tokenization."""

    raw: str
    tokens: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(tokenize(self.raw)))

    @property
    def word_count(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class LsdeScore:
    """Normalized dimension scores and their weighted composite."""

    length: float
    disclosure: float
    emotion: float
    specificity: float
    composite: float

    def __post_init__(self) -> None:
        for name in ("length", "disclosure", "emotion", "specificity", "composite"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} score {value} outside [0, 1]")
        expected = composite(self.length, self.disclosure, self.emotion, self.specificity)
        if abs(expected - self.composite) > COMPOSITE_TOLERANCE:
            raise ValueError(
                f"composite {self.composite} inconsistent with dimensions (expected {expected})"
            )


def normalize_length(text: ResponseText) -> float:
    """Word count against the 29-word cap."""
    return min(text.word_count / LENGTH_CAP_WORDS, 1.0)


def score_disclosure(text: ResponseText) -> float:
    """First-person pronoun count against the 3-pronoun cap."""
    count = sum(1 for tok in text.tokens if tok in FIRST_PERSON_PRONOUNS)
    return min(count / DISCLOSURE_CAP_PRONOUNS, 1.0)


def score_emotion(text: ResponseText, sentiment: SentimentScorer) -> float:
    """Magnitude of the sentiment compound for the raw (case-preserving) text."""
    try:
        value = sentiment.compound(text.raw)
    except Exception as exc:
        raise ScoringError("emotion", str(exc)) from exc
    if not -1.0 <= value <= 1.0:
        raise ScoringError("emotion", f"compound {value} outside [-1, 1]")
    return abs(value)


def score_specificity(
    text: ResponseText, detector: SpecificityDetector
) -> tuple[SpecificityFlags, float]:
    """Presence flags for the three detail categories and their mean."""
    try:
        flags = detector.detect(text.raw)
    except Exception as exc:
        raise ScoringError("specificity", str(exc)) from exc
    return flags, flags.total / 3


def composite(length: float, disclosure: float, emotion: float, specificity: float) -> float:
    """Weighted sum; weights are 0.20/0.20/0.35/0.25 and sum to one."""
    for name, value in (
        ("length", length),
        ("disclosure", disclosure),
        ("emotion", emotion),
        ("specificity", specificity),
    ):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} score {value} outside [0, 1]")
    return (
        W_LENGTH * length
        + W_DISCLOSURE * disclosure
        + W_EMOTION * emotion
        + W_SPECIFICITY * specificity
    )


@dataclass(frozen=True)
class ScoredResponse:
    """Score plus detector detail for one response.

    ``degraded`` lists dimensions replaced by 0.0 after a scorer failure;
    it is only ever non-empty in lenient mode.
    """

    text: ResponseText
    score: LsdeScore
    flags: SpecificityFlags
    degraded: frozenset[str] = frozenset()


class ResponseScorer:
    """Bundles the sentiment engine and specificity detector behind one call.

    Strict mode (default) propagates scorer failures as ScoringError; lenient
    mode substitutes 0.0 for the failing dimension and records it in
    ``degraded`` so callers can flag the exchange.
    """

    def __init__(
        self,
        sentiment: SentimentScorer | None = None,
        detector: SpecificityDetector | None = None,
        lenient: bool = False,
    ):
        if sentiment is None:
            from .sentiment import LexiconSentimentScorer

            sentiment = LexiconSentimentScorer()
        self.sentiment = sentiment
        self.detector = detector if detector is not None else RuleSpecificityDetector()
        self.lenient = lenient

    def score(self, raw: str) -> ScoredResponse:
        text = ResponseText(raw)
        degraded: set[str] = set()

        try:
            emotion = score_emotion(text, self.sentiment)
        except ScoringError:
            if not self.lenient:
                raise
            emotion = 0.0
            degraded.add("emotion")

        try:
            flags, spec = score_specificity(text, self.detector)
        except ScoringError:
            if not self.lenient:
                raise
            flags, spec = SpecificityFlags(0, 0, 0), 0.0
            degraded.add("specificity")

        length = normalize_length(text)
        disclosure = score_disclosure(text)
        score = LsdeScore(
            length=length,
            disclosure=disclosure,
            emotion=emotion,
            specificity=spec,
            composite=composite(length, disclosure, emotion, spec),
        )
        return ScoredResponse(text=text, score=score, flags=flags, degraded=frozenset(degraded))
