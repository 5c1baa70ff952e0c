"""Follow-up action taxonomy and intent labeling for chatbot questions.

Five action types cover the communicative functions of survey follow-ups.
Historical questions are labeled with a primary intent (plus optional
secondary intents kept for analysis only); labeling is done either by an
LLM-backed classifier returning a structured record or by a deterministic
keyword fallback suitable for offline runs and tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol

__all__ = [
    "ACTION_ORDER",
    "ActionType",
    "ClassificationError",
    "IntentClassifier",
    "IntentLabel",
    "KeywordClassifier",
    "classify_question",
    "distribution",
    "read_labels",
    "write_labels",
]


class ActionType(Enum):
    """The five follow-up question intents, in canonical order."""

    SPECIFICATION = "specification"
    ELABORATION = "elaboration"
    TOPIC_PROBE = "topic_probe"
    VALIDATION = "validation"
    CONTINUATION = "continuation"

    def __str__(self) -> str:
        return self.value


ACTION_ORDER: tuple[ActionType, ...] = tuple(ActionType)


class ClassificationError(Exception):
    """Classifier output could not be turned into an intent label.

    Carries the raw payload so failures can be diagnosed offline.
    """

    def __init__(self, message: str, raw_payload: str | None = None):
        super().__init__(message)
        self.raw_payload = raw_payload


@dataclass(frozen=True)
class IntentLabel:
    """Primary intent of one chatbot question, with optional extras."""

    primary: ActionType
    secondary: frozenset[ActionType] = field(default_factory=frozenset)
    confidence: float = 1.0
    rationale: str = ""

    def __post_init__(self) -> None:
        if self.primary in self.secondary:
            raise ValueError("primary intent may not repeat in secondary set")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "primary": self.primary.value,
            "secondary": sorted(a.value for a in self.secondary),
            "confidence": self.confidence,
            "rationale": self.rationale,
        }

    @classmethod
    def from_dict(cls, record: dict) -> "IntentLabel":
        try:
            return cls(
                primary=ActionType(record["primary"]),
                secondary=frozenset(ActionType(a) for a in record.get("secondary", [])),
                confidence=float(record.get("confidence", 1.0)),
                rationale=str(record.get("rationale", "")),
            )
        except (KeyError, ValueError) as exc:
            raise ClassificationError(f"bad intent record: {exc}", json.dumps(record)) from exc


class IntentClassifier(Protocol):
    def classify(self, question_text: str) -> IntentLabel: ...


# Cue phrases for the deterministic fallback, checked in order. Matched on
# lowercased text; first hit wins, anything unmatched is a topic probe.
# "share how"/"how satisfied" are specification cues so that directive
# requests for a concrete self-assessment are not swallowed by the broad
# "why" elaboration cue.
_VALIDATION_CUES = (
    "thank you",
    "thanks for",
    "appreciate",
    "your perspective",
    "that's valuable",
    "that is valuable",
    "helps us understand",
)
_CONTINUATION_CUES = (
    "anything else",
    "go on",
    "is there more",
    "what else",
)
_SPECIFICATION_CUES = (
    "specific",
    "example",
    "instance",
    "particular",
    "share how",
    "describe how",
    "how satisfied",
    "what exactly",
)
_ELABORATION_CUES = (
    "tell me more",
    "more about",
    "expand",
    "elaborate",
    "why",
    "how did that make you feel",
)


class KeywordClassifier:
    """Deterministic, total keyword classifier.

    Intended for offline labeling and tests; every non-empty question gets
    some primary intent.
    """

    concurrency_safe = True

    def classify(self, question_text: str) -> IntentLabel:
        text = question_text.lower()
        for cues, action in (
            (_VALIDATION_CUES, ActionType.VALIDATION),
            (_CONTINUATION_CUES, ActionType.CONTINUATION),
            (_SPECIFICATION_CUES, ActionType.SPECIFICATION),
            (_ELABORATION_CUES, ActionType.ELABORATION),
        ):
            hit = next((cue for cue in cues if cue in text), None)
            if hit is not None:
                return IntentLabel(primary=action, rationale=f"keyword: {hit!r}")
        return IntentLabel(primary=ActionType.TOPIC_PROBE, rationale="keyword: no cue matched")


def classify_question(question_text: str, classifier: IntentClassifier) -> IntentLabel:
    """Label one chatbot question with its primary intent.

    Raises ClassificationError (with the raw payload attached) when the
    classifier output cannot be parsed, and ValueError on empty input.
    """
    if not question_text.strip():
        raise ValueError("question text is empty")
    return classifier.classify(question_text)


def distribution(labels: list[IntentLabel]) -> dict[ActionType, tuple[int, float]]:
    """Count and fraction of each primary intent; empty input gives an empty map."""
    if not labels:
        return {}
    counts = {action: 0 for action in ACTION_ORDER}
    for label in labels:
        counts[label.primary] += 1
    total = len(labels)
    return {action: (n, n / total) for action, n in counts.items()}


def write_labels(labels: list[tuple[str, IntentLabel]], path) -> None:
    """Write labeled questions as one JSON record per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for question, label in labels:
            record = {"question": question, **label.to_dict()}
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_labels(path) -> list[tuple[str, IntentLabel]]:
    """Read a labeled-question file written by write_labels."""
    out: list[tuple[str, IntentLabel]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            out.append((record["question"], IntentLabel.from_dict(record)))
    return out
