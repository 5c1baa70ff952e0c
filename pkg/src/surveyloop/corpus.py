"""Historical-log ingestion: cleaning, pair extraction, descriptive stats.

Input logs are newline-delimited JSON records with fields conversation_id,
turn, chatbot, user. Cleaning drops placeholder or empty sides, repeated
user responses within a conversation, and responses without a single word.
Consecutive valid responses then become training pairs
(state_before, action, q_before, q_after) for the policy priors.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Iterable, Sequence

from .actions import IntentClassifier, classify_question
from .lsde import ResponseScorer, tokenize
from .policy import ExchangePair
from .states import assign_state, delta_q

PLACEHOLDERS = frozenset({"", "nan", "n/a", "null"})


class CorpusFormatError(Exception):
    """An input log line is malformed; message carries the line number."""


@dataclass(frozen=True)
class RawExchangeRecord:
    """One chatbot question and the user response it received."""

    conversation_id: str
    turn_index: int
    chatbot_text: str | None
    user_text: str | None


def _is_placeholder(text: str | None) -> bool:
    return text is None or text.strip().lower() in PLACEHOLDERS


def read_records(path: str | Path) -> list[RawExchangeRecord]:
    """Parse an NDJSON log; rejects malformed lines with their line number."""
    records: list[RawExchangeRecord] = []
    last_turn: dict[str, int] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusFormatError(f"cannot read corpus {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"line {lineno}: invalid JSON ({exc})") from exc
        if not isinstance(payload, dict):
            raise CorpusFormatError(f"line {lineno}: expected an object")
        missing = {"conversation_id", "turn"} - payload.keys()
        if missing:
            raise CorpusFormatError(f"line {lineno}: missing fields {sorted(missing)}")
        conv = str(payload["conversation_id"])
        try:
            turn = int(payload["turn"])
        except (TypeError, ValueError) as exc:
            raise CorpusFormatError(f"line {lineno}: turn must be an integer") from exc
        if conv in last_turn and turn <= last_turn[conv]:
            raise CorpusFormatError(
                f"line {lineno}: turn {turn} not increasing within conversation {conv}"
            )
        last_turn[conv] = turn
        chatbot = payload.get("chatbot")
        user = payload.get("user")
        if chatbot is not None and not isinstance(chatbot, str):
            raise CorpusFormatError(f"line {lineno}: chatbot must be a string or null")
        if user is not None and not isinstance(user, str):
            raise CorpusFormatError(f"line {lineno}: user must be a string or null")
        records.append(RawExchangeRecord(conv, turn, chatbot, user))
    return records


def write_records(records: Iterable[RawExchangeRecord], path: str | Path) -> None:
    lines = [
        json.dumps(
            {
                "conversation_id": r.conversation_id,
                "turn": r.turn_index,
                "chatbot": r.chatbot_text,
                "user": r.user_text,
            },
            ensure_ascii=False,
        )
        for r in records
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def clean(records: Sequence[RawExchangeRecord]) -> list[RawExchangeRecord]:
    """Apply the cleaning rules; output is ordered by conversation then turn."""
    by_conv: dict[str, list[RawExchangeRecord]] = {}
    for record in records:
        by_conv.setdefault(record.conversation_id, []).append(record)

    kept: list[RawExchangeRecord] = []
    for conv in sorted(by_conv):
        seen: set[str] = set()
        for record in sorted(by_conv[conv], key=lambda r: r.turn_index):
            if _is_placeholder(record.chatbot_text) or _is_placeholder(record.user_text):
                continue
            assert record.user_text is not None
            if record.user_text in seen:
                continue
            if not tokenize(record.user_text):
                continue
            seen.add(record.user_text)
            kept.append(record)
    return kept


def extract_pairs(
    records: Sequence[RawExchangeRecord],
    scorer: ResponseScorer,
    classifier: IntentClassifier,
) -> list[ExchangePair]:
    """Link consecutive valid responses through the question between them.

    Expects cleaned, ordered records. Each conversation is walked with a
    running quality trajectory so state_before reflects the history up to the
    earlier response of the pair.
    """
    by_conv: dict[str, list[RawExchangeRecord]] = {}
    for record in records:
        by_conv.setdefault(record.conversation_id, []).append(record)

    pairs: list[ExchangePair] = []
    for conv in sorted(by_conv):
        prev_q: float | None = None
        prev_state = None
        for record in by_conv[conv]:
            assert record.user_text is not None and record.chatbot_text is not None
            q = scorer.score(record.user_text).score.composite
            state = assign_state(q, delta_q(q, prev_q))
            if prev_q is not None and prev_state is not None:
                action = classify_question(record.chatbot_text, classifier).primary
                pairs.append(
                    ExchangePair(
                        state_before=prev_state,
                        action=action,
                        q_before=prev_q,
                        q_after=q,
                    )
                )
            prev_q, prev_state = q, state
    return pairs


@dataclass(frozen=True)
class CorpusStats:
    """Descriptive statistics over a cleaned corpus."""

    n_conversations: int
    n_valid_responses: int
    n_pairs: int
    mean_exchanges: float
    median_exchanges: float
    sd_exchanges: float
    min_exchanges: int
    max_exchanges: int
    single_exchange_fraction: float
    mean_response_words: float
    median_response_words: float
    sd_response_words: float

    def to_dict(self) -> dict[str, object]:
        return asdict(self)


def stats(records: Sequence[RawExchangeRecord]) -> CorpusStats:
    """Compute corpus statistics; an empty corpus yields all zeros."""
    by_conv: dict[str, int] = {}
    word_counts: list[int] = []
    for record in records:
        by_conv[record.conversation_id] = by_conv.get(record.conversation_id, 0) + 1
        word_counts.append(len(tokenize(record.user_text or "")))

    if not by_conv:
        return CorpusStats(0, 0, 0, 0.0, 0.0, 0.0, 0, 0, 0.0, 0.0, 0.0, 0.0)

    lengths = sorted(by_conv.values())
    n_conversations = len(lengths)
    n_valid = sum(lengths)
    singles = sum(1 for k in lengths if k == 1)
    return CorpusStats(
        n_conversations=n_conversations,
        n_valid_responses=n_valid,
        n_pairs=sum(k - 1 for k in lengths),
        mean_exchanges=statistics.mean(lengths),
        median_exchanges=statistics.median(lengths),
        sd_exchanges=statistics.stdev(lengths) if n_conversations > 1 else 0.0,
        min_exchanges=lengths[0],
        max_exchanges=lengths[-1],
        single_exchange_fraction=singles / n_conversations,
        mean_response_words=statistics.mean(word_counts),
        median_response_words=statistics.median(word_counts),
        sd_response_words=statistics.stdev(word_counts) if len(word_counts) > 1 else 0.0,
    )


# -- pairs file ----------------------------------------------------------------

_PAIRS_HEADER = ("state", "action", "q_before", "q_after")


def write_pairs(pairs: Iterable[ExchangePair], path: str | Path) -> None:
    lines = ["\t".join(_PAIRS_HEADER)]
    for pair in pairs:
        lines.append(
            f"{pair.state_before}\t{pair.action}\t{pair.q_before:.6f}\t{pair.q_after:.6f}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_pairs(path: str | Path) -> list[ExchangePair]:
    from .actions import ActionType
    from .states import EngagementState

    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusFormatError(f"cannot read pairs {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if lines and lines[0].split("\t")[:2] == ["state", "action"]:
        lines = lines[1:]
    pairs = []
    for lineno, line in enumerate(lines, start=1):
        fields = line.split("\t")
        if len(fields) != 4:
            raise CorpusFormatError(f"pairs record {lineno}: expected 4 fields")
        try:
            pairs.append(
                ExchangePair(
                    state_before=EngagementState(fields[0]),
                    action=ActionType(fields[1]),
                    q_before=float(fields[2]),
                    q_after=float(fields[3]),
                )
            )
        except ValueError as exc:
            raise CorpusFormatError(f"pairs record {lineno}: {exc}") from exc
    return pairs
