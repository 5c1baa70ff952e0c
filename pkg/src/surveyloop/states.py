"""Discrete engagement states derived from composite quality and its change.

Five states partition the (quality, quality-change) plane: quality below 0.3
is "low", 0.6 and above is "high", and both bands split on whether quality
rose by more than 0.05 since the previous exchange. The middle band is not
subdivided by trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

LOW_QUALITY_THRESHOLD = 0.3
HIGH_QUALITY_THRESHOLD = 0.6
IMPROVEMENT_THRESHOLD = 0.05


class EngagementState(Enum):
    """One of five discrete engagement categories.

    Serialized as the snake_case value in logs and API payloads. Declaration
    order is the canonical reporting order.
    """

    LOW_IMPROVING = "low_improving"
    LOW_STABLE = "low_stable"
    MEDIUM = "medium"
    HIGH_IMPROVING = "high_improving"
    HIGH_STABLE = "high_stable"

    def __str__(self) -> str:
        return self.value


STATE_ORDER: tuple[EngagementState, ...] = tuple(EngagementState)


@dataclass(frozen=True)
class QualityDelta:
    """Change in composite quality relative to the previous exchange.

    Defined as 0.0 on the first exchange of a session, where no previous
    quality score exists.
    """

    value: float

    def __post_init__(self) -> None:
        if not -1.0 <= self.value <= 1.0:
            raise ValueError(f"quality delta {self.value} outside [-1, 1]")


def delta_q(current: float, previous: float | None) -> QualityDelta:
    """Quality change for the current exchange; zero when there is no prior one."""
    _check_quality(current)
    if previous is None:
        return QualityDelta(0.0)
    _check_quality(previous)
    return QualityDelta(current - previous)


def assign_state(q: float, dq: QualityDelta) -> EngagementState:
    """Map (composite quality, quality change) to an engagement state.

    Band edges: q < 0.3 is low, q >= 0.6 is high. Within the low and high
    bands, dq > 0.05 is improving and dq <= 0.05 (including any drop) is
    stable; the medium band ignores trajectory.
    """
    _check_quality(q)
    improving = dq.value > IMPROVEMENT_THRESHOLD
    if q < LOW_QUALITY_THRESHOLD:
        return EngagementState.LOW_IMPROVING if improving else EngagementState.LOW_STABLE
    if q < HIGH_QUALITY_THRESHOLD:
        return EngagementState.MEDIUM
    return EngagementState.HIGH_IMPROVING if improving else EngagementState.HIGH_STABLE


def _check_quality(q: float) -> None:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"composite quality {q} outside [0, 1]")
