"""Expected-value policy: offline priors, epsilon-greedy selection, TD updates.

The policy is a 5 states x 5 actions table of expected quality gains.
Priors come from historical exchange pairs: for each cell,
EV = P(gain > 0) * mean(gain | gain > 0), with unobserved cells at 0.0.
Within a session the table is forked, updated one step at a time with
EV <- EV + alpha * (reward - EV), and discarded at session end. Selection
is epsilon-greedy with deterministic lowest-index tie-breaking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Protocol

from .actions import ACTION_ORDER, ActionType
from .states import STATE_ORDER, EngagementState

DEFAULT_ALPHA = 0.3
DEFAULT_PRIOR_RESOURCE = "prior_ev_table.tsv"

BAND_RELIABLE = "R"
BAND_MODERATE = "M"
BAND_LOW = "L"
BAND_NONE = "N"

_TABLE_HEADER = ("state", "action", "ev", "n", "band")


class PolicyError(Exception):
    """Contract violation in policy use (e.g. updating a prior table)."""


class TableFormatError(Exception):
    """An EV table file is malformed."""


class RandomSource(Protocol):
    """Injected randomness; ``random.Random`` satisfies this."""

    def random(self) -> float: ...

    def randrange(self, stop: int) -> int: ...


def confidence_band(n: int) -> str:
    """Reliability label from observation count: R >=20, M 5-19, L 1-4, N 0."""
    if n < 0:
        raise ValueError(f"negative count {n}")
    if n >= 20:
        return BAND_RELIABLE
    if n >= 5:
        return BAND_MODERATE
    if n >= 1:
        return BAND_LOW
    return BAND_NONE


@dataclass(frozen=True)
class ExchangePair:
    """Two consecutive responses linked by the question asked between them."""

    state_before: EngagementState
    action: ActionType
    q_before: float
    q_after: float

    def __post_init__(self) -> None:
        for name in ("q_before", "q_after"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} {value} outside [0, 1]")

    @property
    def gain(self) -> float:
        return self.q_after - self.q_before


@dataclass
class EvTable:
    """Dense state-by-action table of expected gains and observation counts."""

    values: dict[tuple[EngagementState, ActionType], float]
    counts: dict[tuple[EngagementState, ActionType], int]
    provenance: str

    def __post_init__(self) -> None:
        expected = {(s, a) for s in STATE_ORDER for a in ACTION_ORDER}
        if set(self.values) != expected or set(self.counts) != expected:
            raise PolicyError("EV table must have exactly the 25 state-action cells")
        if self.provenance not in ("prior", "session"):
            raise PolicyError(f"unknown provenance {self.provenance!r}")

    def value(self, state: EngagementState, action: ActionType) -> float:
        return self.values[(state, action)]

    def count(self, state: EngagementState, action: ActionType) -> int:
        return self.counts[(state, action)]

    def row(self, state: EngagementState) -> dict[ActionType, float]:
        return {a: self.values[(state, a)] for a in ACTION_ORDER}

    def to_records(self) -> list[dict[str, object]]:
        """Stable row-major listing used by serialization and debug views."""
        return [
            {
                "state": str(s),
                "action": str(a),
                "ev": self.values[(s, a)],
                "n": self.counts[(s, a)],
                "band": confidence_band(self.counts[(s, a)]),
            }
            for s in STATE_ORDER
            for a in ACTION_ORDER
        ]


def compute_priors(pairs: Iterable[ExchangePair]) -> EvTable:
    """Build the prior table: EV = P(gain>0) * mean positive gain per cell."""
    grouped: dict[tuple[EngagementState, ActionType], list[float]] = {
        (s, a): [] for s in STATE_ORDER for a in ACTION_ORDER
    }
    for pair in pairs:
        grouped[(pair.state_before, pair.action)].append(pair.gain)

    values: dict[tuple[EngagementState, ActionType], float] = {}
    counts: dict[tuple[EngagementState, ActionType], int] = {}
    for cell, gains in grouped.items():
        counts[cell] = len(gains)
        positive = [g for g in gains if g > 0]
        if not gains or not positive:
            values[cell] = 0.0
            continue
        p_improve = len(positive) / len(gains)
        mean_gain = sum(positive) / len(positive)
        values[cell] = p_improve * mean_gain
    return EvTable(values=values, counts=counts, provenance="prior")


def fork_session(prior: EvTable) -> EvTable:
    """Independent session copy; the source table is never aliased."""
    return EvTable(values=dict(prior.values), counts=dict(prior.counts), provenance="session")


def select_action(
    table: EvTable,
    state: EngagementState,
    epsilon: float,
    rng: RandomSource,
) -> tuple[ActionType, bool]:
    """Epsilon-greedy pick over the state's row.

    Returns (action, explored). Greedy ties break to the lowest-index action
    in ACTION_ORDER so replays are deterministic.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon {epsilon} outside [0, 1]")
    if epsilon > 0.0 and rng.random() < epsilon:
        return ACTION_ORDER[rng.randrange(len(ACTION_ORDER))], True
    best = ACTION_ORDER[0]
    best_value = table.value(state, best)
    for action in ACTION_ORDER[1:]:
        value = table.value(state, action)
        if value > best_value:
            best, best_value = action, value
    return best, False


def update_ev(
    table: EvTable,
    state: EngagementState,
    action: ActionType,
    reward: float,
    alpha: float = DEFAULT_ALPHA,
) -> float:
    """One-step value update toward the observed reward; returns the new cell."""
    if table.provenance != "session":
        raise PolicyError("prior tables are immutable; fork a session copy first")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha {alpha} outside (0, 1]")
    cell = (state, action)
    updated = table.values[cell] + alpha * (reward - table.values[cell])
    table.values[cell] = updated
    return updated


@dataclass(frozen=True)
class EpsilonSchedule:
    """Exploration rate per exchange index: constant, or linear decay."""

    kind: str
    epsilon: float = 0.0
    epsilon_start: float = 0.0
    epsilon_end: float = 0.0
    horizon: int = 0

    def __post_init__(self) -> None:
        if self.kind == "fixed":
            if not 0.0 <= self.epsilon <= 1.0:
                raise ValueError(f"epsilon {self.epsilon} outside [0, 1]")
        elif self.kind == "linear_decay":
            for name in ("epsilon_start", "epsilon_end"):
                value = getattr(self, name)
                if not 0.0 <= value <= 1.0:
                    raise ValueError(f"{name} {value} outside [0, 1]")
            if self.horizon < 1:
                raise ValueError("decay horizon must be >= 1")
        else:
            raise ValueError(f"unknown schedule kind {self.kind!r}")

    @classmethod
    def fixed(cls, epsilon: float) -> "EpsilonSchedule":
        return cls(kind="fixed", epsilon=epsilon)

    @classmethod
    def linear_decay(cls, start: float, end: float, horizon: int) -> "EpsilonSchedule":
        return cls(kind="linear_decay", epsilon_start=start, epsilon_end=end, horizon=horizon)


def epsilon_at(schedule: EpsilonSchedule, t: int) -> float:
    """Effective epsilon at exchange index t (1-based)."""
    if t < 1:
        raise ValueError(f"exchange index {t} must be >= 1")
    if schedule.kind == "fixed":
        return schedule.epsilon
    if t > schedule.horizon:
        raise ValueError(f"exchange index {t} beyond horizon {schedule.horizon}")
    span = schedule.epsilon_start - schedule.epsilon_end
    value = schedule.epsilon_start - span * t / schedule.horizon
    low = min(schedule.epsilon_start, schedule.epsilon_end)
    high = max(schedule.epsilon_start, schedule.epsilon_end)
    return max(low, min(high, value))


# -- table files --------------------------------------------------------------


def write_table(table: EvTable, path: str | Path) -> None:
    """Write the 25-cell table as TSV with the band derived from n."""
    lines = ["\t".join(_TABLE_HEADER)]
    for record in table.to_records():
        lines.append(
            "\t".join(
                (
                    str(record["state"]),
                    str(record["action"]),
                    f"{record['ev']:.6f}",
                    str(record["n"]),
                    str(record["band"]),
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_table(text: str, origin: str) -> EvTable:
    values: dict[tuple[EngagementState, ActionType], float] = {}
    counts: dict[tuple[EngagementState, ActionType], int] = {}
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if lines and lines[0].split("\t")[:2] == ["state", "action"]:
        lines = lines[1:]
    if len(lines) != 25:
        raise TableFormatError(f"{origin}: expected 25 records, found {len(lines)}")
    for lineno, line in enumerate(lines, start=1):
        fields = line.split("\t")
        if len(fields) != 5:
            raise TableFormatError(f"{origin} record {lineno}: expected 5 fields")
        try:
            state = EngagementState(fields[0])
            action = ActionType(fields[1])
            ev = float(fields[2])
            n = int(fields[3])
        except ValueError as exc:
            raise TableFormatError(f"{origin} record {lineno}: {exc}") from exc
        band = fields[4].strip()
        if n < 0:
            raise TableFormatError(f"{origin} record {lineno}: negative count")
        if band != confidence_band(n):
            raise TableFormatError(
                f"{origin} record {lineno}: band {band!r} inconsistent with n={n}"
            )
        cell = (state, action)
        if cell in values:
            raise TableFormatError(f"{origin} record {lineno}: duplicate cell")
        values[cell] = ev
        counts[cell] = n
    try:
        return EvTable(values=values, counts=counts, provenance="prior")
    except PolicyError as exc:
        raise TableFormatError(f"{origin}: {exc}") from exc


def read_table(path: str | Path) -> EvTable:
    """Load a TSV table written by write_table; result is prior-provenance."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TableFormatError(f"cannot read EV table {path}: {exc}") from exc
    return _parse_table(text, str(path))


def load_default_priors() -> EvTable:
    """The packaged historical prior table."""
    text = resources.files("surveyloop.data").joinpath(DEFAULT_PRIOR_RESOURCE).read_text("utf-8")
    return _parse_table(text, DEFAULT_PRIOR_RESOURCE)
