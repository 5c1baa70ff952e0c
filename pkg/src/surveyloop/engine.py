"""Live session orchestration.

Each session owns a forked copy of the prior EV table and two seed-derived
random streams (policy selection, template phrasing), so a transcript of user
inputs plus the seed replays bit-identically. A step does, in order: score
the response, apply the value update for the previous exchange's cell (never
on the first exchange), assign the engagement state, select the follow-up
action, and generate the next question. At the horizon the response is still
scored but no further question is produced and the session completes.
"""

from __future__ import annotations

import json
import random
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .actions import ActionType
from .generation import (
    DEFAULT_TOPIC,
    QuestionDirective,
    QuestionGenerator,
    TemplateQuestionGenerator,
    context_from_history,
)
from .lsde import LsdeScore, ResponseScorer
from .policy import (
    DEFAULT_ALPHA,
    EpsilonSchedule,
    EvTable,
    epsilon_at,
    fork_session,
    select_action,
    update_ev,
)
from .specificity import SpecificityFlags
from .states import EngagementState, assign_state, delta_q

DEFAULT_HORIZON = 15
DEFAULT_EPSILON = 0.30

STATUS_ACTIVE = "active"
STATUS_COMPLETED = "completed"
STATUS_TERMINATED = "terminated"


class EngineError(Exception):
    """Base class for session orchestration failures."""


class MissingPriorsError(EngineError):
    """No prior EV table is available to start sessions from."""


class SessionStateError(EngineError):
    """Operation not valid for the session's current status."""


def schedule_to_dict(schedule: EpsilonSchedule) -> dict[str, object]:
    if schedule.kind == "fixed":
        return {"kind": "fixed", "epsilon": schedule.epsilon}
    return {
        "kind": "linear_decay",
        "epsilon_start": schedule.epsilon_start,
        "epsilon_end": schedule.epsilon_end,
        "horizon": schedule.horizon,
    }


@dataclass(frozen=True)
class SessionConfig:
    role: str = "student"
    topic: str = DEFAULT_TOPIC
    horizon: int = DEFAULT_HORIZON
    alpha: float = DEFAULT_ALPHA
    schedule: EpsilonSchedule = field(
        default_factory=lambda: EpsilonSchedule.fixed(DEFAULT_EPSILON)
    )
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha {self.alpha} outside (0, 1]")


@dataclass(frozen=True)
class ExchangeRecord:
    """Everything observed and decided while processing one user response."""

    t: int
    question: str
    response: str
    score: LsdeScore
    flags: SpecificityFlags
    degraded: tuple[str, ...]
    state: EngagementState
    reward: float | None
    updated_state: EngagementState | None
    updated_action: ActionType | None
    ev_before: float | None
    ev_after: float | None
    action: ActionType | None
    epsilon: float | None
    explored: bool | None
    next_question: str | None
    generation_fallback: bool

    def to_dict(self) -> dict[str, object]:
        return {
            "t": self.t,
            "question": self.question,
            "response": self.response,
            "lsde": {
                "length": self.score.length,
                "disclosure": self.score.disclosure,
                "emotion": self.score.emotion,
                "specificity": self.score.specificity,
                "composite": self.score.composite,
            },
            "specificity_flags": {
                "entities": self.flags.entities,
                "temporal": self.flags.temporal,
                "spatial": self.flags.spatial,
            },
            "degraded": list(self.degraded),
            "state": str(self.state),
            "reward": self.reward,
            "ev_update": None
            if self.updated_state is None
            else {
                "state": str(self.updated_state),
                "action": str(self.updated_action),
                "before": self.ev_before,
                "after": self.ev_after,
            },
            "action": None if self.action is None else str(self.action),
            "epsilon": self.epsilon,
            "explored": self.explored,
            "next_question": self.next_question,
            "generation_fallback": self.generation_fallback,
        }


@dataclass
class ConversationSession:
    session_id: str
    role: str
    topic: str
    horizon: int
    alpha: float
    schedule: EpsilonSchedule
    seed: int
    opening_question: str
    table: EvTable | None
    policy_rng: random.Random
    generator: QuestionGenerator
    status: str = STATUS_ACTIVE
    exchanges: list[ExchangeRecord] = field(default_factory=list)

    @property
    def t(self) -> int:
        return len(self.exchanges)

    def current_question(self) -> str | None:
        """The question awaiting an answer, if the session is still active."""
        if self.status != STATUS_ACTIVE:
            return None
        if not self.exchanges:
            return self.opening_question
        return self.exchanges[-1].next_question


@dataclass(frozen=True)
class StepResult:
    record: ExchangeRecord
    next_question: str | None
    completed: bool


@dataclass(frozen=True)
class SessionTranscript:
    session_id: str
    role: str
    topic: str
    horizon: int
    alpha: float
    schedule: dict[str, object]
    seed: int
    status: str
    opening_question: str
    exchanges: tuple[ExchangeRecord, ...]

    def to_dict(self) -> dict[str, object]:
        return {
            "session_id": self.session_id,
            "role": self.role,
            "topic": self.topic,
            "horizon": self.horizon,
            "alpha": self.alpha,
            "schedule": self.schedule,
            "seed": self.seed,
            "status": self.status,
            "opening_question": self.opening_question,
            "n_exchanges": len(self.exchanges),
        }


def write_transcript(transcript: SessionTranscript, path: str | Path) -> None:
    """One session-header line, then one JSON record per exchange."""
    lines = [json.dumps({"type": "session", **transcript.to_dict()}, ensure_ascii=False)]
    for record in transcript.exchanges:
        lines.append(
            json.dumps(
                {"type": "exchange", "session_id": transcript.session_id, **record.to_dict()},
                ensure_ascii=False,
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


GeneratorFactory = Callable[[random.Random], QuestionGenerator]


def template_generator_factory(rng: random.Random) -> QuestionGenerator:
    return TemplateQuestionGenerator(rng)


class ConversationEngine:
    """Creates and drives sessions against a shared immutable prior table."""

    def __init__(
        self,
        priors: EvTable | None,
        scorer: ResponseScorer | None = None,
        generator_factory: GeneratorFactory = template_generator_factory,
    ):
        self.priors = priors
        self.scorer = scorer if scorer is not None else ResponseScorer()
        self.generator_factory = generator_factory

    def start_session(self, config: SessionConfig | None = None) -> ConversationSession:
        if self.priors is None:
            raise MissingPriorsError("no prior EV table loaded")
        config = config if config is not None else SessionConfig()
        seed = config.seed if config.seed is not None else random.randrange(2**32)
        generation_rng = random.Random(f"{seed}|generation")
        opening = TemplateQuestionGenerator(generation_rng).opening_question(config.topic)
        return ConversationSession(
            session_id=uuid.uuid4().hex,
            role=config.role,
            topic=config.topic,
            horizon=config.horizon,
            alpha=config.alpha,
            schedule=config.schedule,
            seed=seed,
            opening_question=opening,
            table=fork_session(self.priors),
            policy_rng=random.Random(f"{seed}|policy"),
            generator=self.generator_factory(generation_rng),
        )

    def step(self, session: ConversationSession, user_response: str) -> StepResult:
        if session.status != STATUS_ACTIVE:
            raise SessionStateError(f"cannot step a {session.status} session")
        assert session.table is not None
        t = session.t + 1
        prev = session.exchanges[-1] if session.exchanges else None
        question = session.opening_question if prev is None else prev.next_question
        assert question is not None

        scored = self.scorer.score(user_response)
        q_t = scored.score.composite

        reward = ev_before = ev_after = None
        updated_state = updated_action = None
        if prev is not None:
            assert prev.action is not None
            reward = q_t - prev.score.composite
            updated_state, updated_action = prev.state, prev.action
            ev_before = session.table.value(updated_state, updated_action)
            ev_after = update_ev(
                session.table, updated_state, updated_action, reward, session.alpha
            )

        dq = delta_q(q_t, prev.score.composite if prev is not None else None)
        state = assign_state(q_t, dq)

        action = epsilon = explored = next_question = None
        fallback = False
        if t < session.horizon:
            epsilon = epsilon_at(session.schedule, t)
            action, explored = select_action(session.table, state, epsilon, session.policy_rng)
            history = [(r.question, r.response) for r in session.exchanges]
            history.append((question, user_response))
            directive = QuestionDirective(
                action=action,
                context=context_from_history(history),
                topic_hint=session.topic,
            )
            generated = session.generator.generate(directive)
            next_question, fallback = generated.text, generated.fallback
        else:
            session.status = STATUS_COMPLETED

        record = ExchangeRecord(
            t=t,
            question=question,
            response=user_response,
            score=scored.score,
            flags=scored.flags,
            degraded=tuple(sorted(scored.degraded)),
            state=state,
            reward=reward,
            updated_state=updated_state,
            updated_action=updated_action,
            ev_before=ev_before,
            ev_after=ev_after,
            action=action,
            epsilon=epsilon,
            explored=explored,
            next_question=next_question,
            generation_fallback=fallback,
        )
        session.exchanges.append(record)
        return StepResult(
            record=record,
            next_question=next_question,
            completed=session.status == STATUS_COMPLETED,
        )

    def end_session(self, session: ConversationSession) -> SessionTranscript:
        """Finalize and return the transcript; drops the session's EV copy.

        Idempotent: ending an already-ended session returns the same
        transcript again.
        """
        if session.status == STATUS_ACTIVE:
            session.status = STATUS_TERMINATED
        session.table = None
        return SessionTranscript(
            session_id=session.session_id,
            role=session.role,
            topic=session.topic,
            horizon=session.horizon,
            alpha=session.alpha,
            schedule=schedule_to_dict(session.schedule),
            seed=session.seed,
            status=session.status,
            opening_question=session.opening_question,
            exchanges=tuple(session.exchanges),
        )


ResponderFn = Callable[[ActionType | None, int, str], str]


def run_scripted_session(
    engine: ConversationEngine,
    config: SessionConfig,
    respond: ResponderFn,
) -> SessionTranscript:
    """Drive a full session with a programmatic responder.

    ``respond(action, t, question)`` receives the action type that produced
    the pending question (None for the opening prompt) and must return the
    user's reply for exchange t.
    """
    session = engine.start_session(config)
    question: str | None = session.opening_question
    action: ActionType | None = None
    for t in range(1, config.horizon + 1):
        assert question is not None
        result = engine.step(session, respond(action, t, question))
        if result.completed:
            break
        question = result.next_question
        action = result.record.action
    return engine.end_session(session)


def replay_inputs(
    engine: ConversationEngine, config: SessionConfig, responses: Sequence[str]
) -> SessionTranscript:
    """Re-run a session from a fixed list of user inputs (replay check)."""
    inputs = iter(responses)
    return run_scripted_session(engine, config, lambda _a, _t, _q: next(inputs))
