"""Controlled comparison harness: adaptive conditions versus a weighted baseline.

Runs a conditions x profiles x repetitions grid of simulated conversations,
collects per-exchange telemetry, and reports quality change, phase deltas,
action distributions, and pairwise significance statistics against the
baseline condition. Scripted users make the whole experiment deterministic
under a fixed seed; LLM-backed users are available for exploratory runs.
"""

from __future__ import annotations

import random
import statistics
import zlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

from scipy import stats as scipy_stats

from .actions import ACTION_ORDER, ActionType
from .engine import (
    ConversationEngine,
    ExchangeRecord,
    SessionConfig,
    SessionTranscript,
    run_scripted_session,
)
from .generation import (
    QuestionDirective,
    TemplateQuestionGenerator,
    context_from_history,
)
from .lsde import ResponseScorer
from .llm import ChatCompletionClient, ChatMessage
from .policy import DEFAULT_ALPHA, EpsilonSchedule, EvTable
from .states import assign_state, delta_q

DEFAULT_HORIZON = 15
DEFAULT_REPS = 5

# Historical follow-up distribution used for non-adaptive sampling
# (specification, elaboration, topic_probe, validation, continuation).
DEFAULT_BASELINE_WEIGHTS = (0.623, 0.236, 0.128, 0.009, 0.004)

PHASES = (("early", 1, 5), ("mid", 6, 10), ("late", 11, 15))


class DegenerateSamplesError(Exception):
    """Both samples are constant; t and d are undefined."""


# -- statistics ----------------------------------------------------------------


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p: float


def _pooled_variance(sample_a: Sequence[float], sample_b: Sequence[float]) -> tuple[float, int]:
    n_a, n_b = len(sample_a), len(sample_b)
    if n_a < 2 or n_b < 2:
        raise ValueError("each sample needs at least two observations")
    df = n_a + n_b - 2
    pooled = (
        (n_a - 1) * statistics.variance(sample_a) + (n_b - 1) * statistics.variance(sample_b)
    ) / df
    return pooled, df


def two_sample_t_test(sample_a: Sequence[float], sample_b: Sequence[float]) -> TTestResult:
    """Pooled-variance (Student) independent-samples t-test, two-tailed."""
    pooled, df = _pooled_variance(sample_a, sample_b)
    if pooled == 0.0:
        raise DegenerateSamplesError("zero pooled variance")
    se = (pooled * (1 / len(sample_a) + 1 / len(sample_b))) ** 0.5
    t = (statistics.mean(sample_a) - statistics.mean(sample_b)) / se
    p = 2 * float(scipy_stats.t.sf(abs(t), df))
    return TTestResult(t=t, df=df, p=p)


def cohens_d(sample_a: Sequence[float], sample_b: Sequence[float]) -> float:
    """Mean difference in pooled-standard-deviation units."""
    pooled, _ = _pooled_variance(sample_a, sample_b)
    if pooled == 0.0:
        raise DegenerateSamplesError("zero pooled variance")
    return (statistics.mean(sample_a) - statistics.mean(sample_b)) / pooled**0.5


def cohens_kappa(labels_a: Sequence[str], labels_b: Sequence[str]) -> float:
    """Chance-corrected agreement between two label sequences.

    Offered for re-validating action labels against a second annotator;
    nothing in the runtime pipeline depends on it.
    """
    if len(labels_a) != len(labels_b):
        raise ValueError("label sequences differ in length")
    n = len(labels_a)
    if n == 0:
        raise ValueError("label sequences are empty")
    observed = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    counts_a = Counter(labels_a)
    counts_b = Counter(labels_b)
    expected = sum(counts_a[k] * counts_b.get(k, 0) for k in counts_a) / (n * n)
    if expected == 1.0:
        # both annotators constant and identical: agreement is exact
        return 1.0 if observed == 1.0 else 0.0
    return (observed - expected) / (1.0 - expected)


# -- simulated users -----------------------------------------------------------


class SimulatedUser(Protocol):
    profile: str

    def respond(self, action: ActionType | None, t: int, question: str) -> str: ...


ResponseProgram = Callable[[ActionType | None, int], str]


@dataclass(frozen=True)
class ScriptedUser:
    """Deterministic responder driven by (question action, exchange index)."""

    profile: str
    program: ResponseProgram

    def respond(self, action: ActionType | None, t: int, question: str) -> str:
        return self.program(action, t)


def scripted_user(program: ResponseProgram, profile: str = "custom") -> ScriptedUser:
    return ScriptedUser(profile=profile, program=program)


@dataclass
class LlmUser:
    """Persona-driven responder over a chat-completion backend.

    Nondeterministic; intended for exploratory runs, not regression tests.
    """

    profile: str
    client: ChatCompletionClient
    persona: str
    temperature: float = 0.8

    def respond(self, action: ActionType | None, t: int, question: str) -> str:
        messages = [
            ChatMessage(
                role="system",
                content=(
                    f"You are a university student in a survey chat. Persona: {self.persona}. "
                    "Answer the interviewer's question in character, in 1-3 sentences."
                ),
            ),
            ChatMessage(role="user", content=question),
        ]
        return self.client.complete(messages, self.temperature)


def _cycle(pool: Sequence[str], t: int) -> str:
    return pool[(t - 1) % len(pool)]


def pool_program(pools: dict[ActionType | None, Sequence[str]]) -> ResponseProgram:
    """Program that cycles a per-action text pool by exchange index."""

    def program(action: ActionType | None, t: int) -> str:
        pool = pools.get(action)
        if pool is None:
            pool = pools[None]
        return _cycle(pool, t)

    return program


_TERSE = ("it was fine", "not much to say", "same as usual", "nothing new really")

_BIOLOGY_POOLS: dict[ActionType | None, Sequence[str]] = {
    None: (
        "My thesis lab keeps me busy most days, and I mostly like the routine I have built around it.",
        "The lab schedule this semester is heavy for me, though I like the bench work itself.",
    ),
    ActionType.SPECIFICATION: (
        "Last Tuesday in Hartwell Hall I reran my enzyme assays until midnight, and I was thrilled when my advisor praised the clean replicates we finally got.",
        "In BIO412 last week my bench partner and I finished the western blot early, and I felt proud because Professor Imai used our gel as the class example.",
        "On Monday at the Greenhouse Annex I presented my pollination data, and I was happy that my mentor trusted me to lead the walkthrough myself.",
    ),
    ActionType.ELABORATION: (
        "I think I like bench work because the steps are concrete and I can see my own progress.",
        "Mostly I feel steady about it; the routine suits me even when my weeks get long.",
        "I suppose the repetition calms me down, and I like knowing what my day holds.",
    ),
    ActionType.TOPIC_PROBE: (
        "Outside the lab I mostly keep to my corner of campus, honestly.",
        "Housing and dining are fine for me, nothing I think about much.",
    ),
    ActionType.VALIDATION: ("thanks, glad it was useful", "appreciate that"),
    ActionType.CONTINUATION: _TERSE,
}

_PSYCHOLOGY_POOLS: dict[ActionType | None, Sequence[str]] = {
    None: (
        "My practicum placement takes most of my energy, and I am still finding my footing with it.",
        "This term has been a lot for me between classes and my placement hours.",
    ),
    ActionType.ELABORATION: (
        "Honestly I feel anxious about my practicum because I worry I am not doing enough, but talking it through like this helps me understand myself better.",
        "I think I care so much because my clients remind me of my younger self, and that makes me proud and scared at the same time.",
        "When I sit with it, I notice I am exhausted but also grateful, because my supervisor believes in me more than I believe in myself.",
    ),
    ActionType.VALIDATION: (
        "That means a lot to me, truly; I rarely hear that I am doing okay.",
        "Thank you, I appreciate you saying that about my effort.",
    ),
    ActionType.SPECIFICATION: (
        "I cannot think of one single moment right now.",
        "Hard to pin down a specific example for you.",
    ),
    ActionType.TOPIC_PROBE: (
        "Campus life outside my program feels distant to me lately.",
        "I guess dining and housing are fine; my mind is usually elsewhere.",
    ),
    ActionType.CONTINUATION: _TERSE,
}

_CS_POOLS: dict[ActionType | None, Sequence[str]] = {
    None: ("classes are fine i guess", "mostly just grinding assignments"),
    ActionType.VALIDATION: (
        "I appreciate that, honestly; I put so much of myself into my projects and I am proud when someone actually notices my work.",
        "Thanks, that helps me; I rarely feel my effort lands, so hearing that makes me want to share more of my experience.",
        "That means a lot; I love building things and I am glad my side of the story matters to someone here.",
    ),
    ActionType.SPECIFICATION: ("uh, the compiler crashed once", "nothing specific comes to mind"),
    ActionType.ELABORATION: ("idk, it is what it is", "not really sure why"),
    ActionType.TOPIC_PROBE: ("campus stuff is fine", "do not really do campus events"),
    ActionType.CONTINUATION: _TERSE,
}

_ENGLISH_POOLS: dict[ActionType | None, Sequence[str]] = {
    None: (
        "Seminar discussions have been lively this term, and I enjoy the reading load more than I expected.",
        "My workshop group is sharp this year, and I like how our sessions push my drafts.",
    ),
    ActionType.TOPIC_PROBE: (
        "Beyond seminars, I adore the poetry readings at Brennan Hall on Friday nights; I feel inspired whenever we gather there and I always leave wanting to write.",
        "Honestly the best part of my week is volunteering at the Writers House near the library, where I get to help first-years fall in love with revision.",
        "Campus arts keep me going; last Thursday I ushered at the Black Box Theater and I felt proud watching my friends perform their own work.",
    ),
    ActionType.ELABORATION: (
        "I think language is how I make sense of my life, so the work rarely feels like work to me.",
        "It matters to me because my best ideas only show up when I slow down and write them out.",
    ),
    ActionType.SPECIFICATION: (
        "In my Victorian lit seminar last month I led the discussion on serial novels, and it went well for me.",
        "Last week I workshopped my essay in Carver Hall and the feedback felt generous to me.",
    ),
    ActionType.VALIDATION: ("thank you, that is kind of you", "I appreciate that, thanks"),
    ActionType.CONTINUATION: ("only that I am glad someone asked", "that covers it, I think"),
}

PROFILE_POOLS: dict[str, dict[ActionType | None, Sequence[str]]] = {
    "biology_senior": _BIOLOGY_POOLS,
    "psychology_junior": _PSYCHOLOGY_POOLS,
    "cs_sophomore": _CS_POOLS,
    "english_senior": _ENGLISH_POOLS,
}

DEFAULT_PROFILES = tuple(PROFILE_POOLS)


def profile_user(profile: str) -> ScriptedUser:
    return ScriptedUser(profile=profile, program=pool_program(PROFILE_POOLS[profile]))


_PREFERENCE_HIGH = (
    "Honestly that question unlocked something for me; last Friday at Mercer Hall my friends and I talked for hours and I loved how understood and grateful I felt afterward.",
    "I am so glad you asked me that; on Wednesday in the Campus Center my mentor and I celebrated my progress and I felt proud, supported, and genuinely happy about my path.",
    "That reaches the heart of it for me; yesterday in Founders Library I finally admitted how much I love my major, and my adviser cheered me on until I believed it myself.",
)


def preference_program(best: ActionType) -> ResponseProgram:
    """Responds richly only to one action type; terse otherwise.

    Gives experiments a known best action per state so learned behavior can
    be checked against ground truth.
    """

    def program(action: ActionType | None, t: int) -> str:
        if action == best:
            return _cycle(_PREFERENCE_HIGH, t)
        return _cycle(_TERSE, t)

    return program


# -- conditions ----------------------------------------------------------------


@dataclass(frozen=True)
class BaselinePolicy:
    """State-independent weighted sampling over the five actions."""

    weights: tuple[float, ...] = DEFAULT_BASELINE_WEIGHTS

    def __post_init__(self) -> None:
        if len(self.weights) != len(ACTION_ORDER):
            raise ValueError("one weight per action required")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be non-negative")
        total = sum(self.weights)
        if total <= 0:
            raise ValueError("weights must sum to a positive value")
        object.__setattr__(self, "weights", tuple(w / total for w in self.weights))

    def sample(self, rng: random.Random) -> ActionType:
        draw = rng.random()
        cumulative = 0.0
        for action, weight in zip(ACTION_ORDER, self.weights):
            cumulative += weight
            if draw < cumulative:
                return action
        return ACTION_ORDER[-1]


@dataclass(frozen=True)
class Condition:
    """One arm of the experiment: adaptive schedule or non-adaptive baseline."""

    name: str
    schedule: EpsilonSchedule | None = None
    baseline: BaselinePolicy | None = None

    def __post_init__(self) -> None:
        if (self.schedule is None) == (self.baseline is None):
            raise ValueError("set exactly one of schedule or baseline")

    @property
    def adaptive(self) -> bool:
        return self.schedule is not None


def default_conditions() -> tuple[Condition, ...]:
    return (
        Condition("baseline", baseline=BaselinePolicy()),
        Condition("fixed_0.15", schedule=EpsilonSchedule.fixed(0.15)),
        Condition("fixed_0.30", schedule=EpsilonSchedule.fixed(0.30)),
        Condition("decay_0.40_0.05", schedule=EpsilonSchedule.linear_decay(0.40, 0.05, 15)),
    )


# -- experiment runner ---------------------------------------------------------


@dataclass(frozen=True)
class ConversationRun:
    condition: str
    profile: str
    rep: int
    seed: int
    transcript: SessionTranscript
    baseline_weights_log: tuple[tuple[float, ...], ...] | None = None


@dataclass(frozen=True)
class FailedRun:
    condition: str
    profile: str
    rep: int
    error: str


def conversation_seed(seed: int, condition: str, profile: str, rep: int) -> int:
    return zlib.crc32(f"{seed}|{condition}|{profile}|{rep}".encode("utf-8"))


def _run_baseline_conversation(
    policy: BaselinePolicy,
    user: SimulatedUser,
    scorer: ResponseScorer,
    seed: int,
    horizon: int,
    topic: str,
) -> tuple[SessionTranscript, tuple[tuple[float, ...], ...]]:
    """Engine-shaped loop without learning: sample actions from fixed weights."""
    action_rng = random.Random(f"{seed}|baseline")
    generator = TemplateQuestionGenerator(random.Random(f"{seed}|generation"))
    question = generator.opening_question(topic)
    action: ActionType | None = None
    prev_q: float | None = None
    records: list[ExchangeRecord] = []
    history: list[tuple[str, str]] = []
    weights_log: list[tuple[float, ...]] = []

    for t in range(1, horizon + 1):
        response = user.respond(action, t, question)
        scored = scorer.score(response)
        q_t = scored.score.composite
        reward = None if prev_q is None else q_t - prev_q
        state = assign_state(q_t, delta_q(q_t, prev_q))
        history.append((question, response))

        next_action = next_question = None
        fallback = False
        if t < horizon:
            weights_log.append(policy.weights)
            next_action = policy.sample(action_rng)
            generated = generator.generate(
                QuestionDirective(
                    action=next_action,
                    context=context_from_history(history),
                    topic_hint=topic,
                )
            )
            next_question, fallback = generated.text, generated.fallback

        records.append(
            ExchangeRecord(
                t=t,
                question=question,
                response=response,
                score=scored.score,
                flags=scored.flags,
                degraded=tuple(sorted(scored.degraded)),
                state=state,
                reward=reward,
                updated_state=None,
                updated_action=None,
                ev_before=None,
                ev_after=None,
                action=next_action,
                epsilon=None,
                explored=None,
                next_question=next_question,
                generation_fallback=fallback,
            )
        )
        if t < horizon:
            assert next_question is not None
            question, action = next_question, next_action
        prev_q = q_t

    transcript = SessionTranscript(
        session_id=f"baseline-{seed:08x}",
        role=user.profile,
        topic=topic,
        horizon=horizon,
        alpha=0.0,
        schedule={"kind": "baseline", "weights": list(policy.weights)},
        seed=seed,
        status="completed",
        opening_question=records[0].question if records else "",
        exchanges=tuple(records),
    )
    return transcript, tuple(weights_log)


@dataclass(frozen=True)
class PhaseStat:
    mean: float
    sd: float
    n: int


@dataclass(frozen=True)
class ConditionSummary:
    name: str
    n: int
    n_failed: int
    delta_q_mean: float
    delta_q_sd: float
    mean_quality_mean: float
    mean_quality_sd: float
    final_quality_mean: float
    final_quality_sd: float
    success_rate: float
    phase_deltas: dict[str, PhaseStat]
    action_counts: dict[ActionType, int]

    @property
    def action_fractions(self) -> dict[ActionType, float]:
        total = sum(self.action_counts.values())
        if total == 0:
            return {a: 0.0 for a in ACTION_ORDER}
        return {a: self.action_counts[a] / total for a in ACTION_ORDER}

    def to_dict(self) -> dict[str, object]:
        return {
            "name": self.name,
            "n": self.n,
            "n_failed": self.n_failed,
            "delta_q": {"mean": self.delta_q_mean, "sd": self.delta_q_sd},
            "mean_quality": {"mean": self.mean_quality_mean, "sd": self.mean_quality_sd},
            "final_quality": {"mean": self.final_quality_mean, "sd": self.final_quality_sd},
            "success_rate": self.success_rate,
            "phase_deltas": {
                phase: {"mean": stat.mean, "sd": stat.sd, "n": stat.n}
                for phase, stat in self.phase_deltas.items()
            },
            "action_distribution": {
                str(a): self.action_fractions[a] for a in ACTION_ORDER
            },
        }


@dataclass(frozen=True)
class ComparisonResult:
    condition: str
    reference: str
    mean_difference: float
    t: float
    df: int
    p: float
    d: float

    def to_dict(self) -> dict[str, object]:
        return {
            "condition": self.condition,
            "reference": self.reference,
            "mean_difference": self.mean_difference,
            "t": self.t,
            "df": self.df,
            "p": self.p,
            "d": self.d,
        }


@dataclass(frozen=True)
class ExperimentReport:
    seed: int
    horizon: int
    reps: int
    profiles: tuple[str, ...]
    conditions: tuple[ConditionSummary, ...]
    comparisons: tuple[ComparisonResult, ...]
    failures: tuple[FailedRun, ...]

    def condition(self, name: str) -> ConditionSummary:
        for summary in self.conditions:
            if summary.name == name:
                return summary
        raise KeyError(name)

    def to_dict(self) -> dict[str, object]:
        return {
            "seed": self.seed,
            "horizon": self.horizon,
            "reps": self.reps,
            "profiles": list(self.profiles),
            "conditions": [c.to_dict() for c in self.conditions],
            "comparisons": [c.to_dict() for c in self.comparisons],
            "failures": [
                {"condition": f.condition, "profile": f.profile, "rep": f.rep, "error": f.error}
                for f in self.failures
            ],
        }

    def render_text(self) -> str:
        lines: list[str] = []
        ms = lambda mean, sd: f"{mean:+.3f}±{sd:.3f}"

        lines.append("Overall performance")
        header = (
            f"{'condition':<18}{'n':>4}  {'dQ (final-initial)':>20}  "
            f"{'mean quality':>14}  {'final quality':>14}  {'success':>8}  "
            f"{'t(df)':>12}  {'p':>7}  {'d':>7}"
        )
        lines.append(header)
        comparisons = {c.condition: c for c in self.comparisons}
        for summary in self.conditions:
            comp = comparisons.get(summary.name)
            stat = f"t({comp.df})={comp.t:.3f}" if comp else "-"
            p = f"{comp.p:.3f}" if comp else "-"
            d = f"{comp.d:+.3f}" if comp else "-"
            lines.append(
                f"{summary.name:<18}{summary.n:>4}  "
                f"{ms(summary.delta_q_mean, summary.delta_q_sd):>20}  "
                f"{summary.mean_quality_mean:>7.3f}±{summary.mean_quality_sd:.3f}  "
                f"{summary.final_quality_mean:>7.3f}±{summary.final_quality_sd:.3f}  "
                f"{summary.success_rate:>8.3f}  {stat:>12}  {p:>7}  {d:>7}"
            )
        lines.append("")

        lines.append("Phase-specific quality change (last minus first exchange in phase)")
        lines.append(
            f"{'condition':<18}" + "".join(f"{name + ' ' + f'({lo}-{hi})':>18}" for name, lo, hi in PHASES)
        )
        for summary in self.conditions:
            row = f"{summary.name:<18}"
            for name, _, _ in PHASES:
                stat = summary.phase_deltas[name]
                row += f"{ms(stat.mean, stat.sd):>18}"
            lines.append(row)
        lines.append("")

        lines.append("Action distribution (% of selected follow-ups)")
        cond_names = [s.name for s in self.conditions]
        lines.append(f"{'action':<16}" + "".join(f"{n:>18}" for n in cond_names))
        for action in ACTION_ORDER:
            row = f"{str(action):<16}"
            for summary in self.conditions:
                row += f"{summary.action_fractions[action] * 100:>17.1f}%"
            lines.append(row)
        return "\n".join(lines) + "\n"


def _mean_sd(values: Sequence[float]) -> tuple[float, float]:
    if not values:
        return 0.0, 0.0
    mean = statistics.mean(values)
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    return mean, sd


def summarize_condition(name: str, runs: Sequence[ConversationRun], n_failed: int) -> ConditionSummary:
    delta_qs: list[float] = []
    mean_qs: list[float] = []
    final_qs: list[float] = []
    successes = 0
    eligible = 0
    phase_values: dict[str, list[float]] = {phase: [] for phase, _, _ in PHASES}
    action_counts: dict[ActionType, int] = {a: 0 for a in ACTION_ORDER}

    for run in runs:
        records = run.transcript.exchanges
        qualities = [r.score.composite for r in records]
        if not qualities:
            continue
        delta_qs.append(qualities[-1] - qualities[0])
        mean_qs.append(statistics.mean(qualities))
        final_qs.append(qualities[-1])
        for record in records:
            if record.reward is not None:
                eligible += 1
                if record.reward > 0:
                    successes += 1
            if record.action is not None:
                action_counts[record.action] += 1
        for phase, lo, hi in PHASES:
            window = [r.score.composite for r in records if lo <= r.t <= hi]
            if len(window) >= 2:
                phase_values[phase].append(window[-1] - window[0])

    phase_deltas = {}
    for phase, _, _ in PHASES:
        mean, sd = _mean_sd(phase_values[phase])
        phase_deltas[phase] = PhaseStat(mean=mean, sd=sd, n=len(phase_values[phase]))

    dq_mean, dq_sd = _mean_sd(delta_qs)
    mq_mean, mq_sd = _mean_sd(mean_qs)
    fq_mean, fq_sd = _mean_sd(final_qs)
    return ConditionSummary(
        name=name,
        n=len(runs),
        n_failed=n_failed,
        delta_q_mean=dq_mean,
        delta_q_sd=dq_sd,
        mean_quality_mean=mq_mean,
        mean_quality_sd=mq_sd,
        final_quality_mean=fq_mean,
        final_quality_sd=fq_sd,
        success_rate=successes / eligible if eligible else 0.0,
        phase_deltas=phase_deltas,
        action_counts=action_counts,
    )


@dataclass
class ExperimentResult:
    report: ExperimentReport
    runs: tuple[ConversationRun, ...]


def run_experiment(
    priors: EvTable,
    conditions: Sequence[Condition] | None = None,
    users: Sequence[SimulatedUser] | None = None,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    horizon: int = DEFAULT_HORIZON,
    alpha: float = DEFAULT_ALPHA,
    scorer: ResponseScorer | None = None,
    topic: str = "campus life",
) -> ExperimentResult:
    """Run the full conditions x users x reps grid of conversations."""
    conditions = tuple(conditions) if conditions is not None else default_conditions()
    users = tuple(users) if users is not None else tuple(profile_user(p) for p in DEFAULT_PROFILES)
    scorer = scorer if scorer is not None else ResponseScorer()
    engine = ConversationEngine(priors, scorer=scorer)

    runs: list[ConversationRun] = []
    failures: list[FailedRun] = []
    for condition in conditions:
        for user in users:
            for rep in range(1, reps + 1):
                conv_seed = conversation_seed(seed, condition.name, user.profile, rep)
                try:
                    if condition.adaptive:
                        assert condition.schedule is not None
                        config = SessionConfig(
                            role=user.profile,
                            topic=topic,
                            horizon=horizon,
                            alpha=alpha,
                            schedule=condition.schedule,
                            seed=conv_seed,
                        )
                        transcript = run_scripted_session(engine, config, user.respond)
                        weights_log = None
                    else:
                        assert condition.baseline is not None
                        transcript, weights_log = _run_baseline_conversation(
                            condition.baseline, user, scorer, conv_seed, horizon, topic
                        )
                except Exception as exc:
                    failures.append(
                        FailedRun(
                            condition=condition.name,
                            profile=user.profile,
                            rep=rep,
                            error=f"{type(exc).__name__}: {exc}",
                        )
                    )
                    continue
                runs.append(
                    ConversationRun(
                        condition=condition.name,
                        profile=user.profile,
                        rep=rep,
                        seed=conv_seed,
                        transcript=transcript,
                        baseline_weights_log=weights_log,
                    )
                )

    summaries: list[ConditionSummary] = []
    samples: dict[str, list[float]] = {}
    for condition in conditions:
        cond_runs = [r for r in runs if r.condition == condition.name]
        cond_failures = sum(1 for f in failures if f.condition == condition.name)
        summaries.append(summarize_condition(condition.name, cond_runs, cond_failures))
        samples[condition.name] = [
            r.transcript.exchanges[-1].score.composite - r.transcript.exchanges[0].score.composite
            for r in cond_runs
            if r.transcript.exchanges
        ]

    reference = conditions[0].name
    comparisons: list[ComparisonResult] = []
    for condition in conditions[1:]:
        sample = samples[condition.name]
        base = samples[reference]
        if len(sample) < 2 or len(base) < 2:
            continue
        try:
            result = two_sample_t_test(sample, base)
            d = cohens_d(sample, base)
        except DegenerateSamplesError:
            continue
        comparisons.append(
            ComparisonResult(
                condition=condition.name,
                reference=reference,
                mean_difference=statistics.mean(sample) - statistics.mean(base),
                t=result.t,
                df=result.df,
                p=result.p,
                d=d,
            )
        )

    report = ExperimentReport(
        seed=seed,
        horizon=horizon,
        reps=reps,
        profiles=tuple(u.profile for u in users),
        conditions=tuple(summaries),
        comparisons=tuple(comparisons),
        failures=tuple(failures),
    )
    return ExperimentResult(report=report, runs=tuple(runs))
