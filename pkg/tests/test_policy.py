import random

import pytest
from hypothesis import given, settings, strategies as st

from fixture_builders import PUBLISHED_CELLS, build_pair_fixture
from oracles import priors_oracle
from surveyloop.actions import ACTION_ORDER, ActionType
from surveyloop.policy import (
    EpsilonSchedule,
    EvTable,
    ExchangePair,
    PolicyError,
    TableFormatError,
    compute_priors,
    confidence_band,
    epsilon_at,
    fork_session,
    load_default_priors,
    read_table,
    select_action,
    update_ev,
    write_table,
)
from surveyloop.states import STATE_ORDER, EngagementState

S = EngagementState
A = ActionType


def _pair(state, action, q_before, q_after) -> ExchangePair:
    return ExchangePair(state_before=state, action=action, q_before=q_before, q_after=q_after)


# -- prior estimation -----------------------------------------------------------


def test_worked_example_twenty_pairs():
    # 16 of 20 improve with mean positive gain 0.3815:
    # EV = 0.8 * 0.3815 = 0.3052, printed as 0.305.
    gains = [0.3815 + d for d in (-0.15, -0.1, -0.05, -0.02, 0.02, 0.05, 0.1, 0.15)] * 2
    assert len(gains) == 16
    assert sum(gains) / 16 == pytest.approx(0.3815, abs=1e-12)
    pairs = [_pair(S.LOW_STABLE, A.TOPIC_PROBE, 0.2, 0.2 + g) for g in gains]
    pairs += [_pair(S.LOW_STABLE, A.TOPIC_PROBE, 0.2, 0.2 - d) for d in (0.0, 0.01, 0.02, 0.03)]
    table = compute_priors(pairs)
    ev = table.value(S.LOW_STABLE, A.TOPIC_PROBE)
    assert abs(ev - 0.8 * 0.3815) < 1e-9
    assert round(ev, 3) == 0.305
    assert table.count(S.LOW_STABLE, A.TOPIC_PROBE) == 20


def test_zero_gain_pairs_are_not_improvements():
    pairs = [_pair(S.MEDIUM, A.ELABORATION, 0.4, 0.4)] * 3
    table = compute_priors(pairs)
    assert table.value(S.MEDIUM, A.ELABORATION) == 0.0
    assert table.count(S.MEDIUM, A.ELABORATION) == 3


def test_empty_cells_are_zero_with_zero_count():
    table = compute_priors([])
    for s in STATE_ORDER:
        for a in ACTION_ORDER:
            assert table.value(s, a) == 0.0
            assert table.count(s, a) == 0


def test_priors_match_brute_force_oracle_on_fixture():
    pairs = build_pair_fixture()
    table = compute_priors(pairs)
    oracle = priors_oracle(
        [(p.state_before.value, p.action.value, p.q_before, p.q_after) for p in pairs]
    )
    for s in STATE_ORDER:
        for a in ACTION_ORDER:
            ev, n = oracle.get((s.value, a.value), (0.0, 0))
            assert table.value(s, a) == pytest.approx(ev, abs=1e-12)
            assert table.count(s, a) == n


@settings(max_examples=60)
@given(
    st.lists(
        st.tuples(
            st.sampled_from(STATE_ORDER),
            st.sampled_from(ACTION_ORDER),
            st.floats(min_value=0, max_value=1, allow_nan=False),
            st.floats(min_value=0, max_value=1, allow_nan=False),
        ),
        max_size=60,
    )
)
def test_priors_match_oracle_on_random_pairs(raw):
    pairs = [_pair(s, a, qb, qa) for s, a, qb, qa in raw]
    table = compute_priors(pairs)
    oracle = priors_oracle([(s.value, a.value, qb, qa) for s, a, qb, qa in raw])
    for s in STATE_ORDER:
        for a in ACTION_ORDER:
            ev, n = oracle.get((s.value, a.value), (0.0, 0))
            assert table.value(s, a) == pytest.approx(ev, abs=1e-12)
            assert table.count(s, a) == n


def test_exchange_pair_validates_quality_range():
    with pytest.raises(ValueError):
        _pair(S.MEDIUM, A.ELABORATION, -0.1, 0.5)
    with pytest.raises(ValueError):
        _pair(S.MEDIUM, A.ELABORATION, 0.5, 1.2)
    assert _pair(S.MEDIUM, A.ELABORATION, 0.3, 0.7).gain == pytest.approx(0.4)


# -- confidence bands ------------------------------------------------------------


@pytest.mark.parametrize(
    "n,band",
    [(0, "N"), (1, "L"), (4, "L"), (5, "M"), (19, "M"), (20, "R"), (112, "R")],
)
def test_confidence_bands(n, band):
    assert confidence_band(n) == band


def test_confidence_band_rejects_negative():
    with pytest.raises(ValueError):
        confidence_band(-1)


# -- table invariants ------------------------------------------------------------


def test_table_must_be_dense():
    values = {(s, a): 0.0 for s in STATE_ORDER for a in ACTION_ORDER}
    counts = {(s, a): 0 for s in STATE_ORDER for a in ACTION_ORDER}
    missing = dict(values)
    del missing[(S.MEDIUM, A.ELABORATION)]
    with pytest.raises(PolicyError):
        EvTable(values=missing, counts=counts, provenance="prior")
    with pytest.raises(PolicyError):
        EvTable(values=values, counts=counts, provenance="bogus")


def test_default_priors_match_published_values(priors):
    assert priors.provenance == "prior"
    total = 0
    for s in STATE_ORDER:
        for a in ACTION_ORDER:
            ev, n = PUBLISHED_CELLS.get((s, a), (0.0, 0))
            assert priors.value(s, a) == pytest.approx(ev, abs=1e-9)
            assert priors.count(s, a) == n
            total += n
    assert total == 371


def test_fork_isolated_from_prior(priors):
    session = fork_session(priors)
    assert session.provenance == "session"
    before = priors.value(S.MEDIUM, A.SPECIFICATION)
    update_ev(session, S.MEDIUM, A.SPECIFICATION, reward=0.9, alpha=0.3)
    assert priors.value(S.MEDIUM, A.SPECIFICATION) == before
    assert session.value(S.MEDIUM, A.SPECIFICATION) != before


def test_fork_of_fork_is_allowed(priors):
    second = fork_session(fork_session(priors))
    assert second.provenance == "session"


def test_update_rejects_prior_table(priors):
    with pytest.raises(PolicyError):
        update_ev(priors, S.MEDIUM, A.SPECIFICATION, reward=0.1)


# -- selection --------------------------------------------------------------------


def _uniform_table(value: float = 0.0) -> EvTable:
    values = {(s, a): value for s in STATE_ORDER for a in ACTION_ORDER}
    counts = {(s, a): 0 for s in STATE_ORDER for a in ACTION_ORDER}
    return EvTable(values=values, counts=counts, provenance="session")


def test_greedy_pick_and_explored_flag(priors):
    table = fork_session(priors)
    action, explored = select_action(table, S.LOW_STABLE, epsilon=0.0, rng=random.Random(7))
    assert action is A.CONTINUATION  # 0.476 dominates the low_stable row
    assert explored is False


def test_all_zero_row_ties_break_to_first_action():
    table = _uniform_table(0.0)
    action, explored = select_action(table, S.MEDIUM, epsilon=0.0, rng=random.Random(0))
    assert action is A.SPECIFICATION
    assert explored is False


def test_tie_break_prefers_lowest_index():
    table = _uniform_table(0.0)
    table.values[(S.MEDIUM, A.ELABORATION)] = 0.4
    table.values[(S.MEDIUM, A.VALIDATION)] = 0.4
    action, _ = select_action(table, S.MEDIUM, epsilon=0.0, rng=random.Random(0))
    assert action is A.ELABORATION


def test_greedy_invariant_under_positive_scaling():
    table = _uniform_table(0.0)
    for i, a in enumerate(ACTION_ORDER):
        table.values[(S.MEDIUM, a)] = 0.01 * (i + 1)
    pick1, _ = select_action(table, S.MEDIUM, 0.0, random.Random(0))
    for a in ACTION_ORDER:
        table.values[(S.MEDIUM, a)] *= 7.5
    pick2, _ = select_action(table, S.MEDIUM, 0.0, random.Random(0))
    assert pick1 is pick2 is A.CONTINUATION


def test_epsilon_zero_consumes_no_randomness():
    table = _uniform_table(0.0)
    rng = random.Random(123)
    before = rng.getstate()
    select_action(table, S.MEDIUM, epsilon=0.0, rng=rng)
    assert rng.getstate() == before


def test_epsilon_one_always_explores_uniformly():
    table = _uniform_table(0.0)
    table.values[(S.MEDIUM, A.SPECIFICATION)] = 9.9  # never mind the argmax
    rng = random.Random(42)
    counts = {a: 0 for a in ACTION_ORDER}
    for _ in range(5000):
        action, explored = select_action(table, S.MEDIUM, epsilon=1.0, rng=rng)
        assert explored is True
        counts[action] += 1
    for a in ACTION_ORDER:
        assert counts[a] / 5000 == pytest.approx(0.2, abs=0.02)


def test_selection_validates_epsilon():
    table = _uniform_table()
    with pytest.raises(ValueError):
        select_action(table, S.MEDIUM, epsilon=1.2, rng=random.Random(0))
    with pytest.raises(ValueError):
        select_action(table, S.MEDIUM, epsilon=-0.1, rng=random.Random(0))


class _ScriptedRng:
    """Fixed random() / randrange() streams for exact branch targeting."""

    def __init__(self, randoms, ranges=()):
        self._randoms = iter(randoms)
        self._ranges = iter(ranges)

    def random(self):
        return next(self._randoms)

    def randrange(self, stop):
        value = next(self._ranges)
        assert 0 <= value < stop
        return value


def test_exploration_branch_uses_second_draw():
    table = _uniform_table(0.0)
    table.values[(S.MEDIUM, A.SPECIFICATION)] = 1.0
    action, explored = select_action(table, S.MEDIUM, 0.3, _ScriptedRng([0.29], [4]))
    assert explored is True and action is A.CONTINUATION
    action, explored = select_action(table, S.MEDIUM, 0.3, _ScriptedRng([0.30]))
    assert explored is False and action is A.SPECIFICATION


# -- value updates ----------------------------------------------------------------


def test_update_algebra_exact_cases():
    table = _uniform_table(0.0)
    # from zero: EV <- 0 + 0.3 * (r - 0)
    assert update_ev(table, S.MEDIUM, A.ELABORATION, reward=0.5) == pytest.approx(0.15)
    # fixed point: reward equal to EV leaves the cell unchanged
    table.values[(S.MEDIUM, A.ELABORATION)] = 0.2
    assert update_ev(table, S.MEDIUM, A.ELABORATION, reward=0.2) == pytest.approx(0.2)
    # negative reward pulls below zero
    table.values[(S.MEDIUM, A.ELABORATION)] = 0.1
    assert update_ev(table, S.MEDIUM, A.ELABORATION, reward=-0.3) == pytest.approx(
        0.1 + 0.3 * (-0.4)
    )
    # alpha=1.0 jumps straight to the reward
    table.values[(S.MEDIUM, A.ELABORATION)] = 0.7
    assert update_ev(table, S.MEDIUM, A.ELABORATION, reward=-0.1, alpha=1.0) == pytest.approx(-0.1)


def test_update_only_touches_target_cell():
    table = _uniform_table(0.1)
    update_ev(table, S.HIGH_STABLE, A.VALIDATION, reward=1.0)
    for s in STATE_ORDER:
        for a in ACTION_ORDER:
            if (s, a) == (S.HIGH_STABLE, A.VALIDATION):
                continue
            assert table.value(s, a) == 0.1


def test_update_validates_alpha():
    table = _uniform_table()
    for alpha in (0.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            update_ev(table, S.MEDIUM, A.ELABORATION, reward=0.1, alpha=alpha)


@given(
    ev=st.floats(min_value=-1, max_value=1, allow_nan=False),
    reward=st.floats(min_value=-1, max_value=1, allow_nan=False),
    alpha=st.floats(min_value=0.01, max_value=1.0, allow_nan=False),
)
def test_update_moves_toward_reward(ev, reward, alpha):
    table = _uniform_table(0.0)
    table.values[(S.MEDIUM, A.TOPIC_PROBE)] = ev
    new = update_ev(table, S.MEDIUM, A.TOPIC_PROBE, reward=reward, alpha=alpha)
    assert abs(new - reward) <= abs(ev - reward) + 1e-12
    assert new == pytest.approx(ev + alpha * (reward - ev), abs=1e-12)


# -- epsilon schedules --------------------------------------------------------------


def test_fixed_schedule():
    sched = EpsilonSchedule.fixed(0.30)
    assert epsilon_at(sched, 1) == 0.30
    assert epsilon_at(sched, 15) == 0.30
    assert epsilon_at(sched, 999) == 0.30


def test_linear_decay_endpoints_and_midpoint():
    sched = EpsilonSchedule.linear_decay(0.40, 0.05, 15)
    assert epsilon_at(sched, 1) == pytest.approx(0.40 - 0.35 / 15)
    assert epsilon_at(sched, 1) == pytest.approx(0.376667, abs=5e-7)
    assert epsilon_at(sched, 6) == pytest.approx(0.26)
    assert epsilon_at(sched, 15) == pytest.approx(0.05)


def test_decay_is_clamped_to_range():
    sched = EpsilonSchedule.linear_decay(0.05, 0.40, 10)  # rising is allowed
    for t in range(1, 11):
        assert 0.05 <= epsilon_at(sched, t) <= 0.40


def test_schedule_index_validation():
    fixed = EpsilonSchedule.fixed(0.1)
    with pytest.raises(ValueError):
        epsilon_at(fixed, 0)
    decay = EpsilonSchedule.linear_decay(0.4, 0.05, 15)
    with pytest.raises(ValueError):
        epsilon_at(decay, 16)


def test_schedule_constructor_validation():
    with pytest.raises(ValueError):
        EpsilonSchedule.fixed(1.5)
    with pytest.raises(ValueError):
        EpsilonSchedule.linear_decay(0.4, 0.05, 0)
    with pytest.raises(ValueError):
        EpsilonSchedule(kind="exponential")


# -- table files ----------------------------------------------------------------


def test_table_round_trip(tmp_path, priors):
    path = tmp_path / "table.tsv"
    write_table(priors, path)
    loaded = read_table(path)
    assert loaded.provenance == "prior"
    for s in STATE_ORDER:
        for a in ACTION_ORDER:
            assert loaded.value(s, a) == pytest.approx(priors.value(s, a), abs=5e-7)
            assert loaded.count(s, a) == priors.count(s, a)


def test_table_file_has_25_records_and_bands(tmp_path, priors):
    path = tmp_path / "table.tsv"
    write_table(priors, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "state\taction\tev\tn\tband"
    assert len(lines) == 26
    states = [ln.split("\t")[0] for ln in lines[1:]]
    assert states == [s.value for s in STATE_ORDER for _ in ACTION_ORDER]
    for ln in lines[1:]:
        state, action, ev, n, band = ln.split("\t")
        assert band == confidence_band(int(n))


def test_read_table_rejects_inconsistent_band(tmp_path, priors):
    path = tmp_path / "table.tsv"
    write_table(priors, path)
    text = path.read_text().replace("continuation\t0.476000\t1\tL", "continuation\t0.476000\t1\tR")
    path.write_text(text)
    with pytest.raises(TableFormatError):
        read_table(path)


def test_read_table_rejects_wrong_record_count(tmp_path, priors):
    path = tmp_path / "table.tsv"
    write_table(priors, path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(TableFormatError):
        read_table(path)


def test_read_table_rejects_duplicate_cell(tmp_path, priors):
    path = tmp_path / "table.tsv"
    write_table(priors, path)
    lines = path.read_text().splitlines()
    lines[2] = lines[1]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(TableFormatError):
        read_table(path)


def test_read_table_missing_file(tmp_path):
    with pytest.raises(TableFormatError):
        read_table(tmp_path / "nope.tsv")


def test_load_default_priors_is_fresh_each_call():
    first = load_default_priors()
    second = load_default_priors()
    assert first is not second
    assert first.values == second.values
