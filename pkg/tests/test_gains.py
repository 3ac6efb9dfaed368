import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cama.cohort import Cohort
from cama.errors import NotFoundError, PreconditionError, UndefinedMetricError
from cama.gains import (
    AUPRC_TIE_TOL,
    CohortState,
    auprc_marginal_gain,
    auroc_marginal_gain,
    greedy_oracle_select,
)
from cama.metrics import auprc, auroc, evaluate

import oracles


def logit(p):
    return math.log(p / (1 - p))


def random_cohort(rng, n, coarse=True):
    labels = rng.integers(0, 2, n)
    labels[0], labels[-1] = 1, 0
    if coarse:
        # coarse values force ties among scores
        s_avail = rng.integers(-4, 5, n) / 2
        s_acq = rng.integers(-4, 5, n) / 2
    else:
        s_avail = rng.normal(size=n)
        s_acq = s_avail + rng.normal(size=n)
    return Cohort(labels, s_avail, s_acq)


# -- marginal gains ------------------------------------------------------------


def test_auroc_gain_examples():
    state = CohortState([1, 0, 0], [0.0, 0.5, -0.5], [1.0, 0.5, -0.5])
    assert auroc_marginal_gain(state, 0) == 0.5
    assert auroc_marginal_gain(state, 1) == 0.0
    assert oracles.auroc_pairs([1, 0, 0], [1.0, 0.5, -0.5]) - oracles.auroc_pairs(
        [1, 0, 0], [0.0, 0.5, -0.5]
    ) == 0.5


def test_auprc_gain_example():
    s_avail = [logit(0.4), logit(0.6)]
    s_acq = [logit(0.9), logit(0.6)]
    state = CohortState([1, 0], s_avail, s_acq)
    expected = oracles.auprc_logits([1, 0], s_acq) - oracles.auprc_logits([1, 0], s_avail)
    assert expected == pytest.approx(0.5, abs=1e-12)
    assert auprc_marginal_gain(state, 0) == pytest.approx(expected, abs=1e-12)
    assert auprc_marginal_gain(state, 1) == 0.0


def test_gain_errors():
    state = CohortState([1, 0], [0.0, 1.0], [1.0, 0.0])
    state.acquire(0)
    with pytest.raises(PreconditionError):
        auroc_marginal_gain(state, 0)
    with pytest.raises(PreconditionError):
        auprc_marginal_gain(state, 0)
    with pytest.raises(NotFoundError):
        auroc_marginal_gain(state, 7)
    with pytest.raises(UndefinedMetricError):
        auroc_marginal_gain(CohortState([1, 1], [0.0, 1.0], [1.0, 0.0]), 0)
    with pytest.raises(UndefinedMetricError):
        auprc_marginal_gain(CohortState([0, 0], [0.0, 1.0], [1.0, 0.0]), 0)


def test_state_budget():
    state = CohortState([1, 0, 1], [0.0, 1.0, 2.0], [1.0, 0.0, 0.0], budget=1)
    state.acquire(2)
    assert state.scores.tolist() == [0.0, 1.0, 0.0]
    with pytest.raises(PreconditionError):
        state.acquire(0)
    with pytest.raises(PreconditionError):
        CohortState([1, 0], [0.0, 1.0], [1.0, 0.0], budget=3)


def test_incremental_gains_match_recomputation_n50():
    rng = np.random.default_rng(3)
    c = random_cohort(rng, 50, coarse=False)
    state = CohortState.from_cohort(c)
    for step in range(10):
        for i in np.flatnonzero(~state.acquired):
            after = state.scores.copy()
            after[i] = c.s_acquired[i]
            ref = oracles.auroc_pairs(c.labels.tolist(), after.tolist()) - oracles.auroc_pairs(
                c.labels.tolist(), state.scores.tolist()
            )
            assert abs(auroc_marginal_gain(state, int(i)) - ref) <= 1e-12
            assert auprc_marginal_gain(state, int(i)) == auprc(c.labels, after) - auprc(
                c.labels, state.scores
            )
        state.acquire(int(rng.choice(np.flatnonzero(~state.acquired))))


# -- greedy oracle -------------------------------------------------------------


def test_budget_zero_and_errors():
    c = Cohort([1, 0], [0.0, 1.0], [1.0, 0.0])
    for metric in ("auroc", "auprc"):
        plan = greedy_oracle_select(c, metric, 0)
        assert len(plan) == 0
        assert plan.metric_at(0) == evaluate(metric, c.labels, c.s_avail)
    with pytest.raises(PreconditionError):
        greedy_oracle_select(c, "auroc", 3)
    with pytest.raises(PreconditionError):
        greedy_oracle_select(c, "auroc", 1, mode="lazy")
    with pytest.raises(UndefinedMetricError):
        greedy_oracle_select(Cohort([1, 1], [0.0, 1.0], [1.0, 0.0]), "auroc", 1)
    with pytest.raises(UndefinedMetricError):
        greedy_oracle_select(Cohort([0, 0], [0.0, 1.0], [1.0, 0.0]), "auprc", 1)


@pytest.mark.parametrize("metric", ["auroc", "auprc"])
def test_beta_one_is_best_single_swap(metric):
    rng = np.random.default_rng(5)
    for _ in range(30):
        c = random_cohort(rng, int(rng.integers(2, 15)))
        plan = greedy_oracle_select(c, metric, 1)
        fn = oracles.metric_fn(metric)
        base = fn(c.labels.tolist(), c.s_avail.tolist())
        gains = [
            fn(c.labels.tolist(), oracles.substituted(c.s_avail, c.s_acquired, {i})) - base
            for i in range(c.n)
        ]
        best = max(gains)
        assert abs(plan.steps[0].gain - best) <= 1e-12
        assert gains[plan.samples[0]] >= best - 1e-12
        exhaustive = oracles.exhaustive_best(c.labels, c.s_avail, c.s_acquired, 1, metric)
        assert abs(plan.metrics[0] - exhaustive) <= 1e-12


@pytest.mark.parametrize("metric", ["auroc", "auprc"])
def test_n10_beta3_against_exhaustive(metric):
    rng = np.random.default_rng(6)
    for _ in range(5):
        c = random_cohort(rng, 10)
        plan = greedy_oracle_select(c, metric, 3)
        fn = oracles.metric_fn(metric)
        for t in range(3):
            ref = fn(c.labels.tolist(), oracles.substituted(c.s_avail, c.s_acquired, set(plan.samples[: t + 1])))
            assert abs(plan.metrics[t] - ref) <= 1e-12
        best = oracles.exhaustive_best(c.labels, c.s_avail, c.s_acquired, 3, metric)
        assert plan.metrics[-1] <= best + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["auroc", "auprc"]))
def test_fast_greedy_equals_reference_greedy(seed, metric):
    rng = np.random.default_rng(seed)
    c = random_cohort(rng, int(rng.integers(2, 16)))
    tol = 0.0 if metric == "auroc" else AUPRC_TIE_TOL
    ref = oracles.reference_greedy(
        c.labels.tolist(), c.s_avail.tolist(), c.s_acquired.tolist(), c.n, metric, tol
    )
    plan = greedy_oracle_select(c, metric, c.n)
    assert plan.samples == [k for k, _, _ in ref]
    np.testing.assert_allclose(plan.gains, [g for _, g, _ in ref], rtol=0, atol=1e-12)
    np.testing.assert_allclose(plan.metrics, [m for _, _, m in ref], rtol=0, atol=1e-12)


@pytest.mark.parametrize("metric", ["auroc", "auprc"])
@pytest.mark.parametrize("mode", ["evolving", "frozen"])
def test_plan_replay_reproduces_cumulative_metric(metric, mode):
    rng = np.random.default_rng(8)
    c = random_cohort(rng, 300, coarse=False)
    plan = greedy_oracle_select(c, metric, c.n, mode)
    assert sorted(plan.samples) == list(range(c.n))
    fn = auroc if metric == "auroc" else auprc
    prev = plan.m_pre
    for t in range(0, c.n, 7):
        value = fn(c.labels, c.substituted(plan.samples[: t + 1]))
        assert abs(plan.metrics[t] - value) <= 1e-12
    for t, step in enumerate(plan.steps):
        # every recorded gain is the realized change between steps
        assert abs(step.metric - prev - step.gain) <= 1e-12
        prev = step.metric
    assert abs(plan.metrics[-1] - fn(c.labels, c.s_acquired)) <= 1e-12


def test_frozen_mode_ranks_once_by_initial_gain():
    rng = np.random.default_rng(9)
    c = random_cohort(rng, 40, coarse=False)
    plan = greedy_oracle_select(c, "auroc", c.n, "frozen")
    state = CohortState.from_cohort(c)
    initial = np.array([auroc_marginal_gain(state, i) for i in range(c.n)])
    expected = np.lexsort((np.arange(c.n), -initial)).tolist()
    assert plan.samples == expected


def test_evolving_curve_non_decreasing_while_gains_non_negative():
    rng = np.random.default_rng(10)
    c = random_cohort(rng, 200, coarse=False)
    for metric in ("auroc", "auprc"):
        plan = greedy_oracle_select(c, metric, c.n)
        prev = plan.m_pre
        for step in plan.steps:
            if step.gain >= 0:
                assert step.metric >= prev - 1e-12
            prev = step.metric


@pytest.mark.parametrize("metric", ["auroc", "auprc"])
def test_greedy_beats_random_subsets_on_average(metric):
    rng = np.random.default_rng(13)
    c = random_cohort(rng, 60, coarse=False)
    beta = 10
    plan = greedy_oracle_select(c, metric, beta)
    fn = auroc if metric == "auroc" else auprc
    randoms = [
        fn(c.labels, c.substituted(rng.choice(c.n, beta, replace=False))) for _ in range(100)
    ]
    assert plan.metrics[-1] >= np.mean(randoms)
