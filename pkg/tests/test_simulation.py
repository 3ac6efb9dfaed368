import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cama.cohort import Cohort
from cama.errors import DegenerateTaskError, PreconditionError
from cama.gains import greedy_oracle_select
from cama.metrics import evaluate
from cama.simulation import (
    BudgetGrid,
    GainRow,
    PerformanceCurve,
    acquisition_counts,
    aggregate,
    filter_negative_gain,
    g_full,
    sweep,
)
from cama.strategies import ALL_STRATEGIES, ORACLE_STRATEGIES, priority_scores, select_top
from cama.synth import SynthConfig, generate

import oracles


def curve(values, grid=None, m_pre=0.6, m_post=0.9):
    grid = grid or BudgetGrid.uniform(len(values))
    return PerformanceCurve(grid, np.asarray(values, float), m_pre, m_post, "auroc", "x")


# -- grid and counts -------------------------------------------------------------


def test_grid_validation():
    assert len(BudgetGrid.uniform()) == 21
    for bad in ([0.0], [0.1, 1.0], [0.0, 0.9], [0.0, 0.5, 0.5, 1.0]):
        with pytest.raises(PreconditionError):
            BudgetGrid(bad)
    with pytest.raises(PreconditionError):
        BudgetGrid.uniform(1)


def test_acquisition_counts_rounding():
    grid = BudgetGrid.uniform(21)
    half_away = acquisition_counts(grid, 10, "half_away")
    assert half_away.tolist() == [0, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7, 8, 8, 9, 9, 10, 10]
    half_even = acquisition_counts(grid, 10, "half_even")
    assert half_even.tolist()[:8] == [0, 0, 1, 2, 2, 2, 3, 4]
    assert acquisition_counts(grid, 10, "floor").tolist()[:4] == [0, 0, 1, 1]
    assert acquisition_counts(grid, 10, "ceil").tolist()[:4] == [0, 1, 1, 2]
    for rule in ("half_away", "half_even", "floor", "ceil"):
        c = acquisition_counts(grid, 7, rule)
        assert c[0] == 0 and c[-1] == 7 and np.all(np.diff(c) >= 0)
    assert acquisition_counts(BudgetGrid([0, 0.5, 1]), 4).tolist() == [0, 2, 4]
    with pytest.raises(PreconditionError):
        acquisition_counts(grid, 10, "stochastic")


# -- sweep -----------------------------------------------------------------------


@pytest.fixture(scope="module")
def small_cohort():
    return generate(SynthConfig(n=20, k=4, seed=5))


@pytest.mark.parametrize("strategy", [s for s in ALL_STRATEGIES if s not in ORACLE_STRATEGIES])
def test_two_point_grid_gives_anchors(small_cohort, strategy):
    c = small_cohort
    for metric in ("auroc", "auprc"):
        cv = sweep(c, strategy, metric, BudgetGrid([0.0, 1.0]), seed=3)
        assert cv.values.tolist() == [
            evaluate(metric, c.labels, c.s_avail),
            evaluate(metric, c.labels, c.s_acquired),
        ]
        assert cv.values[0] == cv.m_pre and cv.values[-1] == cv.m_post


@pytest.mark.parametrize("strategy", list(ORACLE_STRATEGIES))
def test_oracle_curve_anchors(small_cohort, strategy):
    c = small_cohort
    for metric in ("auroc", "auprc"):
        cv = sweep(c, strategy, metric, BudgetGrid.uniform(11))
        assert abs(cv.values[0] - cv.m_pre) <= 1e-12
        assert abs(cv.values[-1] - cv.m_post) <= 1e-12


def test_sweep_reuses_plan(small_cohort):
    c = small_cohort
    plan = greedy_oracle_select(c, "auroc", c.n)
    a = sweep(c, "oracle_auroc", "auroc", BudgetGrid.uniform(11), plan=plan)
    b = sweep(c, "oracle_auroc", "auroc", BudgetGrid.uniform(11))
    assert np.array_equal(a.values, b.values)


def test_flat_cohort_gives_flat_curve():
    s = np.array([0.3, -1.0, 2.0, 0.1])
    c = Cohort([1, 0, 1, 0], s, s, np.zeros((4, 2)))
    for strategy in ALL_STRATEGIES:
        cv = sweep(c, strategy, "auroc", BudgetGrid.uniform(5), seed=0)
        assert cv.m_pre == cv.m_post
        assert np.all(cv.values == cv.m_pre)


def test_random_sweep_matches_recomputation(small_cohort):
    c = small_cohort
    grid = BudgetGrid.uniform(11)
    cv = sweep(c, "random", "auroc", grid, seed=17)
    order = select_top(priority_scores(c, "random", 17), c.n)
    counts = acquisition_counts(grid, c.n)
    for value, count in zip(cv.values, counts):
        scores = oracles.substituted(c.s_avail.tolist(), c.s_acquired.tolist(), set(order[:count].tolist()))
        assert abs(value - oracles.auroc_pairs(c.labels.tolist(), scores)) <= 1e-12


def test_sweep_purity(small_cohort):
    grid = BudgetGrid.uniform(11)
    a = sweep(small_cohort, "exp_kl", "auprc", grid)
    b = sweep(small_cohort, "exp_kl", "auprc", grid)
    assert np.array_equal(a.values, b.values)


# -- g_full --------------------------------------------------------------------


@pytest.mark.parametrize("points", [2, 3, 11, 21, 101])
def test_g_full_analytic_curves(points):
    grid = BudgetGrid.uniform(points)
    m_pre, m_post = 0.61, 0.87
    b = grid.fractions
    assert g_full(curve(np.full(points, m_pre), grid, m_pre, m_post)) == 0.0
    assert abs(g_full(curve(np.full(points, m_post), grid, m_pre, m_post)) - 1.0) <= 1e-12
    linear = m_pre + b * (m_post - m_pre)
    assert abs(g_full(curve(linear, grid, m_pre, m_post)) - 0.5) <= 1e-12


def test_g_full_linear_on_irregular_grid():
    grid = BudgetGrid([0.0, 0.07, 0.31, 0.5, 0.93, 1.0])
    values = 0.5 + 0.3 * grid.fractions
    assert abs(g_full(curve(values, grid, 0.5, 0.8)) - 0.5) <= 1e-12


def test_g_full_step_curve_approaches_one():
    prev = 0.0
    for points in (3, 11, 101, 1001):
        values = np.full(points, 0.9)
        values[0] = 0.6
        g = g_full(curve(values, BudgetGrid.uniform(points)))
        assert prev < g < 1.0
        prev = g
    assert prev > 0.999


def test_g_full_degenerate():
    with pytest.raises(DegenerateTaskError):
        g_full(curve([0.7, 0.7], m_pre=0.7, m_post=0.7))
    with pytest.raises(DegenerateTaskError):
        g_full(curve([0.7, 0.7], m_pre=0.7, m_post=0.7 + 1e-10))


@given(st.lists(st.floats(0, 1), min_size=2, max_size=30))
def test_g_full_bounded_for_curves_between_anchors(fracs):
    values = 0.5 + 0.4 * np.array(fracs)
    cv = curve(values, BudgetGrid.uniform(len(fracs)), 0.5, 0.9)
    assert -1e-12 <= g_full(cv) <= 1 + 1e-12


def test_g_full_against_trapezoid_oracle():
    rng = np.random.default_rng(4)
    grid = BudgetGrid(np.concatenate([[0], np.sort(rng.random(9)), [1]]))
    values = rng.random(11)
    cv = curve(values, grid, 0.2, 0.8)
    ref = oracles.trapezoid(grid.fractions.tolist(), [v - 0.2 for v in values]) / 0.6
    assert abs(g_full(cv) - ref) <= 1e-12


# -- filtering and aggregation ------------------------------------------------------


def test_filter_negative_gain():
    retained, dropped = filter_negative_gain(
        {"up": (0.6, 0.8), "down": (0.8, 0.6), "flat": (0.7, 0.7)}
    )
    assert retained == ["up"]
    reasons = dict(dropped)
    assert reasons["down"].startswith("negative gain")
    assert reasons["flat"].startswith("degenerate")


def test_aggregate():
    assert aggregate([0.42]) == (0.42, 0.0)
    assert aggregate([1, 1, 1]) == (1.0, 0.0)
    mean, sem = aggregate([0.8, 1.0, 1.2])
    assert mean == pytest.approx(1.0, abs=1e-15)
    assert sem == pytest.approx(0.2 / math.sqrt(3), abs=1e-12)
    assert sem == pytest.approx(0.11547, abs=1e-5)
    with pytest.raises(PreconditionError):
        aggregate([])


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=20))
def test_aggregate_invariants(values):
    mean, sem = aggregate(values)
    assert min(values) <= mean <= max(values)
    assert sem >= 0


def test_gain_row():
    row = GainRow("exp_kl", "auroc", "t", [0.8, 1.0, 1.2])
    assert row.n_runs == 3 and row.mean == pytest.approx(1.0)
    empty = GainRow("exp_kl", "auroc", "t", n_dropped=2)
    assert math.isnan(empty.mean) and math.isnan(empty.sem)
