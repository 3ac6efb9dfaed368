"""Budget sweeps, normalized area of gain, and run aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cohort import Cohort
from .errors import DegenerateTaskError, PreconditionError
from .gains import AcquisitionPlan, greedy_oracle_select
from .metrics import evaluate
from .strategies import ORACLE_STRATEGIES, priority_scores, select_top

#: Smallest |M_post - M_pre| for which the normalized gain is defined.
DEGENERACY_DELTA = 1e-9

DEFAULT_GRID_POINTS = 21

ROUNDING_RULES = ("half_away", "half_even", "floor", "ceil")


@dataclass(frozen=True, eq=False)
class BudgetGrid:
    """Strictly increasing budget fractions from 0 to 1 inclusive."""

    fractions: np.ndarray

    def __post_init__(self):
        b = np.array(self.fractions, dtype=np.float64)
        if b.ndim != 1 or b.size < 2:
            raise PreconditionError("a budget grid needs at least the points 0 and 1")
        if b[0] != 0.0 or b[-1] != 1.0:
            raise PreconditionError("a budget grid must start at 0 and end at 1")
        if not np.all(np.diff(b) > 0):
            raise PreconditionError("budget fractions must be strictly increasing")
        b.setflags(write=False)
        object.__setattr__(self, "fractions", b)

    @classmethod
    def uniform(cls, points: int = DEFAULT_GRID_POINTS) -> BudgetGrid:
        if points < 2:
            raise PreconditionError("a budget grid needs at least two points")
        return cls(np.linspace(0.0, 1.0, points))

    def __len__(self) -> int:
        return int(self.fractions.size)


def acquisition_counts(grid: BudgetGrid, n: int, rounding: str = "half_away") -> np.ndarray:
    """Number of acquired samples at every grid fraction; endpoints are 0 and N."""
    # snap away float noise so b*N = k + 0.5 is treated as an exact half
    x = np.round(grid.fractions * n, 9)
    if rounding == "half_away":
        counts = np.floor(x + 0.5)
    elif rounding == "half_even":
        counts = np.round(x)
    elif rounding == "floor":
        counts = np.floor(x)
    elif rounding == "ceil":
        counts = np.ceil(x)
    else:
        raise PreconditionError(f"unknown rounding rule {rounding!r}")
    counts = np.clip(counts, 0, n).astype(np.int64)
    counts[0], counts[-1] = 0, n
    return counts


@dataclass(eq=False)
class PerformanceCurve:
    """Metric value along a budget grid, with its pre/post anchors."""

    grid: BudgetGrid
    values: np.ndarray
    m_pre: float
    m_post: float
    metric: str
    strategy: str
    task: str = ""
    run: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.fractions.shape:
            raise PreconditionError("curve values must match the grid length")


def curve_from_order(cohort, order, metric, grid, counts):
    """Metric along the grid when samples are acquired in ``order``."""
    values = np.empty(len(grid))
    for j, c in enumerate(counts.tolist()):
        values[j] = evaluate(metric, cohort.labels, cohort.substituted(order[:c]))
    return values


def sweep(
    cohort: Cohort,
    strategy: str,
    metric: str,
    grid: BudgetGrid,
    *,
    seed: int | None = None,
    rounding: str = "half_away",
    oracle_mode: str = "evolving",
    plan: AcquisitionPlan | None = None,
) -> PerformanceCurve:
    """Performance curve of one strategy on one cohort.

    Non-oracle strategies score once and acquire their top ``count`` samples
    at each grid point. Oracle strategies run a single greedy pass up to the
    full cohort and read it at each grid point's count; pass ``plan`` to reuse
    a pass computed earlier.
    """
    counts = acquisition_counts(grid, cohort.n, rounding)
    m_pre = evaluate(metric, cohort.labels, cohort.s_avail)
    m_post = evaluate(metric, cohort.labels, cohort.s_acquired)
    if strategy in ORACLE_STRATEGIES:
        if plan is None:
            plan = greedy_oracle_select(
                cohort, ORACLE_STRATEGIES[strategy], cohort.n, oracle_mode
            )
        if plan.metric == metric:
            values = np.array([plan.metric_at(c) for c in counts.tolist()])
        else:
            values = curve_from_order(cohort, np.array(plan.samples), metric, grid, counts)
    else:
        order = select_top(priority_scores(cohort, strategy, seed), cohort.n)
        values = curve_from_order(cohort, order, metric, grid, counts)
    return PerformanceCurve(grid, values, m_pre, m_post, metric, strategy)


def g_full(curve: PerformanceCurve, delta: float = DEGENERACY_DELTA) -> float:
    """Area between the curve and ``M_pre``, normalized by ``M_post - M_pre``.

    Uses the trapezoidal rule over the curve's grid.

    Raises
    ------
    DegenerateTaskError
        If ``|M_post - M_pre| <= delta``.
    """
    span = curve.m_post - curve.m_pre
    if abs(span) <= delta:
        raise DegenerateTaskError(
            f"M_post - M_pre = {span:.3g} is within {delta:g} of zero"
        )
    area = np.trapezoid(curve.values - curve.m_pre, curve.grid.fractions)
    return float(area / span)


def filter_negative_gain(tasks, delta: float = DEGENERACY_DELTA):
    """Split tasks into retained ids and a drop log.

    ``tasks`` maps a task id to ``(m_pre, m_post)``. Tasks whose post metric
    falls below the pre metric, or lies within ``delta`` of it, are dropped.
    Returns ``(retained_ids, [(task_id, reason), ...])``.
    """
    retained, dropped = [], []
    for task, (m_pre, m_post) in tasks.items():
        if abs(m_post - m_pre) <= delta:
            dropped.append((task, f"degenerate: M_post - M_pre = {m_post - m_pre:.3g}"))
        elif m_post < m_pre:
            dropped.append((task, f"negative gain: M_pre = {m_pre:.6g} > M_post = {m_post:.6g}"))
        else:
            retained.append(task)
    return retained, dropped


def aggregate(values) -> tuple[float, float]:
    """Mean and standard error of the mean (n - 1 denominator; 0 for one run)."""
    vals = [float(v) for v in values]
    n = len(vals)
    if n == 0:
        raise PreconditionError("aggregate needs at least one run")
    lo, hi = min(vals), max(vals)
    mean = min(max(math.fsum(vals) / n, lo), hi)
    if n == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in vals) / (n - 1)
    return mean, math.sqrt(var / n)


@dataclass
class GainRow:
    """Normalized gains of one (strategy, metric, task) across runs."""

    strategy: str
    metric: str
    task: str
    values: list[float] = field(default_factory=list)
    n_dropped: int = 0

    @property
    def n_runs(self) -> int:
        return len(self.values)

    @property
    def mean(self) -> float:
        return aggregate(self.values)[0] if self.values else math.nan

    @property
    def sem(self) -> float:
        return aggregate(self.values)[1] if self.values else math.nan
