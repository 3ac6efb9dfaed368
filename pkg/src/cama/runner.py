"""Strategy x metric x run evaluation.

Work is split into jobs, one per (task, cohort, strategy, seed). A job
computes the strategy's acquisition order (or greedy plan) once and reads it
under every requested metric. Strategies other than ``random`` do not depend
on the seed, so when all runs share one cohort their job runs once and its
curves are copied to every run. Jobs may run on a thread pool; results are
keyed and sorted before anything is reduced or written, so output does not
depend on the worker count.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cohort import Cohort
from .errors import ConfigurationError
from .gains import ORACLE_MODES, greedy_oracle_select
from .metrics import METRICS, evaluate
from .simulation import (
    DEFAULT_GRID_POINTS,
    ROUNDING_RULES,
    BudgetGrid,
    GainRow,
    PerformanceCurve,
    acquisition_counts,
    curve_from_order,
    filter_negative_gain,
    g_full,
)
from .strategies import (
    ALL_STRATEGIES,
    IMPUTATION_STRATEGIES,
    ORACLE_STRATEGIES,
    priority_scores,
    select_top,
)

log = logging.getLogger(__name__)

THREADS_ENV = "CAMA_THREADS"


@dataclass(frozen=True)
class RunConfig:
    """Evaluation settings. Run ``r`` uses seed ``base_seed + r``."""

    strategies: tuple[str, ...] = ALL_STRATEGIES
    metrics: tuple[str, ...] = ("auroc", "auprc")
    grid_points: int = DEFAULT_GRID_POINTS
    rounding: str = "half_away"
    runs: int = 5
    base_seed: int = 0
    filter_negative: bool = True
    oracle_mode: str = "evolving"

    def __post_init__(self):
        object.__setattr__(self, "strategies", tuple(self.strategies))
        object.__setattr__(self, "metrics", tuple(self.metrics))
        unknown = [s for s in self.strategies if s not in ALL_STRATEGIES]
        if unknown:
            raise ConfigurationError(f"unknown strategies: {', '.join(unknown)}")
        if not self.strategies:
            raise ConfigurationError("no strategies requested")
        bad = [m for m in self.metrics if m not in METRICS]
        if bad or not self.metrics:
            raise ConfigurationError(f"metrics must be among {', '.join(METRICS)}")
        if self.grid_points < 2:
            raise ConfigurationError("the budget grid needs at least 2 points")
        if self.rounding not in ROUNDING_RULES:
            raise ConfigurationError(f"rounding must be one of {', '.join(ROUNDING_RULES)}")
        if self.runs < 1:
            raise ConfigurationError("runs must be at least 1")
        if self.oracle_mode not in ORACLE_MODES:
            raise ConfigurationError(f"oracle mode must be one of {', '.join(ORACLE_MODES)}")

    def seed(self, run: int) -> int:
        return self.base_seed + run


def worker_count(threads: int | None = None) -> int:
    """Explicit count, else ``$CAMA_THREADS``, else the CPU count."""
    if threads is None:
        env = os.environ.get(THREADS_ENV, "").strip()
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise ConfigurationError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    if threads is None:
        threads = os.cpu_count() or 1
    return max(1, int(threads))


@dataclass
class EvaluationResult:
    curves: list[PerformanceCurve]
    report: list[GainRow]
    drop_log: list[str] = field(default_factory=list)


def _normalize_tasks(tasks, runs: int) -> dict[str, list[Cohort]]:
    out = {}
    for name, value in tasks.items():
        cohorts = [value] if isinstance(value, Cohort) else list(value)
        if len(cohorts) not in (1, runs):
            raise ConfigurationError(
                f"task {name!r} has {len(cohorts)} cohorts; expected 1 or {runs}"
            )
        out[str(name)] = cohorts
    return out


def _check_inputs(tasks: dict[str, list[Cohort]], config: RunConfig) -> None:
    wanted = [s for s in config.strategies if s in IMPUTATION_STRATEGIES]
    for name, cohorts in tasks.items():
        if wanted and any(c.k == 0 for c in cohorts):
            raise ConfigurationError(
                f"task {name!r} has no imputed scores (K=0); imputation strategies "
                f"{', '.join(wanted)} cannot run"
            )


def _run_job(cohort: Cohort, strategy: str, seed, config: RunConfig, grid: BudgetGrid):
    counts = acquisition_counts(grid, cohort.n, config.rounding)
    values = {}
    if strategy in ORACLE_STRATEGIES:
        plan = greedy_oracle_select(
            cohort, ORACLE_STRATEGIES[strategy], cohort.n, config.oracle_mode
        )
        order = np.array(plan.samples, dtype=np.int64)
        for metric in config.metrics:
            if plan.metric == metric:
                values[metric] = np.array([plan.metric_at(c) for c in counts.tolist()])
            else:
                values[metric] = curve_from_order(cohort, order, metric, grid, counts)
    else:
        order = select_top(priority_scores(cohort, strategy, seed), cohort.n)
        for metric in config.metrics:
            values[metric] = curve_from_order(cohort, order, metric, grid, counts)
    return values


def run_evaluation(tasks, config: RunConfig, threads: int | None = None) -> EvaluationResult:
    """Sweep every requested strategy, metric and run over every task.

    ``tasks`` maps a task name to one cohort (shared by all runs) or to a
    sequence of ``config.runs`` cohorts (one per run).
    """
    tasks = _normalize_tasks(tasks, config.runs)
    _check_inputs(tasks, config)
    grid = BudgetGrid.uniform(config.grid_points)

    # anchors per (task, run, metric); raises on undefined metrics up front
    anchors = {}
    for name, cohorts in tasks.items():
        for run in range(config.runs):
            c = cohorts[run if len(cohorts) > 1 else 0]
            for metric in config.metrics:
                anchors[name, run, metric] = (
                    evaluate(metric, c.labels, c.s_avail),
                    evaluate(metric, c.labels, c.s_acquired),
                )

    jobs = {}
    for name, cohorts in tasks.items():
        for strategy in config.strategies:
            for run in range(config.runs):
                ci = run if len(cohorts) > 1 else 0
                seed = config.seed(run) if strategy == "random" else None
                key = (name, ci, strategy, seed)
                jobs.setdefault(key, []).append(run)

    keys = sorted(jobs, key=lambda k: (k[0], k[1], k[2], -1 if k[3] is None else k[3]))
    workers = min(worker_count(threads), max(1, len(keys)))

    def work(key):
        name, ci, strategy, seed = key
        return _run_job(tasks[name][ci], strategy, seed, config, grid)

    if workers == 1:
        results = [work(k) for k in keys]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, keys))

    curves = []
    for key, values in zip(keys, results):
        name, _, strategy, _ = key
        for run in jobs[key]:
            for metric in config.metrics:
                m_pre, m_post = anchors[name, run, metric]
                curves.append(
                    PerformanceCurve(
                        grid, values[metric], m_pre, m_post, metric, strategy, name, run
                    )
                )
    curves.sort(key=lambda c: (c.strategy, c.metric, c.task, c.run))

    # negative-gain filtering happens per (task, run) split; degenerate
    # splits are dropped either way because their gain is undefined
    drop_log = []
    dropped = set()
    for metric in config.metrics:
        splits = {(name, run): anchors[name, run, metric]
                  for name in tasks for run in range(config.runs)}
        _, why = filter_negative_gain(splits)
        for (task, run), reason in why:
            if config.filter_negative or reason.startswith("degenerate"):
                dropped.add((metric, task, run))
                drop_log.append(f"dropped task={task} run={run} metric={metric}: {reason}")
    for line in drop_log:
        log.info(line)

    rows = {}
    for c in curves:
        row = rows.setdefault(
            (c.strategy, c.metric, c.task), GainRow(c.strategy, c.metric, c.task)
        )
        if (c.metric, c.task, c.run) in dropped:
            row.n_dropped += 1
        else:
            row.values.append(g_full(c))
    report = [rows[k] for k in sorted(rows)]
    return EvaluationResult(curves, report, drop_log)

