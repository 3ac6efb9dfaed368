"""Exact marginal metric gains and the greedy oracle.

A sample's acquisition moves its score from ``s_avail`` to ``s_acquired``.
The oracle repeatedly acquires the unacquired sample whose move raises the
cohort metric the most, evaluated against the current cohort (samples
acquired earlier keep their acquired score). A ``"frozen"`` mode ranks all
samples once by their gain against the initial cohort instead.

Both greedy loops work on a fixed compressed score domain: a candidate is
always unacquired, so its two domain slots never change and only per-slot
class counts move between steps. Each step is O(N) (numpy for AUROC, a
compiled kernel for AUPRC).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .cohort import Cohort
from .errors import PreconditionError, UndefinedMetricError
from .metrics import auprc, auroc_from_counts, auroc_wins2, sigmoid
from .rank_index import ScoreIndex

#: Gains this close to the step maximum count as tied (AUPRC only; AUROC
#: gains are exact integers).
AUPRC_TIE_TOL = 1e-12

ORACLE_MODES = ("evolving", "frozen")


class CohortState:
    """Labels plus the current score of every sample and the acquired set."""

    def __init__(self, labels, s_avail, s_acquired, budget: int | None = None):
        self.labels = np.asarray(labels, dtype=np.int8)
        self.s_avail = np.asarray(s_avail, dtype=np.float64)
        self.s_acquired = np.asarray(s_acquired, dtype=np.float64)
        n = self.labels.size
        if self.s_avail.shape != (n,) or self.s_acquired.shape != (n,):
            raise PreconditionError("labels and score vectors must have equal length")
        if budget is not None and not 0 <= budget <= n:
            raise PreconditionError(f"budget {budget} outside [0, {n}]")
        self.budget = n if budget is None else int(budget)
        self.scores = self.s_avail.copy()
        self.acquired = np.zeros(n, dtype=bool)
        self.order: list[int] = []
        self.index = ScoreIndex(self.labels, self.s_avail, self.s_acquired)

    @classmethod
    def from_cohort(cls, cohort: Cohort, budget: int | None = None) -> CohortState:
        return cls(cohort.labels, cohort.s_avail, cohort.s_acquired, budget)

    def __len__(self) -> int:
        return int(self.labels.size)

    @property
    def n_pos(self) -> int:
        return self.index.total(1)

    @property
    def n_neg(self) -> int:
        return self.index.total(0)

    def acquire(self, sample: int) -> None:
        self._check_candidate(sample)
        if len(self.order) >= self.budget:
            raise PreconditionError(f"budget of {self.budget} acquisitions exhausted")
        self.index.reassign(sample, float(self.s_acquired[sample]))
        self.scores[sample] = self.s_acquired[sample]
        self.acquired[sample] = True
        self.order.append(int(sample))

    def _check_candidate(self, sample: int) -> None:
        self.index.label(sample)  # raises NotFoundError for unknown ids
        if self.acquired[sample]:
            raise PreconditionError(f"sample {sample} is already acquired")


def _auroc_gain2(state: CohortState, sample: int) -> int:
    """Doubled pair-count change for moving ``sample`` to its acquired score."""
    state._check_candidate(sample)
    if state.n_pos == 0 or state.n_neg == 0:
        raise UndefinedMetricError("AUROC needs both classes")
    cur = float(state.scores[sample])
    new = float(state.s_acquired[sample])
    if cur == new:
        return 0
    if state.labels[sample] == 1:
        before = state.index.count_cmp(0, cur)
        after = state.index.count_cmp(0, new)
        return (2 * after.below + after.equal) - (2 * before.below + before.equal)
    before = state.index.count_cmp(1, cur)
    after = state.index.count_cmp(1, new)
    return (2 * after.above + after.equal) - (2 * before.above + before.equal)


def auroc_marginal_gain(state: CohortState, sample: int) -> float:
    """Exact AUROC change if ``sample`` were acquired now; O(log N)."""
    return _auroc_gain2(state, sample) / (2 * state.n_pos * state.n_neg)


def auprc_marginal_gain(state: CohortState, sample: int) -> float:
    """Exact AUPRC change if ``sample`` were acquired now, by recomputation."""
    state._check_candidate(sample)
    if state.n_pos == 0:
        raise UndefinedMetricError("AUPRC needs at least one positive")
    updated = state.scores.copy()
    updated[sample] = state.s_acquired[sample]
    return auprc(state.labels, updated) - auprc(state.labels, state.scores)


class PlanStep(NamedTuple):
    sample: int
    gain: float
    metric: float


@dataclass
class AcquisitionPlan:
    """Ordered greedy acquisitions.

    ``steps[t]`` holds the sample acquired at step ``t + 1``, its marginal
    gain, and the cohort metric after the acquisition.
    """

    metric: str
    mode: str
    m_pre: float
    steps: list[PlanStep] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def samples(self) -> list[int]:
        return [s.sample for s in self.steps]

    @property
    def gains(self) -> np.ndarray:
        return np.array([s.gain for s in self.steps], dtype=np.float64)

    @property
    def metrics(self) -> np.ndarray:
        return np.array([s.metric for s in self.steps], dtype=np.float64)

    def metric_at(self, count: int) -> float:
        """Cohort metric after the first ``count`` acquisitions."""
        if not 0 <= count <= len(self.steps):
            raise PreconditionError(f"plan has {len(self.steps)} steps, asked for {count}")
        return self.m_pre if count == 0 else self.steps[count - 1].metric


def _domain_slots(s_avail, s_acquired):
    domain = np.unique(np.concatenate([s_avail, s_acquired]))
    return domain.size, np.searchsorted(domain, s_avail), np.searchsorted(domain, s_acquired)


def _first_max(gains: np.ndarray, tol: float = 0.0) -> int:
    best = gains.max()
    if tol == 0.0:
        return int(np.argmax(gains))
    return int(np.argmax(gains >= best - tol))


def _greedy_auroc(labels, s_avail, s_acquired, budget, mode):
    n = labels.size
    n_pos = int(np.count_nonzero(labels))
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUROC needs both classes")
    size, c_slot, a_slot = _domain_slots(s_avail, s_acquired)
    is_pos = labels == 1
    counts = [
        np.bincount(c_slot[~is_pos], minlength=size).astype(np.int64),
        np.bincount(c_slot[is_pos], minlength=size).astype(np.int64),
    ]
    pos_idx = np.flatnonzero(is_pos)
    neg_idx = np.flatnonzero(~is_pos)

    def score_pos(neg_counts):
        # 2 * (negatives below v) + (negatives at v)
        f = 2 * (np.cumsum(neg_counts) - neg_counts) + neg_counts
        return f[a_slot[pos_idx]] - f[c_slot[pos_idx]]

    def score_neg(pos_counts):
        # 2 * (positives above v) + (positives at v)
        above = np.cumsum(pos_counts[::-1])[::-1] - pos_counts
        f = 2 * above + pos_counts
        return f[a_slot[neg_idx]] - f[c_slot[neg_idx]]

    sentinel = np.iinfo(np.int64).min
    gains = np.empty(n, dtype=np.int64)
    gains[pos_idx] = score_pos(counts[0])
    gains[neg_idx] = score_neg(counts[1])

    wins2 = auroc_wins2(labels, s_avail)
    plan = AcquisitionPlan("auroc", mode, auroc_from_counts(wins2, n_pos, n_neg))
    norm = 2 * n_pos * n_neg

    if mode == "frozen":
        order = np.lexsort((np.arange(n), -gains))[:budget]
        index = ScoreIndex(labels, s_avail, s_acquired)
        state_scores = s_avail.copy()
        for k in order.tolist():
            # realized change against the evolving cohort
            if labels[k] == 1:
                b = index.count_cmp(0, float(state_scores[k]))
                a = index.count_cmp(0, float(s_acquired[k]))
                g2 = (2 * a.below + a.equal) - (2 * b.below + b.equal)
            else:
                b = index.count_cmp(1, float(state_scores[k]))
                a = index.count_cmp(1, float(s_acquired[k]))
                g2 = (2 * a.above + a.equal) - (2 * b.above + b.equal)
            index.reassign(k, float(s_acquired[k]))
            state_scores[k] = s_acquired[k]
            wins2 += g2
            plan.steps.append(PlanStep(k, g2 / norm, auroc_from_counts(wins2, n_pos, n_neg)))
        return plan

    for _ in range(budget):
        k = _first_max(gains)
        g2 = int(gains[k])
        cls = int(labels[k])
        counts[cls][c_slot[k]] -= 1
        counts[cls][a_slot[k]] += 1
        gains[k] = sentinel
        wins2 += g2
        plan.steps.append(PlanStep(k, g2 / norm, auroc_from_counts(wins2, n_pos, n_neg)))
        # a move only changes gains of opposite-class candidates
        if cls == 0:
            live = pos_idx[gains[pos_idx] != sentinel]
            f = 2 * (np.cumsum(counts[0]) - counts[0]) + counts[0]
            gains[live] = f[a_slot[live]] - f[c_slot[live]]
        else:
            live = neg_idx[gains[neg_idx] != sentinel]
            above = np.cumsum(counts[1][::-1])[::-1] - counts[1]
            f = 2 * above + counts[1]
            gains[live] = f[a_slot[live]] - f[c_slot[live]]
    return plan


def _initial_pr_gains(is_pos, c_slot, a_slot, pos, neg, n_pos) -> np.ndarray:
    """AUPRC gain of every sample against the initial cohort."""
    from ._prkernel import _candidate_gains, _slot_tables, _suffix_counts

    size = pos.size
    tp, fp, base = np.empty(size), np.empty(size), np.empty(size)
    prefix = np.empty((4, size + 1))
    out = np.empty(c_slot.size)
    _suffix_counts(pos, neg, tp, fp)
    _slot_tables(pos, tp, fp, base, prefix)
    live = np.ones(c_slot.size, dtype=np.bool_)
    _candidate_gains(is_pos, c_slot, a_slot, live, pos, tp, fp, base, prefix, n_pos, out)
    return out


def _greedy_auprc(labels, s_avail, s_acquired, budget, mode):
    # deferred so that importing the package does not load the JIT compiler
    from ._prkernel import _pr_greedy_kernel

    n_pos = int(np.count_nonzero(labels))
    if n_pos == 0:
        raise UndefinedMetricError("AUPRC needs at least one positive")
    # the domain is built on probabilities: sigmoid may merge distinct logits
    size, c_slot, a_slot = _domain_slots(
        np.asarray(sigmoid(s_avail)), np.asarray(sigmoid(s_acquired))
    )
    c_slot = c_slot.astype(np.int64)
    a_slot = a_slot.astype(np.int64)
    is_pos = labels == 1
    pos = np.bincount(c_slot[is_pos], minlength=size).astype(np.float64)
    neg = np.bincount(c_slot[~is_pos], minlength=size).astype(np.float64)
    if mode == "frozen":
        gains = _initial_pr_gains(is_pos, c_slot, a_slot, pos, neg, n_pos)
        order = np.lexsort((np.arange(labels.size), -gains))[:budget].astype(np.int64)
    else:
        order = np.empty(0, dtype=np.int64)
    samples, step_gains, values = _pr_greedy_kernel(
        is_pos, c_slot, a_slot, pos, neg, n_pos, budget, order, AUPRC_TIE_TOL
    )
    plan = AcquisitionPlan("auprc", mode, auprc(labels, s_avail))
    for k, g, v in zip(samples.tolist(), step_gains.tolist(), values.tolist()):
        plan.steps.append(PlanStep(k, g, v))
    return plan


def greedy_oracle_select(
    cohort: Cohort, metric: str, budget: int, mode: str = "evolving"
) -> AcquisitionPlan:
    """Greedy metric-specific oracle over ``budget`` acquisitions.

    Parameters
    ----------
    cohort:
        Labels with available and acquired scores.
    metric:
        ``"auroc"`` or ``"auprc"``.
    budget:
        Number of acquisitions, ``0 <= budget <= N``.
    mode:
        ``"evolving"`` scores every step against the current cohort;
        ``"frozen"`` ranks once against the initial cohort.

    Argmax ties go to the lowest sample index.
    """
    n = len(cohort)
    if not 0 <= budget <= n:
        raise PreconditionError(f"budget {budget} outside [0, {n}]")
    if mode not in ORACLE_MODES:
        raise PreconditionError(f"unknown oracle mode {mode!r}")
    labels = np.asarray(cohort.labels, dtype=np.int8)
    s_avail = np.asarray(cohort.s_avail, dtype=np.float64)
    s_acq = np.asarray(cohort.s_acquired, dtype=np.float64)
    if metric == "auroc":
        return _greedy_auroc(labels, s_avail, s_acq, int(budget), mode)
    if metric == "auprc":
        return _greedy_auprc(labels, s_avail, s_acq, int(budget), mode)
    raise PreconditionError(f"unknown metric {metric!r}")
