"""Non-oracle acquisition functions.

Each strategy maps a cohort to one priority per sample; the budget is spent
on the highest priorities. Strategies differ in what they may read:

========================  ==========================================
family                    fields read
========================  ==========================================
true_* (upper bound)      ``s_avail``, ``s_acquired``
exp_* (imputation)        ``s_avail``, ``s_imp``
base_* (baseline)         ``s_avail``
random                    cohort size only
========================  ==========================================

No strategy reads labels. Rank-based strategies compare logits directly;
the sigmoid is strictly increasing, so this equals comparing probabilities
without the ties that float saturation of the sigmoid would introduce.
"""

from __future__ import annotations

import enum

import numpy as np

from .cohort import Cohort, ScoreRecord
from .errors import DomainError, PreconditionError
from .metrics import bernoulli_kl, logit_entropy, sigmoid

#: Bit generator behind :func:`score_random`; recorded so golden vectors can
#: be regenerated on another platform.
RANDOM_ALGORITHM = "numpy-philox4x64-random53"


class StrategyKind(str, enum.Enum):
    TRUE_KL = "true_kl"
    TRUE_RANK = "true_rank"
    TRUE_UNCERT = "true_uncert"
    EXP_KL = "exp_kl"
    EXP_PROB = "exp_prob"
    EXP_UNCERT = "exp_uncert"
    EXP_RANK = "exp_rank"
    BASE_UNCERT = "base_uncert"
    BASE_PROB = "base_prob"
    RANDOM = "random"

    @property
    def needs_imputations(self) -> bool:
        return self.value.startswith("exp_")


#: Greedy oracle strategies and the metric each one maximizes.
ORACLE_STRATEGIES = {"oracle_auroc": "auroc", "oracle_auprc": "auprc"}

ALL_STRATEGIES = tuple(k.value for k in StrategyKind) + tuple(ORACLE_STRATEGIES)

IMPUTATION_STRATEGIES = tuple(k.value for k in StrategyKind if k.needs_imputations)


def _imputations(s_imp) -> np.ndarray:
    arr = np.asarray(s_imp, dtype=np.float64)
    if arr.shape[-1] == 0:
        raise PreconditionError("imputation strategies need at least one imputed score")
    return arr


# -- per-record scores ------------------------------------------------------


def score_true_kl(record: ScoreRecord) -> float:
    return bernoulli_kl(sigmoid(record.s_avail), sigmoid(record.s_acquired))


def score_true_uncertainty_reduction(record: ScoreRecord) -> float:
    """Entropy drop from the available to the acquired prediction; may be negative."""
    return logit_entropy(record.s_avail) - logit_entropy(record.s_acquired)


def score_expected_probability(record: ScoreRecord) -> float:
    return float(np.mean(sigmoid(_imputations(record.s_imp))))


def score_expected_uncertainty_reduction(record: ScoreRecord) -> float:
    """Available entropy minus the mean entropy of the imputed predictions.

    This is the mean of per-imputation entropies, not the entropy of the
    mean imputed probability.
    """
    imp = _imputations(record.s_imp)
    return logit_entropy(record.s_avail) - float(np.mean(logit_entropy(imp)))


def score_expected_kl(record: ScoreRecord) -> float:
    imp = _imputations(record.s_imp)
    return float(np.mean(bernoulli_kl(sigmoid(record.s_avail), sigmoid(imp))))


def score_baseline_uncertainty(record: ScoreRecord) -> float:
    return logit_entropy(record.s_avail)


def score_baseline_probability(record: ScoreRecord) -> float:
    return sigmoid(record.s_avail)


# -- cohort-level scores ----------------------------------------------------


def _loo_rank(sorted_avail, own_avail, values):
    """Rank of ``values`` against every other sample's available logit.

    ``1 + #{j != i : s_avail_j < v}``; ties with others add nothing.
    ``own_avail`` broadcasts against ``values`` row-wise.
    """
    below = np.searchsorted(sorted_avail, values, side="left")
    return 1 + below - (own_avail < values)


def _check_rankable(cohort: Cohort) -> None:
    if cohort.n < 2:
        raise PreconditionError("rank change needs at least two samples")


def score_true_rank_change(cohort: Cohort) -> np.ndarray:
    """|rank at the acquired score - rank at the available score| per sample."""
    _check_rankable(cohort)
    s_avail = cohort.s_avail
    sorted_avail = np.sort(s_avail)
    before = _loo_rank(sorted_avail, s_avail, s_avail)
    after = _loo_rank(sorted_avail, s_avail, cohort.s_acquired)
    return np.abs(after - before).astype(np.float64)


def score_expected_rank_change(cohort: Cohort) -> np.ndarray:
    """Mean over imputations of the absolute leave-one-out rank change."""
    _check_rankable(cohort)
    imp = _imputations(cohort.s_imp)
    s_avail = cohort.s_avail
    sorted_avail = np.sort(s_avail)
    before = _loo_rank(sorted_avail, s_avail, s_avail)
    after = _loo_rank(sorted_avail, s_avail[:, None], imp)
    return np.mean(np.abs(after - before[:, None]), axis=1)


def score_random(cohort: Cohort | int, seed: int) -> np.ndarray:
    """Uniform [0, 1) priorities from a counter-based generator."""
    n = cohort if isinstance(cohort, int) else cohort.n
    return np.random.Generator(np.random.Philox(seed)).random(n)


def priority_scores(cohort: Cohort, strategy: str, seed: int | None = None) -> np.ndarray:
    """Priority vector of a non-oracle strategy over the whole cohort.

    The per-sample formulas are the same as the ``score_*`` record functions,
    applied column-wise.
    """
    kind = StrategyKind(strategy)
    if kind is StrategyKind.RANDOM:
        if seed is None:
            raise PreconditionError("the random strategy needs a seed")
        return score_random(cohort, seed)
    if kind is StrategyKind.TRUE_RANK:
        return score_true_rank_change(cohort)
    if kind is StrategyKind.EXP_RANK:
        return score_expected_rank_change(cohort)

    p_avail = sigmoid(cohort.s_avail)
    if kind is StrategyKind.BASE_PROB:
        return p_avail
    if kind is StrategyKind.BASE_UNCERT:
        return logit_entropy(cohort.s_avail)
    if kind is StrategyKind.TRUE_KL:
        return bernoulli_kl(p_avail, sigmoid(cohort.s_acquired))
    if kind is StrategyKind.TRUE_UNCERT:
        return logit_entropy(cohort.s_avail) - logit_entropy(cohort.s_acquired)

    p_imp = sigmoid(_imputations(cohort.s_imp))
    if kind is StrategyKind.EXP_PROB:
        return np.mean(p_imp, axis=1)
    if kind is StrategyKind.EXP_UNCERT:
        return logit_entropy(cohort.s_avail) - np.mean(logit_entropy(cohort.s_imp), axis=1)
    if kind is StrategyKind.EXP_KL:
        return np.mean(bernoulli_kl(p_avail[:, None], p_imp), axis=1)
    raise AssertionError(kind)  # pragma: no cover


def select_top(scores, budget: int) -> np.ndarray:
    """Indices of the ``budget`` highest scores, descending; ties by lowest index."""
    scores = np.asarray(scores, dtype=np.float64)
    n = scores.size
    if not 0 <= budget <= n:
        raise PreconditionError(f"budget {budget} outside [0, {n}]")
    if np.any(np.isnan(scores)):
        raise DomainError("priority scores contain NaN")
    return np.lexsort((np.arange(n), -scores))[:budget]
