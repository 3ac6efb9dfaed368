"""Exact scalar metrics and divergences.

All functions are pure. Scalar inputs give Python floats back; array inputs
give arrays of the same shape.

Conventions
-----------
* AUROC compares raw logits and gives half credit to exact ties.
* AUPRC is the step sum over unique thresholds (no interpolation), computed
  on probabilities ``sigmoid(s)``.
* Entropy and KL divergence are in bits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import DomainError, UndefinedMetricError

#: Clamp applied to the second argument of :func:`bernoulli_kl`.
KL_EPS = 1e-12


@dataclass(frozen=True)
class LabeledScores:
    """Validated pair of binary labels and real-valued scores."""

    labels: np.ndarray
    scores: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        scores = np.asarray(self.scores, dtype=np.float64)
        if labels.ndim != 1 or scores.ndim != 1:
            raise DomainError("labels and scores must be one-dimensional")
        if labels.shape != scores.shape:
            raise DomainError(
                f"labels and scores differ in length ({labels.size} vs {scores.size})"
            )
        if labels.size == 0:
            raise DomainError("at least one sample is required")
        if not np.all((labels == 0) | (labels == 1)):
            raise DomainError("labels must be 0 or 1")
        object.__setattr__(self, "labels", labels.astype(np.int8))
        object.__setattr__(self, "scores", scores)

    @property
    def n_pos(self) -> int:
        return int(np.count_nonzero(self.labels))

    @property
    def n_neg(self) -> int:
        return int(self.labels.size - np.count_nonzero(self.labels))


def _finite_or_raise(x: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} must be finite")


def sigmoid(s):
    """Logistic function ``1 / (1 + exp(-s))``; rejects non-finite input."""
    arr = np.asarray(s, dtype=np.float64)
    _finite_or_raise(arr, "logit")
    out = expit(arr)
    return float(out) if out.ndim == 0 else out


def _unit_interval(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    # NaN fails both comparisons, so it is rejected here too
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise DomainError(f"{name} must lie in [0, 1]")
    return arr


def _xlog2x_ratio(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a * log2(a / b)`` with ``0 * log(0) = 0``; ``b`` must be positive."""
    pos = a > 0
    safe_a = np.where(pos, a, 1.0)
    return np.where(pos, a * np.log2(safe_a / b), 0.0)


def binary_entropy(p):
    """Entropy in bits of a Bernoulli(p) variable."""
    arr = _unit_interval(p, "probability")
    q = 1.0 - arr
    out = -(_xlog2x_ratio(arr, 1.0) + _xlog2x_ratio(q, 1.0))
    # -0.0 at the endpoints
    out = out + 0.0
    return float(out) if out.ndim == 0 else out


def logit_entropy(s):
    """``binary_entropy(sigmoid(s))``, exactly symmetric in ``s``.

    Evaluated at ``sigmoid(-|s|)``: the entropy is symmetric about 0.5 but
    ``sigmoid(-s)`` and ``1 - sigmoid(s)`` can differ in the last bit.
    """
    return binary_entropy(sigmoid(-np.abs(np.asarray(s, dtype=np.float64))))


def bernoulli_kl(p, q):
    """KL divergence ``D(Bern(p) || Bern(q))`` in bits.

    ``q`` is clamped to ``[KL_EPS, 1 - KL_EPS]`` so saturated predictions
    give a large but finite divergence. ``p`` is used as given.
    """
    pa = _unit_interval(p, "p")
    qa = np.clip(_unit_interval(q, "q"), KL_EPS, 1.0 - KL_EPS)
    out = _xlog2x_ratio(pa, qa) + _xlog2x_ratio(1.0 - pa, 1.0 - qa)
    # rounding can leave a tiny negative residue when p is close to q
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def _labeled(labels, scores) -> LabeledScores:
    if isinstance(labels, LabeledScores):
        return labels
    return LabeledScores(labels, scores)


def auroc_from_counts(wins2: int, n_pos: int, n_neg: int) -> float:
    """Normalize a doubled win count ``2*wins + ties`` into an AUROC value.

    Every AUROC in the package goes through this one division, so values
    reached incrementally and from scratch are bitwise identical.
    """
    return int(wins2) / (2 * int(n_pos) * int(n_neg))


def auroc_wins2(labels: np.ndarray, scores: np.ndarray) -> int:
    """Doubled pair count ``sum over (pos, neg) of 2*[s+ > s-] + [s+ == s-]``."""
    values, inverse = np.unique(scores, return_inverse=True)
    pos = np.bincount(inverse, weights=labels == 1, minlength=values.size).astype(np.int64)
    neg = np.bincount(inverse, weights=labels == 0, minlength=values.size).astype(np.int64)
    neg_below = np.cumsum(neg) - neg
    return int(np.sum(pos * (2 * neg_below + neg)))


def auroc(labels, scores=None) -> float:
    """Area under the ROC curve with half credit for tied pairs.

    Accepts either ``(labels, scores)`` or a :class:`LabeledScores`.

    Raises
    ------
    UndefinedMetricError
        If either class is absent.
    """
    data = _labeled(labels, scores)
    _finite_or_raise(data.scores, "scores")
    n_pos, n_neg = data.n_pos, data.n_neg
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUROC needs at least one positive and one negative")
    return auroc_from_counts(auroc_wins2(data.labels, data.scores), n_pos, n_neg)


def auprc(labels, scores=None, *, from_logits: bool = True) -> float:
    """Area under the precision-recall curve as a step sum.

    Thresholds are the unique probabilities in descending order; samples
    sharing a probability enter together as one step. With
    ``from_logits=True`` the scores are passed through :func:`sigmoid` first,
    otherwise they must already be probabilities.

    Raises
    ------
    UndefinedMetricError
        If there are no positive samples.
    """
    data = _labeled(labels, scores)
    if from_logits:
        probs = np.asarray(sigmoid(data.scores), dtype=np.float64)
    else:
        probs = _unit_interval(data.scores, "probability")
    n_pos = data.n_pos
    if n_pos == 0:
        raise UndefinedMetricError("AUPRC needs at least one positive")
    values, inverse = np.unique(probs, return_inverse=True)
    pos = np.bincount(inverse, weights=data.labels == 1, minlength=values.size)[::-1]
    neg = np.bincount(inverse, weights=data.labels == 0, minlength=values.size)[::-1]
    tp = np.cumsum(pos)
    fp = np.cumsum(neg)
    # divide once at the end so an all-precision-one curve sums to exactly 1
    return float(np.sum(pos * (tp / (tp + fp))) / n_pos)


METRICS = {"auroc": auroc, "auprc": auprc}


def evaluate(metric: str, labels, scores) -> float:
    """Dispatch by metric name (``"auroc"`` or ``"auprc"``)."""
    try:
        fn = METRICS[metric]
    except KeyError:
        raise DomainError(f"unknown metric {metric!r}") from None
    return fn(labels, scores)
