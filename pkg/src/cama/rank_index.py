"""Order-statistic index over cohort scores.

The score domain is fixed at build time (all available and acquired values),
so two Fenwick trees, one per class, answer below/equal/above counts in
O(log N) and absorb single-sample score moves in O(log N).
"""

from __future__ import annotations

from bisect import bisect_left
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NotFoundError, UndefinedMetricError
from .metrics import auroc_from_counts


class FenwickTree:
    """Prefix sums over ``size`` integer slots."""

    def __init__(self, size: int):
        self._tree = [0] * (size + 1)

    @classmethod
    def from_counts(cls, counts) -> FenwickTree:
        """Build in O(n) from per-slot counts."""
        counts = [int(c) for c in counts]
        ft = cls(len(counts))
        tree = ft._tree
        n = len(counts)
        for i, c in enumerate(counts, start=1):
            tree[i] += c
            parent = i + (i & -i)
            if parent <= n:
                tree[parent] += tree[i]
        return ft

    def __len__(self) -> int:
        return len(self._tree) - 1

    def add(self, pos: int, delta: int) -> None:
        """Add ``delta`` to slot ``pos`` (0-based)."""
        i = pos + 1
        n = len(self._tree)
        tree = self._tree
        while i < n:
            tree[i] += delta
            i += i & -i

    def prefix(self, stop: int) -> int:
        """Sum of slots ``[0, stop)``."""
        total = 0
        tree = self._tree
        i = stop
        while i > 0:
            total += tree[i]
            i &= i - 1
        return total

    def point(self, pos: int) -> int:
        return self.prefix(pos + 1) - self.prefix(pos)


class Counts(NamedTuple):
    below: int
    equal: int
    above: int


class ScoreIndex:
    """Per-class rank counts over a mutable score assignment.

    Parameters
    ----------
    labels, scores:
        Initial cohort (every sample at its available score).
    extra_values:
        Values that later :meth:`reassign` calls will use; they must be known
        up front because the domain is static.
    """

    def __init__(self, labels, scores, extra_values=()):
        labels = np.asarray(labels)
        scores = np.asarray(scores, dtype=np.float64)
        if labels.shape != scores.shape or labels.ndim != 1:
            raise DomainError("labels and scores must be 1-D and of equal length")
        if not np.all((labels == 0) | (labels == 1)):
            raise DomainError("labels must be 0 or 1")
        extra = np.asarray(extra_values, dtype=np.float64).ravel()
        domain = np.unique(np.concatenate([scores, extra]))
        if not np.all(np.isfinite(domain)):
            raise DomainError("scores must be finite")
        self._domain = domain.tolist()
        self._labels = labels.astype(np.int8).tolist()
        self._slot = np.searchsorted(domain, scores).tolist()
        self._trees = []
        for cls in (0, 1):
            counts = np.bincount(
                np.asarray(self._slot, dtype=np.int64)[labels == cls],
                minlength=domain.size,
            )
            self._trees.append(FenwickTree.from_counts(counts))
        self._totals = [int(np.sum(labels == 0)), int(np.sum(labels == 1))]

    @property
    def domain(self) -> list[float]:
        return list(self._domain)

    def __len__(self) -> int:
        return len(self._labels)

    def total(self, cls: int) -> int:
        return self._totals[cls]

    def position(self, v: float) -> int:
        """Slot of ``v`` in the compressed domain."""
        pos = bisect_left(self._domain, v)
        if pos == len(self._domain) or self._domain[pos] != v:
            raise DomainError(f"value {v!r} is not in the index domain")
        return pos

    def score(self, sample: int) -> float:
        self._check_sample(sample)
        return self._domain[self._slot[sample]]

    def label(self, sample: int) -> int:
        self._check_sample(sample)
        return self._labels[sample]

    def count_cmp(self, cls: int, v: float) -> Counts:
        """Samples of class ``cls`` scoring below, equal to, and above ``v``."""
        pos = self.position(v)
        tree = self._trees[cls]
        below = tree.prefix(pos)
        equal = tree.prefix(pos + 1) - below
        return Counts(below, equal, self._totals[cls] - below - equal)

    def reassign(self, sample: int, new_score: float) -> None:
        """Move ``sample`` to ``new_score`` (which must be in the domain)."""
        self._check_sample(sample)
        new = self.position(new_score)
        old = self._slot[sample]
        if new == old:
            return
        tree = self._trees[self._labels[sample]]
        tree.add(old, -1)
        tree.add(new, 1)
        self._slot[sample] = new

    def wins2(self) -> int:
        """Doubled AUROC pair count of the current assignment, O(N log N)."""
        neg = self._trees[0]
        total = 0
        for slot, lab in zip(self._slot, self._labels):
            if lab == 1:
                below = neg.prefix(slot)
                total += 2 * below + (neg.prefix(slot + 1) - below)
        return total

    def auroc(self) -> float:
        n_neg, n_pos = self._totals
        if n_pos == 0 or n_neg == 0:
            raise UndefinedMetricError("AUROC needs both classes")
        return auroc_from_counts(self.wins2(), n_pos, n_neg)

    def _check_sample(self, sample: int) -> None:
        if not 0 <= sample < len(self._labels):
            raise NotFoundError(f"unknown sample {sample}")
