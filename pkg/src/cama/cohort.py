"""Cohort of per-sample score records."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class ScoreRecord:
    """One sample: label, available/acquired logits and K imputed logits."""

    sample_id: int
    label: int
    s_avail: float
    s_acquired: float
    s_imp: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def k(self) -> int:
        return int(np.asarray(self.s_imp).size)


@dataclass(frozen=True, eq=False)
class Cohort:
    """Column-oriented cohort.

    Samples are stored in ascending id order, so positional index order is
    also id order and "lowest id wins" tie rules reduce to "lowest index
    wins". Finiteness of the scores is checked by :meth:`check_finite`
    (file readers and the generator call it) rather than here, which lets
    tests poison fields a strategy must not read.
    """

    labels: np.ndarray
    s_avail: np.ndarray
    s_acquired: np.ndarray
    s_imp: np.ndarray | None = None
    ids: np.ndarray | None = None

    def __post_init__(self):
        labels = np.asarray(self.labels)
        n = labels.size
        if labels.ndim != 1 or n == 0:
            raise DomainError("a cohort needs a non-empty 1-D label vector")
        if not np.all((labels == 0) | (labels == 1)):
            raise DomainError("labels must be 0 or 1")
        s_avail = np.array(self.s_avail, dtype=np.float64)
        s_acq = np.array(self.s_acquired, dtype=np.float64)
        if s_avail.shape != (n,) or s_acq.shape != (n,):
            raise DomainError("score vectors must match the label vector in length")
        s_imp = (
            np.empty((n, 0)) if self.s_imp is None else np.array(self.s_imp, dtype=np.float64)
        )
        if s_imp.ndim != 2 or s_imp.shape[0] != n:
            raise DomainError("imputed scores must have shape (N, K)")
        ids = np.arange(n) if self.ids is None else np.asarray(self.ids)
        if ids.shape != (n,) or not np.issubdtype(ids.dtype, np.integer):
            raise DomainError("ids must be an integer vector of length N")
        if n > 1 and not np.all(np.diff(ids) > 0):
            raise DomainError("ids must be unique and in ascending order")
        if ids[0] < 0:
            raise DomainError("ids must be non-negative")
        for name, value in (
            ("labels", labels.astype(np.int8)),
            ("s_avail", s_avail),
            ("s_acquired", s_acq),
            ("s_imp", s_imp),
            ("ids", ids.astype(np.int64)),
        ):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def __len__(self) -> int:
        return int(self.labels.size)

    @property
    def n(self) -> int:
        return len(self)

    @property
    def k(self) -> int:
        return int(self.s_imp.shape[1])

    @property
    def n_pos(self) -> int:
        return int(np.count_nonzero(self.labels))

    @property
    def n_neg(self) -> int:
        return self.n - self.n_pos

    def record(self, index: int) -> ScoreRecord:
        return ScoreRecord(
            sample_id=int(self.ids[index]),
            label=int(self.labels[index]),
            s_avail=float(self.s_avail[index]),
            s_acquired=float(self.s_acquired[index]),
            s_imp=self.s_imp[index].copy(),
        )

    def records(self):
        for i in range(self.n):
            yield self.record(i)

    def substituted(self, acquired) -> np.ndarray:
        """Score vector with acquired scores at the given positions."""
        scores = self.s_avail.copy()
        idx = np.asarray(acquired, dtype=np.int64)
        scores[idx] = self.s_acquired[idx]
        return scores

    def check_finite(self) -> None:
        for name in ("s_avail", "s_acquired", "s_imp"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise DomainError(f"{name} contains non-finite values")

    def equals(self, other: Cohort) -> bool:
        """Bitwise equality of every column."""
        return all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("ids", "labels", "s_avail", "s_acquired", "s_imp")
        ) and self.s_imp.shape == other.s_imp.shape

    @classmethod
    def from_records(cls, records) -> Cohort:
        records = sorted(records, key=lambda r: r.sample_id)
        if not records:
            raise DomainError("a cohort needs at least one record")
        ks = {r.k for r in records}
        if len(ks) != 1:
            raise DomainError("all records must carry the same number of imputations")
        k = ks.pop()
        return cls(
            labels=np.array([r.label for r in records]),
            s_avail=np.array([r.s_avail for r in records], dtype=np.float64),
            s_acquired=np.array([r.s_acquired for r in records], dtype=np.float64),
            s_imp=np.array([np.asarray(r.s_imp, dtype=np.float64) for r in records]).reshape(
                len(records), k
            ),
            ids=np.array([r.sample_id for r in records], dtype=np.int64),
        )
