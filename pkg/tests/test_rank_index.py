import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cama.errors import DomainError, NotFoundError
from cama.metrics import auroc
from cama.rank_index import Counts, FenwickTree, ScoreIndex

import oracles


def test_fenwick_prefix_and_point():
    tree = FenwickTree.from_counts([3, 0, 2, 5])
    assert [tree.prefix(i) for i in range(5)] == [0, 3, 3, 5, 10]
    assert tree.point(3) == 5
    tree.add(1, 4)
    assert tree.prefix(2) == 7
    assert len(tree) == 4


@given(st.lists(st.integers(0, 5), min_size=1, max_size=40), st.data())
def test_fenwick_matches_cumsum(counts, data):
    tree = FenwickTree(len(counts))
    for i, c in enumerate(counts):
        tree.add(i, c)
    ref = np.concatenate([[0], np.cumsum(counts)])
    assert [tree.prefix(i) for i in range(len(counts) + 1)] == ref.tolist()
    assert FenwickTree.from_counts(counts).prefix(len(counts)) == sum(counts)


def test_domain_with_extra_values():
    idx = ScoreIndex([1, 0, 1], [1.0, 2.0, 3.0], extra_values=[4.0])
    assert idx.domain == [1.0, 2.0, 3.0, 4.0]


def test_duplicates_collapse_with_multiplicity():
    idx = ScoreIndex([0, 0, 1], [0.5, 0.5, 0.5])
    assert idx.domain == [0.5]
    assert idx.count_cmp(0, 0.5) == Counts(0, 2, 0)
    assert idx.count_cmp(1, 0.5) == Counts(0, 1, 0)


def test_empty_class_and_all_equal():
    idx = ScoreIndex([0, 0, 0], [0.0, 0.0, 0.0])
    assert idx.count_cmp(1, 0.0) == (0, 0, 0)
    assert idx.count_cmp(0, 0.0) == (0, 3, 0)


def test_errors():
    idx = ScoreIndex([1, 0], [0.0, 1.0])
    with pytest.raises(DomainError):
        idx.count_cmp(0, 0.5)
    with pytest.raises(DomainError):
        idx.reassign(0, 0.5)
    with pytest.raises(NotFoundError):
        idx.reassign(5, 0.0)
    with pytest.raises(DomainError):
        ScoreIndex([1, 0], [0.0, np.nan])


def test_random_queries_match_naive_scan():
    rng = np.random.default_rng(11)
    labels = rng.integers(0, 2, 100)
    scores = np.round(rng.normal(size=100), 1)
    idx = ScoreIndex(labels, scores)
    domain = idx.domain
    for v in rng.choice(domain, 1000):
        cls = int(rng.integers(0, 2))
        got = idx.count_cmp(cls, float(v))
        assert tuple(got) == oracles.naive_counts(labels.tolist(), scores.tolist(), cls, v)
        assert sum(got) == idx.total(cls)


def test_reassign_sequence_matches_naive_replay():
    rng = np.random.default_rng(12)
    n = 60
    labels = rng.integers(0, 2, n)
    current = np.round(rng.normal(size=n), 1)
    extra = np.round(rng.normal(size=n), 1)
    idx = ScoreIndex(labels, current, extra_values=extra)
    domain = idx.domain
    for _ in range(50):
        i = int(rng.integers(n))
        v = float(rng.choice(domain))
        idx.reassign(i, v)
        current[i] = v
        assert idx.score(i) == v
        for q in rng.choice(domain, 10):
            for cls in (0, 1):
                assert tuple(idx.count_cmp(cls, float(q))) == oracles.naive_counts(
                    labels.tolist(), current.tolist(), cls, q
                )
        if 0 < labels.sum() < n:
            assert abs(idx.auroc() - auroc(labels, current)) <= 1e-12


def test_reassign_identity_and_roundtrip():
    labels = [1, 0, 1, 0]
    idx = ScoreIndex(labels, [0.1, 0.2, 0.3, 0.4], extra_values=[0.9])
    before = [idx.count_cmp(c, v) for c in (0, 1) for v in idx.domain]
    idx.reassign(0, 0.1)
    assert [idx.count_cmp(c, v) for c in (0, 1) for v in idx.domain] == before
    idx.reassign(0, 0.9)
    assert idx.count_cmp(1, 0.9) == (1, 1, 0)
    idx.reassign(0, 0.1)
    assert [idx.count_cmp(c, v) for c in (0, 1) for v in idx.domain] == before


@given(
    st.lists(st.tuples(st.integers(0, 1), st.integers(-5, 5)), min_size=2, max_size=40)
)
def test_index_auroc_equals_metric(rows):
    labels = [r[0] for r in rows]
    scores = [float(r[1]) for r in rows]
    if len(set(labels)) < 2:
        return
    idx = ScoreIndex(labels, scores)
    assert abs(idx.auroc() - auroc(labels, scores)) <= 1e-12
