"""Compiled inner loop of the AUPRC oracle.

Scores live on an ascending probability domain of ``size`` slots. ``pos`` and
``neg`` hold per-slot class counts, ``tp``/``fp`` the class counts at or
above each slot. AUPRC times ``n_pos`` is ``sum(pos[d] * tp[d] / (tp[d] + fp[d]))``.

Moving one sample between slots shifts ``tp`` (or ``fp``) by one on every
slot strictly between the two positions, so each candidate's gain is a range
sum of a per-slot "shifted precision" delta plus two endpoint corrections.
The four delta tables are kept as prefix sums:

    row 0: tp + 1    row 1: tp - 1    row 2: fp + 1    row 3: fp - 1
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _prec(t, f):
    if t < 0 or f < 0 or t + f <= 0:
        return 0.0
    return t / (t + f)


@njit(cache=True)
def _suffix_counts(pos, neg, tp, fp):
    run_p = 0.0
    run_n = 0.0
    for d in range(pos.size - 1, -1, -1):
        run_p += pos[d]
        run_n += neg[d]
        tp[d] = run_p
        fp[d] = run_n


@njit(cache=True)
def _slot_tables(pos, tp, fp, base, prefix):
    size = pos.size
    for r in range(4):
        prefix[r, 0] = 0.0
    for d in range(size):
        b = _prec(tp[d], fp[d])
        base[d] = b
        p = pos[d]
        if p > 0:
            prefix[0, d + 1] = prefix[0, d] + p * (_prec(tp[d] + 1, fp[d]) - b)
            prefix[1, d + 1] = prefix[1, d] + p * (_prec(tp[d] - 1, fp[d]) - b)
            prefix[2, d + 1] = prefix[2, d] + p * (_prec(tp[d], fp[d] + 1) - b)
            prefix[3, d + 1] = prefix[3, d] + p * (_prec(tp[d], fp[d] - 1) - b)
        else:
            for r in range(4):
                prefix[r, d + 1] = prefix[r, d]


@njit(cache=True)
def _candidate_gains(is_pos, c_slot, a_slot, live, pos, tp, fp, base, prefix, n_pos, out):
    for i in range(c_slot.size):
        if not live[i]:
            continue
        c = c_slot[i]
        a = a_slot[i]
        if a == c:
            g = 0.0
        elif is_pos[i]:
            if a > c:
                # thresholds in (c, a) gain one true positive
                g = prefix[0, a] - prefix[0, c + 1]
                g += (pos[a] + 1) * _prec(tp[a] + 1, fp[a]) - pos[a] * base[a]
                g -= base[c]
            else:
                # thresholds in (a, c) lose one true positive
                g = prefix[1, c] - prefix[1, a + 1]
                g += (pos[c] - 1) * _prec(tp[c] - 1, fp[c]) - pos[c] * base[c]
                g += base[a]
        elif a > c:
            g = prefix[2, a + 1] - prefix[2, c + 1]
        else:
            g = prefix[3, c + 1] - prefix[3, a + 1]
        out[i] = g / n_pos


@njit(cache=True)
def _value(pos, tp, fp, n_pos):
    total = 0.0
    for d in range(pos.size - 1, -1, -1):
        if pos[d] > 0:
            total += pos[d] * _prec(tp[d], fp[d])
    return total / n_pos


@njit(cache=True, nogil=True)
def _pr_greedy_kernel(is_pos, c_slot, a_slot, pos, neg, n_pos, budget, order, tol):
    """Run ``budget`` greedy steps; a non-empty ``order`` fixes the picks."""
    n = c_slot.size
    size = pos.size
    tp = np.empty(size)
    fp = np.empty(size)
    base = np.empty(size)
    prefix = np.empty((4, size + 1))
    gains = np.empty(n)
    live = np.ones(n, dtype=np.bool_)
    samples = np.empty(budget, dtype=np.int64)
    step_gains = np.empty(budget)
    values = np.empty(budget)

    _suffix_counts(pos, neg, tp, fp)
    prev = _value(pos, tp, fp, n_pos)
    fixed = order.size > 0
    for step in range(budget):
        if fixed:
            k = order[step]
        else:
            _slot_tables(pos, tp, fp, base, prefix)
            _candidate_gains(is_pos, c_slot, a_slot, live, pos, tp, fp, base, prefix, n_pos, gains)
            best = -np.inf
            for i in range(n):
                if live[i] and gains[i] > best:
                    best = gains[i]
            k = -1
            for i in range(n):
                if live[i] and gains[i] >= best - tol:
                    k = i
                    break
        if is_pos[k]:
            pos[c_slot[k]] -= 1
            pos[a_slot[k]] += 1
        else:
            neg[c_slot[k]] -= 1
            neg[a_slot[k]] += 1
        live[k] = False
        _suffix_counts(pos, neg, tp, fp)
        value = _value(pos, tp, fp, n_pos)
        samples[step] = k
        step_gains[step] = value - prev if fixed else gains[k]
        values[step] = value
        prev = value
    return samples, step_gains, values
