"""Compiled kernel for the permutation-test hot path.

The readable numpy implementations in :mod:`abroca_power.roc` are the
reference; this kernel exists because the randomization test evaluates
ABROCA once per permutation and permutation counts run into the millions.
The test suite pins the two implementations against each other.
"""

from __future__ import annotations

import numba as nb
import numpy as np

_warmed = False


@nb.njit(cache=True)
def group_abroca(score, label, group, scratch):
    """ABROCA between the ROC curves of the group-0 and group-1 rows.

    ``score`` must be sorted descending with ``label`` (int8, {0,1}) and
    ``group`` (int8, {0,1}) aligned to it. ``scratch`` is a float64 array
    of shape (6, n + 2) reused across calls. Returns -1.0 when either
    group is empty or single-class (a degenerate split).
    """
    n = score.shape[0]
    n0 = 0
    p0 = 0
    p_total = 0
    for i in range(n):
        if group[i] == 0:
            n0 += 1
            if label[i] == 1:
                p0 += 1
        elif label[i] == 1:
            p_total += 1
    p_total += p0
    n1 = n - n0
    p1 = p_total - p0
    n0_neg = n0 - p0
    n1_neg = n1 - p1
    if p0 == 0 or n0_neg == 0 or p1 == 0 or n1_neg == 0:
        return -1.0

    f0 = scratch[0]
    e0 = scratch[1]
    x0 = scratch[2]
    f1 = scratch[3]
    e1 = scratch[4]
    x1 = scratch[5]

    # Threshold sweep per group: unique scores descending, ties collapsed.
    # Vertices sharing an fpr collapse into enter/exit tpr bounds so the
    # curve becomes a function of fpr with explicit one-sided limits.
    m0 = 1
    f0[0] = 0.0
    e0[0] = 0.0
    x0[0] = 0.0
    tp = 0
    fp = 0
    prev = np.inf
    for i in range(n):
        if group[i] != 0:
            continue
        sc = score[i]
        if sc != prev and tp + fp > 0:
            fpr = fp / n0_neg
            tpr = tp / p0
            if fpr == f0[m0 - 1]:
                x0[m0 - 1] = tpr
            else:
                f0[m0] = fpr
                e0[m0] = tpr
                x0[m0] = tpr
                m0 += 1
        prev = sc
        if label[i] == 1:
            tp += 1
        else:
            fp += 1
    fpr = fp / n0_neg
    tpr = tp / p0
    if fpr == f0[m0 - 1]:
        x0[m0 - 1] = tpr
    else:
        f0[m0] = fpr
        e0[m0] = tpr
        x0[m0] = tpr
        m0 += 1

    m1 = 1
    f1[0] = 0.0
    e1[0] = 0.0
    x1[0] = 0.0
    tp = 0
    fp = 0
    prev = np.inf
    for i in range(n):
        if group[i] != 1:
            continue
        sc = score[i]
        if sc != prev and tp + fp > 0:
            fpr = fp / n1_neg
            tpr = tp / p1
            if fpr == f1[m1 - 1]:
                x1[m1 - 1] = tpr
            else:
                f1[m1] = fpr
                e1[m1] = tpr
                x1[m1] = tpr
                m1 += 1
        prev = sc
        if label[i] == 1:
            tp += 1
        else:
            fp += 1
    fpr = fp / n1_neg
    tpr = tp / p1
    if fpr == f1[m1 - 1]:
        x1[m1 - 1] = tpr
    else:
        f1[m1] = fpr
        e1[m1] = tpr
        x1[m1] = tpr
        m1 += 1

    # Exact integral of |tpr0(f) - tpr1(f)| over the merged breakpoints.
    # Both curves are linear on every merged sub-interval; a strict sign
    # change is integrated in closed form around the crossing point.
    area = 0.0
    i0 = 0
    i1 = 0
    u = 0.0
    a_lo = x0[0]
    b_lo = x1[0]
    while i0 < m0 - 1 or i1 < m1 - 1:
        fa = f0[i0 + 1] if i0 < m0 - 1 else 2.0
        fb = f1[i1 + 1] if i1 < m1 - 1 else 2.0
        v = fa if fa < fb else fb
        if fa == v:
            a_hi = e0[i0 + 1]
        else:
            a_hi = x0[i0] + (e0[i0 + 1] - x0[i0]) * ((v - f0[i0]) / (f0[i0 + 1] - f0[i0]))
        if fb == v:
            b_hi = e1[i1 + 1]
        else:
            b_hi = x1[i1] + (e1[i1 + 1] - x1[i1]) * ((v - f1[i1]) / (f1[i1 + 1] - f1[i1]))
        d1 = a_lo - b_lo
        d2 = a_hi - b_hi
        h = v - u
        if d1 * d2 < 0.0:
            area += 0.5 * (d1 * d1 + d2 * d2) / abs(d1 - d2) * h
        else:
            ad1 = d1 if d1 >= 0.0 else -d1
            ad2 = d2 if d2 >= 0.0 else -d2
            area += 0.5 * (ad1 + ad2) * h
        u = v
        if fa == v:
            i0 += 1
            a_lo = x0[i0]
        else:
            a_lo = a_hi
        if fb == v:
            i1 += 1
            b_lo = x1[i1]
        else:
            b_lo = b_hi
    return area


def make_scratch(n: int) -> np.ndarray:
    """Allocate the scratch buffer ``group_abroca`` expects for n rows."""
    return np.empty((6, n + 2), dtype=np.float64)


def warmup() -> None:
    """Force JIT compilation once per process (before forking workers)."""
    global _warmed
    if _warmed:
        return
    score = np.array([4.0, 3.0, 2.0, 1.0])
    label = np.array([1, 0, 1, 0], dtype=np.int8)
    group = np.array([0, 0, 1, 1], dtype=np.int8)
    group_abroca(score, label, group, make_scratch(4))
    _warmed = True
