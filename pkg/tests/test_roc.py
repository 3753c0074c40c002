"""ROC curve, AUC, and ABROCA tests against independent oracles."""

import numpy as np
import pytest

from abroca_power import RocCurve, abroca, auc, dataset_abroca, interpolate_tpr, roc_curve
from abroca_power import ScoredDataset
from abroca_power.errors import NonFiniteScore, SingleClass


# ---------------------------------------------------------------------------
# Oracles. These recompute the quantities from first principles and stay
# independent of the implementation they check.

def oracle_auc_paircount(scores, labels):
    """O(n^2) Mann-Whitney statistic by direct pair counting."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    pos = s[y == 1]
    neg = s[y == 0]
    gt = np.count_nonzero(pos[:, None] > neg[None, :])
    tie = np.count_nonzero(pos[:, None] == neg[None, :])
    return (gt + 0.5 * tie) / (pos.size * neg.size)


def oracle_roc_points(scores, labels):
    """(fpr, tpr) at every unique threshold, descending, by direct counting."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    n_pos = np.count_nonzero(y == 1)
    n_neg = np.count_nonzero(y == 0)
    points = [(0.0, 0.0)]
    for t in sorted(set(s.tolist()), reverse=True):
        predicted_pos = s >= t
        tp = np.count_nonzero(predicted_pos & (y == 1))
        fp = np.count_nonzero(predicted_pos & (y == 0))
        points.append((fp / n_neg, tp / n_pos))
    return np.array(points)


def curve_breaks(curve):
    """Distinct fprs with (enter, exit) tpr limits, rebuilt from vertices."""
    f = []
    enter = []
    exit_ = []
    for fp, tp in zip(curve.fpr, curve.tpr):
        if f and fp == f[-1]:
            exit_[-1] = tp
        else:
            f.append(fp)
            enter.append(tp)
            exit_.append(tp)
    return np.array(f), np.array(enter), np.array(exit_)


def sample_curve(curve, grid):
    """Evaluate the curve as a function of fpr on a grid (max tpr at jumps)."""
    f, enter, exit_ = curve_breaks(curve)
    idx = np.clip(np.searchsorted(f, grid, side="right") - 1, 0, f.size - 2)
    frac = (grid - f[idx]) / (f[idx + 1] - f[idx])
    vals = exit_[idx] + (enter[idx + 1] - exit_[idx]) * frac
    at_break = f[idx] == grid
    vals[at_break] = exit_[idx[at_break]]
    vals[grid >= 1.0] = exit_[-1]
    return vals


def oracle_abroca_grid(curve_a, curve_b, n_points):
    grid = np.linspace(0.0, 1.0, n_points)
    gap = np.abs(sample_curve(curve_a, grid) - sample_curve(curve_b, grid))
    return float(np.trapezoid(gap, grid))


def random_dataset(rng, n=None, decimals=None):
    n = n or int(rng.integers(8, 120))
    decimals = decimals if decimals is not None else int(rng.integers(0, 4))
    scores = np.round(rng.standard_normal(n), decimals)
    labels = (rng.random(n) < rng.uniform(0.25, 0.75)).astype(np.int8)
    if labels.min() == labels.max():
        labels[0] = 1 - labels[0]
    return scores, labels


def random_curve(rng, n=60):
    scores, labels = random_dataset(rng, n=n)
    return roc_curve(scores, labels)


# ---------------------------------------------------------------------------
# roc_curve

def test_roc_curve_perfect_separation():
    curve = roc_curve([0.9, 0.8, 0.3, 0.1], [1, 1, 0, 0])
    expected = np.array([(0, 0), (0, 0.5), (0, 1), (0.5, 1), (1, 1)], dtype=float)
    assert np.array_equal(curve.points, expected)


def test_roc_curve_full_tie_is_diagonal():
    curve = roc_curve([0.5, 0.5], [1, 0])
    assert np.array_equal(curve.points, np.array([(0.0, 0.0), (1.0, 1.0)]))


def test_roc_curve_matches_threshold_sweep_oracle():
    rng = np.random.default_rng(1234)
    for _ in range(80):
        scores, labels = random_dataset(rng, n=20)
        curve = roc_curve(scores, labels)
        assert np.array_equal(curve.points, oracle_roc_points(scores, labels))


def test_roc_curve_invariants_on_random_data():
    rng = np.random.default_rng(99)
    for _ in range(60):
        curve = random_curve(rng, n=int(rng.integers(8, 200)))
        assert curve.fpr[0] == 0.0 and curve.tpr[0] == 0.0
        assert curve.fpr[-1] == 1.0 and curve.tpr[-1] == 1.0
        assert (np.diff(curve.fpr) >= 0).all()
        assert (np.diff(curve.tpr) >= 0).all()
        same = (np.diff(curve.fpr) == 0) & (np.diff(curve.tpr) == 0)
        assert not same.any()


def test_roc_curve_single_class_raises():
    with pytest.raises(SingleClass):
        roc_curve([0.1, 0.2, 0.3], [1, 1, 1])


def test_roc_curve_nan_score_raises():
    with pytest.raises(NonFiniteScore):
        roc_curve([0.1, np.nan, 0.3], [1, 0, 1])


# ---------------------------------------------------------------------------
# auc

def test_auc_perfect_separation():
    assert auc([0.3, 0.4, 0.1, 0.2], [1, 1, 0, 0]) == 1.0


def test_auc_single_tie_is_half():
    assert auc([0.2, 0.2], [1, 0]) == 0.5


def test_auc_equals_paircount_oracle_bitwise():
    rng = np.random.default_rng(5)
    for _ in range(200):
        scores, labels = random_dataset(rng)
        assert auc(scores, labels) == oracle_auc_paircount(scores, labels)


def test_auc_reflection():
    rng = np.random.default_rng(6)
    for _ in range(40):
        scores, labels = random_dataset(rng)
        assert auc(scores, labels) == pytest.approx(1.0 - auc(-scores, labels), abs=1e-15)


def test_auc_rank_invariance_under_increasing_transform():
    rng = np.random.default_rng(7)
    for _ in range(40):
        scores, labels = random_dataset(rng)
        assert auc(np.exp(scores), labels) == auc(scores, labels)
        assert auc(3.0 * scores + 11.0, labels) == auc(scores, labels)


def test_auc_equals_trapezoid_under_curve():
    rng = np.random.default_rng(8)
    for _ in range(40):
        scores, labels = random_dataset(rng)
        curve = roc_curve(scores, labels)
        trapezoid = np.sum(np.diff(curve.fpr) * (curve.tpr[1:] + curve.tpr[:-1]) / 2.0)
        assert auc(scores, labels) == pytest.approx(trapezoid, abs=1e-12)


# ---------------------------------------------------------------------------
# abroca

def test_abroca_identical_curves_is_zero():
    rng = np.random.default_rng(9)
    curve = random_curve(rng)
    assert abroca(curve, curve) == 0.0


def test_abroca_perfect_vs_diagonal_is_half():
    perfect = RocCurve(np.array([0.0, 0.0, 1.0]), np.array([0.0, 1.0, 1.0]))
    diagonal = RocCurve(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    assert abroca(perfect, diagonal) == pytest.approx(0.5, abs=1e-15)


def test_abroca_matches_grid_oracle():
    rng = np.random.default_rng(10)
    for _ in range(30):
        a = random_curve(rng, n=30)
        b = random_curve(rng, n=30)
        exact = abroca(a, b)
        approx = oracle_abroca_grid(a, b, 100_001)
        assert exact == pytest.approx(approx, abs=1e-5)


def test_abroca_symmetry_bounds_and_dominance():
    rng = np.random.default_rng(11)
    for _ in range(50):
        sa, ya = random_dataset(rng)
        sb, yb = random_dataset(rng)
        a = roc_curve(sa, ya)
        b = roc_curve(sb, yb)
        value = abroca(a, b)
        assert value == abroca(b, a)
        assert 0.0 <= value <= 1.0
        assert value >= abs(auc(sa, ya) - auc(sb, yb)) - 1e-12


def test_abroca_invariant_under_shared_monotone_transform():
    rng = np.random.default_rng(12)
    ds_scores = rng.standard_normal(80)
    ds_labels = (rng.random(80) < 0.5).astype(int)
    group = (rng.random(80) < 0.5).astype(int)
    sa, ya = ds_scores[group == 0], ds_labels[group == 0]
    sb, yb = ds_scores[group == 1], ds_labels[group == 1]
    before = abroca(roc_curve(sa, ya), roc_curve(sb, yb))
    after = abroca(roc_curve(np.tanh(sa) * 5 + 2, ya), roc_curve(np.tanh(sb) * 5 + 2, yb))
    assert before == pytest.approx(after, abs=1e-14)


# ---------------------------------------------------------------------------
# interpolate_tpr

def test_interpolate_diagonal():
    diagonal = RocCurve(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    assert interpolate_tpr(diagonal, 0.3) == pytest.approx(0.3, abs=1e-15)


def test_interpolate_vertex_takes_max_at_vertical():
    curve = RocCurve(np.array([0.0, 0.0, 0.5, 1.0]), np.array([0.0, 0.4, 0.8, 1.0]))
    assert interpolate_tpr(curve, 0.0) == 0.4
    assert interpolate_tpr(curve, 0.5) == 0.8
    assert interpolate_tpr(curve, 1.0) == 1.0


def test_interpolate_midpoint_is_mean_of_endpoints():
    curve = RocCurve(np.array([0.0, 0.4, 1.0]), np.array([0.0, 0.9, 1.0]))
    assert interpolate_tpr(curve, 0.2) == pytest.approx((0.0 + 0.9) / 2, abs=1e-15)
    assert interpolate_tpr(curve, 0.7) == pytest.approx((0.9 + 1.0) / 2, abs=1e-15)


def test_interpolate_rejects_out_of_range():
    diagonal = RocCurve(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        interpolate_tpr(diagonal, 1.5)


# ---------------------------------------------------------------------------
# RocCurve invariants and dataset_abroca

def test_curve_rejects_bad_endpoints():
    with pytest.raises(ValueError):
        RocCurve(np.array([0.1, 1.0]), np.array([0.0, 1.0]))


def test_curve_rejects_decreasing():
    with pytest.raises(ValueError):
        RocCurve(np.array([0.0, 0.6, 0.4, 1.0]), np.array([0.0, 0.5, 0.7, 1.0]))


def test_curve_rejects_duplicate_vertices():
    with pytest.raises(ValueError):
        RocCurve(np.array([0.0, 0.5, 0.5, 1.0]), np.array([0.0, 0.5, 0.5, 1.0]))


def test_dataset_abroca_matches_manual_composition():
    rng = np.random.default_rng(13)
    scores = rng.standard_normal(60)
    labels = (rng.random(60) < 0.5).astype(int)
    group = np.r_[np.zeros(30, dtype=int), np.ones(30, dtype=int)]
    labels[:2] = [0, 1]
    labels[30:32] = [0, 1]
    ds = ScoredDataset(scores, labels, group)
    manual = abroca(
        roc_curve(scores[:30], labels[:30]), roc_curve(scores[30:], labels[30:])
    )
    assert dataset_abroca(ds) == manual
