"""Nonparametric randomization test for ABROCA significance.

Under the null hypothesis that group membership is unrelated to model
performance, group labels are exchangeable: shuffling them and recomputing
ABROCA builds the null distribution against which the observed value is
compared.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, fields

import numpy as np

from . import rng as rngs
from ._fast import group_abroca, make_scratch, warmup
from .dataset import ScoredDataset
from .errors import DegenerateNull, DomainError

P_CONVENTIONS = ("paper", "smoothed")

_EXHAUSTIVE_LIMIT = 200_000


@dataclass(frozen=True)
class TestConfig:
    """Randomization-test parameters.

    ``p_convention`` selects the p-value rule: ``paper`` counts strictly
    exceeding null draws over n, which can yield p = 0; ``smoothed`` is
    (#{null >= observed} + 1) / (n + 1), which cannot. ``exhaustive``
    replaces sampling with full enumeration of the distinct group
    assignments (tiny datasets only); ``n_iter_test`` is ignored there.
    """

    n_iter_test: int = 1000
    p_convention: str = "smoothed"
    max_resample: int = 100
    seed: int = 0
    exhaustive: bool = False

    def __post_init__(self):
        if self.p_convention not in P_CONVENTIONS:
            raise DomainError(f"p_convention must be one of {P_CONVENTIONS}")
        if not self.exhaustive and self.n_iter_test < 100:
            raise DomainError(f"n_iter_test={self.n_iter_test} is below the floor of 100")
        if self.max_resample < 1:
            raise DomainError(f"max_resample={self.max_resample} must be >= 1")

    def to_json_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class TestResult:
    """Observed ABROCA, its permutation null sample, and the p-value."""

    observed_abroca: float
    null_samples: np.ndarray
    p_value: float
    n_degenerate_resampled: int
    p_convention: str

    @property
    def n_iter(self) -> int:
        return int(self.null_samples.shape[0])

    def to_json_dict(self) -> dict:
        return {
            "observed_abroca": self.observed_abroca,
            "p_value": self.p_value,
            "p_convention": self.p_convention,
            "n_iter": self.n_iter,
            "n_degenerate_resampled": self.n_degenerate_resampled,
        }


def permute_groups(ds: ScoredDataset, rng: np.random.Generator) -> ScoredDataset:
    """Uniformly permute the group column; (score, label) pairs untouched.

    Group sizes are preserved exactly. The result may transiently violate
    the per-group label-coverage invariant (a degenerate permutation);
    consumers detect that condition themselves.
    """
    return ScoredDataset._unchecked(ds.score, ds.label, rng.permutation(ds.group))


def p_from_null(observed: float, null_samples, convention: str) -> float:
    """p-value of an observed statistic against null draws, per convention."""
    null = np.asarray(null_samples, dtype=np.float64)
    n = null.shape[0]
    if convention == "paper":
        return float(np.count_nonzero(null > observed) / n)
    if convention == "smoothed":
        return float((np.count_nonzero(null >= observed) + 1) / (n + 1))
    raise DomainError(f"p_convention must be one of {P_CONVENTIONS}")


def _sorted_view(ds: ScoredDataset):
    order = np.argsort(-ds.score, kind="stable")
    return order, ds.score[order], ds.label[order]


def randomization_test(ds: ScoredDataset, cfg: TestConfig) -> TestResult:
    """Test whether the observed ABROCA exceeds chance under exchangeability.

    Permutation j draws from the stream (cfg.seed, j), so the result is a
    pure function of (ds, cfg) regardless of execution order. A permutation
    that leaves a group single-class is redrawn from the same stream, up
    to ``cfg.max_resample`` times, keeping the null sample count exact.
    """
    warmup()
    if cfg.exhaustive:
        return _exhaustive_test(ds, cfg)
    order, s, y = _sorted_view(ds)
    scratch = make_scratch(ds.n)
    observed = group_abroca(s, y, ds.group[order], scratch)
    null = np.empty(cfg.n_iter_test, dtype=np.float64)
    n_redrawn = 0
    base_group = ds.group
    for j in range(cfg.n_iter_test):
        gen = rngs.stream(cfg.seed, j)
        for _ in range(cfg.max_resample + 1):
            value = group_abroca(s, y, gen.permutation(base_group)[order], scratch)
            if value >= 0.0:
                break
            n_redrawn += 1
        else:
            raise DegenerateNull(
                f"permutation {j} stayed degenerate after {cfg.max_resample} redraws"
            )
        null[j] = value
    null.setflags(write=False)
    p = p_from_null(observed, null, cfg.p_convention)
    return TestResult(float(observed), null, p, n_redrawn, cfg.p_convention)


def _exhaustive_test(ds: ScoredDataset, cfg: TestConfig) -> TestResult:
    """Enumerate every distinct group assignment instead of sampling.

    Degenerate assignments (a single-class group) are excluded from the
    null; their count is reported in ``n_degenerate_resampled``.
    """
    n = ds.n
    n0 = int(np.count_nonzero(ds.group == 0))
    total = math.comb(n, n0)
    if total > _EXHAUSTIVE_LIMIT:
        raise DomainError(
            f"exhaustive enumeration needs {total} assignments (limit {_EXHAUSTIVE_LIMIT})"
        )
    order, s, y = _sorted_view(ds)
    scratch = make_scratch(n)
    observed = group_abroca(s, y, ds.group[order], scratch)
    values = []
    n_skipped = 0
    assignment = np.empty(n, dtype=np.int8)
    for positions in itertools.combinations(range(n), n0):
        assignment.fill(1)
        assignment[list(positions)] = 0
        value = group_abroca(s, y, assignment[order], scratch)
        if value < 0.0:
            n_skipped += 1
        else:
            values.append(value)
    null = np.array(values, dtype=np.float64)
    null.setflags(write=False)
    p = p_from_null(observed, null, cfg.p_convention)
    return TestResult(float(observed), null, p, n_skipped, cfg.p_convention)
