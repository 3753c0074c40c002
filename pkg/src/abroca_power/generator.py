"""Synthetic scored datasets with calibrated per-group AUC.

The data-generating process is the equal-variance binormal model:
negatives draw from N(0, 1) and positives from N(mu, 1), which gives a
population AUC of Phi(mu / sqrt(2)) and therefore a closed-form mu for
any target AUC. Group size and outcome prevalence are independent knobs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np
from scipy.special import ndtr, ndtri

from . import rng as rngs
from .dataset import ScoredDataset
from .errors import DomainError, InfeasibleConfig

N_TOTAL_CAP = 1_000_000


@dataclass(frozen=True)
class SimConfig:
    """Full specification of one simulated dataset.

    ``ratio_group`` is the fraction of instances in group 0 and
    ``ratio_pos_case`` the fraction of positive outcomes within each
    group (override group 1 separately via ``ratio_pos_case_g1``).
    """

    auc_1: float
    auc_2: float
    n_total: int
    ratio_group: float = 0.5
    ratio_pos_case: float = 0.5
    seed: int = 0
    ratio_pos_case_g1: Optional[float] = None
    n_cap: int = N_TOTAL_CAP

    def __post_init__(self):
        for name in ("auc_1", "auc_2", "ratio_group", "ratio_pos_case"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise DomainError(f"{name}={v} must lie strictly inside (0, 1)")
        if self.ratio_pos_case_g1 is not None and not (0.0 < self.ratio_pos_case_g1 < 1.0):
            raise DomainError(f"ratio_pos_case_g1={self.ratio_pos_case_g1} must lie in (0, 1)")
        if self.n_total < 4:
            raise InfeasibleConfig(f"n_total={self.n_total} is below the minimum of 4")
        if self.n_total > self.n_cap:
            raise InfeasibleConfig(f"n_total={self.n_total} exceeds the cap of {self.n_cap}")

    def to_json_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_json_dict(cls, d: dict) -> "SimConfig":
        return cls(**d)


@dataclass(frozen=True)
class CellPlan:
    """Integer group/label cell counts derived from a SimConfig."""

    n_group: tuple
    n_pos: tuple
    warnings: tuple = field(default=())


def mu_from_auc(auc: float) -> float:
    """Binormal separation mu such that Phi(mu / sqrt(2)) equals the AUC."""
    if not (0.0 < float(auc) < 1.0):
        raise DomainError(f"auc={auc} must lie strictly inside (0, 1)")
    return math.sqrt(2.0) * float(ndtri(auc))


def auc_from_mu(mu: float) -> float:
    """Population AUC of the binormal process with separation mu."""
    return float(ndtr(float(mu) / math.sqrt(2.0)))


def simulate_group(n_neg: int, n_pos: int, mu: float, rng: np.random.Generator):
    """Draw one group's scores: negatives first from N(0,1), then positives
    from N(mu, 1). Returns (scores, labels)."""
    if n_neg < 1 or n_pos < 1:
        raise InfeasibleConfig(f"need at least one instance per class, got {n_neg}/{n_pos}")
    scores = np.concatenate([rng.standard_normal(n_neg), mu + rng.standard_normal(n_pos)])
    labels = np.concatenate([np.zeros(n_neg, dtype=np.int8), np.ones(n_pos, dtype=np.int8)])
    return scores, labels


def _clamp(value: int, lo: int, hi: int, what: str, warnings: list) -> int:
    if value < lo:
        warnings.append(f"{what} clamped from {value} to {lo}")
        return lo
    if value > hi:
        warnings.append(f"{what} clamped from {value} to {hi}")
        return hi
    return value


def plan_cells(cfg: SimConfig) -> CellPlan:
    """Resolve fractional ratios to integer cell counts.

    Rounds half to even, then clamps so every group keeps >= 2 instances
    and every group x label cell keeps >= 1; clamps are reported.
    """
    warnings: list = []
    n0 = _clamp(round(cfg.ratio_group * cfg.n_total), 2, cfg.n_total - 2, "group 0 size", warnings)
    n1 = cfg.n_total - n0
    r1 = cfg.ratio_pos_case if cfg.ratio_pos_case_g1 is None else cfg.ratio_pos_case_g1
    p0 = _clamp(round(cfg.ratio_pos_case * n0), 1, n0 - 1, "group 0 positives", warnings)
    p1 = _clamp(round(r1 * n1), 1, n1 - 1, "group 1 positives", warnings)
    return CellPlan(n_group=(n0, n1), n_pos=(p0, p1), warnings=tuple(warnings))


def simulate_dataset(cfg: SimConfig) -> ScoredDataset:
    """Generate one dataset under the configuration's data-generating process.

    Deterministic: identical configs (seed included) yield bit-identical
    datasets. Rows are ordered group 0 then group 1, negatives before
    positives within each group.
    """
    plan = plan_cells(cfg)
    gen = rngs.stream(cfg.seed)
    (n0, n1) = plan.n_group
    (p0, p1) = plan.n_pos
    s0, y0 = simulate_group(n0 - p0, p0, mu_from_auc(cfg.auc_1), gen)
    s1, y1 = simulate_group(n1 - p1, p1, mu_from_auc(cfg.auc_2), gen)
    score = np.concatenate([s0, s1])
    label = np.concatenate([y0, y1])
    group = np.concatenate([np.zeros(n0, dtype=np.int8), np.ones(n1, dtype=np.int8)])
    return ScoredDataset(score, label, group)
