"""Outer Monte Carlo loop: statistical power of the randomization test.

A power estimate repeats [simulate dataset -> randomization test] many
times and reports the fraction of replicates with p below the significance
level. Replicates are embarrassingly parallel; every replicate derives its
own random streams from (master_seed, replicate index), so estimates are
bit-identical for any worker count.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import rng as rngs
from ._fast import group_abroca, make_scratch, warmup
from .dataset import ScoredDataset
from .errors import AbrocaError, DegenerateNull
from .generator import SimConfig, simulate_dataset
from .permutation import TestConfig, randomization_test

# Stream-domain tags under one master seed; fixed forever for reproducibility.
_DOM_SIM = 0
_DOM_TEST = 1
_DOM_CELL = 2
_DOM_NULL = 3

_REPORTING_FLOOR = 100
_DEGENERATE_ABORT_FRACTION = 0.01

CSV_HEADER = (
    "n_total,auc_diff,ratio_group,ratio_pos_case,power,mc_stderr,"
    "n_iter_power,n_iter_test,alpha,baseline_auc"
)


@dataclass(frozen=True)
class PowerConfig:
    """One power-estimation condition.

    ``sim.seed`` and ``test.seed`` are ignored: all randomness derives
    from ``master_seed`` so that replicates own disjoint streams.
    """

    sim: SimConfig
    test: TestConfig
    n_iter_power: int = 500
    alpha: float = 0.05
    master_seed: int = 0

    def __post_init__(self):
        if self.n_iter_power < 1:
            raise ValueError("n_iter_power must be positive")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha={self.alpha} must lie in (0, 1)")

    def to_json_dict(self) -> dict:
        return {
            "sim": self.sim.to_json_dict(),
            "test": self.test.to_json_dict(),
            "n_iter_power": self.n_iter_power,
            "alpha": self.alpha,
            "master_seed": self.master_seed,
        }


@dataclass(frozen=True)
class PowerEstimate:
    """Rejection proportion at level alpha plus its binomial standard error."""

    power: float
    n_rejections: int
    n_iter_power: int
    mc_stderr: float
    config_echo: PowerConfig
    warnings: tuple = ()

    def to_json_dict(self) -> dict:
        return {
            "power": self.power,
            "n_rejections": self.n_rejections,
            "n_iter_power": self.n_iter_power,
            "mc_stderr": self.mc_stderr,
            "warnings": list(self.warnings),
            "config": self.config_echo.to_json_dict(),
        }


@dataclass(frozen=True)
class PowerRow:
    """One sweep cell; ``error`` is non-empty when the cell failed."""

    n_total: int
    auc_diff: float
    ratio_group: float
    ratio_pos_case: float
    power: Optional[float]
    mc_stderr: Optional[float]
    n_iter_power: int
    n_iter_test: int
    alpha: float
    baseline_auc: float
    error: str = ""

    def csv_line(self) -> str:
        power = "" if self.power is None else repr(self.power)
        stderr = "" if self.mc_stderr is None else repr(self.mc_stderr)
        return (
            f"{self.n_total},{self.auc_diff!r},{self.ratio_group!r},"
            f"{self.ratio_pos_case!r},{power},{stderr},{self.n_iter_power},"
            f"{self.n_iter_test},{self.alpha!r},{self.baseline_auc!r}"
        )


@dataclass(frozen=True)
class PowerCurve:
    """Power estimates over a grid of conditions."""

    rows: tuple

    def to_csv(self, fh) -> None:
        fh.write(CSV_HEADER + "\n")
        for row in self.rows:
            fh.write(row.csv_line() + "\n")

    @property
    def warnings(self) -> tuple:
        return tuple(f"cell {i}: {r.error}" for i, r in enumerate(self.rows) if r.error)


def _dataset_abroca_fast(ds: ScoredDataset, scratch=None) -> float:
    order = np.argsort(-ds.score, kind="stable")
    if scratch is None:
        scratch = make_scratch(ds.n)
    return float(group_abroca(ds.score[order], ds.label[order], ds.group[order], scratch))


def _replicate_chunk(args):
    """Run a batch of power replicates; returns [(index, p or None), ...]."""
    cfg, indices = args
    out = []
    for i in indices:
        sim = replace(cfg.sim, seed=rngs.derive_seed(cfg.master_seed, _DOM_SIM, i))
        test = replace(cfg.test, seed=rngs.derive_seed(cfg.master_seed, _DOM_TEST, i))
        ds = simulate_dataset(sim)
        try:
            result = randomization_test(ds, test)
        except DegenerateNull:
            out.append((i, None))
        else:
            out.append((i, result.p_value))
    return out


def _null_chunk(args):
    """Simulate a batch of null datasets; returns [(index, abroca), ...]."""
    sim_template, master_seed, indices = args
    scratch = None
    out = []
    for i in indices:
        sim = replace(sim_template, seed=rngs.derive_seed(master_seed, _DOM_NULL, i))
        ds = simulate_dataset(sim)
        if scratch is None:
            scratch = make_scratch(ds.n)
        out.append((i, _dataset_abroca_fast(ds, scratch)))
    return out


def _chunked(n_items: int, threads: int):
    chunk = max(1, math.ceil(n_items / (threads * 8)))
    return [range(start, min(start + chunk, n_items)) for start in range(0, n_items, chunk)]


def _run_chunks(worker, payloads, threads: int):
    if threads <= 1:
        for payload in payloads:
            yield worker(payload)
        return
    with ProcessPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(worker, payloads)


def estimate_power(cfg: PowerConfig, threads: int = 1) -> PowerEstimate:
    """Monte Carlo power of the randomization test under one condition.

    Counts replicates with p < alpha. Aborts when more than 1% of
    replicates exhaust the degenerate-permutation redraw budget; fewer
    count as non-rejections and are reported as a warning.
    """
    warmup()
    payloads = [(cfg, list(idx)) for idx in _chunked(cfg.n_iter_power, threads)]
    p_values: dict = {}
    for chunk in _run_chunks(_replicate_chunk, payloads, threads):
        for i, p in chunk:
            p_values[i] = p
    n_degenerate = sum(1 for p in p_values.values() if p is None)
    if n_degenerate > _DEGENERATE_ABORT_FRACTION * cfg.n_iter_power:
        raise DegenerateNull(
            f"{n_degenerate}/{cfg.n_iter_power} replicates exhausted the redraw budget"
        )
    n_rejections = sum(1 for p in p_values.values() if p is not None and p < cfg.alpha)
    power = n_rejections / cfg.n_iter_power
    stderr = math.sqrt(power * (1.0 - power) / cfg.n_iter_power)
    warnings = []
    if cfg.n_iter_power < _REPORTING_FLOOR:
        warnings.append(
            f"n_iter_power={cfg.n_iter_power} is below the reporting floor of "
            f"{_REPORTING_FLOOR}; treat as a smoke estimate"
        )
    if n_degenerate:
        warnings.append(f"{n_degenerate} replicates hit DegenerateNull and count as non-rejections")
    return PowerEstimate(power, n_rejections, cfg.n_iter_power, stderr, cfg, tuple(warnings))


def _unique_in_order(values):
    seen = []
    for v in values:
        if v not in seen:
            seen.append(v)
    return seen


def power_sweep(
    base: PowerConfig,
    n_totals: Sequence[int],
    auc_diffs: Sequence[float],
    ratio_groups: Sequence[float] = (0.5,),
    ratio_pos_cases: Sequence[float] = (0.5,),
    baseline_auc: float = 0.725,
    threads: int = 1,
    progress=None,
) -> PowerCurve:
    """Power over the Cartesian grid of the four condition axes.

    Each AUC difference d splits symmetrically around the baseline:
    auc_1 = baseline + d/2 and auc_2 = baseline - d/2, so effect size is
    not confounded with overall performance level. Cell k derives its
    master seed from (base.master_seed, k); failed cells record their
    error and the sweep continues.
    """
    axes = [
        _unique_in_order(list(n_totals)),
        _unique_in_order(list(auc_diffs)),
        _unique_in_order(list(ratio_groups)),
        _unique_in_order(list(ratio_pos_cases)),
    ]
    if any(len(axis) == 0 for axis in axes):
        raise ValueError("every grid axis needs at least one value")
    cells = list(itertools.product(*axes))
    rows = []
    for k, (n_total, d, rg, rp) in enumerate(cells):
        started = time.perf_counter()
        cell_seed = rngs.derive_seed(base.master_seed, _DOM_CELL, k)
        estimate = None
        error = ""
        try:
            sim = replace(
                base.sim,
                auc_1=baseline_auc + d / 2.0,
                auc_2=baseline_auc - d / 2.0,
                n_total=int(n_total),
                ratio_group=rg,
                ratio_pos_case=rp,
            )
            cfg = replace(base, sim=sim, master_seed=cell_seed)
            estimate = estimate_power(cfg, threads=threads)
        except AbrocaError as exc:
            error = f"{type(exc).__name__}: {exc}"
        rows.append(
            PowerRow(
                n_total=int(n_total),
                auc_diff=float(d),
                ratio_group=float(rg),
                ratio_pos_case=float(rp),
                power=None if estimate is None else estimate.power,
                mc_stderr=None if estimate is None else estimate.mc_stderr,
                n_iter_power=base.n_iter_power,
                n_iter_test=base.test.n_iter_test,
                alpha=base.alpha,
                baseline_auc=float(baseline_auc),
                error=error,
            )
        )
        if progress is not None:
            elapsed = time.perf_counter() - started
            outcome = error if error else (
                f"power={estimate.power:.4f} se={estimate.mc_stderr:.4f}"
            )
            print(
                f"[{k + 1}/{len(cells)}] n_total={n_total} auc_diff={d} "
                f"ratio_group={rg} ratio_pos_case={rp}: {outcome} ({elapsed:.1f}s)",
                file=progress,
                flush=True,
            )
    return PowerCurve(tuple(rows))


def null_abroca_samples(
    sim_template: SimConfig, n_draws: int, master_seed: int, threads: int = 1
) -> np.ndarray:
    """ABROCA values of ``n_draws`` independent datasets from one process.

    Draw i uses the stream (master_seed, null-domain, i); the returned
    array is ordered by draw index, so output never depends on threads.
    """
    if n_draws < 1:
        raise ValueError("n_draws must be positive")
    warmup()
    payloads = [(sim_template, master_seed, list(idx)) for idx in _chunked(n_draws, threads)]
    values = np.empty(n_draws, dtype=np.float64)
    for chunk in _run_chunks(_null_chunk, payloads, threads):
        for i, value in chunk:
            values[i] = value
    return values
