"""ABROCA fairness metric, randomization significance test, and power analysis.

The package measures between-group classifier disparity as the absolute
area between the two groups' ROC curves (ABROCA), tests whether an
observed value exceeds chance with a group-label randomization test, and
estimates the statistical power of that test by reproducible parallel
Monte Carlo simulation over sample size, effect size, and imbalance.
"""

__version__ = "0.1.0"

from . import errors
from .dataset import ScoredDataset, read_csv, split_by_group, validate, write_csv
from .distfit import (
    FAMILIES,
    DistFit,
    cdf_function,
    fit_mle,
    kolmogorov_sf,
    ks_test,
    loglik,
    loglik_gradient,
    ppf_function,
    qq_points,
    sample_skewness,
)
from .generator import (
    CellPlan,
    SimConfig,
    auc_from_mu,
    mu_from_auc,
    plan_cells,
    simulate_dataset,
    simulate_group,
)
from .permutation import (
    TestConfig,
    TestResult,
    p_from_null,
    permute_groups,
    randomization_test,
)
from .power import (
    PowerConfig,
    PowerCurve,
    PowerEstimate,
    PowerRow,
    estimate_power,
    null_abroca_samples,
    power_sweep,
)
from .roc import RocCurve, abroca, auc, dataset_abroca, interpolate_tpr, roc_curve

__all__ = [
    "__version__",
    "errors",
    "ScoredDataset", "read_csv", "split_by_group", "validate", "write_csv",
    "RocCurve", "abroca", "auc", "dataset_abroca", "interpolate_tpr", "roc_curve",
    "SimConfig", "CellPlan", "auc_from_mu", "mu_from_auc", "plan_cells",
    "simulate_dataset", "simulate_group",
    "TestConfig", "TestResult", "p_from_null", "permute_groups", "randomization_test",
    "PowerConfig", "PowerCurve", "PowerEstimate", "PowerRow",
    "estimate_power", "null_abroca_samples", "power_sweep",
    "FAMILIES", "DistFit", "cdf_function", "fit_mle", "kolmogorov_sf", "ks_test",
    "loglik", "loglik_gradient", "ppf_function", "qq_points", "sample_skewness",
]
