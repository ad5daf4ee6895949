"""Largest-entry sample correlation test and its verification tooling."""

from .corr_core import (
    DataMatrix,
    StandardizedMatrix,
    TestReport,
    centering_constant,
    largest_offdiag,
    pearson_pair,
    run_test,
    standardize_columns,
    test_statistic,
    w_stat,
)
from .distributions import (
    Rademacher,
    StandardNormal,
    StudentT,
    SymmetricPareto,
    TailSpecified,
    UniformSym,
    log_corrected_pareto,
    parse_dist,
    standardize_spec,
)
from .kernels import BACKEND
from .mc_harness import McConfig, McReport, run_replications
from .streams import RandomStream

__version__ = "0.1.0"
