"""Analytic Bayesian nonparametric dependence testing on recursive quadrant partitions."""

from .diffscan import (
    DiffEdge,
    ExpressionMatrix,
    PairResult,
    classify_edge,
    diff_scan,
    p_diff,
    pairwise_scan,
)
from .ebayes import ShiftSearchConfig, delta_candidates, ebayes_test
from .engine import (
    HyperParams,
    PartitionConfig,
    TestResult,
    log_bayes_factor,
    log_cell_evidence,
    posterior_dependence,
    test_dependence,
)
from .errors import (
    DegenerateSample,
    EmptyMatrix,
    ParseError,
    PtdepError,
    RaggedRows,
    VarMismatch,
)
from .kernels import active_backend
from .simulate import (
    PermutationNull,
    PowerReport,
    ReplicateSummary,
    SimModel,
    abs_pearson,
    generate,
    permutation_null,
    power_experiment,
    replicate_experiment,
    run_replicates,
)
from .transforms import (
    PairedSample,
    RobustStats,
    ShiftSpec,
    UnitPoints,
    normal_cdf,
    robust_location_scale,
    shift_wrap,
    to_unit_square,
)
from .tree import CellCounts, CountTree, Rect, build_count_tree, quadrant_digit

__version__ = "0.1.0"

__all__ = [
    "CellCounts",
    "CountTree",
    "DegenerateSample",
    "DiffEdge",
    "EmptyMatrix",
    "ExpressionMatrix",
    "HyperParams",
    "PairResult",
    "PairedSample",
    "ParseError",
    "PartitionConfig",
    "PermutationNull",
    "PowerReport",
    "PtdepError",
    "RaggedRows",
    "Rect",
    "ReplicateSummary",
    "RobustStats",
    "ShiftSearchConfig",
    "ShiftSpec",
    "SimModel",
    "TestResult",
    "UnitPoints",
    "VarMismatch",
    "abs_pearson",
    "active_backend",
    "build_count_tree",
    "classify_edge",
    "delta_candidates",
    "diff_scan",
    "ebayes_test",
    "generate",
    "log_bayes_factor",
    "log_cell_evidence",
    "normal_cdf",
    "p_diff",
    "pairwise_scan",
    "permutation_null",
    "posterior_dependence",
    "power_experiment",
    "quadrant_digit",
    "replicate_experiment",
    "robust_location_scale",
    "run_replicates",
    "shift_wrap",
    "test_dependence",
    "to_unit_square",
]
