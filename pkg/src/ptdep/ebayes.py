"""Empirical-Bayes partition centering via shift-and-wrap search.

The evidence depends on where the partition's central split falls. This
module scans candidate cut points, re-standardises the wrapped data for
each, and keeps the centering that maximises the evidence for dependence
(equivalently, minimises the log Bayes factor of independence). Because
the objective is piecewise constant in the cut point between consecutive
data values, a grid over midpoints or empirical quantiles is exhaustive up
to equivalence; no continuous optimiser is involved.

Maximising over centerings inflates the dependence probability, including
for independent data. The selected probability is most useful for ranking
many pairs, not as a calibrated posterior.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import PartitionConfig, TestResult, _evaluate
from .errors import DegenerateSample
from .transforms import PairedSample, ShiftSpec, shift_wrap


@dataclass(frozen=True)
class ShiftSearchConfig:
    """Candidate grid and axis policy for the centering search.

    ``grid`` is either "quantile" (``grid_size`` evenly spaced empirical
    quantiles strictly inside the data range) or "midpoints" (every
    midpoint between consecutive distinct values). ``axis_policy`` is "x"
    or "xy"; with "xy" the two axes are searched independently and the
    better one-axis optimum wins.

    Every extra candidate is an extra draw at the null maximum, so the
    false positive rate of the optimised test grows with the grid. The
    default of 4 quantiles keeps it near 0.4 at n = 150; midpoints or
    large grids push it well above 0.7.
    """

    axis_policy: str = "x"
    grid: str = "quantile"
    grid_size: int = 4
    include_no_shift: bool = True

    def __post_init__(self):
        if self.axis_policy not in ("x", "xy"):
            raise ValueError(f"axis_policy must be 'x' or 'xy', got {self.axis_policy!r}")
        if self.grid not in ("quantile", "midpoints"):
            raise ValueError(f"grid must be 'quantile' or 'midpoints', got {self.grid!r}")
        if self.grid == "quantile" and self.grid_size < 2:
            raise ValueError("grid_size must be >= 2 for the quantile grid")


def delta_candidates(values, cfg: ShiftSearchConfig) -> np.ndarray:
    """Candidate cut points for one axis, ascending, sentinel first.

    The no-shift sentinel is a value strictly below the data minimum; the
    wrap transform leaves the sample untouched there.
    """
    arr = np.asarray(values, dtype=np.float64)
    distinct = np.unique(arr)
    if distinct.size < 2:
        raise DegenerateSample("cannot place cut points on a constant margin")
    lo, hi = float(distinct[0]), float(distinct[-1])
    if cfg.grid == "midpoints":
        cands = 0.5 * (distinct[:-1] + distinct[1:])
    else:
        probs = np.arange(1, cfg.grid_size + 1) / (cfg.grid_size + 1.0)
        q = np.quantile(arr, probs)
        q = np.unique(q)
        cands = q[(q > lo) & (q < hi)]
    if cfg.include_no_shift:
        return np.concatenate(([lo - 1.0], cands))
    return np.asarray(cands, dtype=np.float64)


def ebayes_test(
    sample: PairedSample,
    cfg: PartitionConfig | None = None,
    scfg: ShiftSearchConfig | None = None,
) -> TestResult:
    """Dependence test with empirically optimised partition centering.

    Every candidate is a full re-run: wrap, re-standardise, recount,
    re-score. The candidate with the smallest log Bayes factor wins; ties
    go to the earliest candidate, so the no-shift baseline is preferred
    when nothing beats it. With the baseline in the grid the returned
    probability of dependence can never fall below the basic test's.
    """
    cfg = cfg or PartitionConfig()
    scfg = scfg or ShiftSearchConfig()

    if sample.n == 1:
        base = _evaluate(sample, cfg)
        return _as_ebayes(base, None, None)

    best: TestResult | None = None
    best_delta: float | None = None
    best_axis: str | None = None

    if scfg.include_no_shift:
        best = _evaluate(sample, cfg)

    axes = ("x",) if scfg.axis_policy == "x" else ("x", "y")
    for axis in axes:
        values = sample.x if axis == "x" else sample.y
        grid = delta_candidates(values, cfg=scfg)
        if scfg.include_no_shift:
            grid = grid[1:]  # baseline already evaluated once, axis-independent
        for delta in grid:
            shifted = shift_wrap(sample, ShiftSpec(delta=float(delta), axis=axis))
            try:
                res = _evaluate(shifted, cfg)
            except DegenerateSample:
                # wrapping collapsed the margin onto too few values; this
                # cut defines no partition, so it cannot be the optimum
                continue
            if best is None or res.log_bf < best.log_bf:
                best = res
                best_delta = float(delta)
                best_axis = axis
    if best is None:
        raise DegenerateSample(
            "no usable centering candidate: enable include_no_shift or widen the grid"
        )
    return _as_ebayes(best, best_delta, best_axis)


def _as_ebayes(res: TestResult, delta: float | None, axis: str | None) -> TestResult:
    return TestResult(
        log_bf=res.log_bf,
        p_dependent=res.p_dependent,
        level_contributions=res.level_contributions,
        n=res.n,
        truncated=res.truncated,
        method="ebayes",
        config=res.config,
        delta_star=delta,
        shift_axis=axis,
    )
