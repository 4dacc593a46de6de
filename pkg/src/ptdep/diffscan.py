"""Pairwise dependence scans and differential-dependence screening.

A scan evaluates the dependence test for every unordered column pair of a
numeric matrix. Two scans under different conditions combine into the
probability that a pair's dependence status changed:

    p_diff = pA * (1 - pB) + pB * (1 - pA)

which is largest when one condition shows dependence and the other does
not. Pairs are independent work items; a worker-count knob parallelises
them while output order stays fixed (lexicographic by column indices).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ebayes import ShiftSearchConfig, ebayes_test
from .engine import PartitionConfig, TestResult, test_dependence
from .errors import DegenerateSample, VarMismatch
from .transforms import PairedSample


@dataclass(frozen=True)
class ExpressionMatrix:
    """Samples-by-variables numeric matrix with named columns."""

    values: np.ndarray
    var_names: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {values.shape}")
        if values.shape[0] < 1:
            raise ValueError("matrix must contain at least one sample row")
        if values.shape[1] != len(self.var_names):
            raise ValueError(
                f"{len(self.var_names)} names for {values.shape[1]} columns"
            )
        if len(set(self.var_names)) != len(self.var_names):
            raise ValueError("variable names must be unique")
        if not np.all(np.isfinite(values)):
            raise ValueError("matrix contains non-finite entries")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "var_names", tuple(str(n) for n in self.var_names))

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_vars(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.var_names.index(name)]


@dataclass(frozen=True)
class PairResult:
    """One scanned pair: a test result, or a skip reason."""

    var_a: str
    var_b: str
    result: TestResult | None
    error: str | None = None


@dataclass(frozen=True)
class DiffEdge:
    """A pair whose dependence status changed between conditions A and B."""

    var_a: str
    var_b: str
    p_dep_a: float
    p_dep_b: float
    p_diff: float
    edge_class: str  # lost_in_B | gained_in_B | indeterminate


def p_diff(p_a: float, p_b: float) -> float:
    """Probability that dependence holds in exactly one of two conditions."""
    for name, p in (("p_a", p_a), ("p_b", p_b)):
        if not (0.0 <= p <= 1.0):
            raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p_a * (1.0 - p_b) + p_b * (1.0 - p_a)


def _run_pair(m: ExpressionMatrix, i: int, j: int, cfg, scfg, method) -> PairResult:
    name_a, name_b = m.var_names[i], m.var_names[j]
    try:
        sample = PairedSample(x=m.values[:, i], y=m.values[:, j])
        if method == "ebayes":
            res = ebayes_test(sample, cfg, scfg)
        else:
            res = test_dependence(sample, cfg)
        return PairResult(var_a=name_a, var_b=name_b, result=res)
    except DegenerateSample as exc:
        return PairResult(var_a=name_a, var_b=name_b, result=None, error=str(exc))


def pairwise_scan(
    m: ExpressionMatrix,
    cfg: PartitionConfig | None = None,
    method: str = "basic",
    scfg: ShiftSearchConfig | None = None,
    workers: int = 1,
) -> list[PairResult]:
    """Dependence test for every unordered column pair.

    Degenerate columns skip their pairs with a recorded reason instead of
    failing the scan. Output order is lexicographic by column indices and
    does not depend on the worker count.
    """
    if m.n_vars < 2:
        raise ValueError("need at least two variables to scan")
    if method not in ("basic", "ebayes"):
        raise ValueError(f"method must be 'basic' or 'ebayes', got {method!r}")
    cfg = cfg or PartitionConfig()
    pairs = [(i, j) for i in range(m.n_vars) for j in range(i + 1, m.n_vars)]
    if workers <= 1:
        return [_run_pair(m, i, j, cfg, scfg, method) for i, j in pairs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_pair, m, i, j, cfg, scfg, method) for i, j in pairs]
        return [f.result() for f in futures]


def classify_edge(p_a: float, p_b: float) -> str:
    """Label a changed pair by which condition carries the dependence."""
    if p_a > 0.5 > p_b:
        return "lost_in_B"
    if p_b > 0.5 > p_a:
        return "gained_in_B"
    return "indeterminate"


def diff_scan(
    m_a: ExpressionMatrix,
    m_b: ExpressionMatrix,
    cfg: PartitionConfig | None = None,
    threshold: float = 0.95,
    method: str = "basic",
    scfg: ShiftSearchConfig | None = None,
    workers: int = 1,
) -> list[DiffEdge]:
    """Pairs whose dependence status changed between two conditions.

    Both matrices must cover the same variable names (sample counts may
    differ); condition B's columns are aligned to A's order. Pairs that are
    degenerate in either condition are skipped. Only edges with
    ``p_diff >= threshold`` are returned.
    """
    if set(m_a.var_names) != set(m_b.var_names):
        raise VarMismatch("the two matrices must carry the same variable names")
    if tuple(m_a.var_names) != tuple(m_b.var_names):
        order = [m_b.var_names.index(n) for n in m_a.var_names]
        m_b = ExpressionMatrix(values=m_b.values[:, order], var_names=m_a.var_names)

    res_a = pairwise_scan(m_a, cfg, method=method, scfg=scfg, workers=workers)
    res_b = pairwise_scan(m_b, cfg, method=method, scfg=scfg, workers=workers)
    edges: list[DiffEdge] = []
    for pa, pb in zip(res_a, res_b):
        if pa.result is None or pb.result is None:
            continue
        prob_a = pa.result.p_dependent
        prob_b = pb.result.p_dependent
        prob_diff = p_diff(prob_a, prob_b)
        if prob_diff >= threshold:
            edges.append(
                DiffEdge(
                    var_a=pa.var_a,
                    var_b=pa.var_b,
                    p_dep_a=prob_a,
                    p_dep_b=prob_b,
                    p_diff=prob_diff,
                    edge_class=classify_edge(prob_a, prob_b),
                )
            )
    return edges
