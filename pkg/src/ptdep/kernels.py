"""Hot evidence kernels: quadrant counting fused with log-gamma accumulation.

Two interchangeable implementations compute per-level log evidence sums
directly from unit-square coordinates, without building an explicit tree:

* ``_logbf_numba`` sorts one packed base-4 address per point and walks
  prefix runs; compiled with ``@njit(cache=True, nogil=True)``.
* ``_logbf_numpy`` is a vectorised fallback using ``np.unique`` grouping
  per level.

Backend selection: the ``PTDEP_BACKEND`` environment variable ("numba" or
"numpy") wins; otherwise numba is used when importable. Both backends
return identical groupings; floating-point sums may differ in the last
couple of ulps because accumulation order differs. ``benchmarks/
bench_backends.py`` compares their throughput.

Level convention: the split of the root counts as level 1, so a cell whose
address has m digits splits at level m + 1 with concentration ``c * (m+1)**2``.
"""

from __future__ import annotations

import math
import os

import numpy as np
from scipy.special import gammaln

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency, but stay importable
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap

# 2 bits per level in an int64 address, keep one bit of headroom.
MAX_DEPTH_CAP = 30


def _select_backend() -> str:
    env = os.environ.get("PTDEP_BACKEND", "").strip().lower()
    if env in ("numba", "numpy"):
        if env == "numba" and not HAVE_NUMBA:
            raise RuntimeError("PTDEP_BACKEND=numba requested but numba is not importable")
        return env
    return "numba" if HAVE_NUMBA else "numpy"


_BACKEND = _select_backend()


def active_backend() -> str:
    """Name of the kernel implementation in use ("numba" or "numpy")."""
    return _BACKEND


@njit(cache=True, nogil=True)
def _log_cell_term(n0: int, n1: int, n2: int, n3: int, a: float, const: float) -> float:
    lg = math.lgamma
    return (
        lg(n0 + n2 + 2.0 * a)
        + lg(n1 + n3 + 2.0 * a)
        + lg(n0 + n1 + 2.0 * a)
        + lg(n2 + n3 + 2.0 * a)
        - lg(n0 + n1 + n2 + n3 + 4.0 * a)
        - lg(n0 + a)
        - lg(n1 + a)
        - lg(n2 + a)
        - lg(n3 + a)
        + const
    )


@njit(cache=True, nogil=True)
def _logbf_numba(u: np.ndarray, v: np.ndarray, depth_cap: int, c: float):
    n = u.shape[0]
    levels = np.zeros(depth_cap, dtype=np.float64)
    if n <= 1:
        return levels, 0, False

    # Packed quaternary address, level 1 in the top bits. Repeated doubling
    # extracts exact binary digits because the scale factors are powers of 2.
    addr = np.empty(n, dtype=np.int64)
    for i in range(n):
        x = u[i]
        y = v[i]
        a = 0
        for _ in range(depth_cap):
            x = x * 2.0
            y = y * 2.0
            bx = 0
            if x >= 1.0:
                bx = 1
                x -= 1.0
            by = 0
            if y >= 1.0:
                by = 1
                y -= 1.0
            a = (a << 2) | (by << 1) | bx
        addr[i] = a
    addr.sort()

    truncated = False
    for i in range(n - 1):
        if addr[i] == addr[i + 1]:
            truncated = True
            break

    max_level = 0
    for k in range(1, depth_cap + 1):
        shift = 2 * (depth_cap - k)
        pshift = shift + 2
        a_k = c * k * k
        const = (
            math.lgamma(4.0 * a_k)
            + 4.0 * math.lgamma(a_k)
            - 4.0 * math.lgamma(2.0 * a_k)
        )
        level_sum = 0.0
        any_cell = False
        i = 0
        while i < n:
            prefix = addr[i] >> pshift
            j = i + 1
            while j < n and (addr[j] >> pshift) == prefix:
                j += 1
            if j - i >= 2:
                c0 = 0
                c1 = 0
                c2 = 0
                c3 = 0
                for t in range(i, j):
                    d = (addr[t] >> shift) & 3
                    if d == 0:
                        c0 += 1
                    elif d == 1:
                        c1 += 1
                    elif d == 2:
                        c2 += 1
                    else:
                        c3 += 1
                level_sum += _log_cell_term(c0, c1, c2, c3, a_k, const)
                any_cell = True
            i = j
        if not any_cell:
            break
        max_level = k
        levels[k - 1] = level_sum
    return levels, max_level, truncated


def _logbf_numpy(u: np.ndarray, v: np.ndarray, depth_cap: int, c: float):
    n = u.size
    levels = np.zeros(depth_cap, dtype=np.float64)
    if n <= 1:
        return levels, 0, False

    uu = u
    vv = v
    max_level = 0
    truncated = False
    for k in range(1, depth_cap + 1):
        scale = 2.0**k
        ix = (uu * scale).astype(np.int64)
        iy = (vv * scale).astype(np.int64)
        pcode = ((iy >> 1) << (k - 1)) | (ix >> 1)
        digit = (ix & 1) | ((iy & 1) << 1)
        parents, inverse = np.unique(pcode, return_inverse=True)
        counts4 = np.bincount(inverse * 4 + digit, minlength=4 * parents.size)
        counts4 = counts4.reshape(-1, 4)
        totals = counts4.sum(axis=1)
        retained = totals >= 2
        if not retained.any():
            break
        max_level = k
        a = c * k * k
        cnt = counts4[retained].astype(np.float64)
        n0, n1, n2, n3 = cnt[:, 0], cnt[:, 1], cnt[:, 2], cnt[:, 3]
        terms = (
            gammaln(n0 + n2 + 2.0 * a)
            + gammaln(n1 + n3 + 2.0 * a)
            + gammaln(n0 + n1 + 2.0 * a)
            + gammaln(n2 + n3 + 2.0 * a)
            - gammaln(n0 + n1 + n2 + n3 + 4.0 * a)
            - gammaln(n0 + a)
            - gammaln(n1 + a)
            - gammaln(n2 + a)
            - gammaln(n3 + a)
            + gammaln(4.0 * a)
            + 4.0 * gammaln(a)
            - 4.0 * gammaln(2.0 * a)
        )
        levels[k - 1] = float(terms.sum())

        # Points whose level-k cell holds a single point can never sit in a
        # retained cell again; drop them before the next level.
        ccode = (iy << k) | ix
        cells, cinv, ccounts = np.unique(ccode, return_inverse=True, return_counts=True)
        keep = ccounts[cinv] >= 2
        if k == depth_cap:
            truncated = bool(keep.any())
            break
        uu = uu[keep]
        vv = vv[keep]
        if uu.size < 2:
            break
    return levels, max_level, truncated


def logbf_levels(u: np.ndarray, v: np.ndarray, depth_cap: int, c: float):
    """Per-level log evidence contributions for unit-square points.

    Returns ``(levels, truncated)`` where ``levels[k-1]`` sums the log
    evidence of every cell split at level k, trimmed to the deepest level
    with a retained cell. The total log Bayes factor (independence over
    dependence) is ``levels.sum()``.
    """
    if depth_cap < 1 or depth_cap > MAX_DEPTH_CAP:
        raise ValueError(f"depth_cap must be in [1, {MAX_DEPTH_CAP}]")
    u = np.ascontiguousarray(u, dtype=np.float64)
    v = np.ascontiguousarray(v, dtype=np.float64)
    if _BACKEND == "numba":
        levels, max_level, truncated = _logbf_numba(u, v, depth_cap, float(c))
    else:
        levels, max_level, truncated = _logbf_numpy(u, v, depth_cap, float(c))
    return levels[:max_level].copy(), bool(truncated)
