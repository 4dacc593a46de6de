"""Marginal standardisation and unit-square mapping for paired samples.

The dependence test works on points in the open unit square. Raw data gets
there in two steps: robust standardisation with the median and the scaled
median absolute deviation, then the standard normal CDF. Partitioning the
unit square into equal quadrants is then the same as partitioning the raw
axes at normal quantiles centred on the median.

An optional shift-and-wrap transform cuts one axis at a threshold and
juxtaposes the two pieces, which relocates the central split of the
downstream partition. Callers re-standardise the wrapped data; nothing here
caches statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import DegenerateSample

# Scales the MAD to estimate sigma under normality (1 / Phi^-1(0.75)).
MAD_NORMAL_FACTOR = 1.4826

# Keeps mapped coordinates strictly inside (0, 1) so no point sits on a
# partition boundary at every depth.
CLAMP_EPS = 1e-15


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < 1:
        raise ValueError(f"{name} must contain at least one value")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


@dataclass(frozen=True)
class PairedSample:
    """Two equal-length vectors of finite real observations."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = _as_vector(self.x, "x")
        y = _as_vector(self.y, "y")
        if x.size != y.size:
            raise ValueError(f"x and y must have equal length, got {x.size} and {y.size}")
        x = x.copy()
        y = y.copy()
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class RobustStats:
    """Median location and MAD-based scale for one margin."""

    location: float
    scale: float
    fallback_used: bool = False


@dataclass(frozen=True)
class UnitPoints:
    """Points strictly inside the open unit square."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        for name, arr in (("u", self.u), ("v", self.v)):
            if np.any(arr <= 0.0) or np.any(arr >= 1.0):
                raise ValueError(f"{name} coordinates must lie strictly in (0, 1)")

    @property
    def n(self) -> int:
        return self.u.size


@dataclass(frozen=True)
class ShiftSpec:
    """Cut point and axis for the shift-and-wrap transform.

    Any delta below the axis minimum acts as the no-shift sentinel: the wrap
    region is empty and the sample passes through unchanged.
    """

    delta: float
    axis: str = "x"

    def __post_init__(self):
        if self.axis not in ("x", "y"):
            raise ValueError(f"axis must be 'x' or 'y', got {self.axis!r}")
        if not np.isfinite(self.delta):
            raise ValueError("delta must be finite")


def robust_location_scale(values, *, normal_consistent: bool = True) -> RobustStats:
    """Median and scaled-MAD spread of a vector.

    Scale is ``1.4826 * median(|v - median|)`` (the factor is dropped when
    ``normal_consistent`` is off). A zero MAD falls back to the sample
    standard deviation with ``fallback_used`` set; if that is also zero the
    margin has no spread and DegenerateSample is raised.
    """
    arr = _as_vector(values, "values")
    location = float(np.median(arr))
    mad = float(np.median(np.abs(arr - location)))
    factor = MAD_NORMAL_FACTOR if normal_consistent else 1.0
    scale = factor * mad
    fallback = False
    if scale == 0.0:
        fallback = True
        scale = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
        if not np.isfinite(scale) or scale == 0.0:
            raise DegenerateSample("margin has zero spread (all values identical)")
    return RobustStats(location=location, scale=scale, fallback_used=fallback)


def normal_cdf(z):
    """Standard normal distribution function; scalar in, scalar out."""
    if np.isscalar(z) or np.ndim(z) == 0:
        return float(ndtr(z))
    return ndtr(np.asarray(z, dtype=np.float64))


def to_unit_square(sample: PairedSample, *, normal_consistent: bool = True) -> UnitPoints:
    """Map both margins through robust standardisation and the normal CDF.

    Coordinates are clamped to [CLAMP_EPS, 1 - CLAMP_EPS] so extreme
    outliers cannot land exactly on the unit-square boundary.
    """
    sx = robust_location_scale(sample.x, normal_consistent=normal_consistent)
    sy = robust_location_scale(sample.y, normal_consistent=normal_consistent)
    u = ndtr((sample.x - sx.location) / sx.scale)
    v = ndtr((sample.y - sy.location) / sy.scale)
    lo, hi = CLAMP_EPS, 1.0 - CLAMP_EPS
    return UnitPoints(u=np.clip(u, lo, hi), v=np.clip(v, lo, hi))


def shift_wrap(sample: PairedSample, spec: ShiftSpec) -> PairedSample:
    """Cut the chosen axis at ``spec.delta`` and wrap the low piece above the top.

    Values ``<= delta`` become ``(max - min) + value``; everything else,
    including the other axis, is untouched. Statistics must be recomputed on
    the result, since the wrap moves the median.
    """
    values = sample.x if spec.axis == "x" else sample.y
    lo = float(values.min())
    hi = float(values.max())
    wrapped = np.where(values <= spec.delta, (hi - lo) + values, values)
    if spec.axis == "x":
        return PairedSample(x=wrapped, y=sample.y)
    return PairedSample(x=sample.x, y=wrapped)
