"""Local linear smoothing of the mean and of the (piecewise) variance curve."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .conventions import Series
from .errors import AllInfeasible, BandwidthTooSmall, EmptyGrid, SideTooShort

KERNELS = ("epanechnikov", "quartic")

#: Default bandwidth candidates for generalized cross validation.
DEFAULT_GRID = tuple(round(0.075 + 0.025 * j, 3) for j in range(10))

#: Variance bandwidths are kept below this fraction of the mean bandwidth.
VARIANCE_BANDWIDTH_CAP = 0.9

#: Where the local linear variance falls below this fraction of the local
#: constant (kernel-weighted mean) fit, the local constant value is used.
POSITIVITY_FRACTION = 0.25

Bandwidth = Union[float, str]


def kernel_value(x, kind: str = "epanechnikov"):
    """Kernel ``K(x)`` supported on ``[-1, 1]`` and integrating to one."""
    if kind not in kernels.KERNEL_IDS:
        raise ValueError(f"unknown kernel {kind!r}")
    x = np.asarray(x, dtype=float)
    v = np.clip(1.0 - x * x, 0.0, None)
    if kernels.KERNEL_IDS[kind] == 0:
        return 0.75 * v
    return 0.9375 * v * v


@dataclass(frozen=True)
class SmoothFit:
    mean: np.ndarray
    slope: np.ndarray
    residuals: np.ndarray
    bandwidth: float
    kernel: str = "epanechnikov"


@dataclass(frozen=True)
class VarianceFit:
    """Variance curve, the split index used (``None`` for a single fit),
    the bandwidth of each fitted piece and the positivity floor."""

    variance: np.ndarray
    break_index: Optional[int]
    bandwidths: tuple
    floor: float
    kernel: str = "epanechnikov"


def _grid_for(n):
    return np.arange(1, n + 1) / n


def _fit(values, t, bandwidth, kernel):
    if not 0 < bandwidth <= 1:
        raise BandwidthTooSmall(f"bandwidth must lie in (0, 1], got {bandwidth}")
    level, slope, hat, flat, ok = kernels.local_linear(t, values, bandwidth, kernel)
    if not ok:
        raise BandwidthTooSmall(
            f"bandwidth {bandwidth:g} leaves a singular local design at some point"
        )
    return level, slope, hat, flat


def local_linear(values, bandwidth: float, kernel: str = "epanechnikov", t=None):
    """Local linear level and slope at every design point.

    Parameters
    ----------
    values : array_like
        Responses ``y_i``.
    bandwidth : float
        Kernel half-width on the time axis.
    kernel : str
        ``"epanechnikov"`` or ``"quartic"``.
    t : array_like, optional
        Increasing design points; defaults to ``i/n``.

    Returns
    -------
    level, slope : ndarray
    """
    y = np.asarray(values, dtype=float)
    t = _grid_for(y.size) if t is None else np.asarray(t, dtype=float)
    level, slope, _, _ = _fit(y, t, bandwidth, kernel)
    return level, slope


def gcv_score(values, bandwidth: float, kernel: str = "epanechnikov", t=None) -> float:
    """``(RSS/n) / (1 - tr(H)/n)^2``; infinite when the fit is infeasible."""
    y = np.asarray(values, dtype=float)
    t = _grid_for(y.size) if t is None else np.asarray(t, dtype=float)
    try:
        level, _, hat, _ = _fit(y, t, bandwidth, kernel)
    except BandwidthTooSmall:
        return math.inf
    n = y.size
    dof = 1.0 - hat.sum() / n
    if dof <= 0:
        return math.inf
    rss = float(np.sum((y - level) ** 2))
    return (rss / n) / dof**2


def gcv_bandwidth(series, kernel: str = "epanechnikov", grid: Sequence[float] = DEFAULT_GRID, t=None) -> float:
    """Grid minimizer of the GCV score, ties going to the smaller bandwidth."""
    y = series.values if isinstance(series, Series) else np.asarray(series, dtype=float)
    grid = sorted(float(g) for g in grid)
    if not grid:
        raise EmptyGrid("bandwidth grid is empty")
    scores = [gcv_score(y, b, kernel, t) for b in grid]
    best = min(range(len(grid)), key=lambda j: (scores[j], j))
    if not math.isfinite(scores[best]):
        raise AllInfeasible("no feasible bandwidth in the grid")
    return grid[best]


def fit_mean(series: Series, bandwidth: Bandwidth = "auto", kernel: str = "epanechnikov",
             grid: Sequence[float] = DEFAULT_GRID) -> SmoothFit:
    y = series.values
    if bandwidth == "auto":
        bandwidth = gcv_bandwidth(y, kernel, grid)
    bandwidth = float(bandwidth)
    level, slope, _, _ = _fit(y, series.t, bandwidth, kernel)
    return SmoothFit(level, slope, y - level, bandwidth, kernel)


def variance_grid(mean_bandwidth: Optional[float], grid: Sequence[float] = DEFAULT_GRID):
    """Candidate variance bandwidths, capped at 0.9 times the mean bandwidth."""
    if mean_bandwidth is None:
        return sorted(grid)
    cap = VARIANCE_BANDWIDTH_CAP * mean_bandwidth
    kept = sorted(g for g in grid if g <= cap)
    return kept or [cap]


def _fit_piece(sq, t, n, bandwidth, kernel, cands):
    if bandwidth == "auto":
        fits = [c for c in cands if math.ceil(2 * c * n) <= sq.size]
        bandwidth = gcv_bandwidth(sq, kernel, fits or [(sq.size // 2) / n], t=t)
    bandwidth = float(bandwidth)
    need = math.ceil(2 * bandwidth * n)
    if sq.size < need:
        raise SideTooShort(
            f"segment of {sq.size} points is shorter than 2*bandwidth*n = {need}"
        )
    level, _, _, flat = _fit(sq, t, bandwidth, kernel)
    low = level < POSITIVITY_FRACTION * flat
    return np.where(low, flat, level), bandwidth


def fit_variance(residuals, bandwidth: Bandwidth = "auto", break_index: Optional[int] = None,
                 kernel: str = "epanechnikov", mean_bandwidth: Optional[float] = None,
                 grid: Sequence[float] = DEFAULT_GRID) -> VarianceFit:
    """Local linear fit of squared residuals, optionally split at ``break_index``.

    With a split index ``k`` the points ``t_i <= k/n`` use a fit built only from
    ``i <= k`` and the others a fit built only from ``i > k``. Points where the
    local linear value drops below a quarter of the local constant fit take the
    local constant value, and the curve is floored at ``1e-8`` times the sample
    variance of the residuals.
    """
    e = np.asarray(residuals, dtype=float)
    n = e.size
    sq = e * e
    t = _grid_for(n)
    cands = variance_grid(mean_bandwidth, grid)
    if break_index is None:
        var, c = _fit_piece(sq, t, n, bandwidth, kernel, cands)
        widths = (c,)
    else:
        k = int(break_index)
        if not 1 <= k <= n - 1:
            raise SideTooShort(f"break index {k} leaves an empty side")
        left, c_left = _fit_piece(sq[:k], t[:k], n, bandwidth, kernel, cands)
        right, c_right = _fit_piece(sq[k:], t[k:], n, bandwidth, kernel, cands)
        var = np.concatenate([left, right])
        widths = (c_left, c_right)
        break_index = k
    spread = float(np.var(e))
    floor = max(1e-8 * spread, np.finfo(float).tiny)
    return VarianceFit(np.maximum(var, floor), break_index, widths, floor, kernel)
