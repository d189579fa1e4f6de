"""Smoothing/bandwidth orchestration and minimal-volatility window selection."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .bootstrap import centered_blocks, critical_value
from .conventions import Series, lag_products, rng_for, validate_lags
from .errors import GridTooSmall, SeriesTooShort
from .smoothing import DEFAULT_GRID, SmoothFit, VarianceFit, fit_mean, fit_variance
from .varbreak import VarBreakConfig, VarianceBreak, estimate_variance_break

VARIANCE_MODES = ("piecewise", "smooth")


@dataclass(frozen=True)
class Tuning:
    """Smoothing choices shared by every test.

    ``variance_break`` overrides the estimated split of the variance fit
    (a 1-based index ``k``); it is ignored in ``smooth`` mode.
    """

    mean_bandwidth: Union[float, str] = "auto"
    variance_bandwidth: Union[float, str] = "auto"
    variance: str = "piecewise"
    kernel: str = "epanechnikov"
    L: Optional[int] = None
    zeta: float = 0.2
    standardization: str = "single"
    grid: tuple = DEFAULT_GRID
    variance_break: Optional[int] = None

    def __post_init__(self):
        if self.variance not in VARIANCE_MODES:
            raise ValueError(f"variance mode must be one of {VARIANCE_MODES}")


@dataclass(frozen=True)
class Prepared:
    lags: tuple
    mean_fit: SmoothFit
    variance_fit: VarianceFit
    variance_break: Optional[VarianceBreak]
    products: np.ndarray  # (l, n)

    @property
    def n(self):
        return self.products.shape[1]


def prepare(series: Series, lags: Sequence[int], tuning: Tuning = Tuning()) -> Prepared:
    """Mean fit, variance break, variance fit and standardized lag products."""
    lags = validate_lags(lags, series.n)
    mean_fit = fit_mean(series, tuning.mean_bandwidth, tuning.kernel, tuning.grid)
    e = mean_fit.residuals
    try:
        vbreak = estimate_variance_break(e * e, VarBreakConfig(tuning.L, tuning.zeta))
    except SeriesTooShort:
        if tuning.variance == "piecewise" and tuning.variance_break is None:
            raise
        vbreak = None
    split = None
    if tuning.variance == "piecewise":
        split = tuning.variance_break if tuning.variance_break is not None else vbreak.index
    var_fit = fit_variance(e, tuning.variance_bandwidth, split, tuning.kernel,
                           mean_bandwidth=mean_fit.bandwidth, grid=tuning.grid)
    products = np.vstack([lag_products(e, var_fit.variance, k, tuning.standardization) for k in lags])
    return Prepared(lags, mean_fit, var_fit, vbreak, products)


def window_cap(n: int) -> int:
    return max(2, min(n // 2, int(math.floor(math.sqrt(n) / 2))))


def default_mv_grid(n: int) -> tuple:
    """Integers nearest ``n^(1/3) j / 2``, ``j = 1..8``, clipped to ``[2, window_cap(n)]``."""
    cap = window_cap(n)
    base = n ** (1.0 / 3.0)
    grid = sorted({min(cap, max(2, int(np.rint(base * j / 2)))) for j in range(1, 9)})
    if len(grid) < 3:
        grid = list(range(max(2, cap - 2), cap + 1))
    return tuple(grid)


@dataclass(frozen=True)
class MVConfig:
    grid: Optional[tuple] = None
    h: int = 1
    level: float = 0.95
    B_probe: int = 200

    def resolve(self, n: int) -> tuple:
        grid = default_mv_grid(n) if self.grid is None else tuple(sorted({int(m) for m in self.grid}))
        cap = window_cap(n)
        grid = tuple(m for m in grid if 2 <= m <= cap)
        if len(grid) < 2 * self.h + 1 or len(grid) < 3:
            raise GridTooSmall(f"window grid {grid} has no interior point for h={self.h}")
        return grid


def probe_quantile(products, m: int, B: int, level: float, seed: int, zero: bool = False) -> float:
    p = np.atleast_2d(products)
    n = p.shape[1]
    R = rng_for(seed, 1, m).standard_normal((B, n - m + 1))
    sample = kernels.classical_bootstrap(centered_blocks(p, m), R, m, n, zero)
    return critical_value(sample, 1.0 - level)


def mv_window(products, config: MVConfig = MVConfig(), seed: int = 0, zero: bool = False) -> int:
    """Window whose bootstrap quantile is locally least volatile.

    For each candidate ``m_j`` the ``level`` quantile ``v(m_j)`` of the
    bootstrap maximum is estimated from ``B_probe`` replications; the interior
    candidate minimizing the standard deviation of ``v`` over its
    ``2h+1``-neighbourhood wins, ties to the smaller window.
    """
    p = np.atleast_2d(np.asarray(products, dtype=float))
    grid = config.resolve(p.shape[1])
    h = config.h
    interior = range(h, len(grid) - h)
    if len(interior) == 1:
        return grid[h]
    v = [probe_quantile(p, m, config.B_probe, config.level, seed, zero) for m in grid]
    spread = [float(np.std(v[j - h: j + h + 1])) for j in interior]
    best = min(range(len(spread)), key=lambda j: (spread[j], j))
    return grid[h + best]
