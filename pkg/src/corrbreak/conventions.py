"""Shared series container and the numeric conventions used everywhere.

* residuals beyond the end of the sample are zero (``e_i = 0`` for ``i > n``),
  so lag products near the end are padded with zeros;
* a ratio with zero numerator and zero denominator evaluates to one;
* vector norms are Euclidean.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, NonPositiveVariance

STANDARDIZATIONS = ("single", "product")


@dataclass(frozen=True)
class Series:
    """Observations ``Y_1..Y_n`` on the grid ``t_i = i/n``."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).reshape(-1)
        if values.size < 2:
            raise DataError(f"a series needs at least 2 observations, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise DataError("series contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def t(self) -> np.ndarray:
        return np.arange(1, self.n + 1) / self.n

    def __len__(self):
        return self.n

    def segment(self, start: int, stop: int) -> "Series":
        """Observations with 0-based indices ``start <= i < stop``, regridded."""
        return Series(self.values[start:stop])


def safe_ratio(num, den):
    """Elementwise ``num / den`` with the convention ``0/0 = 1``."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    both_zero = (num == 0) & (den == 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(both_zero, 1.0, num / np.where(both_zero, 1.0, den))
    return out if out.ndim else float(out)


def lag_products(residuals, variance, lag: int, standardization: str = "single") -> np.ndarray:
    """Standardized lag products ``e_s e_{s+lag} / sigma^2(t_s)``.

    Entries with ``s + lag > n`` are zero. With ``standardization="product"``
    the denominator is ``sigma(t_s) sigma(t_{s+lag})`` instead.
    """
    e = np.asarray(residuals, dtype=float)
    v = np.asarray(variance, dtype=float)
    n = e.size
    if v.shape != e.shape:
        raise ValueError("residuals and variance must have the same length")
    if not 1 <= lag < n:
        raise ValueError(f"lag must satisfy 1 <= lag < n, got {lag}")
    if np.any(~(v > 0)):
        raise NonPositiveVariance("variance estimate must be strictly positive")
    if standardization not in STANDARDIZATIONS:
        raise ValueError(f"unknown standardization {standardization!r}")
    out = np.zeros(n)
    head = e[: n - lag] * e[lag:]
    if standardization == "single":
        out[: n - lag] = head / v[: n - lag]
    else:
        out[: n - lag] = head / np.sqrt(v[: n - lag] * v[lag:])
    return out


def validate_lags(lags, n: int) -> tuple:
    lags = tuple(int(k) for k in lags)
    if not lags:
        raise DataError("at least one lag is required")
    if any(k < 1 for k in lags):
        raise DataError("lags must be positive integers")
    if any(b <= a for a, b in zip(lags, lags[1:])):
        raise DataError("lags must be strictly increasing")
    if lags[-1] >= n / 4:
        raise DataError(f"largest lag {lags[-1]} must be below n/4 = {n / 4:g}")
    return lags


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the stream ``(seed, *key)``.

    Streams are addressed by key rather than drawn in sequence, so a
    replication's random numbers do not depend on how work is scheduled.
    """
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))
