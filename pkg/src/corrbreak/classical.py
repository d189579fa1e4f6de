"""Multi-lag CUSUM test for constant lag-k autocorrelations.

Critical values come from the multiplier bootstrap of block sums of the
standardized lag products. A ``zero`` mode replaces the CUSUM deviations by
raw partial sums to test for all-zero correlations instead.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .bootstrap import BootstrapConfig, centered_blocks, check_window, critical_value, p_value
from .conventions import Series, rng_for
from .errors import InsufficientLength
from .tuning import MVConfig, Prepared, Tuning, mv_window, prepare

MODES = ("constant", "zero")
MIN_LENGTH = 100
RECOMMENDED_LENGTH = 300


def cusum_statistic(products) -> float:
    """``max_i |S_i - (i/n) S_n|`` over ``i = 1..n``, Euclidean across lags."""
    p = np.atleast_2d(np.asarray(products, dtype=float))
    n = p.shape[1]
    s = np.cumsum(p, axis=1)
    dev = s - (np.arange(1, n + 1) / n) * s[:, -1:]
    return float(np.sqrt((dev * dev).sum(axis=0)).max())


def zero_statistic(products) -> float:
    """``max_i |S_i|`` over ``i = 1..n``."""
    p = np.atleast_2d(np.asarray(products, dtype=float))
    s = np.cumsum(p, axis=1)
    return float(np.sqrt((s * s).sum(axis=0)).max())


def check_length(n: int):
    if n < MIN_LENGTH:
        raise InsufficientLength(f"series of length {n} is below the minimum of {MIN_LENGTH}")
    if n < RECOMMENDED_LENGTH:
        warnings.warn(f"series of length {n} is shorter than the recommended {RECOMMENDED_LENGTH}",
                      stacklevel=3)


@dataclass
class ClassicalTestReport:
    statistic: float
    bootstrap: np.ndarray
    critical_value: float
    p_value: float
    reject: bool
    alpha: float
    mode: str
    lags: tuple
    window: int
    seed: int
    prepared: Prepared = field(repr=False)

    def rejects_at(self, alpha: float) -> bool:
        return self.statistic > critical_value(self.bootstrap, alpha)

    def to_dict(self) -> dict:
        prep = self.prepared
        vb = prep.variance_break
        return {
            "kind": "classical",
            "mode": "constant-correlation" if self.mode == "constant" else "zero-correlation",
            "n": prep.n,
            "statistic": self.statistic,
            "critical_value": self.critical_value,
            "p_value": self.p_value,
            "reject": self.reject,
            "alpha": self.alpha,
            "per_lag": [
                {"lag": k, "partial_sum_total": float(prep.products[u].sum())}
                for u, k in enumerate(self.lags)
            ],
            "tuning": {
                "mean_bandwidth": prep.mean_fit.bandwidth,
                "variance_bandwidths": list(prep.variance_fit.bandwidths),
                "variance_split": prep.variance_fit.break_index,
                "window": self.window,
                "L": vb.L if vb else None,
                "zeta": vb.zeta if vb else None,
                "lags": list(self.lags),
                "seed": self.seed,
                "B": int(self.bootstrap.size),
            },
            "variance_break": None if vb is None else {
                "t_star": vb.t_star, "index": vb.index, "low_confidence": vb.low_confidence,
            },
            "bootstrap": [float(x) for x in self.bootstrap],
        }


def classical_from_prepared(prep: Prepared, boot: BootstrapConfig = BootstrapConfig(),
                            mode: str = "constant", mv: MVConfig = MVConfig()) -> ClassicalTestReport:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    boot.validate()
    zero = mode == "zero"
    n = prep.n
    stat_raw = zero_statistic(prep.products) if zero else cusum_statistic(prep.products)
    statistic = stat_raw / math.sqrt(n)
    if boot.window == "auto":
        m = mv_window(prep.products, mv, seed=boot.seed, zero=zero)
    else:
        m = int(boot.window)
    m = check_window(m, n)
    R = rng_for(boot.seed, 0).standard_normal((boot.B, n - m + 1))
    sample = kernels.classical_bootstrap(centered_blocks(prep.products, m), R, m, n, zero)
    crit = critical_value(sample, boot.alpha)
    return ClassicalTestReport(
        statistic=statistic,
        bootstrap=sample,
        critical_value=crit,
        p_value=p_value(sample, statistic),
        reject=bool(statistic > crit),
        alpha=boot.alpha,
        mode=mode,
        lags=prep.lags,
        window=m,
        seed=boot.seed,
        prepared=prep,
    )


def run_classical_test(series: Series, lags: Sequence[int] = (1,), tuning: Tuning = Tuning(),
                       boot: BootstrapConfig = BootstrapConfig(), mode: str = "constant",
                       mv: MVConfig = MVConfig()) -> ClassicalTestReport:
    """Fit, standardize, bootstrap and decide.

    The null of constant (``mode="constant"``) or zero (``mode="zero"``)
    correlations at ``lags`` is rejected when ``T_n / sqrt(n)`` exceeds the
    ``floor(B (1 - alpha))``-th order statistic of the bootstrap maxima.
    """
    check_length(series.n)
    return classical_from_prepared(prepare(series, lags, tuning), boot, mode, mv)
