"""Test for a relevant change in lag-k autocorrelations.

For each lag the CUSUM process of the standardized lag products locates the
break ``t_hat`` and yields ``T^r``, a consistent estimate of the squared
jump. The null ``|jump| <= delta`` for every lag is rejected when
``max_u (T^r_u - delta_u^2) / delta_u`` exceeds the bootstrap quantile over
``sqrt(n)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .bootstrap import BootstrapConfig, centered_blocks, check_window, critical_value, p_value
from .classical import check_length
from .conventions import Series, rng_for
from .errors import DataError, DegenerateBreak
from .tuning import MVConfig, Prepared, Tuning, mv_window, prepare

#: Bias correction switches on by default below this threshold.
BIAS_CORRECT_BELOW = 0.1
_DEGENERATE = 1e-6


def cusum_process(products) -> np.ndarray:
    """``V(i/n) = (S_i - (i/n) S_n) / n`` for ``i = 0..n``."""
    w = np.asarray(products, dtype=float)
    n = w.size
    s = np.concatenate([[0.0], np.cumsum(w)])
    v = (s - (np.arange(n + 1) / n) * s[-1]) / n
    v[0] = 0.0
    v[-1] = 0.0
    return v


def break_index(products) -> int:
    """Smallest ``1 <= k <= n`` maximizing ``V(k/n)^2``."""
    v = cusum_process(products)
    return int(np.argmax(v[1:] ** 2)) + 1


def estimate_correlation_break(products) -> float:
    w = np.asarray(products, dtype=float)
    return break_index(w) / w.size


def _split(n: int, t_hat: float) -> int:
    return int(math.floor(n * t_hat + 1e-9))


def _check_break(t_hat: float):
    if not 0.0 < t_hat < 1.0 or (t_hat * (1.0 - t_hat)) ** 2 < _DEGENERATE:
        raise DegenerateBreak(f"estimated break t={t_hat:g} is too close to the boundary")


def relevant_statistic(products, t_hat: float) -> float:
    """``3 / (t^2 (1-t)^2)`` times the left Riemann sum of ``V^2`` on the grid."""
    _check_break(t_hat)
    v = cusum_process(products)
    n = v.size - 1
    integral = float(np.sum(v[:-1] ** 2)) / n
    return 3.0 * integral / (t_hat**2 * (1.0 - t_hat) ** 2)


def estimate_jump(products, t_hat: float) -> float:
    """Mean of the products after ``floor(n t_hat)`` minus the mean up to it."""
    w = np.asarray(products, dtype=float)
    n = w.size
    k = _split(n, t_hat)
    if not 1 <= k <= n - 1:
        raise DegenerateBreak(f"split {k} leaves an empty side")
    return float(w[k:].mean() - w[:k].mean())


def centered_products(products, delta_hat: float, t_hat: float) -> np.ndarray:
    """``A_j = w_j - delta_hat * 1(j >= floor(n t_hat))`` with 1-based ``j``."""
    w = np.asarray(products, dtype=float)
    k = _split(w.size, t_hat)
    j = np.arange(1, w.size + 1)
    return w - delta_hat * (j >= k)


def max_statistic(t_r, deltas, bias_correct: bool) -> float:
    t_r = np.asarray(t_r, dtype=float)
    d = np.asarray(deltas, dtype=float)
    excess = t_r - d * d
    return float(np.max(excess if bias_correct else excess / d))


def assemble_bootstrap(lin, quad, t_hat, delta_hat, deltas, n: int, bias_correct: bool,
                       signed: bool = True) -> np.ndarray:
    """Combine per-lag path functionals into the replicates ``M^A_r``."""
    th = np.asarray(t_hat, dtype=float)
    denom = th**2 * (1.0 - th) ** 2
    sign = np.where(np.asarray(delta_hat) >= 0, 1.0, -1.0) if signed else np.ones_like(th)
    per_lag = (6.0 / n) * sign / denom * np.asarray(lin)
    if bias_correct:
        per_lag = per_lag * np.asarray(deltas, dtype=float) + 3.0 / n**1.5 / denom * np.asarray(quad)
    return per_lag.max(axis=1)


def bootstrap_relevant(A, t_hat, delta_hat, deltas, m: int, multipliers, bias_correct: bool,
                       signed: bool = True) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    t_hat = np.atleast_1d(np.asarray(t_hat, dtype=float))
    for t in t_hat:
        _check_break(float(t))
    lin, quad = kernels.relevant_bootstrap(centered_blocks(A, m), np.atleast_2d(multipliers), m, n, t_hat)
    return assemble_bootstrap(lin, quad, t_hat, np.atleast_1d(delta_hat), np.atleast_1d(deltas),
                              n, bias_correct, signed)


def default_bias_correct(deltas) -> bool:
    return bool(min(deltas) < BIAS_CORRECT_BELOW)


@dataclass(frozen=True)
class RelevantConfig:
    lags: tuple = (1,)
    deltas: tuple = (0.1,)
    bias_correct: Optional[bool] = None
    boot: BootstrapConfig = BootstrapConfig()
    signed: bool = True

    def validate(self):
        if len(self.deltas) != len(self.lags):
            raise DataError("need one threshold per lag")
        if any(not d > 0 for d in self.deltas):
            raise DataError("thresholds must be strictly positive")
        self.boot.validate()
        return self


@dataclass
class RelevantTestReport:
    statistic: float
    bootstrap: np.ndarray
    critical_value: float
    p_value: float
    reject: bool
    alpha: float
    bias_correct: bool
    signed: bool
    lags: tuple
    deltas: tuple
    t_hat: tuple
    delta_hat: tuple
    t_r: tuple
    window: int
    seed: int
    cusum_paths: np.ndarray = field(repr=False)
    prepared: Prepared = field(repr=False)

    def rejects_at(self, alpha: float) -> bool:
        return self.statistic > critical_value(self.bootstrap, alpha) / math.sqrt(self.prepared.n)

    def to_dict(self) -> dict:
        prep = self.prepared
        vb = prep.variance_break
        n = prep.n
        return {
            "kind": "relevant",
            "n": n,
            "statistic": self.statistic,
            "critical_value": self.critical_value,
            "p_value": self.p_value,
            "reject": self.reject,
            "alpha": self.alpha,
            "bias_correct": self.bias_correct,
            "signed": self.signed,
            "per_lag": [
                {
                    "lag": k,
                    "delta": self.deltas[u],
                    "t_hat": self.t_hat[u],
                    "break_index": _split(n, self.t_hat[u]),
                    "delta_hat": self.delta_hat[u],
                    "statistic": self.t_r[u],
                    "cusum_path": [float(x) for x in self.cusum_paths[u]],
                }
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


@dataclass
class RelevantAnalysis:
    """Threshold-free part of the relevant test.

    Everything up to the bootstrap path functionals is independent of the
    thresholds, so one analysis serves a whole sweep of ``delta`` values.
    """

    prepared: Prepared
    t_hat: np.ndarray
    delta_hat: np.ndarray
    t_r: np.ndarray
    cusum_paths: np.ndarray
    window: int
    seed: int
    lin: np.ndarray
    quad: np.ndarray

    def decide(self, deltas, bias_correct: Optional[bool] = None, alpha: float = 0.05,
               signed: bool = True) -> RelevantTestReport:
        deltas = tuple(float(d) for d in np.atleast_1d(deltas))
        if len(deltas) != self.t_hat.size:
            raise DataError("need one threshold per lag")
        if any(not d > 0 for d in deltas):
            raise DataError("thresholds must be strictly positive")
        if bias_correct is None:
            bias_correct = default_bias_correct(deltas)
        n = self.prepared.n
        sample = assemble_bootstrap(self.lin, self.quad, self.t_hat, self.delta_hat, deltas, n,
                                    bias_correct, signed)
        stat = max_statistic(self.t_r, deltas, bias_correct)
        crit = critical_value(sample, alpha) / math.sqrt(n)
        return RelevantTestReport(
            statistic=stat,
            bootstrap=sample,
            critical_value=crit,
            p_value=p_value(sample / math.sqrt(n), stat),
            reject=bool(stat > crit),
            alpha=alpha,
            bias_correct=bool(bias_correct),
            signed=signed,
            lags=self.prepared.lags,
            deltas=deltas,
            t_hat=tuple(float(x) for x in self.t_hat),
            delta_hat=tuple(float(x) for x in self.delta_hat),
            t_r=tuple(float(x) for x in self.t_r),
            window=self.window,
            seed=self.seed,
            cusum_paths=self.cusum_paths,
            prepared=self.prepared,
        )


def analyze(prep: Prepared, boot: BootstrapConfig = BootstrapConfig(), mv: MVConfig = MVConfig()) -> RelevantAnalysis:
    boot.validate()
    n = prep.n
    l = len(prep.lags)
    t_hat = np.empty(l)
    delta_hat = np.empty(l)
    t_r = np.empty(l)
    A = np.empty_like(prep.products)
    paths = np.empty((l, n + 1))
    for u in range(l):
        w = prep.products[u]
        t_hat[u] = estimate_correlation_break(w)
        t_r[u] = relevant_statistic(w, t_hat[u])
        delta_hat[u] = estimate_jump(w, t_hat[u])
        A[u] = centered_products(w, delta_hat[u], t_hat[u])
        paths[u] = cusum_process(w)
    if boot.window == "auto":
        m = mv_window(A, mv, seed=boot.seed)
    else:
        m = int(boot.window)
    m = check_window(m, n)
    R = rng_for(boot.seed, 0).standard_normal((boot.B, n - m + 1))
    lin, quad = kernels.relevant_bootstrap(centered_blocks(A, m), R, m, n, t_hat)
    return RelevantAnalysis(prep, t_hat, delta_hat, t_r, paths, m, boot.seed, lin, quad)


def run_relevant_test(series: Series, config: RelevantConfig = RelevantConfig(),
                      tuning: Tuning = Tuning(), mv: MVConfig = MVConfig()) -> RelevantTestReport:
    config.validate()
    check_length(series.n)
    prep = prepare(series, config.lags, tuning)
    analysis = analyze(prep, config.boot, mv)
    return analysis.decide(config.deltas, config.bias_correct, config.boot.alpha, config.signed)
