"""Location of an abrupt variance change from squared residuals.

The moving-window contrast

    M(i) = (sum_{j=i-L+1}^{i} e_j^2 - sum_{j=i}^{i+L-1} e_j^2) / L

is maximized in absolute value over the trimmed range
``floor(n*zeta) <= i <= n - floor(n*zeta) + 1``.  Indices are 1-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .conventions import safe_ratio
from .errors import IndexOutOfRange, SeriesTooShort

#: max|M| must exceed this multiple of the robust scale of M to count as a break.
#: Without a break the ratio stays below 4 in about 95% of samples at n=500.
CONFIDENCE_RATIO = 4.0


def default_window(n: int) -> int:
    return int(math.floor(3.0 * n ** (1.0 / 3.0) + 1e-9))


@dataclass(frozen=True)
class VarBreakConfig:
    L: Optional[int] = None
    zeta: float = 0.2

    def resolve(self, n: int) -> tuple[int, int, int]:
        """Window and the inclusive 1-based search range ``(L, lo, hi)``."""
        if not 0 < self.zeta < 0.5:
            raise ValueError(f"zeta must lie in (0, 0.5), got {self.zeta}")
        L = default_window(n) if self.L is None else int(self.L)
        if L < 1:
            raise ValueError("window L must be positive")
        trim = int(math.floor(n * self.zeta))
        if trim < L:
            raise SeriesTooShort(
                f"trimmed range floor(n*zeta) = {trim} is shorter than the window L = {L}"
            )
        lo = trim
        hi = min(n - trim + 1, n - L + 1)
        if n < 2 * trim or lo > hi:
            raise SeriesTooShort(f"series of length {n} too short for zeta={self.zeta}, L={L}")
        return L, lo, hi


@dataclass(frozen=True)
class VarianceBreak:
    t_star: float
    index: int
    max_abs_contrast: float
    robust_scale: float
    low_confidence: bool
    L: int
    zeta: float


def _prefix(sq):
    return np.concatenate([[0.0], np.cumsum(np.asarray(sq, dtype=float))])


def contrast(sq_residuals, L: int, i: int) -> float:
    """``M(i)`` for a single 1-based index ``L <= i <= n - L + 1``."""
    sq = np.asarray(sq_residuals, dtype=float)
    n = sq.size
    if not L <= i <= n - L + 1:
        raise IndexOutOfRange(f"index {i} outside [{L}, {n - L + 1}]")
    p = _prefix(sq)
    return float(((p[i] - p[i - L]) - (p[i + L - 1] - p[i - 1])) / L)


def contrast_path(sq_residuals, L: int) -> np.ndarray:
    """``M(i)`` for every valid index; entry ``k`` holds ``M(L + k)``."""
    sq = np.asarray(sq_residuals, dtype=float)
    n = sq.size
    if n - L + 1 < L:
        raise IndexOutOfRange(f"window {L} too large for {n} points")
    p = _prefix(sq)
    i = np.arange(L, n - L + 2)
    return ((p[i] - p[i - L]) - (p[i + L - 1] - p[i - 1])) / L


def estimate_variance_break(sq_residuals, config: VarBreakConfig = VarBreakConfig()) -> VarianceBreak:
    sq = np.asarray(sq_residuals, dtype=float)
    n = sq.size
    L, lo, hi = config.resolve(n)
    path = contrast_path(sq, L)
    window = np.abs(path[lo - L: hi - L + 1])
    k = int(np.argmax(window))
    index = lo + k
    peak = float(window[k])
    trimmed = path[lo - L: hi - L + 1]
    scale = 1.4826 * float(np.median(np.abs(trimmed - np.median(trimmed))))
    low = bool(safe_ratio(peak, CONFIDENCE_RATIO * scale) <= 1.0)
    return VarianceBreak(index / n, index, peak, scale, low, L, config.zeta)
