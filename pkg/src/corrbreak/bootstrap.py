"""Block sums, multiplier bootstrap paths and order-statistic decisions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DataError, WindowTooLarge


@dataclass(frozen=True)
class BootstrapConfig:
    B: int = 2000
    window: Union[int, str] = "auto"
    seed: int = 0
    alpha: float = 0.05

    def validate(self):
        if self.B < 100:
            raise DataError(f"B must be at least 100, got {self.B}")
        if not 0 < self.alpha <= 0.5:
            raise DataError(f"alpha must lie in (0, 0.5], got {self.alpha}")
        if self.window != "auto" and int(self.window) < 2:
            raise WindowTooLarge(f"window must be at least 2, got {self.window}")
        return self


def check_window(m: int, n: int) -> int:
    m = int(m)
    if m < 2:
        raise WindowTooLarge(f"window must be at least 2, got {m}")
    if m > n / 2:
        raise WindowTooLarge(f"window {m} exceeds n/2 = {n / 2:g}")
    return m


def block_sums(products, m: int) -> np.ndarray:
    """Sliding sums of ``m`` consecutive entries along the last axis."""
    p = np.asarray(products, dtype=float)
    n = p.shape[-1]
    if not 1 <= m <= n:
        raise WindowTooLarge(f"window {m} outside [1, {n}]")
    c = np.concatenate([np.zeros(p.shape[:-1] + (1,)), np.cumsum(p, axis=-1)], axis=-1)
    return c[..., m:] - c[..., : n - m + 1]


def centered_blocks(products, m: int) -> np.ndarray:
    """Block sums minus ``(m/n)`` times the full-sample sum."""
    p = np.asarray(products, dtype=float)
    n = p.shape[-1]
    return block_sums(p, m) - (m / n) * p.sum(axis=-1, keepdims=True)


def bootstrap_paths(products, m: int, multipliers) -> np.ndarray:
    """One multiplier path ``Phi_{i,m}``, ``i = 1..n-m+1``.

    ``products`` is a vector (one lag) or an ``(l, n)`` array; the result has
    the matching shape with ``n - m + 1`` entries on the last axis.
    """
    p = np.asarray(products, dtype=float)
    n = p.shape[-1]
    if not 2 <= m <= n:
        raise WindowTooLarge(f"window {m} outside [2, {n}]")
    r = np.asarray(multipliers, dtype=float)
    if r.shape != (n - m + 1,):
        raise ValueError(f"need {n - m + 1} multipliers, got shape {r.shape}")
    return np.cumsum(centered_blocks(p, m) * r, axis=-1) / math.sqrt(m * (n - m + 1))


def order_index(B: int, alpha: float) -> int:
    """1-based rank ``floor(B (1 - alpha))`` of the critical order statistic."""
    return max(1, int(math.floor(B * (1.0 - alpha) + 1e-9)))


def critical_value(sample, alpha: float) -> float:
    s = np.sort(np.asarray(sample, dtype=float))
    return float(s[order_index(s.size, alpha) - 1])


def p_value(sample, statistic: float) -> float:
    """``1 - B*/B`` with ``B*`` the largest rank whose order statistic is <= the statistic."""
    s = np.asarray(sample, dtype=float)
    return 1.0 - np.count_nonzero(s <= statistic) / s.size
