"""Piecewise locally stationary test processes.

Errors are time-varying AR filters ``H`` rescaled by a deterministic scale
function, ``e_i = H(t_i) * scale(t_i)``, with coefficients, scale and
innovation law switching at the break points. Observations add the
quadratic trend ``mu(t) = 8 (0.25 - (t - 0.5)^2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from . import kernels
from .conventions import Series, rng_for
from .errors import UnknownModel

BURN_IN = 1000
INNOVATIONS = ("normal", "t5", "chi2")
_STREAM = {name: j for j, name in enumerate(INNOVATIONS)}


def quadratic_mean(t):
    t = np.asarray(t, dtype=float)
    return 8.0 * (-(t - 0.5) ** 2 + 0.25)


def c_scale(t):
    """``sqrt(1 - (t - 0.5)^2) / 2``."""
    return np.sqrt(1.0 - (np.asarray(t, dtype=float) - 0.5) ** 2) / 2.0


def d_scale(t):
    """``sqrt(1 - sin(t) / 2) / 2``."""
    return np.sqrt(1.0 - 0.5 * np.sin(np.asarray(t, dtype=float))) / 2.0


def draw_innovations(dist: str, count: int, seed: int, *key: int) -> np.ndarray:
    """Unit-variance, mean-zero i.i.d. draws, reproducible from ``(dist, seed, key)``."""
    if dist not in _STREAM:
        raise UnknownModel(f"unknown innovation law {dist!r}")
    if count < 1:
        raise ValueError("count must be positive")
    rng = rng_for(seed, *key, _STREAM[dist])
    if dist == "normal":
        return rng.standard_normal(count)
    if dist == "t5":
        return rng.standard_t(5, count) / math.sqrt(5.0 / 3.0)
    return (rng.chisquare(5, count) - 5.0) / math.sqrt(10.0)


@dataclass(frozen=True)
class PLSModel:
    """Regime ``j`` covers ``breaks[j-1] < t <= breaks[j]``."""

    name: str
    breaks: tuple
    ar: tuple
    scale: tuple
    innovations: tuple
    mean: Callable = quadratic_mean

    def __post_init__(self):
        r = len(self.breaks) + 1
        if not (len(self.ar) == len(self.scale) == len(self.innovations) == r):
            raise ValueError("need one AR law, scale and innovation law per regime")

    def regime(self, t) -> np.ndarray:
        return np.searchsorted(np.asarray(self.breaks, dtype=float), np.asarray(t, dtype=float), side="left")

    def with_innovations(self, dist: str) -> "PLSModel":
        return replace(self, innovations=(dist,) * len(self.innovations))


MODEL_NAMES = ("I", "II", "IIt", "III", "IIIt", "IV", "Iprime", "IIprime", "II0", "III0")
_ALIASES = {"i'": "Iprime", "ii'": "IIprime", "iprime": "Iprime", "iiprime": "IIprime"}


def get_model(name: str, lam: Optional[float] = None, innovations: Optional[str] = None) -> PLSModel:
    """Built-in model by name; ``lam`` parametrizes ``Iprime`` and ``IIprime``."""
    key = _ALIASES.get(name.lower(), name)
    lookup = {m.lower(): m for m in MODEL_NAMES}
    if key.lower() not in lookup:
        raise UnknownModel(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")
    key = lookup[key.lower()]
    half = (0.5,)
    if key == "I":
        model = PLSModel("I", (), ((0.2,),), (c_scale,), ("normal",))
    elif key in ("II", "IIt"):
        dist = "t5" if key == "IIt" else "normal"
        model = PLSModel(key, half, ((0.2,), (0.2,)), (c_scale, d_scale), (dist, dist))
    elif key in ("III", "IIIt"):
        dist = "t5" if key == "IIIt" else "normal"
        model = PLSModel(key, half, ((0.1,), (0.4,)), (c_scale, c_scale), (dist, dist))
    elif key == "IV":
        model = PLSModel("IV", half, ((0.5, 0.1), (0.3, 0.2)), (c_scale, c_scale), ("normal", "normal"))
    elif key == "Iprime":
        lam = 0.0 if lam is None else float(lam)
        model = PLSModel("Iprime", half, ((0.2,), (0.2 - lam,)), (c_scale, c_scale), ("normal", "normal"))
    elif key == "IIprime":
        lam = 0.0 if lam is None else float(lam)
        model = PLSModel("IIprime", half, ((0.1 - lam,), (0.4,)), (c_scale, c_scale), ("normal", "normal"))
    elif key == "II0":
        model = PLSModel("II0", half, ((0.2,), (0.2,)), (c_scale, d_scale), ("t5", "normal"))
    else:
        model = PLSModel("III0", half, ((0.1,), (0.4,)), (c_scale, c_scale), ("t5", "normal"))
    if innovations is not None:
        model = model.with_innovations(innovations)
    return model


def _as_model(model) -> PLSModel:
    return model if isinstance(model, PLSModel) else get_model(model)


def simulate_errors(model, n: int, seed: int = 0, innovations=None, key: tuple = ()) -> np.ndarray:
    """Error path ``e_1..e_n``.

    The recursion starts ``BURN_IN`` steps before ``t_1`` with the first
    regime's law and keeps its state across regime switches. ``innovations``
    may supply the ``BURN_IN + n`` driving values directly.
    """
    model = _as_model(model)
    if n < 2:
        raise ValueError("n must be at least 2")
    total = BURN_IN + n
    t = np.arange(1, n + 1) / n
    reg = model.regime(t)
    reg_all = np.concatenate([np.full(BURN_IN, reg[0]), reg])
    p = max(len(a) for a in model.ar)
    table = np.zeros((len(model.ar), p))
    for j, a in enumerate(model.ar):
        table[j, : len(a)] = a
    coefs = table[reg_all]
    if innovations is not None:
        eps = np.asarray(innovations, dtype=float)
        if eps.shape != (total,):
            raise ValueError(f"need {total} innovations, got shape {eps.shape}")
    else:
        eps = np.empty(total)
        for dist in sorted(set(model.innovations), key=_STREAM.get):
            draws = draw_innovations(dist, total, seed, *key)
            use = np.array([model.innovations[j] == dist for j in reg_all])
            eps[use] = draws[use]
    h = kernels.ar_filter(coefs, eps, BURN_IN)
    scale = np.empty(n)
    for j, f in enumerate(model.scale):
        mask = reg == j
        if mask.any():
            scale[mask] = f(t[mask])
    return h * scale


def simulate(model, n: int, seed: int = 0, innovations=None, key: tuple = ()) -> Series:
    """Observations ``Y_i = mu(t_i) + e_i``."""
    model = _as_model(model)
    e = simulate_errors(model, n, seed, innovations, key)
    return Series(model.mean(np.arange(1, n + 1) / n) + e)
