"""Backend selection for the hot loops.

``CORRBREAK_BACKEND=numpy`` forces the vectorized numpy path; the default is
the numba path, falling back to numpy when numba cannot be imported. The
choice is made once, at import time.
"""
import logging
import os

import numpy as np

from . import _kernels_numpy

log = logging.getLogger(__name__)

KERNEL_IDS = {"epanechnikov": 0, "quartic": 1, "biweight": 1}

_requested = os.environ.get("CORRBREAK_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"CORRBREAK_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

if _requested == "numba":
    try:
        from . import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:  # pragma: no cover
        log.warning("numba unavailable, using numpy kernels")
        _impl = _kernels_numpy
        BACKEND = "numpy"
else:
    _impl = _kernels_numpy
    BACKEND = "numpy"


def local_linear(t, y, bandwidth, kind):
    return _impl.local_linear(
        np.ascontiguousarray(t, dtype=float),
        np.ascontiguousarray(y, dtype=float),
        float(bandwidth),
        KERNEL_IDS[kind],
    )


def classical_bootstrap(centered, multipliers, m, n, zero=False):
    return _impl.classical_bootstrap(
        np.ascontiguousarray(centered, dtype=float),
        np.ascontiguousarray(multipliers, dtype=float),
        int(m),
        int(n),
        bool(zero),
    )


def relevant_bootstrap(centered, multipliers, m, n, t_hat):
    return _impl.relevant_bootstrap(
        np.ascontiguousarray(centered, dtype=float),
        np.ascontiguousarray(multipliers, dtype=float),
        int(m),
        int(n),
        np.ascontiguousarray(t_hat, dtype=float),
    )


def ar_filter(coefs, eps, start=0):
    """Run ``h_i = sum_k coefs[i, k] h_{i-1-k} + eps_i`` from a zero state and drop ``start`` steps."""
    return _impl.ar_filter(
        np.ascontiguousarray(coefs, dtype=float),
        np.ascontiguousarray(eps, dtype=float),
        int(start),
    )
