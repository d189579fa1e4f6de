"""Loop kernels compiled with numba."""
import os

import numpy as np
from numba import config, njit, prange

# The bundled TBB is often too old; avoid the warning unless a layer was chosen.
if "NUMBA_THREADING_LAYER" not in os.environ:
    config.THREADING_LAYER = "workqueue"


@njit(cache=True, inline="always")
def _kernel(u, kind):
    if u <= -1.0 or u >= 1.0:
        return 0.0
    if kind == 0:
        return 0.75 * (1.0 - u * u)
    v = 1.0 - u * u
    return 0.9375 * v * v


@njit(cache=True)
def local_linear(t, y, b, kind):
    n = t.size
    level = np.empty(n)
    slope = np.empty(n)
    hat = np.empty(n)
    flat = np.empty(n)
    k0 = _kernel(0.0, kind)
    lo = 0
    for i in range(n):
        ti = t[i]
        while lo < n and t[lo] - ti <= -b:
            lo += 1
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        q0 = 0.0
        q1 = 0.0
        count = 0
        j = lo
        while j < n and t[j] - ti < b:
            d = t[j] - ti
            w = _kernel(d / b, kind)
            if w > 0.0:
                count += 1
                s0 += w
                s1 += w * d
                s2 += w * d * d
                q0 += w * y[j]
                q1 += w * d * y[j]
            j += 1
        den = s0 * s2 - s1 * s1
        if count < 2 or not den > 1e-12 * s0 * s2:
            return level, slope, hat, flat, False
        level[i] = (s2 * q0 - s1 * q1) / den
        slope[i] = (s0 * q1 - s1 * q0) / den
        hat[i] = k0 * s2 / den
        flat[i] = q0 / s0
    return level, slope, hat, flat, True


@njit(cache=True, parallel=True)
def classical_bootstrap(centered, multipliers, m, n, zero):
    l, N = centered.shape
    B = multipliers.shape[0]
    out = np.empty(B)
    scale = 1.0 / np.sqrt(m * (n - m + 1.0))
    for r in prange(B):
        phi = np.empty((l, N))
        for u in range(l):
            acc = 0.0
            for j in range(N):
                acc += centered[u, j] * multipliers[r, j]
                phi[u, j] = acc * scale
        best = 0.0
        for i in range(m, N):
            frac = (i + 1.0) / N
            s = 0.0
            for u in range(l):
                if zero:
                    d = phi[u, i]
                else:
                    d = phi[u, i] - frac * phi[u, N - 1]
                s += d * d
            if s > best:
                best = s
        out[r] = np.sqrt(best)
    return out


@njit(cache=True, parallel=True)
def relevant_bootstrap(centered, multipliers, m, n, t_hat):
    l, N = centered.shape
    B = multipliers.shape[0]
    lin = np.empty((B, l))
    quad = np.empty((B, l))
    scale = 1.0 / np.sqrt(m * (n - m + 1.0))
    for r in prange(B):
        for u in range(l):
            acc = 0.0
            phi = np.empty(N)
            for j in range(N):
                acc += centered[u, j] * multipliers[r, j]
                phi[j] = acc * scale
            th = t_hat[u]
            a = 0.0
            q = 0.0
            for i in range(m, N):
                d = phi[i] - ((i + 1.0) / N) * phi[N - 1]
                s = (i + 1.0) / n
                w = s * th - min(s, th)
                a += d * w
                q += d * d
            lin[r, u] = a
            quad[r, u] = q
    return lin, quad


@njit(cache=True)
def ar_filter(coefs, eps, start):
    # coefs: (total, p) time-varying AR coefficients; state starts at zero
    total, p = coefs.shape
    h = np.zeros(total)
    for i in range(total):
        acc = eps[i]
        for k in range(p):
            if i - 1 - k >= 0:
                acc += coefs[i, k] * h[i - 1 - k]
        h[i] = acc
    return h[start:]
