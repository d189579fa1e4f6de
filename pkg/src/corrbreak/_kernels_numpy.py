"""Vectorized numpy versions of the loop kernels."""
import numpy as np

_ROW_CHUNK = 256
_BOOT_CHUNK = 128


def _kernel(u, kind):
    inside = np.abs(u) < 1.0
    v = 1.0 - u * u
    k = 0.75 * v if kind == 0 else 0.9375 * v * v
    return np.where(inside, k, 0.0)


def local_linear(t, y, b, kind):
    n = t.size
    level = np.empty(n)
    slope = np.empty(n)
    hat = np.empty(n)
    flat = np.empty(n)
    k0 = float(_kernel(np.array(0.0), kind))
    for start in range(0, n, _ROW_CHUNK):
        rows = slice(start, min(n, start + _ROW_CHUNK))
        d = t[None, :] - t[rows, None]
        w = _kernel(d / b, kind)
        s0 = w.sum(axis=1)
        s1 = (w * d).sum(axis=1)
        s2 = (w * d * d).sum(axis=1)
        q0 = w @ y
        q1 = (w * d) @ y
        count = (w > 0).sum(axis=1)
        den = s0 * s2 - s1 * s1
        if np.any(count < 2) or np.any(~(den > 1e-12 * s0 * s2)):
            return level, slope, hat, flat, False
        level[rows] = (s2 * q0 - s1 * q1) / den
        slope[rows] = (s0 * q1 - s1 * q0) / den
        hat[rows] = k0 * s2 / den
        flat[rows] = q0 / s0
    return level, slope, hat, flat, True


def _paths(centered, multipliers, m, n):
    # (B, l, N) cumulative weighted block sums
    scale = 1.0 / np.sqrt(m * (n - m + 1.0))
    return np.cumsum(multipliers[:, None, :] * centered[None, :, :], axis=2) * scale


def classical_bootstrap(centered, multipliers, m, n, zero):
    N = centered.shape[1]
    B = multipliers.shape[0]
    out = np.empty(B)
    frac = np.arange(1, N + 1) / N
    for start in range(0, B, _BOOT_CHUNK):
        sl = slice(start, min(B, start + _BOOT_CHUNK))
        phi = _paths(centered, multipliers[sl], m, n)
        if not zero:
            phi = phi - frac[None, None, :] * phi[:, :, -1:]
        norms = np.sqrt((phi[:, :, m:] ** 2).sum(axis=1))
        out[sl] = norms.max(axis=1) if norms.shape[1] else 0.0
    return out


def relevant_bootstrap(centered, multipliers, m, n, t_hat):
    l, N = centered.shape
    B = multipliers.shape[0]
    lin = np.empty((B, l))
    quad = np.empty((B, l))
    i = np.arange(1, N + 1)
    frac = i / N
    s = i / n
    weight = s[None, :] * t_hat[:, None] - np.minimum(s[None, :], t_hat[:, None])
    for start in range(0, B, _BOOT_CHUNK):
        sl = slice(start, min(B, start + _BOOT_CHUNK))
        phi = _paths(centered, multipliers[sl], m, n)
        d = (phi - frac[None, None, :] * phi[:, :, -1:])[:, :, m:]
        lin[sl] = (d * weight[None, :, m:]).sum(axis=2)
        quad[sl] = (d * d).sum(axis=2)
    return lin, quad


def ar_filter(coefs, eps, start):
    total, p = coefs.shape
    h = np.zeros(total + p)
    for i in range(total):
        h[i + p] = eps[i] + coefs[i] @ h[i:i + p][::-1]
    return h[p + start:]
