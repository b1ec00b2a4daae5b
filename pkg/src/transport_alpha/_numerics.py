"""Small vectorised numerical helpers."""

import numpy as np
from scipy.special import roots_legendre

# fixed 8-point rule on [0, 1] for sub-interval integrals
_t, _w = roots_legendre(8)
GL8_NODES = 0.5 * (_t + 1.0)
GL8_WEIGHTS = 0.5 * _w
del _t, _w


def invert_monotone(func, dfunc, y, lo, hi, x0=None, iters=80, tol=1e-15):
    """Solve ``func(x) = y`` for strictly increasing ``func`` on ``[lo, hi]``.

    Newton steps are kept inside a shrinking bisection bracket, so the
    iteration cannot leave the interval even when ``dfunc`` is poor.
    """
    y = np.asarray(y, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), y.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), y.shape).copy()
    x = 0.5 * (lo + hi) if x0 is None else np.clip(np.asarray(x0, dtype=float), lo, hi)
    for _ in range(iters):
        fx = func(x) - y
        lo = np.where(fx < 0, x, lo)
        hi = np.where(fx > 0, x, hi)
        d = dfunc(x)
        with np.errstate(all="ignore"):
            xn = x - fx / d
        outside = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
        xn = np.where(outside, 0.5 * (lo + hi), xn)
        done = np.all(np.abs(xn - x) <= tol * np.maximum(1.0, np.abs(x)))
        x = xn
        if done:
            break
    return x


def cumulative_gl8(func, nodes):
    """Cumulative integrals of ``func`` from ``nodes[0]`` to each node."""
    a = nodes[:-1, None]
    h = np.diff(nodes)[:, None]
    pieces = (h * func(a + h * GL8_NODES) * GL8_WEIGHTS).sum(axis=1)
    return np.concatenate([[0.0], np.cumsum(pieces)])


def partial_gl8(func, a, b):
    """Vectorised ``int_a^b func`` for short intervals (either orientation)."""
    a = np.asarray(a, dtype=float)[..., None]
    h = np.asarray(b, dtype=float)[..., None] - a
    return (h * func(a + h * GL8_NODES) * GL8_WEIGHTS).sum(axis=-1)
