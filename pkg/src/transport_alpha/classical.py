"""Classical alpha-divergences and alpha-geodesics on the positive octant.

These are the finite-dimensional counterparts of the transport quantities,
kept for side-by-side comparison.  Vectors ``m`` and ``n`` are positive
measures (they need not sum to one).
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError


def _positive_pair(m, n):
    m = np.atleast_1d(np.asarray(m, dtype=float))
    n = np.atleast_1d(np.asarray(n, dtype=float))
    if m.shape != n.shape:
        raise DomainError(f"length mismatch: {m.shape} vs {n.shape}")
    if np.any(~(m > 0)) or np.any(~(n > 0)):
        raise DomainError("entries must be strictly positive and finite")
    return m, n


def f_alpha(z, alpha: float):
    """Three-branch generator of the classical alpha-divergence.

    ``alpha = 1`` is ``z log z - (z - 1)``, ``alpha = -1`` is
    ``-log z + (z - 1)``, and otherwise
    ``4 / (1 - alpha**2) * ((1 - alpha)/2 + (1 + alpha)/2 * z - z**((1 + alpha)/2))``.
    """
    z = np.asarray(z, dtype=float)
    if alpha == 1:
        return z * np.log(z) - (z - 1.0)
    if alpha == -1:
        return -np.log(z) + (z - 1.0)
    s = (1.0 + alpha) / 2.0
    return 4.0 / (1.0 - alpha * alpha) * ((1.0 - s) + s * z - z**s)


def classical_alpha_div(m, n, alpha: float) -> float:
    """``D_alpha(m || n) = sum_i f_alpha(m_i / n_i) n_i``.

    Examples
    --------
    >>> round(classical_alpha_div([0.5, 0.5], [0.25, 0.75], 1), 6)
    0.143841
    >>> classical_alpha_div([1, 4], [4, 1], 0)
    4.0
    """
    m, n = _positive_pair(m, n)
    return float(np.sum(f_alpha(m / n, float(alpha)) * n))


def fisher_metric(m) -> np.ndarray:
    """Hessian of negative entropy ``sum m log m``: ``diag(1/m)``."""
    m = np.atleast_1d(np.asarray(m, dtype=float))
    return np.diag(1.0 / m)


def amari_chentsov(m) -> np.ndarray:
    """Third derivative of the entropy ``-sum m log m``: ``T_iii = 1/m_i**2``."""
    m = np.atleast_1d(np.asarray(m, dtype=float))
    d = m.size
    t = np.zeros((d, d, d))
    idx = np.arange(d)
    t[idx, idx, idx] = 1.0 / m**2
    return t


def classical_taylor(m, n, alpha: float) -> tuple[float, float, float]:
    """``(quadratic, cubic, remainder)`` of the expansion of ``D_alpha(m || n)`` about ``n``.

    ``quadratic = g(n)[d, d] / 2`` and ``cubic = (alpha - 3)/12 * T(n)[d, d, d]``
    with ``d = m - n``; the remainder is what is left of the divergence.
    """
    m, n = _positive_pair(m, n)
    d = m - n
    quad = 0.5 * d @ fisher_metric(n) @ d
    cubic = (alpha - 3.0) / 12.0 * np.einsum("ijk,i,j,k->", amari_chentsov(n), d, d, d)
    return float(quad), float(cubic), classical_alpha_div(m, n, alpha) - quad - cubic


def classical_alpha_geodesic(m, n, alpha: float, t):
    """Closed-form alpha-geodesic from ``m`` (``t = 0``) to ``n`` (``t = 1``).

    Linear interpolation in the representation ``z**((1 - alpha)/2)``, or in
    ``log z`` when ``alpha = 1``.  ``t`` may be an array, in which case the
    result has shape ``t.shape + m.shape``.

    >>> float(classical_alpha_geodesic([1.0], [4.0], 0, 0.5)[0])
    2.25
    """
    m, n = _positive_pair(m, n)
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise DomainError("t must lie in [0, 1]")
    tt = t[..., None]
    if alpha == 1:
        out = np.exp((1 - tt) * np.log(m) + tt * np.log(n))
    else:
        beta = (1.0 - alpha) / 2.0
        out = ((1 - tt) * m**beta + tt * n**beta) ** (1.0 / beta)
    out = np.where(tt == 0, m, np.where(tt == 1, n, out))
    return out


def christoffel(m, alpha: float) -> np.ndarray:
    """Alpha-connection coefficients ``Gamma^k_ij = -(1 + alpha)/2 * m_i T_ijk``, indexed ``[i, j, k]``."""
    m = np.atleast_1d(np.asarray(m, dtype=float))
    return -(1.0 + alpha) / 2.0 * m[:, None, None] * amari_chentsov(m)


def geodesic_ode_residual(m, n, alpha: float, t: float, h: float) -> float:
    """Max-norm residual of the geodesic equation at ``t`` by central differences of step ``h``."""
    ts = np.array([t - h, t, t + h])
    g = classical_alpha_geodesic(m, n, alpha, ts)
    acc = (g[2] - 2 * g[1] + g[0]) / h**2
    vel = (g[2] - g[0]) / (2 * h)
    gamma = christoffel(g[1], alpha)
    resid = acc + np.einsum("ijk,i,j->k", gamma, vel, vel)
    return float(np.max(np.abs(resid)))
