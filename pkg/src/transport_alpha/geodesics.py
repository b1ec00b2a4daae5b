"""Transport alpha-geodesics between one-dimensional densities.

Along the geodesic from ``q`` (``t = 0``) to ``p`` (``t = 1``) the quantile
density is interpolated linearly in the coordinate ``(Q')**(-alpha)``::

    Q'(t, u) = ((1 - t) Q'_q(u)**(-alpha) + t Q'_p(u)**(-alpha))**(-1/alpha)
    Q'(t, u) = Q'_q(u)**(1 - t) Q'_p(u)**t                      (alpha = 0)

``alpha = -1`` is displacement (Wasserstein-2) interpolation and
``alpha = 1`` interpolates the reciprocal QDF, i.e. the density along
quantile levels.  Only ``Q'`` is determined, so each frame is pinned by
linear interpolation of the medians.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .distributions import Distribution, QdfFunction, QdfGrid, QdfGridDistribution
from .errors import DomainError, NumericalError

ANCHOR_U = 0.5


def geodesic_log_qdf(log_qdf_p, log_qdf_q, alpha: float, t: float):
    """``log Q'(t, u)`` from the endpoint log-QDFs, evaluated in log space.

    Working with logs keeps ``Q'**(-alpha)`` from overflowing when the QDF
    ratio is extreme and ``|alpha|`` is large.  The endpoints are returned
    unchanged, so ``t = 0`` and ``t = 1`` reproduce ``q`` and ``p`` bitwise.
    """
    lp = np.asarray(log_qdf_p, dtype=float)
    lq = np.asarray(log_qdf_q, dtype=float)
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must lie in [0, 1], got {t}")
    if t == 0.0:
        return lq.copy()
    if t == 1.0:
        return lp.copy()
    alpha = float(alpha)
    if alpha == 0.0:
        out = (1.0 - t) * lq + t * lp
    else:
        stacked = np.stack([np.log1p(-t) - alpha * lq, np.log(t) - alpha * lp])
        out = -logsumexp(stacked, axis=0) / alpha
    if not np.all(np.isfinite(out)):
        raise NumericalError(f"geodesic QDF is not finite at t={t}, alpha={alpha}")
    return out


def median_anchor(p: Distribution, q: Distribution, t: float) -> float:
    """Anchor policy: ``Q(t, 1/2) = (1 - t) Q_q(1/2) + t Q_p(1/2)``."""
    return float((1.0 - t) * q.quantile(ANCHOR_U) + t * p.quantile(ANCHOR_U))


def transport_alpha_geodesic(p: Distribution, q: Distribution, alpha: float, t: float, u_grid) -> QdfGrid:
    """One frame of the transport alpha-geodesic as a :class:`QdfGrid`.

    Parameters
    ----------
    p, q : Distribution
        End (``t = 1``) and start (``t = 0``) densities.
    alpha : float
    t : float in [0, 1]
    u_grid : array_like
        Increasing nodes in (0, 1) bracketing ``u = 1/2``.
    """
    u = np.asarray(u_grid, dtype=float)
    if u.ndim != 1 or u.size < 2 or not u[0] <= ANCHOR_U <= u[-1]:
        raise DomainError("u_grid must be an increasing 1-D array that brackets u = 0.5")
    log_q = geodesic_log_qdf(p.log_qdf(u), q.log_qdf(u), alpha, t)
    return QdfGrid(u, np.exp(log_q), ANCHOR_U, median_anchor(p, q, t))


@dataclass(frozen=True, eq=False)
class GeodesicPath:
    """Frames of a geodesic on a common u grid.

    ``qdf_frames[i]`` is the frame at ``t_grid[i]``; ``anchor_policy`` names
    how the free translation of each frame was fixed.
    """

    alpha: float
    t_grid: np.ndarray
    qdf_frames: tuple
    anchor_policy: str = "median"
    endpoints: tuple | None = None

    @property
    def u_grid(self) -> np.ndarray:
        return self.qdf_frames[0].u_nodes

    def qdf_array(self) -> np.ndarray:
        """Frame values stacked as an array of shape ``(len(t_grid), len(u_grid))``."""
        return np.stack([f.qdf_values for f in self.qdf_frames])

    def quantile_array(self) -> np.ndarray:
        """Quantiles of every frame at the grid nodes.

        With known endpoints the closed-form QDF is integrated directly;
        otherwise each frame's interpolant is.
        """
        if self.endpoints is None:
            return np.stack([QdfGridDistribution(f).quantile(f.u_nodes) for f in self.qdf_frames])
        p, q = self.endpoints
        u = self.u_grid
        return np.stack([geodesic_point(p, q, self.alpha, t).quantile(u) for t in self.t_grid])

    def rows(self):
        """``(t, u, qdf, quantile)`` tuples, t-major, for tabular export."""
        quant = self.quantile_array()
        for i, (t, frame) in enumerate(zip(self.t_grid, self.qdf_frames)):
            for j, u in enumerate(frame.u_nodes):
                yield float(t), float(u), float(frame.qdf_values[j]), float(quant[i, j])


def geodesic_path(p: Distribution, q: Distribution, alpha: float, t_steps=5, u_grid=None) -> GeodesicPath:
    """Sample the geodesic at ``t_steps`` equispaced times (or an explicit t array).

    The default ``u_grid`` is 129 equispaced nodes on ``[0.01, 0.99]``.
    """
    if np.ndim(t_steps) == 0:
        n = int(t_steps)
        if n < 2:
            raise DomainError("need at least 2 time steps")
        t_grid = np.linspace(0.0, 1.0, n)
    else:
        t_grid = np.asarray(t_steps, dtype=float)
        if t_grid.ndim != 1 or np.any(np.diff(t_grid) <= 0) or t_grid[0] < 0 or t_grid[-1] > 1:
            raise DomainError("t grid must be increasing within [0, 1]")
    u = np.linspace(0.01, 0.99, 129) if u_grid is None else np.asarray(u_grid, dtype=float)
    frames = tuple(transport_alpha_geodesic(p, q, alpha, t, u) for t in t_grid)
    return GeodesicPath(float(alpha), t_grid, frames, endpoints=(p, q))


@dataclass(frozen=True, eq=False)
class PdeResidual:
    """Residual of the geodesic equation at interior times."""

    t: np.ndarray
    u: np.ndarray
    values: np.ndarray
    h_t: float

    @property
    def max(self) -> float:
        return float(np.max(self.values))


def geodesic_pde_residual(path: GeodesicPath, form: str = "apde") -> PdeResidual:
    """Finite-difference residual of the geodesic equation along ``path``.

    With ``J(t, u) = Q'(t, u) / Q'(0, u)`` (the map Jacobian in quantile
    coordinates) the forms are

    ``"apde"``
        ``|J_tt - (alpha + 1) J_t**2 / J|``
    ``"power"``
        ``|d_tt J**(-alpha)|`` (``|d_tt log J|`` at ``alpha = 0``)
    ``"log"``
        ``|d_tt log J|``, which vanishes for the ``alpha = 0`` branch

    Derivatives are second-order central differences on a uniform t grid,
    so exact solutions give residuals of order ``h_t**2``.
    """
    t = np.asarray(path.t_grid)
    if t.size < 5:
        raise DomainError("the residual needs at least 5 frames")
    h = np.diff(t)
    if not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise DomainError("the residual needs uniformly spaced frames")
    h = float(h[0])
    qdf = path.qdf_array()
    J = qdf / qdf[0]
    a = path.alpha
    if form == "apde":
        d1 = (J[2:] - J[:-2]) / (2 * h)
        d2 = (J[2:] - 2 * J[1:-1] + J[:-2]) / h**2
        vals = np.abs(d2 - (a + 1.0) * d1**2 / J[1:-1])
    elif form in ("power", "log"):
        y = np.log(J) if (form == "log" or a == 0.0) else J ** (-a)
        vals = np.abs((y[2:] - 2 * y[1:-1] + y[:-2]) / h**2)
    else:
        raise DomainError(f"unknown residual form {form!r}")
    return PdeResidual(t[1:-1], path.u_grid, vals, h)


def geodesic_density(frame: QdfGrid, p: Distribution, q: Distribution, alpha: float, t: float):
    """Density of a geodesic frame, anchored by the median policy."""
    grid = QdfGrid(frame.u_nodes, frame.qdf_values, ANCHOR_U, median_anchor(p, q, t))
    return QdfGridDistribution(grid)


def geodesic_point(p: Distribution, q: Distribution, alpha: float, t: float) -> QdfFunction:
    """Geodesic density at ``t`` with its QDF in closed form on all of (0, 1).

    Unlike :func:`geodesic_density` there is no interpolation, so this is the
    reference for checks such as ``W2(q, r(t)) = t W2(q, p)`` at ``alpha = -1``.
    """

    def qdf(u):
        return np.exp(geodesic_log_qdf(p.log_qdf(u), q.log_qdf(u), alpha, t))

    return QdfFunction(qdf, ANCHOR_U, median_anchor(p, q, t))
