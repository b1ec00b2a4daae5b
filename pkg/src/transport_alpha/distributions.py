"""One-dimensional densities evaluated through their quantile functions.

Every family exposes the same vectorised surface: ``quantile`` (Q = F^-1),
``qdf`` (the quantile density Q'), ``cdf``, ``pdf``, ``entropy`` and
``second_moment``.  The divergences elsewhere in the package only ever
touch ``qdf``, which is why it is computed in closed form wherever possible
instead of as ``1 / pdf(quantile(u))``.

Analytic families are evaluable on the whole open interval ``0 < u < 1``.
Grid-backed and sample-backed families only know a closed sub-window
``[u_lo, u_hi]`` and raise :class:`DomainError` outside it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator
from scipy.special import expit, logit, ndtr, ndtri

from ._numerics import cumulative_gl8, invert_monotone, partial_gl8
from .errors import DomainError, EstimationError, SpecError

SQRT_2PI = math.sqrt(2.0 * math.pi)


def _as_array(u):
    return np.asarray(u, dtype=float)


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise SpecError(f"{name} must be a finite positive number, got {value!r}")
    return value


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise SpecError(f"{name} must be finite, got {value!r}")
    return value


def _scalar_or_array(out, like):
    return float(out) if np.ndim(like) == 0 else out


class Distribution:
    """Base class for every density description.

    Subclasses implement the ``_quantile``/``_qdf``/``_cdf``/``_pdf`` hooks
    on already-validated arrays; the public methods handle domain checks
    and scalar/array round-tripping.
    """

    family: str = ""
    #: grid- and sample-backed families only know a closed sub-window of u
    sampled: bool = False

    # -- u-domain -----------------------------------------------------------------
    @property
    def u_window(self) -> tuple[float, float]:
        return 0.0, 1.0

    def _check_u(self, u):
        u = _as_array(u)
        lo, hi = self.u_window
        if self.sampled:
            ok = (u >= lo) & (u <= hi)
        else:
            ok = (u > 0.0) & (u < 1.0)
        if not np.all(ok):
            bad = u[~ok] if u.ndim else u
            raise DomainError(
                f"{self.family}: u={np.ravel(bad)[0]!r} outside the evaluable window "
                f"{'[' if self.sampled else '('}{lo}, {hi}{']' if self.sampled else ')'}"
            )
        return u

    # -- public vectorised surface -----------------------------------------------
    def quantile(self, u):
        u = self._check_u(u)
        return _scalar_or_array(self._quantile(u), u)

    def qdf(self, u):
        u = self._check_u(u)
        return _scalar_or_array(self._qdf(u), u)

    def cdf(self, x):
        x = _as_array(x)
        return _scalar_or_array(self._cdf(x), x)

    def pdf(self, x):
        x = _as_array(x)
        return _scalar_or_array(self._pdf(x), x)

    def log_qdf(self, u):
        return np.log(self.qdf(u))

    def _pdf(self, x):
        # density through the QDF coordinate: p(Q(u)) = 1 / Q'(u)
        lo_x, hi_x = self.support
        u = self._cdf(x)
        inside = (x > lo_x) & (x < hi_x) & (u > 0) & (u < 1)
        lo, hi = self.u_window
        if self.sampled:
            inside &= (u >= lo) & (u <= hi)
        uu = np.where(inside, u, 0.5 if not self.sampled else 0.5 * (lo + hi))
        return np.where(inside, 1.0 / self._qdf(uu), 0.0)

    @property
    def support(self) -> tuple[float, float]:
        lo, hi = self.u_window
        if self.sampled:
            return float(self._quantile(np.array(lo))), float(self._quantile(np.array(hi)))
        return -math.inf, math.inf

    def entropy(self) -> float:
        """Differential entropy ``-int p log p = int_0^1 log Q'(u) du``."""
        from .quadrature import SAMPLED_CLIP, gauss_legendre_unit, integrate_unit

        rule = gauss_legendre_unit(256, SAMPLED_CLIP if self.sampled else 0.0)
        return integrate_unit(self.log_qdf, rule)

    def mean(self) -> float:
        from .quadrature import gauss_legendre_unit, integrate_unit

        lo, hi = self.u_window
        rule = gauss_legendre_unit(256, lo if self.sampled else 0.0)
        return integrate_unit(self.quantile, rule) / (rule.window[1] - rule.window[0])

    def second_moment(self) -> float:
        """``int x^2 p(x) dx``; ``math.inf`` for heavy tails."""
        from .quadrature import gauss_legendre_unit, integrate_unit

        lo, hi = self.u_window
        rule = gauss_legendre_unit(256, lo if self.sampled else 0.0)
        return integrate_unit(lambda u: self.quantile(u) ** 2, rule) / (
            rule.window[1] - rule.window[0]
        )

    def to_dict(self) -> dict:
        raise NotImplementedError

    def shift(self, c: float) -> Distribution:
        """The translate ``x -> x + c``; its QDF is identical."""
        return LocationScale(self, float(c), 1.0)


# ------------------------------------------------------------------------------
# analytic families


@dataclass(frozen=True)
class Gaussian(Distribution):
    mu: float = 0.0
    sigma: float = 1.0
    family = "gaussian"

    def __post_init__(self):
        object.__setattr__(self, "mu", _finite("mu", self.mu))
        object.__setattr__(self, "sigma", _positive("sigma", self.sigma))

    def _quantile(self, u):
        return self.mu + self.sigma * ndtri(u)

    def _qdf(self, u):
        z = ndtri(u)
        return self.sigma * SQRT_2PI * np.exp(0.5 * z * z)

    def log_qdf(self, u):
        z = ndtri(self._check_u(u))
        return math.log(self.sigma * SQRT_2PI) + 0.5 * z * z

    def _cdf(self, x):
        return ndtr((x - self.mu) / self.sigma)

    def _pdf(self, x):
        z = (x - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * SQRT_2PI)

    def entropy(self):
        return 0.5 * math.log(2 * math.pi * math.e * self.sigma**2)

    def mean(self):
        return self.mu

    def second_moment(self):
        return self.mu**2 + self.sigma**2

    def to_dict(self):
        return {"family": self.family, "mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True)
class Uniform(Distribution):
    a: float = 0.0
    b: float = 1.0
    family = "uniform"

    def __post_init__(self):
        a, b = _finite("a", self.a), _finite("b", self.b)
        if not a < b:
            raise SpecError(f"uniform requires a < b, got a={a}, b={b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def support(self):
        return self.a, self.b

    def _quantile(self, u):
        return self.a + (self.b - self.a) * u

    def _qdf(self, u):
        return np.full_like(u, self.b - self.a, dtype=float)

    def _cdf(self, x):
        return np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0)

    def _pdf(self, x):
        return np.where((x >= self.a) & (x <= self.b), 1.0 / (self.b - self.a), 0.0)

    def entropy(self):
        return math.log(self.b - self.a)

    def mean(self):
        return 0.5 * (self.a + self.b)

    def second_moment(self):
        return (self.a**2 + self.a * self.b + self.b**2) / 3.0

    def to_dict(self):
        return {"family": self.family, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float = 1.0
    family = "exponential"

    def __post_init__(self):
        object.__setattr__(self, "rate", _positive("rate", self.rate))

    @property
    def support(self):
        return 0.0, math.inf

    def _quantile(self, u):
        return -np.log1p(-u) / self.rate

    def _qdf(self, u):
        return 1.0 / (self.rate * (1.0 - u))

    def _cdf(self, x):
        return np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)

    def _pdf(self, x):
        return np.where(x >= 0, self.rate * np.exp(-self.rate * np.maximum(x, 0.0)), 0.0)

    def entropy(self):
        return 1.0 - math.log(self.rate)

    def mean(self):
        return 1.0 / self.rate

    def second_moment(self):
        return 2.0 / self.rate**2

    def to_dict(self):
        return {"family": self.family, "rate": self.rate}


@dataclass(frozen=True)
class Cauchy(Distribution):
    x0: float = 0.0
    gamma: float = 1.0
    family = "cauchy"

    def __post_init__(self):
        object.__setattr__(self, "x0", _finite("x0", self.x0))
        object.__setattr__(self, "gamma", _positive("gamma", self.gamma))

    def _quantile(self, u):
        return self.x0 + self.gamma * np.tan(np.pi * (u - 0.5))

    def _qdf(self, u):
        t = np.tan(np.pi * (u - 0.5))
        return self.gamma * np.pi * (1.0 + t * t)

    def _cdf(self, x):
        return 0.5 + np.arctan((x - self.x0) / self.gamma) / np.pi

    def _pdf(self, x):
        z = (x - self.x0) / self.gamma
        return 1.0 / (np.pi * self.gamma * (1.0 + z * z))

    def entropy(self):
        return math.log(4 * math.pi * self.gamma)

    def mean(self):
        return math.nan

    def second_moment(self):
        return math.inf

    def to_dict(self):
        return {"family": self.family, "x0": self.x0, "gamma": self.gamma}


@dataclass(frozen=True)
class Logistic(Distribution):
    mu: float = 0.0
    s: float = 1.0
    family = "logistic"

    def __post_init__(self):
        object.__setattr__(self, "mu", _finite("mu", self.mu))
        object.__setattr__(self, "s", _positive("s", self.s))

    def _quantile(self, u):
        return self.mu + self.s * logit(u)

    def _qdf(self, u):
        return self.s / (u * (1.0 - u))

    def _cdf(self, x):
        return expit((x - self.mu) / self.s)

    def _pdf(self, x):
        e = expit((x - self.mu) / self.s)
        return e * (1.0 - e) / self.s

    def entropy(self):
        return math.log(self.s) + 2.0

    def mean(self):
        return self.mu

    def second_moment(self):
        return self.mu**2 + (self.s * math.pi) ** 2 / 3.0

    def to_dict(self):
        return {"family": self.family, "mu": self.mu, "s": self.s}


@dataclass(frozen=True)
class LocationScale(Distribution):
    """``loc + scale * X`` with ``X ~ base``."""

    base: Distribution
    loc: float = 0.0
    scale: float = 1.0
    family = "location_scale"

    def __post_init__(self):
        if not isinstance(self.base, Distribution):
            raise SpecError("location_scale base must be a distribution")
        object.__setattr__(self, "loc", _finite("loc", self.loc))
        object.__setattr__(self, "scale", _positive("scale", self.scale))

    @property
    def sampled(self):
        return self.base.sampled

    @property
    def u_window(self):
        return self.base.u_window

    @property
    def support(self):
        lo, hi = self.base.support
        return self.loc + self.scale * lo, self.loc + self.scale * hi

    def _quantile(self, u):
        return self.loc + self.scale * self.base._quantile(u)

    def _qdf(self, u):
        return self.scale * self.base._qdf(u)

    def log_qdf(self, u):
        return math.log(self.scale) + self.base.log_qdf(u)

    def _cdf(self, x):
        return self.base._cdf((x - self.loc) / self.scale)

    def _pdf(self, x):
        return self.base._pdf((x - self.loc) / self.scale) / self.scale

    def entropy(self):
        return self.base.entropy() + math.log(self.scale)

    def mean(self):
        return self.loc + self.scale * self.base.mean()

    def second_moment(self):
        m2 = self.base.second_moment()
        if math.isinf(m2):
            return math.inf
        return self.scale**2 * m2 + 2 * self.loc * self.scale * self.base.mean() + self.loc**2

    def to_dict(self):
        return {
            "family": self.family,
            "base": self.base.to_dict(),
            "loc": self.loc,
            "scale": self.scale,
        }


# ------------------------------------------------------------------------------
# monotone maps and generative models


class MonotoneMap:
    """Strictly increasing map ``z -> G(z)`` with derivative and inverse."""

    def __call__(self, z):
        raise NotImplementedError

    def derivative(self, z):
        raise NotImplementedError

    def inverse(self, x):
        raise NotImplementedError


@dataclass(frozen=True)
class AffineMap(MonotoneMap):
    a: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", _positive("affine slope a", self.a))
        object.__setattr__(self, "b", _finite("affine offset b", self.b))

    def __call__(self, z):
        return self.a * _as_array(z) + self.b

    def derivative(self, z):
        return np.full_like(_as_array(z), self.a, dtype=float)

    def inverse(self, x):
        return (_as_array(x) - self.b) / self.a

    def to_dict(self):
        return {"type": "affine", "a": self.a, "b": self.b}


@dataclass(frozen=True, eq=False)
class GridMap(MonotoneMap):
    """Monotone cubic (PCHIP) interpolant through ``(z_nodes, g_values)``.

    Outside the node range the map continues linearly with the end slopes,
    so it stays invertible on the whole line.
    """

    z_nodes: np.ndarray
    g_values: np.ndarray
    _interp: PchipInterpolator = field(init=False, repr=False)
    _slopes: tuple = field(init=False, repr=False)

    def __post_init__(self):
        z = np.array(self.z_nodes, dtype=float)
        g = np.array(self.g_values, dtype=float)
        if z.ndim != 1 or z.shape != g.shape or z.size < 2:
            raise SpecError("monotone_grid needs matching 1-D z and g arrays with >= 2 entries")
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(g))):
            raise SpecError("monotone_grid values must be finite")
        if np.any(np.diff(z) <= 0) or np.any(np.diff(g) <= 0):
            raise SpecError("monotone_grid requires strictly increasing z and g values")
        z.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "z_nodes", z)
        object.__setattr__(self, "g_values", g)
        interp = PchipInterpolator(z, g, extrapolate=False)
        floor = 1e-12 * float(np.min(np.diff(g) / np.diff(z)))
        d = interp.derivative()
        slopes = (max(float(d(z[0])), floor), max(float(d(z[-1])), floor), floor)
        object.__setattr__(self, "_interp", interp)
        object.__setattr__(self, "_slopes", slopes)

    def __call__(self, z):
        z = _as_array(z)
        z0, z1 = self.z_nodes[0], self.z_nodes[-1]
        s0, s1, _ = self._slopes
        inner = self._interp(np.clip(z, z0, z1))
        out = np.where(z < z0, self.g_values[0] + s0 * (z - z0), inner)
        return np.where(z > z1, self.g_values[-1] + s1 * (z - z1), out)

    def derivative(self, z):
        z = _as_array(z)
        z0, z1 = self.z_nodes[0], self.z_nodes[-1]
        s0, s1, floor = self._slopes
        inner = np.maximum(self._interp(np.clip(z, z0, z1), 1), floor)
        return np.where(z < z0, s0, np.where(z > z1, s1, inner))

    def inverse(self, x):
        x = _as_array(x)
        guess = np.interp(x, self.g_values, self.z_nodes)
        s0, s1, _ = self._slopes
        g0, g1 = self.g_values[0], self.g_values[-1]
        z0, z1 = self.z_nodes[0], self.z_nodes[-1]
        left = z0 + (x - g0) / s0
        right = z1 + (x - g1) / s1
        inner = invert_monotone(self, self.derivative, np.clip(x, g0, g1), z0, z1, x0=guess)
        return np.where(x < g0, left, np.where(x > g1, right, inner))

    def to_dict(self):
        return {"type": "monotone_grid", "z": self.z_nodes.tolist(), "g": self.g_values.tolist()}


@dataclass(frozen=True)
class Generative(Distribution):
    """Law of ``G(Z)`` for ``Z ~ ref`` and an increasing map ``G``."""

    ref: Distribution
    map: MonotoneMap
    family = "generative"

    def __post_init__(self):
        if not isinstance(self.ref, Distribution):
            raise SpecError("generative ref must be a distribution")
        if not isinstance(self.map, MonotoneMap):
            raise SpecError("generative map must be a MonotoneMap")

    @property
    def sampled(self):
        return self.ref.sampled

    @property
    def u_window(self):
        return self.ref.u_window

    @property
    def support(self):
        lo, hi = self.ref.support
        return tuple(
            float(self.map(v)) if math.isfinite(v) else v for v in (lo, hi)
        )

    def _quantile(self, u):
        return self.map(self.ref._quantile(u))

    def _qdf(self, u):
        return self.map.derivative(self.ref._quantile(u)) * self.ref._qdf(u)

    def _cdf(self, x):
        return self.ref._cdf(self.map.inverse(x))

    def _pdf(self, x):
        z = self.map.inverse(x)
        return self.ref._pdf(z) / self.map.derivative(z)

    def entropy(self):
        if isinstance(self.map, AffineMap):
            return self.ref.entropy() + math.log(self.map.a)
        from .quadrature import SAMPLED_CLIP, gauss_legendre_unit, integrate_unit

        rule = gauss_legendre_unit(256, SAMPLED_CLIP if self.sampled else 0.0)
        log_jac = integrate_unit(lambda u: np.log(self.map.derivative(self.ref.quantile(u))), rule)
        return self.ref.entropy() + log_jac

    def mean(self):
        if isinstance(self.map, AffineMap):
            return self.map.a * self.ref.mean() + self.map.b
        return super().mean()

    def second_moment(self):
        m2 = self.ref.second_moment()
        if math.isinf(m2):
            return math.inf
        if isinstance(self.map, AffineMap):
            a, b = self.map.a, self.map.b
            return a * a * m2 + 2 * a * b * self.ref.mean() + b * b
        return super().second_moment()

    def to_dict(self):
        return {"family": self.family, "ref": self.ref.to_dict(), "map": self.map.to_dict()}


# ------------------------------------------------------------------------------
# QDF-defined families


@dataclass(frozen=True, eq=False)
class QdfGrid:
    """Positive quantile-density values on increasing nodes inside (0, 1).

    ``anchor_u``/``anchor_x`` pin the free translation: ``Q(anchor_u) = anchor_x``.
    """

    u_nodes: np.ndarray
    qdf_values: np.ndarray
    anchor_u: float = 0.5
    anchor_x: float = 0.0

    def __post_init__(self):
        u = np.array(self.u_nodes, dtype=float)
        q = np.array(self.qdf_values, dtype=float)
        if u.ndim != 1 or u.shape != q.shape or u.size < 2:
            raise SpecError("QDF grid needs matching 1-D node and value arrays with >= 2 entries")
        if not np.all(np.isfinite(u)) or np.any(u <= 0) or np.any(u >= 1):
            raise SpecError("QDF grid nodes must lie strictly inside (0, 1)")
        if np.any(np.diff(u) <= 0):
            raise SpecError("QDF grid nodes must be strictly increasing")
        if not np.all(np.isfinite(q)) or np.any(q <= 0):
            raise SpecError("QDF values must be finite and strictly positive")
        anchor_u = _finite("anchor_u", self.anchor_u)
        if not u[0] <= anchor_u <= u[-1]:
            raise SpecError(
                f"anchor_u={anchor_u} must lie within the node range [{u[0]}, {u[-1]}]"
            )
        u.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "u_nodes", u)
        object.__setattr__(self, "qdf_values", q)
        object.__setattr__(self, "anchor_u", anchor_u)
        object.__setattr__(self, "anchor_x", _finite("anchor_x", self.anchor_x))

    def __len__(self):
        return self.u_nodes.size


class QdfGridDistribution(Distribution):
    """Density reconstructed from a :class:`QdfGrid`.

    ``log Q'`` is interpolated by a cubic spline in the logit of ``u``, which
    keeps the QDF positive and tames the tail growth typical of quantile
    densities.  ``Q`` is the exact running integral of that interpolant
    (8-point Gauss-Legendre per grid cell) started at the anchor.
    """

    family = "qdf_grid"
    sampled = True

    def __init__(self, grid: QdfGrid):
        if not isinstance(grid, QdfGrid):
            raise SpecError("expected a QdfGrid")
        self.grid = grid
        u = grid.u_nodes
        self._spline = CubicSpline(logit(u), np.log(grid.qdf_values))
        self._cum = cumulative_gl8(self._qdf, u)
        self._offset = grid.anchor_x - self._running(np.array(grid.anchor_u))
        self._q_nodes = self._offset + self._cum

    def __repr__(self):
        g = self.grid
        return f"QdfGridDistribution(n={len(g)}, window=[{g.u_nodes[0]:.4g}, {g.u_nodes[-1]:.4g}])"

    @property
    def u_window(self):
        return float(self.grid.u_nodes[0]), float(self.grid.u_nodes[-1])

    def _qdf(self, u):
        return np.exp(self._spline(logit(u)))

    def log_qdf(self, u):
        return self._spline(logit(self._check_u(u)))

    def _running(self, u):
        nodes = self.grid.u_nodes
        k = np.clip(np.searchsorted(nodes, u, side="right") - 1, 0, nodes.size - 2)
        return self._cum[k] + partial_gl8(self._qdf, nodes[k], u)

    def _quantile(self, u):
        return self._offset + self._running(u)

    def _cdf(self, x):
        lo, hi = self.u_window
        q = self._q_nodes
        xc = np.clip(x, q[0], q[-1])
        guess = np.interp(xc, q, self.grid.u_nodes)
        u = invert_monotone(self._quantile, self._qdf, xc, lo, hi, x0=guess)
        return np.where(x < q[0], lo, np.where(x > q[-1], hi, u))

    def entropy(self):
        from .quadrature import gauss_legendre_unit, integrate_unit

        lo, hi = self.u_window
        rule = gauss_legendre_unit(256, max(lo, 1 - hi))
        return integrate_unit(self.log_qdf, rule)

    def to_dict(self):
        g = self.grid
        return {
            "family": self.family,
            "u": g.u_nodes.tolist(),
            "qdf": g.qdf_values.tolist(),
            "anchor_u": g.anchor_u,
            "anchor_x": g.anchor_x,
        }


class QdfFunction(Distribution):
    """Density defined by a quantile-density callable on all of (0, 1).

    Useful for synthetic perturbations such as ``Q'(u) = 1 + eps * (u - 1/2)``
    where interpolation error would blur the structure under test.
    """

    family = "qdf_function"
    LOGIT_PIECE = 0.25

    def __init__(self, qdf: Callable, anchor_u: float = 0.5, anchor_x: float = 0.0):
        self._fn = qdf
        if not 0.0 < anchor_u < 1.0:
            raise SpecError("anchor_u must lie strictly inside (0, 1)")
        self.anchor_u = float(anchor_u)
        self.anchor_x = _finite("anchor_x", anchor_x)

    def __repr__(self):
        return f"QdfFunction({getattr(self._fn, '__name__', 'qdf')}, anchor=({self.anchor_u}, {self.anchor_x}))"

    def _qdf(self, u):
        out = np.asarray(self._fn(u), dtype=float)
        return np.broadcast_to(out, np.shape(u)).astype(float)

    def _quantile(self, u):
        # integrate Q' in the logit coordinate, where tails of common QDFs are
        # smooth, on pieces no longer than LOGIT_PIECE between sorted targets
        flat = np.ravel(np.asarray(u, dtype=float))
        s_targets = logit(flat)
        s_anchor = logit(self.anchor_u)
        knots = np.unique(np.concatenate([s_targets, [s_anchor]]))
        counts = np.maximum(1, np.ceil(np.diff(knots) / self.LOGIT_PIECE).astype(int))
        pieces = [np.linspace(a, b, k + 1)[:-1] for a, b, k in zip(knots[:-1], knots[1:], counts)]
        fine = np.concatenate(pieces + [knots[-1:]])

        def integrand(s):
            w = expit(s)
            return self._qdf(w) * w * (1.0 - w)

        cum = cumulative_gl8(integrand, fine)
        at = cum[np.searchsorted(fine, s_targets)]
        at_anchor = cum[np.searchsorted(fine, s_anchor)]
        return np.reshape(self.anchor_x + at - at_anchor, np.shape(u))

    def _cdf(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = 1e-15, 1 - 1e-15
        q_lo, q_hi = self._quantile(np.array([lo, hi]))
        xc = np.clip(x, q_lo, q_hi)
        u = invert_monotone(self._quantile, self._qdf, xc, lo, hi, iters=60)
        return np.where(x <= q_lo, 0.0, np.where(x >= q_hi, 1.0, u))

    def to_dict(self):
        raise SpecError("qdf_function distributions have no JSON form")


# ------------------------------------------------------------------------------
# empirical quantile densities


@dataclass(frozen=True)
class EstimatorConfig:
    """Settings for the empirical quantile-density estimator.

    ``bandwidth_const`` sets the half-width ``b = bandwidth_const * n**(-1/3)``
    of the symmetric difference quotient, measured in u at the median.  With
    ``scale="logit"`` (default) the window is symmetric in ``logit(u)`` with
    half-width ``4 b``, so it narrows in proportion to the tail mass
    ``u (1 - u)``; ``scale="u"`` keeps a fixed u-width ``b`` everywhere.
    """

    clip_delta: float = 0.01
    bandwidth_const: float = 1.0
    scale: str = "logit"

    def __post_init__(self):
        if not 0.0 < float(self.clip_delta) < 0.5:
            raise SpecError(f"clip_delta must lie in (0, 0.5), got {self.clip_delta}")
        _positive("bandwidth_const", self.bandwidth_const)
        if self.scale not in ("logit", "u"):
            raise SpecError(f"estimator scale must be 'logit' or 'u', got {self.scale!r}")

    def half_width(self, n: int) -> float:
        return self.bandwidth_const * n ** (-1.0 / 3.0)


MIN_SAMPLES = 8


class Empirical(Distribution):
    """Distribution backed by a sample.

    The quantile function interpolates the order statistics linearly at
    plotting positions ``k / (n + 1)``; the QDF is a symmetric difference
    quotient of that quantile function (see :class:`EstimatorConfig`).
    """

    family = "empirical"
    sampled = True

    def __init__(self, samples, config: EstimatorConfig | None = None, source: str | None = None):
        x = np.asarray(samples, dtype=float).ravel()
        if x.size < MIN_SAMPLES:
            raise SpecError(f"need at least {MIN_SAMPLES} samples, got {x.size}")
        if not np.all(np.isfinite(x)):
            raise SpecError("samples must be finite")
        self.config = config or EstimatorConfig()
        n = x.size
        b = self.config.half_width(n)
        if b <= 1.0 / (n + 1):
            raise SpecError("bandwidth is narrower than the spacing of plotting positions")
        self.x = np.sort(x)
        self.x.setflags(write=False)
        self.positions = np.arange(1, n + 1) / (n + 1.0)
        self.source = source

    def __repr__(self):
        return f"Empirical(n={self.x.size}, config={self.config})"

    @property
    def n(self):
        return self.x.size

    @property
    def u_window(self):
        c = self.config.clip_delta
        return c, 1.0 - c

    def _quantile(self, u):
        return np.interp(u, self.positions, self.x)

    def _qdf(self, u):
        lo, hi = self._window(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = (self._quantile(hi) - self._quantile(lo)) / (hi - lo)
        if np.any(~(q > 0)):
            raise EstimationError(
                "non-positive quantile-density estimate (heavily tied samples?)"
            )
        return q

    def _window(self, u):
        b = self.config.half_width(self.n)
        p0, p1 = self.positions[0], self.positions[-1]
        if self.config.scale == "u":
            lo, hi = u - b, u + b
        else:
            s = logit(u)
            lo, hi = expit(s - 4.0 * b), expit(s + 4.0 * b)
        return np.maximum(lo, p0), np.minimum(hi, p1)

    def _cdf(self, x):
        lo, hi = self.u_window
        return np.clip(np.interp(x, self.x, self.positions), lo, hi)

    def mean(self):
        return float(np.mean(self.x))

    def second_moment(self):
        return float(np.mean(self.x**2))

    def to_dict(self):
        d = {
            "family": self.family,
            "clip_delta": self.config.clip_delta,
            "bandwidth_const": self.config.bandwidth_const,
            "scale": self.config.scale,
        }
        if self.source:
            d["samples_file"] = self.source
        else:
            d["samples"] = self.x.tolist()
        return d


# ------------------------------------------------------------------------------
# operations


DistributionSpec = Distribution


def quantile(spec: Distribution, u):
    """``Q(u) = F^{-1}(u)``; raises :class:`DomainError` outside the window."""
    return spec.quantile(u)


def qdf(spec: Distribution, u):
    """Quantile density ``Q'(u) = 1 / p(Q(u))``."""
    return spec.qdf(u)


def second_moment(spec: Distribution) -> float:
    """``int x^2 p dx``, or ``math.inf`` when the tails are too heavy."""
    return spec.second_moment()


def density_from_qdf(grid: QdfGrid) -> QdfGridDistribution:
    return QdfGridDistribution(grid)


def sample_qdf_grid(spec: Distribution, u_nodes, anchor_u: float = 0.5) -> QdfGrid:
    """Tabulate ``spec``'s QDF on ``u_nodes`` anchored at its own quantile."""
    u = np.asarray(u_nodes, dtype=float)
    if not u[0] <= anchor_u <= u[-1]:
        anchor_u = float(u[np.argmin(np.abs(u - 0.5))])
    return QdfGrid(u, spec.qdf(u), anchor_u, float(spec.quantile(anchor_u)))


def fit_empirical_qdf(samples, config: EstimatorConfig | None = None, grid=None) -> QdfGrid:
    """Estimate a QDF grid from samples.

    Parameters
    ----------
    samples : array_like
        At least eight finite observations.
    config : EstimatorConfig, optional
    grid : array_like, optional
        u-nodes inside ``[clip_delta, 1 - clip_delta]``; defaults to 99
        equispaced nodes spanning that window.

    Returns
    -------
    QdfGrid
        Anchored at the node nearest the median, where ``Q`` is the
        empirical quantile.
    """
    dist = Empirical(samples, config)
    lo, hi = dist.u_window
    u = np.linspace(lo, hi, 99) if grid is None else np.asarray(grid, dtype=float)
    if u.ndim != 1 or u.size < 2:
        raise SpecError("grid must be a 1-D array with at least two nodes")
    if u[0] < lo - 1e-15 or u[-1] > hi + 1e-15:
        raise DomainError(f"grid must lie inside [{lo}, {hi}]")
    return sample_qdf_grid(dist, np.clip(u, lo, hi))
