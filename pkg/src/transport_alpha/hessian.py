"""Hessian metric and 3-symmetric tensor of entropy in Wasserstein-2 geometry.

A tangent direction at ``p`` is represented by a potential ``Phi``, with
the density perturbation ``sigma = -(p Phi')'``.  Only derivatives of
``Phi`` are ever used::

    g_H(p)(a, b)    = int Phi_a'' Phi_b'' p dx
    T_H(p)(a, b, c) = 2 int Phi_a'' Phi_b'' Phi_c'' p dx

Integrals are taken in the quantile coordinate ``x = Q_p(u)``, where
``p dx`` becomes ``du``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline

from .distributions import Distribution, QdfFunction
from .divergence import as_alpha, transport_alpha_div
from .errors import DomainError, NumericalError
from .quadrature import QuadratureRule, default_rule, integrate_unit

MAX_ORDER = 6


@dataclass(frozen=True, eq=False)
class PotentialGrid:
    """Derivatives of a potential ``Phi`` sampled on an increasing grid.

    Between and beyond the nodes each derivative is a cubic spline, which
    reproduces polynomials of degree up to three exactly.
    """

    x: np.ndarray
    dphi: np.ndarray
    d2phi: np.ndarray
    d3phi: np.ndarray | None = None
    phi: np.ndarray | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or x.size < 4 or np.any(np.diff(x) <= 0):
            raise DomainError("x must be an increasing 1-D grid with at least 4 nodes")
        object.__setattr__(self, "x", x)
        for name in ("dphi", "d2phi", "d3phi", "phi"):
            val = getattr(self, name)
            if val is None:
                continue
            arr = np.broadcast_to(np.asarray(val, dtype=float), x.shape).copy()
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"{name} has non-finite entries")
            object.__setattr__(self, name, arr)
        if self.phi is None:
            # the constant is unobservable; fix Phi(x[0]) = 0
            object.__setattr__(self, "phi", cumulative_trapezoid(self.dphi, x, initial=0.0))

    @classmethod
    def from_polynomial(cls, coeffs, x) -> PotentialGrid:
        """Exact derivative grids of ``Phi(x) = sum coeffs[k] x**k``."""
        P = Polynomial(coeffs)
        x = np.asarray(x, dtype=float)
        return cls(x, P.deriv(1)(x), P.deriv(2)(x), P.deriv(3)(x), P(x))

    def _spline(self, name):
        cache = self.__dict__.setdefault("_splines", {})
        if name not in cache:
            cache[name] = CubicSpline(self.x, getattr(self, name))
        return cache[name]

    def d1(self, x):
        return self._spline("dphi")(x)

    def d2(self, x):
        return self._spline("d2phi")(x)

    def d3(self, x):
        if self.d3phi is None:
            raise DomainError("third derivative not available on this potential grid")
        return self._spline("d3phi")(x)


@dataclass(frozen=True)
class TensorValue:
    """Quadratic and cubic Taylor terms of a divergence and what remains.

    ``route_gap`` is the largest disagreement between the quantile-density
    and the potential (tensor) evaluation of the two terms.
    """

    quadratic: float
    cubic: float
    remainder: float
    route_gap: float = 0.0

    def to_dict(self):
        return {
            "quadratic": self.quadratic,
            "cubic": self.cubic,
            "remainder": self.remainder,
            "route_gap": self.route_gap,
        }


def _check_shared(*grids):
    x0 = grids[0].x
    for g in grids[1:]:
        if g.x.shape != x0.shape or not np.array_equal(g.x, x0):
            raise DomainError("potential grids must share the same x nodes")


def _rule(p, rule):
    return rule or default_rule(p, graded=True)


def hessian_form(p: Distribution, a: PotentialGrid, b: PotentialGrid, rule: QuadratureRule | None = None) -> float:
    """``g_H(p)(a, b) = int Phi_a'' Phi_b'' p dx``.

    >>> import numpy as np
    >>> from transport_alpha.distributions import Uniform
    >>> a = PotentialGrid.from_polynomial([0, 0, 0, 1 / 6], np.linspace(0, 1, 11))
    >>> round(hessian_form(Uniform(0, 1), a, a), 12)
    0.333333333333
    """
    _check_shared(a, b)
    rule = _rule(p, rule)

    def integrand(u):
        x = p.quantile(u)
        return a.d2(x) * b.d2(x)

    return integrate_unit(integrand, rule)


def tensor_form(
    p: Distribution, a: PotentialGrid, b: PotentialGrid, c: PotentialGrid, rule: QuadratureRule | None = None
) -> float:
    """``T_H(p)(a, b, c) = 2 int Phi_a'' Phi_b'' Phi_c'' p dx`` (signed product)."""
    _check_shared(a, b, c)
    rule = _rule(p, rule)

    def integrand(u):
        x = p.quantile(u)
        return a.d2(x) * b.d2(x) * c.d2(x)

    return 2.0 * integrate_unit(integrand, rule)


def gamma3_from_derivatives(d1, d2, d3):
    """``Gamma_2(Gamma_1(Phi, Phi), Phi) - Gamma_1(Gamma_2(Phi, Phi), Phi)``.

    ``(Phi'**2)'' Phi''`` and ``(Phi''**2)' Phi'`` expanded by the product rule.
    """
    g2_of_g1 = (2 * d2 * d2 + 2 * d1 * d3) * d2
    g1_of_g2 = (2 * d2 * d3) * d1
    return g2_of_g1 - g1_of_g2


def gamma_operators(a: PotentialGrid, x, rtol: float = 1e-8):
    """``(Gamma_1, Gamma_2, Gamma_3)`` of ``Phi`` at ``x``.

    ``Gamma_3`` is computed from the iterated definition and compared to the
    direct value ``2 Phi''**3``; a mismatch beyond ``rtol`` raises.

    Raises
    ------
    DomainError
        If the grid carries no third derivative.  It is never estimated by
        differencing ``d2phi``.
    NumericalError
        If the two routes to ``Gamma_3`` disagree.
    """
    if a.d3phi is None:
        raise DomainError("Gamma_3 needs the third derivative of the potential")
    d1, d2, d3 = a.d1(x), a.d2(x), a.d3(x)
    g3 = gamma3_from_derivatives(d1, d2, d3)
    direct = 2.0 * d2**3
    scale = np.maximum(1.0, np.abs(g3) + np.abs(2 * d2 * d3 * d1))
    if np.any(np.abs(g3 - direct) > rtol * scale):
        raise NumericalError("iterated Gamma_3 disagrees with 2 Phi''^3")
    return d1 * d1, d2 * d2, g3


def gamma3_on_grid(a: PotentialGrid) -> np.ndarray:
    """Iterated ``Gamma_3`` at the grid nodes with outer derivatives by finite differences.

    ``Gamma_1 = Phi'**2`` and ``Gamma_2 = Phi''**2`` are tabulated and then
    differentiated with second-order differences, so the result agrees with
    ``2 Phi''**3`` to ``O(dx**2)`` at interior nodes of smooth potentials (the
    nested one-sided stencils are first order at the two end nodes of each
    side).  No ``Phi'''`` is needed.
    """
    x = a.x
    g1, g2 = a.dphi**2, a.d2phi**2
    dd_g1 = np.gradient(np.gradient(g1, x, edge_order=2), x, edge_order=2)
    d_g2 = np.gradient(g2, x, edge_order=2)
    return dd_g1 * a.d2phi - d_g2 * a.dphi


def gamma3_polynomial(coeffs, x) -> tuple[np.ndarray, np.ndarray]:
    """Both routes to ``Gamma_3`` for a polynomial potential, by exact polynomial algebra.

    Returns ``(iterated, direct)`` where ``iterated`` composes the operators
    on polynomials (``Gamma_1(P, P) = P'**2`` is itself a polynomial, and so
    on) and ``direct = 2 (P'')**3``.

    >>> [float(v) for v in gamma3_polynomial([0, 0, 0, 1], 1.0)]
    [432.0, 432.0]
    """
    P = Polynomial(coeffs)
    d1, d2 = P.deriv(1), P.deriv(2)
    g1 = d1 * d1
    g2 = d2 * d2
    iterated = g1.deriv(2) * d2 - g2.deriv(1) * d1
    direct = 2 * d2**3
    return iterated(x), direct(x)


def potential_from_pair(
    p: Distribution, q: Distribution, x_grid=None, rule: QuadratureRule | None = None
) -> PotentialGrid:
    """Potential whose gradient flow carries ``q`` to ``p``: ``Phi' = T(x) - x``.

    ``Phi''(x) = Q'_p(u)/Q'_q(u) - 1`` at ``u = F_q(x)``.  Without ``x_grid``
    the grid is ``Q_q`` at the nodes of ``rule``, so quadratures with the
    same rule hit the grid exactly and no interpolation enters.
    """
    if x_grid is None:
        u = np.asarray(_rule(q, rule).nodes)
        x = q.quantile(u)
    else:
        x = np.asarray(x_grid, dtype=float)
        u = np.asarray(q.cdf(x), dtype=float)
        lo, hi = q.u_window
        if np.any((u <= 0) | (u >= 1)) or (q.sampled and np.any((u < lo) | (u > hi))):
            raise DomainError("x_grid reaches outside the support of q")
    dphi = p.quantile(u) - x
    d2phi = np.expm1(p.log_qdf(u) - q.log_qdf(u))
    return PotentialGrid(x, dphi, d2phi)


def taylor_compare(p: Distribution, q: Distribution, alpha=1.0, rule: QuadratureRule | None = None) -> TensorValue:
    """Split ``D_alpha(p || q)`` into quadratic, cubic and remainder parts.

    With ``h = Q'_p/Q'_q - 1`` the terms are ``int h**2 / 2`` and
    ``(alpha - 3)/6 int h**3``.  They are also evaluated as
    ``g_H(q)(Phi, Phi) / 2`` and ``(alpha - 3)/12 T_H(q)(Phi, Phi, Phi)``
    for the potential of :func:`potential_from_pair`; ``route_gap`` records
    the disagreement.  The 1/12 matches the convention ``T_H = 2 int Phi''**3``.
    """
    a = as_alpha(alpha)
    rule = rule or default_rule(p, q)
    coef = (a.alpha - 3.0) / 6.0

    def h(u):
        return np.expm1(p.log_qdf(u) - q.log_qdf(u))

    quad = 0.5 * integrate_unit(lambda u: h(u) ** 2, rule)
    cubic = coef * integrate_unit(lambda u: h(u) ** 3, rule) if coef != 0.0 else 0.0

    phi = potential_from_pair(p, q, rule=rule)
    quad_t = 0.5 * hessian_form(q, phi, phi, rule)
    cubic_t = coef / 2.0 * tensor_form(q, phi, phi, phi, rule) if coef != 0.0 else 0.0
    gap = max(abs(quad - quad_t), abs(cubic - cubic_t))

    div = transport_alpha_div(p, q, a, rule).value
    return TensorValue(quad, cubic, div - quad - cubic, gap)


def perturbed_pair(eps: float, shape=None):
    """``(p, q)`` with ``Q'_q = 1`` and ``Q'_p = 1 + eps * shape(u)``; ``shape`` defaults to ``u - 1/2``."""
    shape = shape or (lambda u: np.asarray(u) - 0.5)
    q = QdfFunction(lambda u: np.ones_like(np.asarray(u, dtype=float)))
    p = QdfFunction(lambda u: 1.0 + eps * shape(u))
    return p, q


def taylor_convergence(alpha=1.0, eps_values=(0.1, 0.05, 0.025), shape=None, rule=None):
    """Remainders of :func:`taylor_compare` along a shrinking perturbation.

    Returns ``(rows, ratios)``: ``rows`` holds ``(eps, TensorValue)`` pairs and
    ``ratios`` the successive remainder ratios, about 16 for an O(eps**4)
    remainder under halving.
    """
    rows = []
    for eps in eps_values:
        p, q = perturbed_pair(eps, shape)
        rows.append((float(eps), taylor_compare(p, q, alpha, rule)))
    rem = [tv.remainder for _, tv in rows]
    ratios = [r0 / r1 for r0, r1 in zip(rem[:-1], rem[1:])]
    return rows, ratios


def entropy_derivative_series(
    p: Distribution, a: PotentialGrid, n_max: int = 3, rule: QuadratureRule | None = None
) -> list[float]:
    """``d^n H / dt^n`` at ``t = 0`` along the flow ``x -> x + t Phi'(x)``, for ``n = 1..n_max``.

    ``d^n H/dt^n = (-1)**(n + 1) (n - 1)! int (Phi'')**n p dx``.
    """
    n_max = int(n_max)
    if not 1 <= n_max <= MAX_ORDER:
        raise DomainError(f"n_max must lie in 1..{MAX_ORDER}")
    rule = _rule(p, rule)
    x = p.quantile(rule.nodes)
    d2 = a.d2(x)
    out = []
    for n in range(1, n_max + 1):
        moment = float(np.dot(rule.weights, d2**n))
        out.append((-1) ** (n + 1) * math.factorial(n - 1) * moment)
    return out


def flow_entropy(p: Distribution, a: PotentialGrid, t: float, rule: QuadratureRule | None = None) -> float:
    """Entropy of the pushforward of ``p`` by ``x -> x + t Phi'(x)``, by direct quadrature.

    The pushed quantile density is ``Q'(u) (1 + t Phi''(Q(u)))``, so the
    entropy is ``int log Q' du + int log(1 + t Phi'') du``.
    """
    rule = _rule(p, rule)

    def integrand(u):
        stretch = 1.0 + t * a.d2(p.quantile(u))
        if np.any(stretch <= 0):
            raise DomainError(f"the flow is not monotone at t={t}")
        return p.log_qdf(u) + np.log(stretch)

    return integrate_unit(integrand, rule)


_STENCILS = {
    1: (np.array([1, -8, 0, 8, -1]) / 12.0, 1),
    2: (np.array([-1, 16, -30, 16, -1]) / 12.0, 2),
    3: (np.array([-1, 2, 0, -2, 1]) / 2.0, 3),
}


def finite_difference_entropy_derivatives(
    p: Distribution, a: PotentialGrid, step: float = 1e-2, rule: QuadratureRule | None = None
) -> list[float]:
    """First three t-derivatives of :func:`flow_entropy` at 0 from 5-point central stencils.

    Truncation errors are ``O(step**4)`` for orders 1 and 2 and ``O(step**2)``
    for order 3.
    """
    h = float(step)
    values = np.array([flow_entropy(p, a, k * h, rule) for k in (-2, -1, 0, 1, 2)])
    return [float(w @ values) / h**k for w, k in _STENCILS.values()]
