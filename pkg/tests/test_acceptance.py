"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

import math
import sys

import numpy as np
import pytest

from transport_alpha import classical
from transport_alpha._numerics import invert_monotone
from transport_alpha.distributions import (
    Cauchy,
    Empirical,
    Exponential,
    Gaussian,
    Generative,
    Logistic,
    MonotoneMap,
    QdfFunction,
    Uniform,
)
from transport_alpha.divergence import (
    orthogonality_defect,
    transport_alpha_div,
    transport_alpha_div_entropy_form,
    wasserstein2,
)
from transport_alpha.geodesics import (
    geodesic_density,
    geodesic_path,
    geodesic_pde_residual,
    transport_alpha_geodesic,
)
from transport_alpha.hessian import (
    PotentialGrid,
    entropy_derivative_series,
    finite_difference_entropy_derivatives,
    gamma3_polynomial,
    gamma_operators,
    taylor_convergence,
    tensor_form,
)
from transport_alpha.quadrature import gauss_legendre_unit
from transport_alpha.synthetic import random_grid_pair

ALPHAS = (-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0)
SEED = 0


def location_scale_closed_form(ratio, alpha):
    """Divergence of same-shape location-scale pairs with scale ratio ``ratio``."""
    L = math.log(ratio)
    if alpha == 0:
        return 0.5 * L * L
    return (ratio**alpha - alpha * L - 1.0) / alpha**2


class TanhMap(MonotoneMap):
    """``G(z) = z + c tanh(z)``, with ``G'`` between 1 and ``1 + c``."""

    def __init__(self, c):
        self.c = c

    def __call__(self, z):
        return z + self.c * np.tanh(z)

    def derivative(self, z):
        return 1.0 + self.c / np.cosh(z) ** 2

    def inverse(self, x):
        x = np.asarray(x, dtype=float)
        return invert_monotone(self, self.derivative, x, x - self.c, x + self.c, x0=x)


def smooth_pairs():
    """Twenty pairs whose QDF ratio stays bounded, so every alpha is finite."""
    G, L = Gaussian, Logistic
    pairs = [(G(0, 1), G(m, s)) for m, s in [(0, 2), (1, 0.5), (-2, 1.5), (0.3, 0.8), (4, 3)]]
    pairs += [(L(0, 1), L(1, 2)), (L(2, 0.7), L(0, 1)), (L(0, 3), L(-1, 1))]
    pairs += [(Cauchy(0, 1), Cauchy(0, 3)), (Cauchy(1, 2), Cauchy(0, 1))]
    pairs += [(Exponential(1), Exponential(2)), (Exponential(0.5), Exponential(3))]
    pairs += [(Uniform(0, 1), Uniform(0, 3)), (Uniform(-1, 0.5), Uniform(2, 3))]
    pairs += [
        (Generative(G(0, 1), TanhMap(0.5)), G(0, 1)),
        (G(0, 1), Generative(G(0, 1), TanhMap(1.0))),
        (Generative(G(0, 1), TanhMap(0.3)), Generative(G(0, 1), TanhMap(0.8))),
        (Generative(G(0, 2), TanhMap(0.4)), G(1, 1.5)),
        (Generative(L(0, 1), TanhMap(0.6)), L(0, 1)),
        (L(0, 1), Generative(L(0, 1), TanhMap(0.2))),
    ]
    assert len(pairs) == 20
    return pairs


# ------------------------------------------------------------------------------
# criteria: each returns (passed, detail)


def criterion_1():
    worst = 0.0
    for sp, sq in [(2, 1), (1, 3), (0.5, 2)]:
        for a in ALPHAS:
            got = transport_alpha_div(Gaussian(0, sp), Gaussian(0, sq), a, gauss_legendre_unit(256)).value
            want = location_scale_closed_form(sp / sq, a)
            worst = max(worst, abs(got - want) / want)
    return worst <= 1e-8, f"max relative error {worst:.2e} (tol 1e-8)"


def criterion_2():
    worst, flags = 0.0, []
    for g1, g2 in [(3, 1), (1, 2), (0.5, 4)]:
        p, q = Cauchy(0, g1), Cauchy(0, g2)
        for a in ALPHAS:
            got = transport_alpha_div(p, q, a).value
            worst = max(worst, abs(got - location_scale_closed_form(g1 / g2, a)))
        flags.append(math.isinf(wasserstein2(p, q)))
    ok = worst <= 1e-8 and all(flags)
    return ok, f"max abs error {worst:.2e} (tol 1e-8); W2 infinite on {sum(flags)}/{len(flags)} pairs"


def criterion_3():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(100):
        p, q = random_grid_pair(rng)
        for a in ALPHAS:
            fwd = transport_alpha_div(p, q, a).value
            bwd = transport_alpha_div(q, p, -a).value
            worst = max(worst, abs(fwd - bwd))
    return worst <= 1e-9, f"max |D_a(p||q) - D_-a(q||p)| = {worst:.2e} over 100 pairs (tol 1e-9)"


def criterion_4():
    worst_shift = 0.0
    bases = [Gaussian(0, 1), Logistic(1, 2), Cauchy(0, 1), Generative(Gaussian(0, 1), TanhMap(0.5))]
    for base in bases:
        for c in (-3.0, 0.7):
            for a in ALPHAS:
                worst_shift = max(worst_shift, transport_alpha_div(base.shift(c), base, a).value)
    rng = np.random.default_rng(SEED)
    lowest = math.inf
    for _ in range(50):
        p, q = random_grid_pair(rng)
        for a in ALPHAS:
            lowest = min(lowest, transport_alpha_div(p, q, a).value)
    ok = worst_shift <= 1e-10 and lowest >= 0.0
    return ok, f"max D(shift(p)||p) = {worst_shift:.2e} (tol 1e-10); min D on random pairs = {lowest:.3g}"


def criterion_5():
    worst = 0.0
    for p, q in smooth_pairs():
        for a in (-1.0, 0.5, 1.0, 3.0):
            d_qdf = transport_alpha_div(p, q, a).value
            d_ent = transport_alpha_div_entropy_form(p, q, a).value
            worst = max(worst, abs(d_qdf - d_ent))
    return worst <= 1e-6, f"max |QDF form - entropy form| = {worst:.2e} on 20 pairs (tol 1e-6)"


def criterion_6():
    ratios_all, cubic3 = [], None
    for a in (-1.0, 1.0, 3.0):
        rows, ratios = taylor_convergence(a, (0.1, 0.05, 0.025))
        ratios_all += ratios
        if a == 3.0:
            cubic3 = max(abs(tv.cubic) for _, tv in rows)
    ok = all(12 <= r <= 20 for r in ratios_all) and cubic3 == 0.0
    shown = ", ".join(f"{r:.2f}" for r in ratios_all)
    return ok, f"remainder ratios [{shown}] (need [12, 20]); cubic at alpha=3 = {cubic3}"


def criterion_7():
    p, q = Gaussian(1, 2), Logistic(0, 1)
    u = np.linspace(0.01, 0.99, 99)
    end_err, collinear = 0.0, 0.0
    for a in ALPHAS:
        f0 = transport_alpha_geodesic(p, q, a, 0.0, u).qdf_values
        f1 = transport_alpha_geodesic(p, q, a, 1.0, u).qdf_values
        end_err = max(end_err, np.max(np.abs(f0 / q.qdf(u) - 1)), np.max(np.abs(f1 / p.qdf(u) - 1)))
        frames = [transport_alpha_geodesic(p, q, a, t, u).qdf_values for t in (0.25, 0.5, 0.75)]
        ys = [np.log(f) if a == 0 else f ** (-a) for f in frames]
        scale = np.maximum(1.0, np.abs(ys[1]))
        collinear = max(collinear, np.max(np.abs(ys[1] - 0.5 * (ys[0] + ys[2])) / scale))

    nodes = gauss_legendre_unit(256, 0.001).nodes
    g0, g1 = Gaussian(0, 1), Gaussian(2, 3)
    mid = geodesic_density(transport_alpha_geodesic(g1, g0, -1, 0.5, nodes), g1, g0, -1, 0.5)
    uu = np.linspace(0.01, 0.99, 99)
    w2_mid = np.max(np.abs(mid.quantile(uu) - Gaussian(1, 2).quantile(uu)))

    uu = np.linspace(0.05, 0.95, 19)
    res = [
        geodesic_pde_residual(geodesic_path(Gaussian(0, 2), Gaussian(0, 1), 1.0, n, uu)).max
        for n in (33, 65, 129)
    ]
    ratios = [res[0] / res[1], res[1] / res[2]]
    ok = end_err <= 1e-12 and collinear <= 1e-10 and w2_mid <= 1e-8 and all(3.5 <= r <= 4.5 for r in ratios)
    return ok, (
        f"endpoint {end_err:.1e}, collinearity {collinear:.1e}, W2 midpoint {w2_mid:.1e}, "
        f"PDE halving ratios {ratios[0]:.2f}, {ratios[1]:.2f}"
    )


def _bump(lo, hi, amp):
    def qdf(u):
        u = np.asarray(u, dtype=float)
        inside = (u > lo) & (u < hi)
        return 1.0 + amp * np.where(inside, np.sin(np.pi * (u - lo) / (hi - lo)) ** 2, 0.0)

    return QdfFunction(qdf)


def criterion_8():
    one = QdfFunction(lambda u: np.ones_like(np.asarray(u, dtype=float)))
    disjoint = 0.0
    for amp_p, amp_r in [(0.5, 0.7), (2.0, -0.6), (-0.4, 1.5)]:
        p, r = _bump(0.5, 1.0, amp_p), _bump(0.0, 0.5, amp_r)
        for a in ALPHAS:
            lhs = transport_alpha_div(p, one, a).value + transport_alpha_div(one, r, a).value
            disjoint = max(disjoint, abs(lhs - transport_alpha_div(p, r, a).value))
    triples = [
        (Gaussian(0, 1), Gaussian(0, 2), Gaussian(0, 3)),
        (Logistic(0, 1), Gaussian(1, 1), Generative(Gaussian(0, 1), TanhMap(0.5))),
        (Cauchy(0, 1), Cauchy(1, 2), Cauchy(0, 0.5)),
    ]
    cosine = 0.0
    for p, q, r in triples:
        for a in ALPHAS:
            d = lambda x, y: transport_alpha_div(x, y, a).value  # noqa: E731
            gap = d(p, q) + d(q, r) - d(p, r) - orthogonality_defect(p, q, r, a)
            cosine = max(cosine, abs(gap))
    ok = disjoint <= 1e-8 and cosine <= 1e-8
    return ok, f"disjoint triples {disjoint:.1e}, cosine law {cosine:.1e} (tol 1e-8)"


def criterion_9():
    rng = np.random.default_rng(SEED)
    x = np.linspace(-2, 2, 41)
    worst = 0.0
    for deg in range(0, 6):
        for _ in range(5):
            coeffs = rng.normal(size=deg + 1)
            iterated, direct = gamma3_polynomial(coeffs, x)
            scale = max(1.0, float(np.max(np.abs(direct))))
            worst = max(worst, float(np.max(np.abs(iterated - direct))) / scale)
            grid = PotentialGrid.from_polynomial(coeffs, x)
            _, _, g3 = gamma_operators(grid, x)
            worst = max(worst, float(np.max(np.abs(g3 - direct))) / scale)
    return worst <= 1e-10, f"max relative Gamma_3 gap {worst:.1e} on degrees 0..5 (tol 1e-10)"


FD_STEP = 2e-3


def criterion_10():
    p = Gaussian(0, 1)
    scaling = PotentialGrid.from_polynomial([0, 0, 0.5], np.linspace(-1, 1, 9))
    series = entropy_derivative_series(p, scaling, 3)
    exact = max(abs(s - e) for s, e in zip(series, (1.0, -1.0, 2.0)))
    fd = finite_difference_entropy_derivatives(p, scaling, FD_STEP)
    fd_gap = max(abs(s - f) for s, f in zip(series, fd))
    tensor_gap = abs(series[2] - tensor_form(p, scaling, scaling, scaling))
    ok = exact <= 1e-10 and fd_gap <= 1e-4 and tensor_gap <= 1e-10
    return ok, (
        f"series {[round(s, 12) for s in series]}, finite-difference gap {fd_gap:.1e} "
        f"(step {FD_STEP}, tol 1e-4), tensor gap {tensor_gap:.1e}"
    )


def criterion_11():
    m, n = [0.5, 0.5], [0.25, 0.75]
    examples = [
        (classical.classical_alpha_div(m, n, 1), 0.5 * math.log(2) + 0.5 * math.log(2 / 3)),
        (classical.classical_alpha_div(m, n, 3), 0.5 * (0.25**2 / 0.25 + 0.25**2 / 0.75)),
        (classical.classical_alpha_div([1, 4], [4, 1], 0), 4.0),
    ]
    ex_err = max(abs(a - b) for a, b in examples)
    ode_ratios = []
    for a in (1.0, 2.0, 0.5, -3.0):
        r = [classical.geodesic_ode_residual([1.0, 2.0], [4.0, 0.5], a, 0.4, h) for h in (1e-2, 5e-3)]
        ode_ratios.append(r[0] / r[1])
    base = np.array([0.2, 0.3, 0.5])
    v = np.array([1.0, -2.0, 1.0])
    taylor_ratios = []
    for a in (-1.0, 0.0, 1.0, 2.0):
        rem = [classical.classical_taylor(base + e * v, base, a)[2] for e in (0.04, 0.02, 0.01)]
        taylor_ratios += [rem[0] / rem[1], rem[1] / rem[2]]
    ok = (
        ex_err <= 1e-12
        and all(3.5 <= r <= 4.5 for r in ode_ratios)
        and all(12 <= r <= 20 for r in taylor_ratios)
    )
    return ok, (
        f"examples {ex_err:.1e}, ODE halving ratios {min(ode_ratios):.2f}..{max(ode_ratios):.2f}, "
        f"Taylor ratios {min(taylor_ratios):.2f}..{max(taylor_ratios):.2f}"
    )


def criterion_12():
    samples = np.random.default_rng(SEED).normal(0.0, 1.0, size=10_000)
    q = Empirical(samples)
    got = transport_alpha_div(Gaussian(0, 2), q, 1.0).value
    want = 1.0 - math.log(2.0)
    err = abs(got - want)
    return err <= 0.02, f"D(gaussian(0,2) || empirical) = {got:.6f} vs {want:.6f}, error {err:.4f} (tol 0.02)"


CRITERIA = {
    1: ("location-scale closed form", criterion_1),
    2: ("Cauchy closed form and infinite W2", criterion_2),
    3: ("duality on random QDF grids", criterion_3),
    4: ("translation invariance and nonnegativity", criterion_4),
    5: ("QDF form vs entropy form", criterion_5),
    6: ("Taylor remainder convergence", criterion_6),
    7: ("geodesics", criterion_7),
    8: ("Pythagorean and cosine law", criterion_8),
    9: ("Gamma_3 identity", criterion_9),
    10: ("entropy derivatives", criterion_10),
    11: ("classical module", criterion_11),
    12: ("empirical path", criterion_12),
}


def _line(k, title, ok, detail):
    return f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, report_line):
    title, fn = CRITERIA[k]
    ok, detail = fn()
    line = _line(k, title, ok, detail)
    print(line)
    report_line(line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for k in sorted(CRITERIA):
        title, fn = CRITERIA[k]
        ok, detail = fn()
        failed += not ok
        print(_line(k, title, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
