import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from transport_alpha.distributions import (
    AffineMap,
    Cauchy,
    Exponential,
    Gaussian,
    GridMap,
    Logistic,
    Uniform,
)
from transport_alpha.divergence import (
    AlphaParam,
    DivergenceResult,
    _finish,
    bregman_integrand,
    f_from_log,
    f_transport_alpha,
    generative_div,
    itakura_saito,
    log_qdf_ratio,
    monge_ampere_residual,
    orthogonality_defect,
    transport_alpha_div,
    transport_alpha_div_entropy_form,
    transport_map,
    wasserstein2,
    wasserstein2_estimate,
)
from transport_alpha.errors import DomainError, NumericalError
from transport_alpha.quadrature import default_rule
from transport_alpha.synthetic import random_grid_pair

ALPHAS = [-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0]
alphas = st.sampled_from(ALPHAS)
seeds = st.integers(0, 2**32 - 1)

# D(gaussian(0,1) || logistic(0,1)) by 80-digit tanh-sinh quadrature in the
# logit coordinate (mpmath); the library's own error estimate must cover the gap
GAUSS_LOGISTIC = {-1.0: 0.225333104341923, 0.0: 0.178246550401584, 0.5: 0.160365634119503, 1.0: 0.145251050343084}
W2_GAUSS_LOGISTIC = 0.822848097416499


# -- generator --------------------------------------------------------------------


def test_generator_examples():
    for a in ALPHAS:
        assert f_transport_alpha(1.0, a) == 0.0
    assert f_transport_alpha(2.0, 1) == pytest.approx(1 - math.log(2), abs=1e-15)
    assert f_transport_alpha(2.0, 0) == pytest.approx(0.5 * math.log(2) ** 2, abs=1e-15)
    assert f_transport_alpha(2.0, 1e-6) == pytest.approx(f_transport_alpha(2.0, 0), abs=1e-6)
    with pytest.raises(DomainError):
        f_transport_alpha(0.0, 1)
    with pytest.raises(DomainError):
        f_transport_alpha(-1.0, 1)


def test_small_alpha_branch_is_continuous():
    # both branches evaluated at the same alpha, right at the cutoff
    L = np.log(np.geomspace(0.05, 20, 41))
    series = f_from_log(L, AlphaParam(1e-4, small_alpha_threshold=2e-4))
    direct = f_from_log(L, AlphaParam(1e-4, small_alpha_threshold=1e-5))
    np.testing.assert_allclose(series, direct, rtol=1e-8, atol=1e-16)


def test_generator_without_cancellation():
    # direct formula loses all digits here; the series branch keeps them
    z = 1 + 1e-6
    want = (math.log(z) ** 2) / 2 * (1 + math.log(z) / 3)
    assert f_transport_alpha(z, 1.0) == pytest.approx(want, rel=1e-8)


def test_alpha_param():
    a = AlphaParam(0.5)
    assert (-a).alpha == -0.5 and float(a) == 0.5
    assert AlphaParam(5e-5).is_zero
    assert not AlphaParam(5e-5, small_alpha_threshold=1e-6).is_zero
    with pytest.raises(DomainError):
        AlphaParam(float("inf"))
    with pytest.raises(DomainError):
        AlphaParam(1.0, 0.0)


# -- divergence examples ----------------------------------------------------------


def test_divergence_examples():
    g01 = Gaussian(0, 1)
    assert transport_alpha_div(g01, g01, 1).value == pytest.approx(0, abs=1e-12)
    assert transport_alpha_div(Gaussian(5, 1), g01, 1).value == pytest.approx(0, abs=1e-10)
    assert transport_alpha_div(Gaussian(0, 2), g01, 1).value == pytest.approx(0.306853, abs=1e-6)
    assert transport_alpha_div(Cauchy(0, 3), Cauchy(0, 1), 3).value == pytest.approx(2.522685, abs=1e-6)
    assert transport_alpha_div(Gaussian(0, 2), g01, 0).value == pytest.approx(0.240227, abs=1e-6)


@pytest.mark.parametrize("alpha", sorted(GAUSS_LOGISTIC))
def test_against_high_precision_oracle(alpha):
    res = transport_alpha_div(Gaussian(0, 1), Logistic(0, 1), alpha)
    gap = abs(res.value - GAUSS_LOGISTIC[alpha])
    assert gap < 5e-6
    # the refinement gap is a faithful error estimate to within a small factor
    assert gap < 3 * res.error_estimate


def test_result_fields():
    res = transport_alpha_div(Gaussian(0, 2), Gaussian(0, 1), 1)
    assert isinstance(res, DivergenceResult)
    assert res.method == "qdf_quadrature"
    assert 0 <= res.error_estimate < 1e-12
    assert float(res) == res.value
    assert set(res.to_dict()) == {"value", "error_estimate", "method"}


def test_negative_rounding_is_clamped():
    res = _finish(-1e-14, 0.0, "qdf_quadrature")
    assert res.value == 0.0 and res.clamped and res.to_dict()["clamped"]
    with pytest.raises(NumericalError):
        _finish(-1e-6, 0.0, "qdf_quadrature")


def test_infinite_divergence_raises():
    # Q'_p / Q'_q blows up like 1/(u(1-u)) and alpha = 3 cubes it
    with pytest.raises(NumericalError):
        transport_alpha_div(Logistic(0, 1), Uniform(0, 1), 3)


# -- entropy form -------------------------------------------------------------------


def test_entropy_form_examples():
    g01, g02 = Gaussian(0, 1), Gaussian(0, 2)
    assert transport_alpha_div_entropy_form(g01, g01, 1).value == pytest.approx(0, abs=1e-12)
    ent = transport_alpha_div_entropy_form(g02, g01, 1)
    assert ent.method == "entropy_form"
    assert ent.value == pytest.approx(transport_alpha_div(g02, g01, 1).value, abs=1e-8)
    u = Uniform(0.25, 0.75)
    for a in (-1.0, 0.5, 1.0):
        assert transport_alpha_div_entropy_form(g01, u, a).value == pytest.approx(
            transport_alpha_div(g01, u, a).value, abs=1e-6
        )


def test_entropy_form_domain():
    with pytest.raises(DomainError):
        transport_alpha_div_entropy_form(Gaussian(), Gaussian(0, 2), 0.0)
    # Gaussian QDF against a bounded one: the alpha = 3 pushforward term diverges
    with pytest.raises(NumericalError):
        transport_alpha_div_entropy_form(Gaussian(), Uniform(0.25, 0.75), 3)


# -- maps and W2 ------------------------------------------------------------------------


def test_transport_map_examples():
    g = Gaussian(0, 1)
    x = np.array([-1.0, 0.0, 2.0])
    np.testing.assert_allclose(transport_map(g, g, x), x, atol=1e-12)
    np.testing.assert_allclose(transport_map(Gaussian(3, 2), g, x), 3 + 2 * x, atol=1e-12)
    assert transport_map(Exponential(1), Uniform(0, 1), 0.5) == pytest.approx(math.log(2), abs=1e-12)
    with pytest.raises(DomainError):
        transport_map(Exponential(1), Uniform(0, 1), 1.5)


@pytest.mark.parametrize(
    "p, q",
    [(Gaussian(3, 2), Gaussian(0, 1)), (Logistic(0, 1), Gaussian(1, 2)), (Exponential(2), Uniform(0, 1))],
)
def test_monge_ampere(p, q):
    assert monge_ampere_residual(p, q) < 1e-5


def test_w2_examples():
    g = Gaussian(0, 1)
    assert wasserstein2(g, g) == pytest.approx(0, abs=1e-12)
    assert wasserstein2(g, Gaussian(1, 1)) == pytest.approx(1.0, abs=1e-9)
    assert wasserstein2(g, Gaussian(1, 2)) == pytest.approx(math.sqrt(2), abs=1e-8)
    assert math.isinf(wasserstein2(Cauchy(0, 1), Cauchy(0, 2)))
    assert wasserstein2(g, Logistic(0, 1)) == pytest.approx(W2_GAUSS_LOGISTIC, abs=1e-7)
    est = wasserstein2_estimate(Gaussian(0, 1), Gaussian(1, 2))
    assert est.error_estimate < 1e-6


# -- generative ---------------------------------------------------------------------------


def test_generative_examples():
    ref = Gaussian(0, 1)
    a1, a2 = AffineMap(1.0), AffineMap(2.0)
    assert generative_div(a2, a2, ref, 1).value == 0.0
    for r in (ref, Logistic(0, 1), Uniform(-1, 1)):
        assert generative_div(a2, a1, r, 1).value == pytest.approx(1 - math.log(2), abs=1e-12)
    quad = generative_div(a2, a1, ref, 0).value
    mc = generative_div(a2, a1, ref, 0, mc_n=100_000, seed=0)
    assert mc.method == "monte_carlo"
    assert abs(mc.value - quad) <= 3 * mc.error_estimate + 1e-15


def test_generative_matches_qdf_form():
    from transport_alpha.distributions import Generative

    z = np.linspace(-4, 4, 17)
    mx, my = GridMap(z, z + 0.4 * np.tanh(z)), GridMap(z, 1.5 * z + 0.2 * np.sin(z))
    ref = Gaussian(0, 1)
    for a in (-1.0, 0.0, 1.0):
        lhs = generative_div(mx, my, ref, a).value
        rhs = transport_alpha_div(Generative(ref, mx), Generative(ref, my), a).value
        assert lhs == pytest.approx(rhs, rel=1e-10)
    mc = generative_div(mx, my, ref, 1.0, mc_n=20_000, seed=1)
    assert abs(mc.value - generative_div(mx, my, ref, 1.0).value) <= 4 * mc.error_estimate
    with pytest.raises(DomainError):
        generative_div(mx, my, ref, 1.0, mc_n=1)


# -- Pythagorean relation -----------------------------------------------------------------


def test_orthogonality_examples():
    p, q, r = Gaussian(0, 1), Gaussian(0, 2), Gaussian(0, 3)
    assert orthogonality_defect(q, q, r, 1) == 0.0
    d = lambda x, y: transport_alpha_div(x, y, 1).value  # noqa: E731
    assert orthogonality_defect(p, q, r, 1) == pytest.approx(d(p, q) + d(q, r) - d(p, r), abs=1e-8)
    # frozen from the closed forms of location-scale pairs
    assert orthogonality_defect(p, q, r, 1) == pytest.approx(-1 / 6, abs=1e-12)
    assert orthogonality_defect(p, q, r, 0) == pytest.approx(math.log(0.5) * math.log(1.5), abs=1e-12)


# -- properties ----------------------------------------------------------------------------


@given(seed=seeds, alpha=alphas)
def test_nonnegative_on_random_grids(seed, alpha):
    p, q = random_grid_pair(np.random.default_rng(seed))
    assert transport_alpha_div(p, q, alpha).value >= 0.0


@given(seed=seeds, alpha=alphas)
def test_duality(seed, alpha):
    p, q = random_grid_pair(np.random.default_rng(seed))
    fwd = transport_alpha_div(p, q, alpha)
    bwd = transport_alpha_div(q, p, -alpha)
    assert abs(fwd.value - bwd.value) <= 1e-10 + fwd.error_estimate + bwd.error_estimate


@given(seed=seeds, alpha=alphas, c=st.floats(-100, 100))
def test_translation_invariance_bitwise(seed, alpha, c):
    p, q = random_grid_pair(np.random.default_rng(seed))
    rule = default_rule(p, q)
    base = f_from_log(log_qdf_ratio(p, q)(rule.nodes), alpha)
    shifted = f_from_log(log_qdf_ratio(p.shift(c), q)(rule.nodes), alpha)
    np.testing.assert_array_equal(base, shifted)
    assert transport_alpha_div(p.shift(c), q, alpha).value == transport_alpha_div(p, q, alpha).value


@given(seed=seeds)
def test_special_alpha_reduction(seed):
    p, q = random_grid_pair(np.random.default_rng(seed))
    rule = default_rule(p, q)
    r = p.qdf(rule.nodes) / q.qdf(rule.nodes)
    kl = float(rule.weights @ (r - np.log(r) - 1))
    hess = float(rule.weights @ (0.5 * np.log(r) ** 2))
    assert transport_alpha_div(p, q, 1, rule).value == pytest.approx(kl, rel=1e-12, abs=1e-14)
    assert transport_alpha_div(p, q, 0, rule).value == pytest.approx(hess, rel=1e-12, abs=1e-14)


@given(seed=seeds, alpha=st.floats(-1e-2, 1e-2))
def test_alpha_continuity(seed, alpha):
    p, q = random_grid_pair(np.random.default_rng(seed))
    rule = default_rule(p, q)
    L = log_qdf_ratio(p, q)(rule.nodes)
    cubic = float(rule.weights @ (L**3 / 6))
    quartic = float(rule.weights @ (L**4 / 24))
    d0 = transport_alpha_div(p, q, 0, rule).value
    da = transport_alpha_div(p, q, alpha, rule).value
    assert abs(da - d0) <= (abs(cubic) + 1e-12) * abs(alpha) * 1.01 + 2 * quartic * alpha**2 + 1e-13


@given(seed=seeds, alpha=st.sampled_from([-3.0, -1.0, -0.5, 0.5, 1.0, 3.0]))
def test_bregman_identity_pointwise(seed, alpha):
    p, q = random_grid_pair(np.random.default_rng(seed))
    u = np.linspace(0.01, 0.99, 57)
    direct = f_from_log(log_qdf_ratio(p, q)(u), alpha)
    breg = bregman_integrand(p, q, alpha, u)
    np.testing.assert_allclose(breg, direct, rtol=1e-8, atol=1e-10)
    # Bregman of -log z between K_p and K_q is Itakura-Saito
    k_p, k_q = p.qdf(u) ** alpha, q.qdf(u) ** alpha
    np.testing.assert_allclose(itakura_saito(k_p, k_q) / alpha**2, direct, rtol=1e-8, atol=1e-10)


def test_bregman_needs_nonzero_alpha():
    with pytest.raises(DomainError):
        bregman_integrand(Gaussian(), Gaussian(0, 2), 0.0, 0.5)


@given(seed=seeds, alpha=alphas)
def test_cosine_law(seed, alpha):
    rng = np.random.default_rng(seed)
    p, q = random_grid_pair(rng)
    r, _ = random_grid_pair(rng)
    d = lambda x, y: transport_alpha_div(x, y, alpha).value  # noqa: E731
    lhs = d(p, q) + d(q, r) - d(p, r)
    assert lhs == pytest.approx(orthogonality_defect(p, q, r, alpha), rel=1e-9, abs=1e-10)
