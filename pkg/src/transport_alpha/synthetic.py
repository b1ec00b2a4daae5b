"""Seeded random densities for property checks."""

from __future__ import annotations

import numpy as np
from scipy.special import logit

from .distributions import QdfGrid, QdfGridDistribution

GRID_WINDOW = (0.01, 0.99)


def random_qdf_grid(rng: np.random.Generator, n_nodes: int = 33, roughness: float = 0.6) -> QdfGrid:
    """A smooth, strictly positive random QDF on ``[0.01, 0.99]``.

    ``log Q'`` is a random scale plus a few random sine modes, plus a random
    multiple of ``|logit u|``; the last term produces the tail growth of
    real quantile densities.
    """
    u = np.linspace(*GRID_WINDOW, n_nodes)
    k = np.arange(1, 5)
    amps = rng.normal(0.0, roughness, size=k.size) / k
    phases = rng.uniform(0, np.pi, size=k.size)
    log_q = rng.normal(0.0, 0.5) + np.sin(np.pi * np.outer(u, k) + phases) @ amps
    log_q += rng.uniform(0.0, 0.5) * np.abs(logit(u))
    return QdfGrid(u, np.exp(log_q), 0.5, rng.normal())


def random_grid_pair(rng: np.random.Generator, n_nodes: int = 33):
    """Two independent :func:`random_qdf_grid` densities."""
    return (
        QdfGridDistribution(random_qdf_grid(rng, n_nodes)),
        QdfGridDistribution(random_qdf_grid(rng, n_nodes)),
    )
