"""Transport alpha-divergences between one-dimensional densities.

Divergences, geodesics and Hessian structures are all expressed through
quantile density functions ``Q'(u) = 1 / p(Q(u))`` and integrated over
``u`` in (0, 1).
"""

__version__ = "0.1.0"

from .classical import classical_alpha_div, classical_alpha_geodesic
from .distributions import (
    AffineMap,
    Cauchy,
    Distribution,
    DistributionSpec,
    Empirical,
    EstimatorConfig,
    Exponential,
    Gaussian,
    Generative,
    GridMap,
    LocationScale,
    Logistic,
    QdfFunction,
    QdfGrid,
    QdfGridDistribution,
    Uniform,
    density_from_qdf,
    fit_empirical_qdf,
    qdf,
    quantile,
    second_moment,
)
from .divergence import (
    AlphaParam,
    DivergenceResult,
    f_transport_alpha,
    generative_div,
    orthogonality_defect,
    transport_alpha_div,
    transport_alpha_div_entropy_form,
    transport_map,
    wasserstein2,
)
from .errors import DomainError, EstimationError, NumericalError, SpecError, TransportAlphaError
from .geodesics import GeodesicPath, geodesic_density, geodesic_path, transport_alpha_geodesic
from .hessian import (
    PotentialGrid,
    TensorValue,
    entropy_derivative_series,
    gamma3_on_grid,
    gamma_operators,
    hessian_form,
    potential_from_pair,
    taylor_compare,
    tensor_form,
)
from .quadrature import QuadratureRule, gauss_legendre_unit, integrate_unit, integrate_with_error

__all__ = [name for name in dir() if not name.startswith("_")]
