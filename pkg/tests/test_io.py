import json

import numpy as np
import pytest

from transport_alpha.distributions import (
    AffineMap,
    Cauchy,
    Empirical,
    EstimatorConfig,
    Exponential,
    Gaussian,
    Generative,
    GridMap,
    LocationScale,
    Logistic,
    QdfGrid,
    QdfGridDistribution,
    Uniform,
)
from transport_alpha.errors import SpecError
from transport_alpha.io import digest, dump_spec, load_spec, map_from_dict, spec_from_dict

U = np.linspace(0.02, 0.98, 17)

ROUND_TRIP = [
    Gaussian(1, 2),
    Uniform(-1, 4),
    Exponential(3),
    Cauchy(0.5, 2),
    Logistic(1, 0.3),
    LocationScale(Logistic(0, 1), 2, 3),
    Generative(Gaussian(), AffineMap(2, 1)),
    Generative(Logistic(), GridMap([-2, 0, 1, 3], [-1, 0, 2, 5])),
    QdfGridDistribution(QdfGrid([0.01, 0.3, 0.5, 0.99], [3.0, 1.2, 1.0, 2.5], 0.5, 1.0)),
    Empirical(np.random.default_rng(0).normal(size=50), EstimatorConfig(0.05, 2.0, "u")),
]


@pytest.mark.parametrize("spec", ROUND_TRIP, ids=lambda s: s.family)
def test_round_trip(spec):
    back = spec_from_dict(json.loads(dump_spec(spec)))
    assert back.family == spec.family
    np.testing.assert_allclose(back.quantile(U[2:-2]), spec.quantile(U[2:-2]), rtol=1e-14)


def test_defaults_fill_in():
    g = spec_from_dict({"family": "gaussian"})
    assert (g.mu, g.sigma) == (0.0, 1.0)
    e = spec_from_dict({"family": "empirical", "samples": list(range(20))})
    assert e.config == EstimatorConfig()


def test_samples_file_relative_to_spec(tmp_path):
    sub = tmp_path / "data"
    sub.mkdir()
    (sub / "x.txt").write_text("\n".join(str(v) for v in range(1, 21)))
    (sub / "spec.json").write_text(json.dumps({"family": "empirical", "samples_file": "x.txt"}))
    e = load_spec(sub / "spec.json")
    assert e.n == 20 and e.source == "x.txt"
    assert e.to_dict()["samples_file"] == "x.txt"


@pytest.mark.parametrize(
    "d",
    [
        {},
        {"family": "weibull"},
        {"family": "gaussian", "sd": 1},
        {"family": "gaussian", "sigma": "1"},
        {"family": "gaussian", "sigma": True},
        {"family": "gaussian", "sigma": -1},
        {"family": "location_scale", "loc": 1},
        {"family": "qdf_grid", "u": [0.1, 0.9]},
        {"family": "qdf_grid", "u": [0.1, 0.9], "qdf": ["a", 1]},
        {"family": "empirical"},
        {"family": "empirical", "samples": [1, 2]},
        {"family": "empirical", "samples": list(range(20)), "scale": "log"},
        {"family": "generative", "ref": {"family": "gaussian"}},
        {"family": "generative", "ref": {"family": "gaussian"}, "map": {"type": "spline"}},
        {"family": "generative", "ref": {"family": "gaussian"}, "map": {"type": "affine"}},
        {"family": "generative", "ref": {"family": "gaussian"}, "map": {"type": "monotone_grid", "z": [0, 1]}},
        {"family": "generative", "ref": {"family": "gaussian"}, "map": {"type": "monotone_grid", "z": [0, 1], "g": [1, 0]}},
        [1, 2],
    ],
)
def test_invalid_descriptions(d):
    with pytest.raises(SpecError):
        spec_from_dict(d)


def test_map_from_dict():
    assert map_from_dict({"type": "affine", "a": 2}) == AffineMap(2.0, 0.0)
    with pytest.raises(SpecError):
        map_from_dict({"a": 2})


def test_load_errors(tmp_path):
    with pytest.raises(SpecError):
        load_spec(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SpecError):
        load_spec(bad)
    missing_samples = tmp_path / "e.json"
    missing_samples.write_text(json.dumps({"family": "empirical", "samples_file": "nope.txt"}))
    with pytest.raises(SpecError):
        load_spec(missing_samples)


def test_digest_is_stable_and_order_free():
    assert digest({"a": 1, "b": 2}) == digest({"b": 2, "a": 1})
    assert digest("x") != digest("y")
    assert len(digest("x")) == 16
