"""JSON descriptions of distributions and monotone maps.

A description is an object with a ``"family"`` key, for example::

    {"family": "gaussian", "mu": 0.0, "sigma": 1.0}
    {"family": "qdf_grid", "u": [...], "qdf": [...], "anchor_u": 0.5, "anchor_x": 0.0}
    {"family": "empirical", "samples_file": "x.csv", "clip_delta": 0.01}
    {"family": "generative", "ref": {...}, "map": {"type": "affine", "a": 2.0, "b": 0.0}}

``samples_file`` holds one number per line and is resolved relative to the
directory of the JSON file that names it.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .distributions import (
    AffineMap,
    Cauchy,
    Distribution,
    Empirical,
    EstimatorConfig,
    Exponential,
    Gaussian,
    Generative,
    GridMap,
    LocationScale,
    Logistic,
    MonotoneMap,
    QdfGrid,
    QdfGridDistribution,
    Uniform,
)
from .errors import SpecError

_SIMPLE = {
    "gaussian": (Gaussian, {"mu": 0.0, "sigma": 1.0}),
    "uniform": (Uniform, {"a": 0.0, "b": 1.0}),
    "exponential": (Exponential, {"rate": 1.0}),
    "cauchy": (Cauchy, {"x0": 0.0, "gamma": 1.0}),
    "logistic": (Logistic, {"mu": 0.0, "s": 1.0}),
}


def _take(d: dict, allowed, where: str) -> dict:
    extra = set(d) - set(allowed) - {"family", "type"}
    if extra:
        raise SpecError(f"{where}: unknown field(s) {sorted(extra)}")
    return d


def _number(d, key, default=None, where=""):
    if key not in d:
        if default is None:
            raise SpecError(f"{where}: missing field {key!r}")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SpecError(f"{where}: field {key!r} must be a number, got {v!r}")
    return float(v)


def map_from_dict(d: dict) -> MonotoneMap:
    if not isinstance(d, dict) or "type" not in d:
        raise SpecError("map description needs a 'type' field")
    kind = d["type"]
    if kind == "affine":
        _take(d, ("a", "b"), "affine map")
        return AffineMap(_number(d, "a", where="affine map"), _number(d, "b", 0.0, "affine map"))
    if kind == "monotone_grid":
        _take(d, ("z", "g"), "monotone_grid map")
        try:
            return GridMap(np.asarray(d["z"], dtype=float), np.asarray(d["g"], dtype=float))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError(f"monotone_grid map: {exc}") from exc
    raise SpecError(f"unknown map type {kind!r}")


def _read_samples(path: Path) -> np.ndarray:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read samples file {str(path)!r}: {exc.strerror}") from exc
    try:
        return np.array([float(line) for line in text.split()], dtype=float)
    except ValueError as exc:
        raise SpecError(f"samples file {str(path)!r}: {exc}") from exc


def spec_from_dict(d: dict, base_dir: str | Path | None = None) -> Distribution:
    """Build a :class:`Distribution` from its JSON description.

    Raises
    ------
    SpecError
        On unknown families or fields, missing or invalid parameters, and
        unreadable sample files.
    """
    if not isinstance(d, dict) or "family" not in d:
        raise SpecError("distribution description needs a 'family' field")
    fam = d["family"]
    base = Path(base_dir) if base_dir is not None else Path.cwd()
    if fam in _SIMPLE:
        cls, defaults = _SIMPLE[fam]
        _take(d, defaults, fam)
        return cls(**{k: _number(d, k, v, fam) for k, v in defaults.items()})
    if fam == "location_scale":
        _take(d, ("base", "loc", "scale"), fam)
        if "base" not in d:
            raise SpecError("location_scale: missing field 'base'")
        return LocationScale(
            spec_from_dict(d["base"], base), _number(d, "loc", 0.0, fam), _number(d, "scale", 1.0, fam)
        )
    if fam == "qdf_grid":
        _take(d, ("u", "qdf", "anchor_u", "anchor_x"), fam)
        if "u" not in d or "qdf" not in d:
            raise SpecError("qdf_grid: fields 'u' and 'qdf' are required")
        try:
            u = np.asarray(d["u"], dtype=float)
            q = np.asarray(d["qdf"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise SpecError(f"qdf_grid: {exc}") from exc
        grid = QdfGrid(u, q, _number(d, "anchor_u", 0.5, fam), _number(d, "anchor_x", 0.0, fam))
        return QdfGridDistribution(grid)
    if fam == "empirical":
        _take(d, ("samples", "samples_file", "clip_delta", "bandwidth_const", "scale"), fam)
        cfg = EstimatorConfig(
            _number(d, "clip_delta", 0.01, fam),
            _number(d, "bandwidth_const", 1.0, fam),
            d.get("scale", "logit"),
        )
        if "samples_file" in d:
            src = Path(d["samples_file"])
            path = src if src.is_absolute() else base / src
            return Empirical(_read_samples(path), cfg, source=str(d["samples_file"]))
        if "samples" in d:
            try:
                x = np.asarray(d["samples"], dtype=float)
            except (TypeError, ValueError) as exc:
                raise SpecError(f"empirical: {exc}") from exc
            return Empirical(x, cfg)
        raise SpecError("empirical: give 'samples' or 'samples_file'")
    if fam == "generative":
        _take(d, ("ref", "map"), fam)
        if "ref" not in d or "map" not in d:
            raise SpecError("generative: fields 'ref' and 'map' are required")
        return Generative(spec_from_dict(d["ref"], base), map_from_dict(d["map"]))
    raise SpecError(f"unknown distribution family {fam!r}")


def load_spec(path: str | Path) -> Distribution:
    """Read a JSON distribution description from ``path``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read spec file {str(path)!r}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return spec_from_dict(data, path.parent)


def dump_spec(spec: Distribution) -> str:
    return json.dumps(spec.to_dict(), sort_keys=True)


def digest(*items) -> str:
    """Short SHA-256 over canonical JSON renderings of ``items``."""
    h = hashlib.sha256()
    for item in items:
        h.update(json.dumps(item, sort_keys=True, default=str).encode())
        h.update(b"\0")
    return h.hexdigest()[:16]
