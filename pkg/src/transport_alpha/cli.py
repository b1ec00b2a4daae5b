"""Command-line front end.

Every verb prints one JSON report (``geodesic`` prints CSV instead)::

    transport-alpha div --p p.json --q q.json --alpha 1
    transport-alpha w2 --p p.json --q q.json
    transport-alpha map --p p.json --q q.json --x 0 1 2
    transport-alpha geodesic --p p.json --q q.json --alpha -1 --t-steps 5
    transport-alpha check duality --seed 0
    transport-alpha info --spec p.json

Exit codes: 0 success, 1 a ``check`` assertion failed, 2 usage or spec
error, 3 numerical failure.  Errors are reported as a JSON object on
standard error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io as _io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .distributions import Gaussian, QdfFunction
from .divergence import (
    monge_ampere_residual,
    orthogonality_defect,
    transport_alpha_div,
    transport_alpha_div_entropy_form,
    transport_map,
    wasserstein2_estimate,
)
from .errors import NumericalError, SpecError, TransportAlphaError
from .geodesics import geodesic_path, geodesic_pde_residual
from .hessian import (
    PotentialGrid,
    entropy_derivative_series,
    finite_difference_entropy_derivatives,
    gamma3_polynomial,
    taylor_compare,
    taylor_convergence,
    tensor_form,
)
from .io import digest, load_spec
from .quadrature import DEFAULT_N, default_rule
from .synthetic import random_grid_pair

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

CHECKS = ("duality", "taylor", "pythagorean", "gamma3", "entropy-derivs", "geodesic-pde")
CHECK_ALPHAS = (-3.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0)
FD_STEP = 2e-3


class UsageError(TransportAlphaError):
    """Malformed command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class Command:
    """A parsed invocation: the verb plus its options."""

    verb: str
    options: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.options[name]
        except KeyError:
            raise AttributeError(name) from None

    @property
    def t_grid(self):
        return np.linspace(0.0, 1.0, self.options["t_steps"])


@dataclass
class RunReport:
    verb: str
    inputs_digest: str
    results: dict
    error_estimate: float | None
    wall_time: float
    version: str = __version__

    def to_json(self, include_time: bool = True) -> str:
        d = {
            "verb": self.verb,
            "inputs_digest": self.inputs_digest,
            "results": self.results,
            "error_estimate": self.error_estimate,
            "version": self.version,
        }
        if include_time:
            d["wall_time"] = self.wall_time
        return json.dumps(_jsonable(d), sort_keys=True, allow_nan=False)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def _finite_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite: {text!r}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _readable(text: str) -> str:
    if not Path(text).is_file():
        raise argparse.ArgumentTypeError(f"cannot read file {text!r}")
    return text


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--quad-n", type=_positive_int, default=DEFAULT_N, help="quadrature nodes")
    common.add_argument(
        "--clip", type=float, default=None,
        help="tail clip of the u window (default: 0, or 0.01 with grid/sample specs)",
    )
    common.add_argument("--seed", type=int, default=0, help="seed for randomised checks")
    common.add_argument("--output", default=None, help="write the report here instead of stdout")

    parser = _Parser(prog="transport-alpha", description="Transport alpha-divergences in 1-D.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def pair(p, required=True):
        p.add_argument("--p", type=_readable, required=required, help="JSON spec of p")
        p.add_argument("--q", type=_readable, required=required, help="JSON spec of q")

    div = sub.add_parser("div", parents=[common], help="transport alpha-divergence D(p||q)")
    pair(div)
    div.add_argument("--alpha", type=_finite_float, required=True)
    div.add_argument("--form", choices=("qdf", "entropy"), default="qdf")

    w2 = sub.add_parser("w2", parents=[common], help="Wasserstein-2 distance")
    pair(w2)

    mp = sub.add_parser("map", parents=[common], help="transport map T = Q_p o F_q at points")
    pair(mp)
    mp.add_argument("--x", type=_finite_float, nargs="+", required=True)

    geo = sub.add_parser("geodesic", parents=[common], help="transport alpha-geodesic frames as CSV")
    pair(geo)
    geo.add_argument("--alpha", type=_finite_float, required=True)
    geo.add_argument("--t-steps", type=_positive_int, default=5)
    geo.add_argument("--u-n", type=_positive_int, default=65)

    chk = sub.add_parser("check", parents=[common], help="run an identity suite")
    chk.add_argument("suite", choices=CHECKS)
    pair(chk, required=False)
    chk.add_argument("--r", type=_readable, help="third spec for the pythagorean suite")
    chk.add_argument("--alpha", type=_finite_float, default=None)
    chk.add_argument("--pairs", type=_positive_int, default=20, help="random pairs for duality")
    chk.add_argument("--poly", default="0,0,0,1", help="comma-separated coefficients for gamma3")

    info = sub.add_parser("info", parents=[common], help="validated spec with derived quantities")
    info.add_argument("--spec", type=_readable, required=True)
    return parser


def parse_command(argv) -> Command:
    """Parse ``argv`` into a :class:`Command`; raises :class:`UsageError`."""
    ns = vars(build_parser().parse_args(list(argv)))
    verb = ns.pop("verb")
    if ns.get("clip") is not None and not 0.0 <= ns["clip"] < 0.5:
        raise UsageError("--clip must lie in [0, 0.5)")
    if verb == "geodesic" and ns["t_steps"] < 2:
        raise UsageError("--t-steps must be at least 2")
    if verb == "geodesic" and ns["u_n"] < 2:
        raise UsageError("--u-n must be at least 2")
    if verb == "check" and (ns.get("p") is None) != (ns.get("q") is None):
        raise UsageError("give both --p and --q, or neither")
    return Command(verb, ns)


# ------------------------------------------------------------------------------
# verbs


def _rule(cmd: Command, *specs, graded=False):
    return default_rule(*specs, n=cmd.quad_n, clip_delta=cmd.clip, graded=graded)


def _spec(path):
    return load_spec(path)


def _run_div(cmd):
    p, q = _spec(cmd.p), _spec(cmd.q)
    fn = transport_alpha_div if cmd.form == "qdf" else transport_alpha_div_entropy_form
    res = fn(p, q, cmd.alpha, _rule(cmd, p, q))
    return res.to_dict(), res.error_estimate


def _run_w2(cmd):
    p, q = _spec(cmd.p), _spec(cmd.q)
    res = wasserstein2_estimate(p, q, _rule(cmd, p, q, graded=True))
    if math.isinf(res.value):
        return {"infinite": True}, 0.0
    return {"value": res.value, "error_estimate": res.error_estimate}, res.error_estimate


def _run_map(cmd):
    p, q = _spec(cmd.p), _spec(cmd.q)
    x = np.asarray(cmd.x, dtype=float)
    t = transport_map(p, q, x)
    resid = monge_ampere_residual(p, q)
    return {"x": x, "T": np.atleast_1d(t), "monge_ampere_residual": resid}, resid


def _assertion(name, measured, tol):
    return {"name": name, "measured": float(measured), "tolerance": tol, "pass": bool(measured <= tol)}


def _check_duality(cmd):
    rng = np.random.default_rng(cmd.seed)
    alphas = CHECK_ALPHAS if cmd.alpha is None else (cmd.alpha,)
    worst = {a: 0.0 for a in alphas}
    for _ in range(cmd.pairs):
        p, q = random_grid_pair(rng)
        rule = _rule(cmd, p, q)
        for a in alphas:
            fwd = transport_alpha_div(p, q, a, rule).value
            bwd = transport_alpha_div(q, p, -a, rule).value
            worst[a] = max(worst[a], abs(fwd - bwd))
    return [_assertion(f"duality alpha={a:g}", worst[a], 1e-10) for a in alphas]


def _check_taylor(cmd):
    alpha = 1.0 if cmd.alpha is None else cmd.alpha
    out = []
    if cmd.p is not None:
        p, q = _spec(cmd.p), _spec(cmd.q)
        tv = taylor_compare(p, q, alpha, _rule(cmd, p, q))
        out.append(_assertion("route gap (pair)", tv.route_gap, 1e-10) | {"terms": tv.to_dict()})
    rows, ratios = taylor_convergence(alpha)
    table = [{"eps": eps, **tv.to_dict()} for eps, tv in rows]
    for k, r in enumerate(ratios):
        a = _assertion(f"remainder ratio {k + 1}", abs(r - 16.0), 4.0)
        a["ratio"] = r
        out.append(a)
    out.append(_assertion("route gap (perturbation)", max(tv.route_gap for _, tv in rows), 1e-10))
    if alpha == 3.0:
        out.append(_assertion("cubic term at alpha=3", max(abs(tv.cubic) for _, tv in rows), 0.0))
    out[-1]["table"] = table
    return out


def _check_pythagorean(cmd):
    alpha = 1.0 if cmd.alpha is None else cmd.alpha

    def div(a, b):
        return transport_alpha_div(a, b, alpha, rule).value

    one = QdfFunction(lambda u: np.ones_like(np.asarray(u, dtype=float)))
    bump_hi = QdfFunction(lambda u: 1.0 + 0.5 * np.where(u > 0.5, np.sin(2 * np.pi * (u - 0.5)) ** 2, 0.0))
    bump_lo = QdfFunction(lambda u: 1.0 + 0.7 * np.where(u < 0.5, np.sin(2 * np.pi * u) ** 2, 0.0))
    rule = _rule(cmd, one)
    disjoint = abs(div(bump_hi, one) + div(one, bump_lo) - div(bump_hi, bump_lo))
    out = [_assertion("disjoint perturbations", disjoint, 1e-8)]
    if cmd.p is not None:
        p, q = _spec(cmd.p), _spec(cmd.q)
        r = _spec(cmd.r) if cmd.r else Gaussian(0.0, 3.0)
    else:
        p, q, r = Gaussian(0.0, 1.0), Gaussian(0.0, 2.0), Gaussian(0.0, 3.0)
    rule = _rule(cmd, p, q, r)
    defect = orthogonality_defect(p, q, r, alpha, rule)
    gap = abs(div(p, q) + div(q, r) - div(p, r) - defect)
    a = _assertion("cosine law", gap, 1e-8)
    a["defect"] = defect
    out.append(a)
    return out


def _check_gamma3(cmd):
    try:
        coeffs = [float(c) for c in cmd.poly.split(",")]
    except ValueError:
        raise UsageError(f"--poly must be comma-separated numbers, got {cmd.poly!r}") from None
    x = np.linspace(-2.0, 2.0, 41)
    iterated, direct = gamma3_polynomial(coeffs, x)
    scale = max(1.0, float(np.max(np.abs(direct))))
    a = _assertion("iterated vs 2 Phi''^3", float(np.max(np.abs(iterated - direct))) / scale, 1e-10)
    a["at_x_1"] = [float(v) for v in gamma3_polynomial(coeffs, 1.0)]
    return [a]


def _check_entropy_derivs(cmd):
    p = _spec(cmd.p) if cmd.p is not None else Gaussian(0.0, 1.0)
    # Phi = x^2/2 is the scaling flow x -> (1 + t) x; splines reproduce it exactly
    scaling = PotentialGrid.from_polynomial([0.0, 0.0, 0.5], np.linspace(-1.0, 1.0, 9))
    rule = _rule(cmd, p, graded=True)
    series = entropy_derivative_series(p, scaling, 3, rule)
    fd = finite_difference_entropy_derivatives(p, scaling, FD_STEP, rule)
    out = []
    for n, (s, f) in enumerate(zip(series, fd), start=1):
        a = _assertion(f"d{n}H/dt{n} series vs finite difference", abs(s - f), 1e-4)
        a["series"], a["finite_difference"] = s, f
        out.append(a)
    t3 = tensor_form(p, scaling, scaling, scaling, rule)
    out.append(_assertion("third derivative vs tensor form", abs(series[2] - t3), 1e-10))
    return out


def _check_geodesic_pde(cmd):
    if cmd.p is not None:
        p, q = _spec(cmd.p), _spec(cmd.q)
    else:
        p, q = Gaussian(0.0, 2.0), Gaussian(0.0, 1.0)
    alpha = 1.0 if cmd.alpha is None else cmd.alpha
    u = np.linspace(0.05, 0.95, 19)
    coarse = geodesic_pde_residual(geodesic_path(p, q, alpha, 65, u)).max
    fine = geodesic_pde_residual(geodesic_path(p, q, alpha, 129, u)).max
    out = [_assertion("residual at h=1/64", coarse, 1e-3)]
    if coarse > 1e-12:
        a = _assertion("halving ratio near 4", abs(coarse / fine - 4.0), 1.0)
        a["ratio"] = coarse / fine
        out.append(a)
    return out


_CHECK_RUNNERS = {
    "duality": _check_duality,
    "taylor": _check_taylor,
    "pythagorean": _check_pythagorean,
    "gamma3": _check_gamma3,
    "entropy-derivs": _check_entropy_derivs,
    "geodesic-pde": _check_geodesic_pde,
}


def _run_check(cmd):
    assertions = _CHECK_RUNNERS[cmd.suite](cmd)
    passed = all(a["pass"] for a in assertions)
    worst = max(a["measured"] for a in assertions)
    return {"suite": cmd.suite, "pass": passed, "assertions": assertions}, worst


def _run_info(cmd):
    spec = _spec(cmd.spec)
    m2 = spec.second_moment()
    lo, hi = spec.support
    res = {
        "spec": spec.to_dict(),
        "entropy": spec.entropy(),
        "mean": spec.mean() if math.isfinite(m2) else None,
        "second_moment": None if math.isinf(m2) else m2,
        "second_moment_infinite": math.isinf(m2),
        "support": [lo, hi],
        "u_window": list(spec.u_window),
    }
    return res, None


_RUNNERS = {"div": _run_div, "w2": _run_w2, "map": _run_map, "check": _run_check, "info": _run_info}


def _inputs_digest(cmd: Command) -> str:
    opts = {k: v for k, v in cmd.options.items() if k != "output"}
    files = {}
    for key in ("p", "q", "r", "spec"):
        path = opts.get(key)
        if path:
            files[key] = hashlib.sha256(Path(path).read_bytes()).hexdigest()
            opts[key] = Path(path).name
    return digest(cmd.verb, opts, files)


def geodesic_csv(cmd: Command) -> str:
    p, q = _spec(cmd.p), _spec(cmd.q)
    lo = cmd.clip if cmd.clip is not None else 0.01
    lo = max(lo, max(p.u_window[0], q.u_window[0]))
    u = np.linspace(lo, 1.0 - lo, cmd.u_n)
    path = geodesic_path(p, q, cmd.alpha, cmd.t_steps, u)
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "u", "qdf", "quantile"])
    for row in path.rows():
        writer.writerow([f"{v:.17g}" for v in row])
    return buf.getvalue()


def run(cmd: Command) -> tuple[RunReport | str, int]:
    """Execute ``cmd``; returns the report (CSV text for ``geodesic``) and an exit code.

    Library errors propagate; :func:`main` maps them to exit codes.
    """
    if cmd.verb == "geodesic":
        return geodesic_csv(cmd), EXIT_OK
    start = time.perf_counter()
    results, err = _RUNNERS[cmd.verb](cmd)
    report = RunReport(cmd.verb, _inputs_digest(cmd), results, err, time.perf_counter() - start)
    code = EXIT_OK
    if cmd.verb == "check" and not results["pass"]:
        code = EXIT_CHECK_FAILED
    return report, code


def _error_payload(exc, code):
    d = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    node = getattr(exc, "node", None)
    if node is not None:
        d["node"] = node
    return json.dumps(d, sort_keys=True)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cmd = parse_command(argv)
        out, code = run(cmd)
    except (UsageError, SpecError) as exc:
        print(_error_payload(exc, EXIT_USAGE), file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, TransportAlphaError, ArithmeticError, ValueError) as exc:
        print(_error_payload(exc, EXIT_NUMERICAL), file=sys.stderr)
        return EXIT_NUMERICAL
    text = out if isinstance(out, str) else out.to_json() + "\n"
    if cmd.output:
        Path(cmd.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
