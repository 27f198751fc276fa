"""Command-line front end: ``cyclewalk <subcommand> [options]``.

Every subcommand emits a table as CSV (default) or as a JSON object with
``config``, ``rows`` and ``provenance`` keys.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from fractions import Fraction

import numpy as np

from . import bessel, mixing, stats, walks
from .walks import NumericalInvariantError, WalkSpec

EXIT_CONFIG = 2
EXIT_NUMERIC = 3
ROW_TOL = 1e-10


class ConfigError(ValueError):
    pass


_NUMBER = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
_PI_EXPR = re.compile(rf"^\s*(?P<sign>[+-])?\s*(?P<coef>{_NUMBER})?\s*\*?\s*(?P<pi>pi)?\s*(?:/\s*(?P<den>{_NUMBER}))?\s*$")


def parse_real(text: str) -> float:
    """Parse a decimal literal or a pi-rational such as ``pi/2``, ``3pi/2``, ``4*pi/9``."""
    m = _PI_EXPR.match(text)
    if not m or (m["coef"] is None and m["pi"] is None):
        raise ConfigError(f"cannot parse number {text!r}")
    coef = Fraction(m["coef"]) if m["coef"] is not None else Fraction(1)
    if m["den"] is not None:
        den = Fraction(m["den"])
        if den == 0:
            raise ConfigError(f"division by zero in {text!r}")
        coef /= den
    if m["sign"] == "-":
        coef = -coef
    return float(coef) * math.pi if m["pi"] else float(coef)


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` inclusive of ``stop`` when it lies on the grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--tgrid must look like start:stop:step (got {text!r})")
    start, stop, step = (parse_real(p) for p in parts)
    if step <= 0:
        raise ConfigError("--tgrid step must be > 0")
    if stop < start:
        raise ConfigError("--tgrid stop must be >= start")
    count = int(math.floor((stop - start) / step + 1e-9))
    return start + step * np.arange(count + 1)


def parse_coin(text: str) -> walks.CoinMatrix:
    if text.lower() == "hadamard":
        return walks.hadamard()
    try:
        entries = [complex(s.replace(" ", "")) for s in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"--coin: {exc}") from None
    if len(entries) != 4:
        raise ConfigError("--coin takes 'hadamard' or four comma-separated entries a,b,c,d")
    try:
        return walks.CoinMatrix(*entries)
    except ValueError as exc:
        raise ConfigError(f"--coin: {exc}") from None


def parse_vector(text: str) -> tuple:
    try:
        vals = tuple(complex(s.replace(" ", "")) for s in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"--initial-coin: {exc}") from None
    if len(vals) != 2:
        raise ConfigError("--initial-coin takes two comma-separated entries")
    return tuple(v.real if v.imag == 0 else v for v in vals)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def emit(columns, rows, config, provenance, fmt, out):
    if fmt == "json":
        doc = {
            "config": _jsonable(config),
            "rows": [dict(zip(columns, _jsonable(list(r)))) for r in rows],
            "provenance": _jsonable(provenance),
        }
        out.write(json.dumps(doc, indent=2, sort_keys=False))
        out.write("\n")
    else:
        out.write(",".join(columns) + "\n")
        for r in rows:
            out.write(",".join(_fmt(v) for v in r) + "\n")


def _spec(args) -> WalkSpec:
    try:
        return WalkSpec(
            args.model,
            args.n,
            coin=parse_coin(args.coin),
            initial_coin=parse_vector(args.initial_coin),
            start=args.start,
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _check_rows(p: np.ndarray, label: str):
    total = float(np.sum(p))
    if abs(total - 1.0) > ROW_TOL:
        raise NumericalInvariantError(f"{label}: probabilities sum to {total!r}")


def cmd_evolve(args):
    spec = _spec(args)
    if args.steps is not None:
        if not spec.discrete:
            raise ConfigError("--steps applies to discrete-time models; use --t or --tgrid")
        if args.steps < 0:
            raise ConfigError("--steps must be >= 0")
        times = np.arange(args.steps + 1, dtype=float)
    elif args.tgrid is not None:
        times = parse_grid(args.tgrid)
    elif args.t is not None:
        times = np.array([parse_real(args.t)])
    else:
        raise ConfigError("evolve needs one of --t, --tgrid, --steps")
    if np.any(times < 0):
        raise ConfigError("--t: times must be nonnegative")
    if spec.discrete and np.any(times != np.round(times)):
        raise ConfigError("--t: discrete-time models need integer times")

    if spec.model == "dt-quantum":
        table = walks.distribution_series(spec, times, threads=args.threads)
    else:
        table = np.array([walks.distribution(spec, t).p for t in times])
    rows = []
    for t, p in zip(times, table):
        _check_rows(p, f"t={t}")
        rows.extend((float(t), n, float(p[n])) for n in range(spec.N))
    return ["t", "n", "p"], rows, {"model": spec.model, "route": "spectral" if spec.model != "dt-quantum" else "simulation"}


def _route_table(args, kind: str):
    """Run the requested route(s); with ``--route all`` unavailable routes are skipped."""
    spec = _spec(args)
    build = stats.average_report if kind == "average" else stats.sigma_report
    routes = stats.ROUTES if args.route == "all" else (args.route,)
    reports = {}
    for route in routes:
        try:
            report = build(spec, route, args.horizon, args.threads)
        except ValueError as exc:
            if args.route == "all":
                continue
            raise ConfigError(str(exc)) from None
        reports[route] = report.pbar if kind == "average" else report.sigma
    return spec, reports


def _route_rows(spec, reports, value_name, args):
    provenance = {"model": spec.model, "routes": list(reports), "tolerances": {"resonance": stats.RESONANCE_TOL}}
    if "quadrature" in reports:
        provenance["horizon"] = args.horizon
        provenance["quadrature_step"] = stats.QUADRATURE_STEP if not spec.discrete else 1
    if len(reports) == 1:
        (route, values), = reports.items()
        return ["n", value_name, "route"], [(n, float(values[n]), route) for n in range(spec.N)], provenance
    names = list(reports)
    pairs = [(a, b) for i, a in enumerate(names) for b in names[i + 1 :]]
    columns = ["n", *names, *(f"gap_{a}_{b}" for a, b in pairs)]
    rows = []
    for n in range(spec.N):
        vals = [float(reports[r][n]) for r in names]
        gaps = [abs(float(reports[a][n]) - float(reports[b][n])) for a, b in pairs]
        rows.append((n, *vals, *gaps))
    return columns, rows, provenance


def cmd_average(args):
    spec, reports = _route_table(args, "average")
    for route, p in reports.items():
        _check_rows(p, f"pbar ({route})")
    return _route_rows(spec, reports, "pbar", args)


def cmd_sigma(args):
    spec, reports = _route_table(args, "sigma")
    return _route_rows(spec, reports, "sigma", args)


def cmd_mixing(args):
    if args.action == "iump":
        tmax = parse_real(args.tmax)
        eps = parse_real(args.eps)
        if tmax <= 0 or eps <= 0:
            raise ConfigError("--tmax and --eps must be positive")
        try:
            report = mixing.iump_scan(args.n, tmax, eps, threads=args.threads)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        rows = [(float(t), float(d)) for t, d in report.iump_times]
        prov = {"model": "ct-quantum", "grid_step": 0.01, "refine_width": 1e-10, "eps": eps,
                "iump_found": report.iump_found, "min_d": report.min_d}
        return ["t", "d"], rows, prov
    if args.action == "curve":
        if args.tgrid is None:
            raise ConfigError("mixing curve needs --tgrid start:stop:step")
        spec = _spec(args)
        times = parse_grid(args.tgrid)
        if spec.discrete and np.any(times != np.round(times)):
            raise ConfigError("--tgrid: discrete-time models need integer times")
        d = mixing.distance_to_uniform(spec, times, threads=args.threads)
        return ["t", "d"], [(float(t), float(v)) for t, v in zip(times, d)], {"model": spec.model}
    # limit
    t = parse_real(args.t) if args.t is not None else None
    if t is None or t <= 0:
        raise ConfigError("mixing limit needs --t > 0")
    if args.n < 3:
        raise ConfigError("--n must be >= 3")
    dN, dinf = mixing.scaling_comparison(args.n, t)
    return ["N", "t", "d_N", "d_inf", "gap"], [(args.n, t, dN, dinf, dN - dinf)], {"model": "ct-classical", "scaling": "t*N^2"}


def cmd_bessel(args):
    t = parse_real(args.t)
    if t < 0:
        raise ConfigError("--t must be nonnegative")
    if args.n < 3:
        raise ConfigError("--n must be >= 3")
    psi = walks.ct_quantum_amplitude(args.n, t).psi
    rows = []
    worst = 0.0
    for n in range(args.n):
        b = bessel.wrapped_amplitude(args.n, n, t)
        diff = abs(b - psi[n])
        worst = max(worst, diff)
        rows.append((n, psi[n].real, psi[n].imag, b.real, b.imag, diff))
    norm_defect = abs(bessel.wrapped_normalization(args.n, t) - 1.0)
    cross = bessel.cross_term_sum(args.n, t)
    prov = {"truncation_order": bessel.truncation_order(t), "normalization_defect": norm_defect,
            "cross_term_sum": cross, "max_abs_diff": worst}
    if worst > 1e-10 or norm_defect > 1e-11 or abs(cross) > 1e-9:
        raise NumericalInvariantError(f"Bessel and spectral routes disagree: {prov}")
    return ["n", "spectral_re", "spectral_im", "bessel_re", "bessel_im", "abs_diff"], rows, prov


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None


def _horizon(text: str) -> float:
    try:
        v = parse_real(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if v <= 0:
        raise argparse.ArgumentTypeError("horizon must be > 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output path (default: standard output)")
    common.add_argument("--seed", type=int, default=None, help="reserved; every computation is deterministic")
    common.add_argument("--threads", type=_int, default=1)

    walk = argparse.ArgumentParser(add_help=False)
    walk.add_argument("--model", default="ct-quantum", choices=(*walks.MODELS, "dt-coined"))
    walk.add_argument("--n", type=_int, required=True, help="cycle size N >= 3")
    walk.add_argument("--coin", default="hadamard", help="'hadamard' or a,b,c,d")
    walk.add_argument("--initial-coin", default="1,0")
    walk.add_argument("--start", type=_int, default=0, help="start vertex")

    routed = argparse.ArgumentParser(add_help=False)
    routed.add_argument("--route", choices=(*stats.ROUTES, "all"), default="closed")
    routed.add_argument("--horizon", type=_horizon, default=stats.DEFAULT_HORIZON)

    parser = argparse.ArgumentParser(prog="cyclewalk", description="Quantum and classical walks on the cycle C_N.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", parents=[common, walk], help="distribution rows (t, n, p)")
    p.add_argument("--t", default=None)
    p.add_argument("--tgrid", default=None)
    p.add_argument("--steps", type=_int, default=None)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("average", parents=[common, walk, routed], help="time-averaged distribution")
    p.set_defaults(func=cmd_average)
    p = sub.add_parser("sigma", parents=[common, walk, routed], help="temporal standard deviation")
    p.set_defaults(func=cmd_sigma)

    p = sub.add_parser("mixing", help="total variation mixing")
    msub = p.add_subparsers(dest="action", required=True)
    q = msub.add_parser("iump", parents=[common], help="search for uniform-mixing times")
    q.add_argument("--n", type=_int, required=True)
    q.add_argument("--tmax", default="10")
    q.add_argument("--eps", default="1e-8")
    q = msub.add_parser("curve", parents=[common, walk], help="d_N(t) over a grid")
    q.add_argument("--tgrid", default=None)
    q = msub.add_parser("limit", parents=[common], help="(d_N(t N^2), d_inf(t)) for the classical walk")
    q.add_argument("--n", type=_int, required=True)
    q.add_argument("--t", default=None)
    p.set_defaults(func=cmd_mixing)

    p = sub.add_parser("bessel", help="Bessel-expansion cross-checks")
    bsub = p.add_subparsers(dest="action", required=True)
    q = bsub.add_parser("check", parents=[common], help="spectral vs wrapped-Bessel amplitudes")
    q.add_argument("--n", type=_int, required=True)
    q.add_argument("--t", default="1")
    p.set_defaults(func=cmd_bessel)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        columns, rows, provenance = args.func(args)
    except ConfigError as exc:
        print(f"cyclewalk: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalInvariantError as exc:
        print(f"cyclewalk: numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    config = {k: v for k, v in vars(args).items() if k != "func"}
    if args.out:
        with open(args.out, "w", newline="") as fh:
            emit(columns, rows, config, provenance, args.format, fh)
    else:
        emit(columns, rows, config, provenance, args.format, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
