"""Command-line front end: ``longmem {estimate,simulate,mc,vartable,compare}``."""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from importlib import resources

import numpy as np
from scipy.stats import norm

from . import asymptotics
from .asymptotics import INF, V, variance_interpolator, variance_table
from .baselines import gph, logscale_regression, lwf
from .estimator import ScaleRange, confidence_interval, estimate, select_scales
from .synthesis import ProcessModel, simulate
from .wavelets import dwt, make_wavelet

SCHEMA_VERSION = 1
FIXTURE = "white_noise_n8192_seed7.csv"


class CliError(Exception):
    """User-facing error; printed without a traceback."""


# ---------------------------------------------------------------- I/O


def read_series(path: str) -> np.ndarray:
    """Single-column CSV, optional header on the first non-empty line."""
    if path == "-":
        lines = sys.stdin.read().splitlines()
    else:
        try:
            with open(path) as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc.strerror}") from exc
    values = []
    seen_first = False
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        fields = text.split(",")
        if len(fields) != 1:
            raise CliError(f"{path}:{lineno}: expected a single column, found {len(fields)}")
        try:
            value = float(fields[0])
        except ValueError:
            if not seen_first:
                seen_first = True
                continue
            raise CliError(f"{path}:{lineno}: cannot parse {fields[0]!r} as a number") from None
        if not math.isfinite(value):
            raise CliError(f"{path}:{lineno}: non-finite value {fields[0]!r}")
        seen_first = True
        values.append(value)
    if len(values) < 2:
        raise CliError(f"{path}: need at least 2 numeric rows, found {len(values)}")
    return np.array(values)


def format_series(x) -> str:
    return "".join(f"{v:.17g}\n" for v in x)


def fixture_path() -> str:
    return str(resources.files("longmem").joinpath("data", FIXTURE))


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_record(record: dict, fmt: str, output: str | None) -> None:
    if fmt == "json":
        _emit(json.dumps(record, indent=2) + "\n", output)
    else:
        keys = [k for k, v in record.items() if not isinstance(v, (list, dict))]
        row = [_csv_value(record[k]) for k in keys]
        for k, v in record.items():
            if isinstance(v, list):
                for i, item in enumerate(v):
                    keys.append(f"{k}_{i}")
                    row.append(_csv_value(item))
        _emit(",".join(keys) + "\n" + ",".join(row) + "\n", output)


def _csv_value(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return "" if v is None else str(v)


# ---------------------------------------------------------------- parsing helpers


def parse_ell(text: str):
    if text.strip().lower() in ("inf", "infinity", "∞"):
        return INF
    try:
        ell = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"ell must be a positive integer or 'inf', got {text!r}") from None
    if ell < 1:
        raise argparse.ArgumentTypeError("ell must be >= 1")
    return ell


def parse_model(text: str, d0: float, beta: float | None) -> ProcessModel:
    """``constant[:c]``, ``ar1:rho[,s2]`` or ``grid:path.csv`` (rows ``lam,f``)."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "constant":
            params = (float(arg),) if arg else ()
            default_beta = 2.0
        elif kind == "ar1":
            params = tuple(float(v) for v in arg.split(",")) if arg else ()
            default_beta = 2.0
        elif kind == "grid":
            if not arg:
                raise CliError("grid model needs a file: --model grid:path.csv")
            pts = np.loadtxt(arg, delimiter=",", ndmin=2)
            params = tuple(tuple(map(float, row)) for row in pts)
            default_beta = 1.0
        else:
            raise CliError(f"unknown model {kind!r}; use constant[:c], ar1:rho[,s2] or grid:path.csv")
        return ProcessModel(d0=d0, short_memory=kind, params=params, beta=default_beta if beta is None else beta)
    except (ValueError, OSError) as exc:
        raise CliError(f"invalid --model {text!r}: {exc}") from exc


def _scale_range(args, n: int, T: int, J: int) -> ScaleRange:
    if args.L is not None and args.U is not None and args.L >= args.U:
        raise CliError(f"--L ({args.L}) must be smaller than --U ({args.U})")
    try:
        auto = select_scales(n, T, args.beta)
    except ValueError as exc:
        if args.L is None:
            raise CliError(str(exc)) from exc
        auto = None
    L = args.L if args.L is not None else auto.L
    U = args.U if args.U is not None else J
    if U > J:
        raise CliError(f"--U {U} exceeds the largest available scale {J} for n={n}")
    if L < 1 or L >= U:
        raise CliError(f"invalid scale range L={L}, U={U} (need 1 <= L < U <= {J})")
    return ScaleRange(L, U)


def _wavelet(name: str):
    try:
        return make_wavelet(name)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _ell_json(ell):
    return "inf" if ell == INF else int(ell)


# ---------------------------------------------------------------- commands


def _lwwe(x, spec, args):
    pyr = dwt(x, spec)
    rng = _scale_range(args, x.size, spec.T, pyr.J)
    result = estimate(pyr, rng)
    ell = rng.ell if args.ell is None else args.ell
    try:
        _, result = confidence_interval(result, spec, args.level, ell=ell)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    return pyr, rng, result, ell


def cmd_estimate(args) -> int:
    spec = _wavelet(args.wavelet)
    x = read_series(args.input)
    _, rng, res, ell = _lwwe(x, spec, args)
    record = {
        "schema_version": SCHEMA_VERSION,
        "wavelet": spec.name,
        "n": int(x.size),
        "d_hat": res.d_hat,
        "sigma2_hat": res.sigma2_hat,
        "L": rng.L,
        "U": rng.U,
        "ell": _ell_json(ell),
        "mean_scale": res.mean_scale,
        "n_eff": res.n_eff,
        "asymp_var": res.asymp_var,
        "ci": list(res.ci),
        "level": res.level,
    }
    _emit_record(record, args.format, args.output)
    return 0


def cmd_simulate(args) -> int:
    model = parse_model(args.model, args.d0, args.model_beta)
    try:
        x = simulate(model, args.n, args.seed)
    except (ValueError, RuntimeError) as exc:
        raise CliError(str(exc)) from exc
    echo = json.dumps(
        {
            "schema_version": SCHEMA_VERSION,
            "d0": model.d0,
            "model": model.short_memory,
            "params": list(model.params),
            "n": args.n,
            "seed": args.seed,
        }
    )
    if args.output:
        _emit(format_series(x), args.output)
        print(echo)
    else:
        sys.stdout.write(format_series(x))
        print(echo, file=sys.stderr)
    return 0


def _threads() -> int:
    raw = os.environ.get("LONGMEM_THREADS")
    if raw is None:
        return min(8, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        raise CliError(f"LONGMEM_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise CliError("LONGMEM_THREADS must be >= 1")
    return value


def cmd_mc(args) -> int:
    spec = _wavelet(args.wavelet)
    model = parse_model(args.model, args.d0, args.model_beta)
    if args.reps < 2:
        raise CliError("--reps must be at least 2")
    J = dwt(np.zeros(args.n), spec).J
    rng = _scale_range(args, args.n, spec.T, J)
    ell = rng.ell if args.ell is None else args.ell
    start = time.perf_counter()

    def one(r: int) -> float:
        x = simulate(model, args.n, args.seed + r)
        return estimate(dwt(x, spec), rng).d_hat

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        d_hats = np.array(list(pool.map(one, range(args.reps))))
    scale = math.sqrt(args.n * 2.0**-rng.L)
    try:
        theoretical = V(model.d0, ell, spec)
        var_at = variance_interpolator(spec, ell, d_hats)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    z = float(norm.ppf(0.5 + args.level / 2.0))
    half = np.array([z * math.sqrt(var_at(d)) / scale for d in d_hats])
    coverage = float(np.mean(np.abs(d_hats - model.d0) <= half))
    record = {
        "schema_version": SCHEMA_VERSION,
        "wavelet": spec.name,
        "d0": model.d0,
        "model": model.short_memory,
        "n": args.n,
        "L": rng.L,
        "U": rng.U,
        "ell": _ell_json(ell),
        "reps": args.reps,
        "seed": args.seed,
        "mean_d_hat": float(d_hats.mean()),
        "bias": float(d_hats.mean() - model.d0),
        "empirical_var_scaled": float(np.var(scale * (d_hats - model.d0), ddof=1)),
        "theoretical_var": theoretical,
        "coverage": coverage,
        "level": args.level,
        "runtime_s": time.perf_counter() - start,
    }
    _emit_record(record, args.format, args.output)
    return 0


def cmd_vartable(args) -> int:
    spec = asymptotics.ShannonReference() if args.wavelet == "shannon" else _wavelet(args.wavelet)
    if args.d_step <= 0 or args.d_max < args.d_min:
        raise CliError("need --d-step > 0 and --d-max >= --d-min")
    grid = np.round(np.arange(args.d_min, args.d_max + args.d_step / 2, args.d_step), 10)
    ells = args.ells or [INF]
    try:
        table = variance_table(spec, grid, ells, with_shannon=args.shannon)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    _emit(table.to_csv(), args.output)
    return 0


def cmd_compare(args) -> int:
    spec = _wavelet(args.wavelet)
    x = read_series(args.input)
    pyr, rng, res, _ = _lwwe(x, spec, args)
    rows = [
        ("lwwe", res.d_hat, math.sqrt(res.asymp_var / (x.size * 2.0**-rng.L)), res.n_eff),
    ]
    try:
        for b in (gph(x, args.m), lwf(x, args.m), logscale_regression(pyr, rng)):
            rows.append((b.method, b.d_hat, b.std_error, b.m))
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    if args.format == "json":
        record = {
            "schema_version": SCHEMA_VERSION,
            "n": int(x.size),
            "L": rng.L,
            "U": rng.U,
            "methods": [{"method": m, "d_hat": d, "std_error": se, "bandwidth": int(bw)} for m, d, se, bw in rows],
        }
        _emit(json.dumps(record, indent=2) + "\n", args.output)
    else:
        buf = io.StringIO()
        buf.write("method,d_hat,std_error,bandwidth\n")
        for m, d, se, bw in rows:
            buf.write(f"{m},{d:.17g},{se:.17g},{int(bw)}\n")
        _emit(buf.getvalue(), args.output)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="longmem", description="Local Whittle wavelet estimation of long memory.")
    sub = parser.add_subparsers(dest="command", required=True)

    def scales(p):
        p.add_argument("--wavelet", default="db2", help="haar or db1..db10 (default db2)")
        p.add_argument("--L", type=int, help="lowest scale (default from --beta)")
        p.add_argument("--U", type=int, help="highest scale (default: largest available)")
        p.add_argument("--beta", type=float, default=1.0, help="smoothness used to pick L (default 1)")
        p.add_argument("--level", type=float, default=0.95, help="confidence level (default 0.95)")
        p.add_argument("--ell", type=parse_ell, help="variance range U-L for the CI, or 'inf'")

    def output(p, formats=("json", "csv"), default="json"):
        p.add_argument("--output", help="output path (default stdout)")
        p.add_argument("--format", choices=formats, default=default)

    def model(p):
        p.add_argument("--d0", type=float, default=0.0, help="memory parameter")
        p.add_argument("--model", default="constant", help="constant[:c] | ar1:rho[,s2] | grid:path.csv")
        p.add_argument("--model-beta", type=float, help="declared smoothness of f* (default by model)")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("estimate", help="estimate d from a single-column CSV series")
    p.add_argument("--input", required=True, help="CSV path, '-' for stdin, or 'fixture' for the bundled white noise")
    scales(p)
    output(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="write an exact Gaussian sample path as CSV")
    p.add_argument("--n", type=int, required=True)
    model(p)
    p.add_argument("--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mc", help="Monte Carlo study of the estimator")
    p.add_argument("--n", type=int, default=2**13)
    p.add_argument("--reps", type=int, default=500)
    model(p)
    scales(p)
    output(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("vartable", help="CSV table of the asymptotic variance")
    p.add_argument("--wavelet", default="db2", help="haar, db1..db10 or shannon")
    p.add_argument("--d-min", type=float, default=-0.5)
    p.add_argument("--d-max", type=float, default=1.5)
    p.add_argument("--d-step", type=float, default=0.25)
    p.add_argument("--ell", dest="ells", type=parse_ell, action="append", help="repeatable; default inf")
    p.add_argument("--no-shannon", dest="shannon", action="store_false", help="omit Shannon reference rows")
    p.add_argument("--output", help="output path (default stdout)")
    p.set_defaults(func=cmd_vartable)

    p = sub.add_parser("compare", help="LWWE against GPH, LWF and log-scale regression")
    p.add_argument("--input", required=True)
    p.add_argument("--m", type=int, help="Fourier bandwidth (default floor(n^0.65))")
    scales(p)
    output(p, default="csv")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "input", None) == "fixture":
        args.input = fixture_path()
    if hasattr(args, "level") and not 0 < args.level < 1:
        parser.error("--level must lie in (0, 1)")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"longmem: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as exc:
        print(f"longmem: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
