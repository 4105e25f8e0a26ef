"""Command-line interface: ``cuboid-spectra <command> [flags]``."""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .asymptotics import (
    REMAINDER_MODES,
    block_max_fit,
    default_t_grid,
    fit_convergence_rate,
    fit_remainder_exponent,
    read_sweep_csv,
)
from .bounds import BOUND_IDS, GridSpec, verify_bound
from .core import (
    DEFAULT_THETA,
    BoundaryCondition,
    Cuboid,
    CuboidSpectraError,
    InvalidInputError,
    ResourceError,
    NumericError,
    make_unit_cuboid,
)
from .lattice import set_workers, symmetric_decomposition_check
from .optimize import TARGETS, OptimizeOptions, csv_columns, csv_row, fmt, optimize_target, sweep
from .spectrum import RieszSpec, counting_function, eigenvalue, eigenvalue_average, eigenvalue_sum, riesz_mean

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID, EXIT_RESOURCE = 0, 1, 2, 3
COMMANDS = ("eig", "count", "riesz", "sum", "optimize", "sweep", "verify", "fit", "decompose")
# keys that never change the produced numbers and so stay out of the config hash
UNHASHED = {"workers", "out", "config", "command"}
DEFAULTS: dict[str, Any] = {
    "bc": "dirichlet",
    "seed": 0xC0FFEE,
    "workers": None,
    "out": None,
    "format": "csv",
    "normalize": False,
    "starts": 8,
    "budget": 2000,
    "k_step": 1,
    "slack": 1e-9,
    "inflate": 1.0,
    "window": "upper-half",
    "per_block": 256,
    "t_min": 8.0,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidInputError(message)


def _shared(p: argparse.ArgumentParser, *names: str) -> None:
    S = argparse.SUPPRESS
    spec = {
        "dim": dict(type=int, help="dimension n"),
        "sides": dict(help="comma-separated side lengths"),
        "bc": dict(help="dirichlet or neumann"),
        "k": dict(help="index, list (1,2,5) or range (1:10)"),
        "lambda": dict(dest="lam", type=float, help="threshold in absolute units"),
        "gamma": dict(type=float, help="Riesz order"),
        "b": dict(type=float, help="boundary-term factor"),
    }
    for name in names:
        p.add_argument(f"--{name}", default=S, **spec[name])
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--workers", default=S, help="thread count or 'auto'")
    p.add_argument("--out", default=S, help="output path (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "json"), default=S)
    p.add_argument("--config", default=S, help="JSON file with flag values; flags win")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = _Parser(prog="cuboid-spectra", description="Laplacian spectra of cuboids and their extremal shapes.")
    parser.add_argument("--version", action="version", version=f"cuboid-spectra {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("eig", help="k-th eigenvalue")
    _shared(p, "dim", "sides", "bc", "k")
    p.add_argument("--normalize", action="store_true", default=S, help="rescale sides to unit measure")

    p = sub.add_parser("count", help="counting function N(lambda)")
    _shared(p, "dim", "sides", "bc", "lambda")
    p.add_argument("--normalize", action="store_true", default=S)

    p = sub.add_parser("riesz", help="Riesz mean of order gamma")
    _shared(p, "dim", "sides", "bc", "lambda", "gamma")
    p.add_argument("--normalize", action="store_true", default=S)

    p = sub.add_parser("sum", help="sum and average of the first k eigenvalues")
    _shared(p, "dim", "sides", "bc", "k")
    p.add_argument("--normalize", action="store_true", default=S)

    for name in ("optimize", "sweep"):
        p = sub.add_parser(name, help="extremal cuboid search" if name == "optimize" else "optimise over a k grid")
        _shared(p, "dim", "bc", "k", "lambda", "gamma")
        p.add_argument("--target", choices=TARGETS, default=S)
        p.add_argument("--starts", type=int, default=S)
        p.add_argument("--budget", type=int, default=S)
        p.add_argument("--ratio", type=float, default=S, help="n=3 only: impose a_2 = ratio * a_1")
        if name == "sweep":
            p.add_argument("--k-min", dest="k_min", type=int, default=S)
            p.add_argument("--k-max", dest="k_max", type=int, default=S)
            p.add_argument("--k-step", dest="k_step", type=int, default=S)

    p = sub.add_parser("verify", help="run an inequality suite")
    _shared(p, "b")
    p.add_argument("--suite", choices=BOUND_IDS, default=S)
    p.add_argument("--grid-size", dest="grid_size", type=int, default=S, help="number of cuboids per dimension")
    p.add_argument("--dims", default=S, help="comma-separated dimensions")
    p.add_argument("--k-max", dest="k_max", type=int, default=S)
    p.add_argument("--max-threshold", dest="max_threshold", type=float, default=S)
    p.add_argument("--slack", type=float, default=S)
    p.add_argument("--inflate", type=float, default=S, help="multiply the tested constant (negative controls)")

    p = sub.add_parser("fit", help="power-law fit of a sweep or remainder series")
    _shared(p, "dim", "sides")
    p.add_argument("--input", default=S, help="sweep CSV (or t,remainder CSV)")
    p.add_argument("--series", choices=("delta", "stability", "remainder"), default=S)
    p.add_argument("--window", choices=("upper-half", "all"), default=S)
    p.add_argument("--mode", choices=REMAINDER_MODES, default=S)
    p.add_argument("--t-min", dest="t_min", type=float, default=S)
    p.add_argument("--t-max", dest="t_max", type=float, default=S)
    p.add_argument("--per-block", dest="per_block", type=int, default=S)

    p = sub.add_parser("decompose", help="check the full-lattice inclusion-exclusion identity")
    _shared(p, "dim", "sides")
    p.add_argument("--t", type=float, default=S, help="reduced radius")
    return parser


# ---------------------------------------------------------------------------
# configuration


def resolve_config(argv: Sequence[str]) -> dict:
    ns = vars(build_parser().parse_args(list(argv)))
    if not ns.get("command"):
        raise InvalidInputError(f"a command is required: {', '.join(COMMANDS)}")
    cfg = dict(DEFAULTS)
    if "config" in ns:
        try:
            with open(ns["config"]) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInputError(f"cannot read config {ns['config']}: {exc}") from None
        if not isinstance(file_cfg, dict):
            raise InvalidInputError("config file must hold a JSON object")
        for key, val in file_cfg.items():
            key = key.replace("-", "_")
            cfg["lam" if key == "lambda" else key] = val
    cfg.update(ns)
    if cfg["workers"] is None:
        cfg["workers"] = os.environ.get("CUBOID_SPECTRA_WORKERS") or "auto"
    return cfg


def config_hash(cfg: dict) -> str:
    keep = {k: v for k, v in sorted(cfg.items()) if k not in UNHASHED}
    keep["command"] = cfg["command"]
    blob = json.dumps(keep, sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def header_fields(cfg: dict) -> dict:
    return {"tool": "cuboid-spectra", "version": __version__, "config_hash": config_hash(cfg), "seed": int(cfg["seed"])}


def header_line(cfg: dict) -> str:
    h = header_fields(cfg)
    return f"# cuboid-spectra {h['version']} config_hash={h['config_hash']} seed={h['seed']}"


def _require(cfg: dict, *keys: str) -> None:
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        flags = ", ".join("--" + ("lambda" if k == "lam" else k.replace("_", "-")) for k in missing)
        raise InvalidInputError(f"{cfg['command']} needs {flags}")


def parse_ks(raw) -> list[int]:
    if isinstance(raw, int):
        return [raw]
    if isinstance(raw, (list, tuple)):
        return [int(x) for x in raw]
    text = str(raw).strip()
    try:
        if ":" in text:
            parts = [int(x) for x in text.split(":")]
            lo, hi = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            if step < 1:
                raise ValueError
            return list(range(lo, hi + 1, step))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidInputError(f"cannot parse k specification {raw!r}") from None


def parse_sides(cfg: dict) -> Cuboid:
    _require(cfg, "sides")
    raw = cfg["sides"]
    try:
        sides = [float(x) for x in (raw if isinstance(raw, (list, tuple)) else str(raw).split(","))]
    except ValueError:
        raise InvalidInputError(f"cannot parse sides {raw!r}") from None
    if cfg.get("dim") is not None and int(cfg["dim"]) != len(sides):
        raise InvalidInputError(f"--dim {cfg['dim']} does not match {len(sides)} sides")
    return make_unit_cuboid(sides) if cfg.get("normalize") else Cuboid(tuple(sides))


# ---------------------------------------------------------------------------
# output


def _emit(cfg: dict, columns: list[str], rows: list[list[str]], payload: Any) -> None:
    if cfg["format"] == "json":
        text = json.dumps({"_header": header_fields(cfg), "result": payload}, sort_keys=True, default=_json_default) + "\n"
    else:
        lines = [header_line(cfg), ",".join(columns)] + [",".join(r) for r in rows]
        text = "\n".join(lines) + "\n"
    if cfg.get("out"):
        with open(cfg["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, BoundaryCondition):
        return obj.value
    raise TypeError(f"not serialisable: {type(obj).__name__}")


def _round(x: float) -> float:
    return float(fmt(x))


# ---------------------------------------------------------------------------
# commands


def cmd_eig(cfg: dict) -> int:
    _require(cfg, "k")
    R, bc = parse_sides(cfg), BoundaryCondition.parse(cfg["bc"])
    ks = parse_ks(cfg["k"])
    vals = [eigenvalue(R, bc, k) for k in ks]
    rows = [[str(k), fmt(v)] for k, v in zip(ks, vals)]
    payload = {"sides": list(R.sides), "bc": bc.value, "eigenvalues": [{"k": k, "value": _round(v)} for k, v in zip(ks, vals)]}
    _emit(cfg, ["k", "eigenvalue"], rows, payload)
    return EXIT_OK


def cmd_count(cfg: dict) -> int:
    _require(cfg, "lam")
    R, bc = parse_sides(cfg), BoundaryCondition.parse(cfg["bc"])
    lam = float(cfg["lam"])
    if not lam >= 0:
        raise InvalidInputError("--lambda must be non-negative")
    n = counting_function(R, bc, lam)
    _emit(cfg, ["lambda", "count"], [[fmt(lam), str(n)]], {"sides": list(R.sides), "bc": bc.value, "lambda": lam, "count": n})
    return EXIT_OK


def cmd_riesz(cfg: dict) -> int:
    _require(cfg, "lam", "gamma")
    R, bc = parse_sides(cfg), BoundaryCondition.parse(cfg["bc"])
    val = riesz_mean(R, RieszSpec(float(cfg["gamma"]), float(cfg["lam"]), bc))
    row = [fmt(cfg["gamma"]), fmt(cfg["lam"]), fmt(val)]
    _emit(cfg, ["gamma", "lambda", "riesz"], [row], {"sides": list(R.sides), "bc": bc.value, "gamma": cfg["gamma"], "lambda": cfg["lam"], "riesz": _round(val)})
    return EXIT_OK


def cmd_sum(cfg: dict) -> int:
    _require(cfg, "k")
    R, bc = parse_sides(cfg), BoundaryCondition.parse(cfg["bc"])
    rows, items = [], []
    for k in parse_ks(cfg["k"]):
        s, a = eigenvalue_sum(R, bc, k), eigenvalue_average(R, bc, k)
        rows.append([str(k), fmt(s), fmt(a)])
        items.append({"k": k, "sum": _round(s), "average": _round(a)})
    _emit(cfg, ["k", "sum", "average"], rows, {"sides": list(R.sides), "bc": bc.value, "values": items})
    return EXIT_OK


def _options(cfg: dict) -> OptimizeOptions:
    ratio = cfg.get("ratio")
    return OptimizeOptions(starts=int(cfg["starts"]), budget=int(cfg["budget"]), seed=int(cfg["seed"]),
                           ratio=None if ratio is None else float(ratio))


def _default_target(cfg: dict) -> str:
    if cfg.get("target"):
        return cfg["target"]
    return "lambda_k" if BoundaryCondition.parse(cfg["bc"]).value == "dirichlet" else "mu_k"


def cmd_optimize(cfg: dict) -> int:
    _require(cfg, "dim")
    target, n, bc = _default_target(cfg), int(cfg["dim"]), BoundaryCondition.parse(cfg["bc"])
    opts = _options(cfg)
    if target == "riesz":
        _require(cfg, "gamma", "lam")
        res = optimize_target(target, n, bc, gamma=float(cfg["gamma"]), threshold=float(cfg["lam"]), opts=opts)
        cols = ["gamma", "lambda", "n", "bc", "target"] + [f"a_{i}" for i in range(1, n + 1)] + ["value", "value_at_cube", "evaluations", "multistart_spread"]
        row = [fmt(res.gamma), fmt(res.threshold), str(n), bc.value, target] + [fmt(a) for a in res.optimal_cuboid.sides]
        row += [fmt(res.optimal_value), fmt(res.value_at_cube), str(res.evaluations), fmt(res.multistart_spread)]
        rows = [row]
    else:
        _require(cfg, "k")
        results = [optimize_target(target, n, bc, k=k, opts=opts) for k in parse_ks(cfg["k"])]
        cols, rows = csv_columns(n), [csv_row(r) for r in results]
        res = results if len(results) > 1 else results[0]
    payload = [r.as_dict() for r in res] if isinstance(res, list) else res.as_dict()
    _emit(cfg, cols, rows, payload)
    return EXIT_OK


def cmd_sweep(cfg: dict) -> int:
    _require(cfg, "dim")
    target, n, bc = _default_target(cfg), int(cfg["dim"]), BoundaryCondition.parse(cfg["bc"])
    if target == "riesz":
        raise InvalidInputError("sweeps run over k; riesz targets are single optimisations")
    if cfg.get("k") is not None:
        ks = parse_ks(cfg["k"])
    else:
        _require(cfg, "k_min", "k_max")
        if int(cfg["k_step"]) < 1:
            raise InvalidInputError("--k-step must be >= 1")
        ks = list(range(int(cfg["k_min"]), int(cfg["k_max"]) + 1, int(cfg["k_step"])))
    if cfg["format"] != "csv":
        raise InvalidInputError("sweeps stream CSV; use fit or a CSV reader for JSON")
    head = header_line(cfg)
    if cfg.get("out"):
        sweep(target, n, bc, ks, _options(cfg), out=cfg["out"], header=head, config_hash=config_hash(cfg))
    else:
        w = sys.stdout
        w.write(head + "\n" + ",".join(csv_columns(n)) + "\n")
        sweep(target, n, bc, ks, _options(cfg), on_result=lambda r: (w.write(",".join(csv_row(r)) + "\n"), w.flush()))
    return EXIT_OK


def cmd_verify(cfg: dict) -> int:
    _require(cfg, "suite")
    grid = GridSpec(seed=int(cfg["seed"]), inflate=float(cfg["inflate"]))
    if cfg.get("grid_size") is not None:
        grid.n_cuboids = int(cfg["grid_size"])
    if cfg.get("dims") is not None:
        raw = cfg["dims"]
        grid.dims = tuple(int(x) for x in (raw if isinstance(raw, (list, tuple)) else str(raw).split(",")))
    if cfg.get("k_max") is not None:
        grid.k_max = int(cfg["k_max"])
    if cfg.get("max_threshold") is not None:
        grid.max_threshold = float(cfg["max_threshold"])
    if cfg.get("b") is not None:
        grid.b_fractions = (float(cfg["b"]),)
    report = verify_bound(cfg["suite"], grid, slack=float(cfg["slack"]))
    d = report.to_dict()
    if cfg["format"] == "json":
        _emit(cfg, [], [], d)
    else:
        cols = ["bound_id", "verified", "violation_count", "checked", "max_slack_used", "warnings"]
        row = [report.bound_id, str(report.verified).lower(), str(report.violation_count), str(report.checked),
               fmt(report.max_slack_used), str(report.warnings)]
        _emit(cfg, cols, [row], d)
    return EXIT_OK if report.verified else EXIT_VIOLATION


def cmd_fit(cfg: dict) -> int:
    _require(cfg, "series")
    series = cfg["series"]
    if series == "remainder":
        if cfg.get("input"):
            data = read_sweep_csv(cfg["input"])
            xname = "t" if "t" in data else "lambda"
            if xname not in data or "remainder" not in data:
                raise InvalidInputError("remainder CSV needs columns t (or lambda) and remainder")
            n = int(cfg.get("dim") or 2)
            ref = DEFAULT_THETA[n] if xname == "t" else 0.5 * DEFAULT_THETA[n]
            report = block_max_fit(data[xname], data["remainder"], ref, "remainder:input")
        else:
            _require(cfg, "mode", "t_max")
            R = parse_sides(cfg)
            grid = default_t_grid(float(cfg["t_min"]), float(cfg["t_max"]), int(cfg["per_block"]))
            report = fit_remainder_exponent(R, cfg["mode"], grid)
    else:
        _require(cfg, "input")
        data = read_sweep_csv(cfg["input"])
        for col in ("k", "n", "delta", "value", "value_at_cube"):
            if col not in data:
                raise InvalidInputError(f"{cfg['input']} lacks column {col!r}")
        n = int(data["n"][0])
        ys = data["delta"] if series == "delta" else np.abs(data["value_at_cube"] - data["value"])
        report = fit_convergence_rate(zip(data["k"], ys), series, n, window=cfg["window"])
    d = report.to_dict()
    cols = ["series_id", "sample_count", "fitted_exponent", "fitted_constant", "r_squared", "reference_exponent", "dropped_zeros"]
    row = [report.series_id, str(report.sample_count)] + [
        "nan" if not math.isfinite(x) else fmt(x)
        for x in (report.fitted_exponent, report.fitted_constant, report.r_squared, report.reference_exponent)
    ] + [str(report.dropped_zeros)]
    _emit(cfg, cols, [row], d)
    return EXIT_OK


def cmd_decompose(cfg: dict) -> int:
    _require(cfg, "t")
    R = parse_sides(cfg)
    chk = symmetric_decomposition_check(R, float(cfg["t"]))
    d = {"sides": list(R.sides), "t": cfg["t"], "full": chk.full, "reconstructed": chk.reconstructed,
         "positive": chk.positive, "facet_counts": {str(k): v for k, v in chk.facet_counts.items()}, "ok": chk.ok}
    _emit(cfg, ["t", "full", "reconstructed", "positive", "ok"],
          [[fmt(cfg["t"]), str(chk.full), str(chk.reconstructed), str(chk.positive), str(chk.ok).lower()]], d)
    return EXIT_OK if chk.ok else EXIT_VIOLATION


HANDLERS = {
    "eig": cmd_eig,
    "count": cmd_count,
    "riesz": cmd_riesz,
    "sum": cmd_sum,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "fit": cmd_fit,
    "decompose": cmd_decompose,
}


def _diagnose(kind: str, exc: BaseException) -> None:
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}) + "\n")


def run(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = resolve_config(argv)
        set_workers(cfg["workers"])
        return HANDLERS[cfg["command"]](cfg)
    except (InvalidInputError, ValueError, TypeError) as exc:
        _diagnose("invalid-input", exc)
        return EXIT_INVALID
    except (ResourceError, NumericError, MemoryError, OSError) as exc:
        _diagnose("resource", exc)
        return EXIT_RESOURCE
    except CuboidSpectraError as exc:
        _diagnose("error", exc)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())
