"""Command-line interface: ``stablelat {sample,path,frac,validate}``.

Every output file starts with a '#'-prefixed JSON manifest echoing the fully
resolved configuration; identical configurations give identical bytes.
Options may also come from ``--config file.json`` (keys are option names with
dashes replaced by underscores); explicit flags win.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 1 when
``--strict`` is given and a validation verdict fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, io
from ._rng import SeedSpec, configure_threads
from .errors import ConfigError, NumericalError
from .function_model import load_spec

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULTS = {
    "sample": {"alpha": None, "f": None, "h": 0.1, "n": 1000, "noise": "exact",
               "scheme": "cell-average", "seed": 0, "trunc_tol": 1e-6, "max_cells": None,
               "format": "csv"},
    "path": {"alpha": None, "H": None, "a": 1.0, "b": 0.0, "h": 2.0 ** -5, "times": None,
             "n": 1000, "noise": "exact", "scheme": "cell-average", "seed": 0,
             "trunc_tol": 1e-4, "format": "csv"},
    "frac": {"op": None, "beta": None, "delta": None, "side": "+", "a": 0.0, "b": 1.0,
             "f": None, "grid": "-2:2:41", "format": "csv"},
    "validate": {"suite": None, "seed": 0, "n": None, "alpha": None, "H": None, "a": 1.0,
                 "b": 0.0, "h": None, "h_list": None, "noise": None, "f": None,
                 "family": "indicator-power", "js": "10,100,1000", "bound": None,
                 "format": "json"},
}


def _floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _spec_alphas(d: dict) -> set[float]:
    found = {float(d["alpha"])} if "alpha" in d else set()
    for key in ("spec",):
        if key in d:
            found |= _spec_alphas(d[key])
    for term in d.get("terms", []):
        found |= _spec_alphas(term["spec"])
    return found


def _resolve(cmd: str, args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[cmd])
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if cfg.get("format") not in ("csv", "json"):
        raise ConfigError("--format must be csv or json")
    return cfg


def _require(cfg: dict, *keys):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise ConfigError("missing required option(s): " + ", ".join("--" + k for k in missing))


def _write(path, fmt: str, manifest: dict, names: list[str], columns: list) -> None:
    if path is None:
        raise ConfigError("--out is required")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        io.write_json(path, {"manifest": manifest,
                             "columns": {n: np.asarray(c).tolist() for n, c in zip(names, columns)}})
    else:
        io.write_table(path, manifest, names, columns)
    io.write_json(str(path) + ".manifest.json", manifest)


def _manifest(cmd: str, cfg: dict, **extra) -> dict:
    return {"kind": cmd, "version": __version__, "config": cfg, **extra}


# --------------------------------------------------------------------------
# commands


def cmd_sample(cfg: dict, out) -> dict:
    from .lattice import discretize, discretize_exact
    from .measure_sim import sample_integral
    from .stable_core import noise_from_name

    _require(cfg, "alpha", "f")
    alpha = float(cfg["alpha"])
    spec = load_spec(cfg["f"])
    wrong = {a for a in _spec_alphas(spec.to_dict()) if a != alpha}
    if wrong:
        raise ConfigError(f"--alpha {alpha} does not match spec alpha {sorted(wrong)}")
    if int(cfg["n"]) < 0:
        raise ConfigError("--n must be non-negative")
    disc = {"cell-average": discretize, "exact": discretize_exact}.get(cfg["scheme"])
    if disc is None:
        raise ConfigError(f"unknown scheme {cfg['scheme']!r}")
    coeffs = disc(spec, float(cfg["h"]), alpha, float(cfg["trunc_tol"]),
                  max_cells=None if cfg["max_cells"] is None else int(cfg["max_cells"]))
    noise = noise_from_name(cfg["noise"], alpha)
    batch = sample_integral(coeffs, noise, int(cfg["n"]), SeedSpec(int(cfg["seed"])))
    manifest = _manifest("sample_batch", cfg, meta=batch.meta, spec=spec.to_dict(),
                         cells=len(coeffs), tail_mass_bound=coeffs.tail_mass_bound)
    _write(out, cfg["format"], manifest, ["x0"], [batch.column()])
    return manifest


def cmd_path(cfg: dict, out) -> dict:
    from .lfsm import LfsmParams, lfsm_scale, sample_lfsm_path
    from .stable_core import noise_from_name

    _require(cfg, "alpha", "H", "times")
    params = LfsmParams(float(cfg["alpha"]), float(cfg["H"]), float(cfg["a"]), float(cfg["b"]))
    times = _floats(cfg["times"])
    noise = noise_from_name(cfg["noise"], params.alpha)
    batch = sample_lfsm_path(params, times, float(cfg["h"]), noise, int(cfg["n"]),
                             SeedSpec(int(cfg["seed"])), float(cfg["trunc_tol"]), cfg["scheme"])
    summary = {"scales": [lfsm_scale(params, t) if t > 0 else 0.0 for t in times]}
    if params.alpha == 2.0 and batch.n > 1:
        # Gaussian convention: Var X_t = 2 * scale^2
        summary["sample_variance"] = [float(v) for v in np.var(batch.values, axis=0, ddof=1)]
        summary["target_variance"] = [2.0 * s * s for s in summary["scales"]]
    manifest = _manifest("lfsm_path", cfg, meta=batch.meta, summary=summary)
    names = [f"t={t!r}" for t in times]
    _write(out, cfg["format"], manifest, names, [batch.column(j) for j in range(len(times))])
    return manifest


def _grid(text: str):
    from .frac_calc import GridFunction

    try:
        start, stop, num = str(text).split(":")
        return GridFunction.template(float(start), float(stop), int(num))
    except ValueError as exc:
        raise ConfigError(f"--grid must be start:stop:num, got {text!r}") from exc


def cmd_frac(cfg: dict, out) -> dict:
    from . import frac_calc

    _require(cfg, "op", "f")
    spec = load_spec(cfg["f"])
    grid = _grid(cfg["grid"])
    op, side = cfg["op"], cfg["side"]
    xs = grid.x
    if op == "integral":
        _require(cfg, "delta")
        vals = [frac_calc.rl_integral(spec, float(cfg["delta"]), side, x) for x in xs]
    elif op == "derivative":
        _require(cfg, "beta")
        vals = [frac_calc.rl_derivative(spec, float(cfg["beta"]), side, x) for x in xs]
    elif op == "marchaud":
        _require(cfg, "beta")
        if side != "+":
            raise ConfigError("the Marchaud derivative is implemented for side '+'")
        vals = [frac_calc.marchaud_derivative(spec, float(cfg["beta"]), x) for x in xs]
    elif op == "convolve":
        _require(cfg, "beta")
        kernel = frac_calc.FracKernel(float(cfg["beta"]), float(cfg["a"]), float(cfg["b"]))
        vals = frac_calc.convolve_kernel(spec, kernel, grid).values
    else:
        raise ConfigError(f"unknown op {op!r}")
    manifest = _manifest("grid_function", cfg, spec=spec.to_dict(), origin=grid.origin,
                         spacing=grid.spacing)
    _write(out, cfg["format"], manifest, ["x", "value"], [xs, np.asarray(vals, dtype=float)])
    return manifest


def cmd_validate(cfg: dict, out) -> dict:
    from . import suites

    _require(cfg, "suite")
    runner = suites.SUITES.get(cfg["suite"])
    if runner is None:
        raise ConfigError(f"unknown suite {cfg['suite']!r}; choose from {sorted(suites.SUITES)}")
    report = runner(cfg)
    manifest = _manifest("validation_report", cfg, suite=cfg["suite"], passed=report["passed"])
    if out is None:
        raise ConfigError("--out is required")
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    if cfg["format"] == "json":
        io.write_json(out, {"manifest": manifest, "report": report})
    else:
        io.write_records(out, {**manifest, "report": report}, report["table"])
    io.write_json(str(out) + ".manifest.json", manifest)
    return manifest


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stablelat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"stablelat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        p.add_argument("--config", help="JSON file with option values")
        p.add_argument("--out", help="output file")
        p.add_argument("--seed", type=int, help="master seed")
        if fmt:
            p.add_argument("--format", choices=["csv", "json"])

    p = sub.add_parser("sample", help="sample a discretized stable integral")
    common(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--f", help="function spec: JSON file or inline JSON")
    p.add_argument("--h", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--noise", choices=["exact", "pareto"])
    p.add_argument("--scheme", choices=["cell-average", "exact"])
    p.add_argument("--trunc-tol", dest="trunc_tol", type=float)
    p.add_argument("--max-cells", dest="max_cells", type=int)

    p = sub.add_parser("path", help="sample LFSM paths")
    common(p)
    p.add_argument("--alpha", type=float)
    p.add_argument("--H", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--times", help="comma-separated increasing times")
    p.add_argument("--n", type=int)
    p.add_argument("--noise", choices=["exact", "pareto"])
    p.add_argument("--scheme", choices=["cell-average", "exact"])
    p.add_argument("--trunc-tol", dest="trunc_tol", type=float)

    p = sub.add_parser("frac", help="fractional integrals, derivatives and convolutions")
    common(p)
    p.add_argument("--op", choices=["integral", "derivative", "marchaud", "convolve"])
    p.add_argument("--beta", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--side", choices=["+", "-"])
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--f")
    p.add_argument("--grid", help="start:stop:num")

    p = sub.add_parser("validate", help="run a validation suite")
    common(p)
    p.add_argument("--suite")
    p.add_argument("--n", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--H", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--h-list", dest="h_list", help="comma-separated decreasing spacings")
    p.add_argument("--noise", choices=["exact", "pareto"])
    p.add_argument("--f")
    p.add_argument("--family", choices=["indicator-power", "constant", "gauss-lattice"])
    p.add_argument("--js", help="comma-separated sequence indices")
    p.add_argument("--bound", type=float, help="suite tolerance override")
    p.add_argument("--strict", action="store_true", help="exit 1 if the verdict fails")
    return parser


COMMANDS = {"sample": cmd_sample, "path": cmd_path, "frac": cmd_frac, "validate": cmd_validate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_threads()
    try:
        cfg = _resolve(args.command, args)
        manifest = COMMANDS[args.command](cfg, args.out)
    except ConfigError as exc:
        print(f"stablelat: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"stablelat: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.command == "validate":
        verdict = "PASS" if manifest["passed"] else "FAIL"
        print(f"{cfg['suite']}: {verdict}")
        if getattr(args, "strict", False) and not manifest["passed"]:
            return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
