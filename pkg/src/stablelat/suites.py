"""Validation suites shared by the CLI and the acceptance tests.

Each suite takes a resolved option dict and returns a JSON-compatible report
with a ``passed`` verdict, the numeric evidence, and a flat ``table``.
Nothing time-dependent goes into a report, so reruns are byte-identical.
"""

from __future__ import annotations

import numpy as np

from . import frac_calc
from ._rng import SeedSpec
from .errors import ConfigError
from .function_model import FractionalIntegral, FunctionSpec, GaussBump, load_spec, lp_norm
from .lattice import discretize
from .lfsm import LfsmParams, sample_lfsm_path
from .stable_core import noise_from_name
from .stats_validate import (KS_LEVEL, convergence_study, exactness_check, ks_two_sample,
                             lf_conditions, quantile_ratio_errors)

QUANTILE_PROBS = np.linspace(0.1, 0.9, 9)


def _get(cfg: dict, key: str, default):
    val = cfg.get(key)
    return default if val is None else val


def _floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _spec(cfg: dict) -> FunctionSpec:
    return load_spec(cfg["f"]) if cfg.get("f") is not None else GaussBump((0.0,), 1.0)


# --------------------------------------------------------------------------
# reusable checks


def lfsm_law_checks(params: LfsmParams, h: float, n: int, seed: SeedSpec,
                    times=(1.0, 2.0), noise=None) -> dict:
    """Self-similarity and stationary increments from two independent batches.

    Batch A gives X_1 and X_2 for the quantile comparison X_2 ~ 2^H X_1;
    batch B, on an independent stream, gives X_2 - X_1 for the KS comparison
    with X_1 from batch A (increments and X_1 of one path are dependent).
    """
    t1, t2 = times
    a = sample_lfsm_path(params, [t1, t2], h, noise, n, SeedSpec(seed.master_seed, 2 * seed.stream_id))
    b = sample_lfsm_path(params, [t1, t2], h, noise, n,
                         SeedSpec(seed.master_seed, 2 * seed.stream_id + 1))
    x1, x2 = a.column(0), a.column(1)
    factor = (t2 / t1) ** params.H
    errs = quantile_ratio_errors(x1, x2, factor, QUANTILE_PROBS)
    inc = b.column(1) - b.column(0)
    x_ref = a.column(0) if t2 - t1 == t1 else None
    if x_ref is None:
        raise ConfigError("increment check needs t2 - t1 == t1")
    stat, p = ks_two_sample(inc, x_ref)
    return {"H": params.H, "alpha": params.alpha, "a": params.a, "b": params.b, "h": h, "n": n,
            "quantile_probs": QUANTILE_PROBS.tolist(),
            "q1": np.quantile(x1, QUANTILE_PROBS).tolist(),
            "q2": np.quantile(x2, QUANTILE_PROBS).tolist(),
            "quantile_errors": errs.tolist(), "max_quantile_error": float(errs.max()),
            "ks_statistic": stat, "ks_p_value": p}


def fractional_identity_checks(spec: FunctionSpec, betas=(0.3, 0.7),
                               grid=np.linspace(-4.0, 4.0, 100)) -> dict:
    """Inversion D^b I^b f = f, semigroup I^.3 I^.4 = I^.7 and Marchaud = RL on a grid."""
    grid = np.asarray(grid, dtype=float)
    out = {}
    fx = spec(grid)
    for beta in betas:
        dib = frac_calc.rl_derivative_values(FractionalIntegral(spec, beta), beta, "+", grid)
        out[f"inversion_beta_{beta}"] = float(np.linalg.norm(dib - fx) / np.linalg.norm(fx))
    comp = frac_calc.rl_integral_values(FractionalIntegral(spec, 0.4), 0.3, "+", grid)
    direct = frac_calc.rl_integral_values(spec, 0.7, "+", grid)
    out["semigroup"] = float(np.max(np.abs(comp - direct)))
    for beta in betas:
        m = np.array([frac_calc.marchaud_derivative(spec, beta, x) for x in grid])
        r = frac_calc.rl_derivative_values(spec, beta, "+", grid)
        out[f"marchaud_beta_{beta}"] = float(np.max(np.abs(m - r)))
    return out


FRAC_BOUNDS = {"inversion": 1e-3, "semigroup": 1e-4, "marchaud": 1e-5}


def _frac_bound(name: str) -> float:
    return FRAC_BOUNDS[name.split("_")[0]]


# --------------------------------------------------------------------------
# suites


def suite_cf_convergence(cfg: dict) -> dict:
    alpha = float(_get(cfg, "alpha", 1.2))
    noise = noise_from_name(_get(cfg, "noise", "pareto"), alpha)
    h_list = _floats(_get(cfg, "h_list", [2.0 ** -j for j in range(2, 7)]))
    n = int(_get(cfg, "n", 100_000))
    bound = float(_get(cfg, "bound", 0.03))
    if not h_list:
        return {"passed": True, "rows": [], "table": []}
    study = convergence_study(_spec(cfg), alpha, noise, h_list, n, seed=SeedSpec(int(cfg["seed"])))
    rows = [{"h": r.h, "sup_distance": r.sup_distance, "l_alpha": r.l_alpha, "l_inf": r.l_inf,
             "cells": r.cells} for r in study.rows]
    mono = study.non_increasing()
    final = study.rows[-1].sup_distance <= bound
    return {"passed": bool(mono and final), "non_increasing_to_floor": mono,
            "final_within_bound": final, "bound": bound, "band": study.band,
            "sigma": study.sigma, "alpha": alpha, "n": n, "noise": noise.describe(),
            "rows": rows, "table": rows}


def suite_exactness(cfg: dict) -> dict:
    res = exactness_check(float(_get(cfg, "alpha", 1.5)), float(_get(cfg, "h", 0.25)),
                          int(_get(cfg, "n", 200_000)), SeedSpec(int(cfg["seed"])))
    res["passed"] = bool(res["passed"])
    res["table"] = [{k: res[k] for k in ("alpha", "h", "n", "ks_statistic", "p_value")}]
    return res


def suite_lfsm_selfsim(cfg: dict) -> dict:
    params = LfsmParams(float(_get(cfg, "alpha", 1.5)), float(_get(cfg, "H", 0.7)),
                        float(_get(cfg, "a", 1.0)), float(_get(cfg, "b", 0.0)))
    res = lfsm_law_checks(params, float(_get(cfg, "h", 2.0 ** -5)), int(_get(cfg, "n", 100_000)),
                          SeedSpec(int(cfg["seed"])))
    tol = float(_get(cfg, "bound", 0.05))
    res["quantile_tolerance"] = tol
    res["ks_level"] = KS_LEVEL
    res["passed"] = bool(res["max_quantile_error"] <= tol and res["ks_p_value"] >= KS_LEVEL)
    res["table"] = [{"prob": p, "q1": a, "q2": b, "error": e} for p, a, b, e in
                    zip(res["quantile_probs"], res["q1"], res["q2"], res["quantile_errors"])]
    return res


def power_family(alpha: float, j: int) -> np.ndarray:
    """u_k = j^{-1/alpha} for k = 1..j."""
    return np.full(j, float(j) ** (-1.0 / alpha))


def suite_lf_conditions(cfg: dict) -> dict:
    alpha = float(_get(cfg, "alpha", 1.5))
    family = _get(cfg, "family", "indicator-power")
    js = [int(v) for v in _floats(_get(cfg, "js", "10,100,1000"))]
    if family == "indicator-power":
        seq, sigma = [power_family(alpha, j) for j in js], 1.0
    elif family == "constant":
        seq, sigma = [np.eye(1, j)[0] for j in js], 1.0
    elif family == "gauss-lattice":
        spec = _spec(cfg)
        seq = [discretize(spec, 2.0 ** -j, alpha) for j in js]
        sigma = lp_norm(spec, alpha)
    else:
        raise ConfigError(f"unknown family {family!r}")
    rep = lf_conditions(seq, sigma, alpha=alpha)
    out = rep.to_dict()
    out.update({"family": family, "js": js, "alpha": alpha,
                "table": [{"j": j, "l_alpha": a, "l_inf": b}
                          for j, a, b in zip(js, rep.l_alpha, rep.l_inf)]})
    return out


def suite_frac_identities(cfg: dict) -> dict:
    errors = fractional_identity_checks(_spec(cfg))
    table = [{"check": k, "error": v, "bound": _frac_bound(k), "passed": v <= _frac_bound(k)}
             for k, v in errors.items()]
    return {"passed": all(r["passed"] for r in table), "errors": errors, "table": table}


SUITES = {
    "cf-convergence": suite_cf_convergence,
    "exactness": suite_exactness,
    "lfsm-selfsim": suite_lfsm_selfsim,
    "lf-conditions": suite_lf_conditions,
    "frac-identities": suite_frac_identities,
}
