"""Validation harness: empirical CFs, KS tests, Lindeberg-Feller checks, l^alpha diagnostics."""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from ._rng import SeedSpec
from .errors import ConfigError
from .function_model import FunctionSpec, lp_norm
from .lattice import CellCoefficients, discretize, discretize_exact, norms
from .measure_sim import sample_integral
from .stable_core import ExactSaS, NoiseModel, StableParams, stable_cf

DEFAULT_THETAS = np.round(np.arange(-30, 31) / 10.0, 10)
KS_LEVEL = 0.01


def cf_band(n: int) -> float:
    """Monte-Carlo band 3/sqrt(n) used for CF comparisons."""
    return 3.0 / math.sqrt(n)


@dataclass(frozen=True)
class EcfReport:
    thetas: np.ndarray
    ecf_real: np.ndarray
    ecf_imag: np.ndarray
    target: np.ndarray | None
    sup_distance: float
    n: int
    band: float

    def to_dict(self) -> dict:
        out = asdict(self)
        return {k: v.tolist() if isinstance(v, np.ndarray) else v for k, v in out.items()}


def empirical_cf(samples, thetas=None, target: StableParams | None = None,
                 chunk: int = 1 << 16) -> EcfReport:
    """ECF (1/n) sum exp(i theta x) on a theta grid, compared with a stable CF."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ConfigError("empty sample")
    th = DEFAULT_THETAS if thetas is None else np.asarray(thetas, dtype=float).ravel()
    re = np.zeros(th.size)
    im = np.zeros(th.size)
    for i in range(0, x.size, chunk):
        arg = np.outer(th, x[i:i + chunk])
        re += np.cos(arg).sum(axis=1)
        im += np.sin(arg).sum(axis=1)
    re /= x.size
    im /= x.size
    tgt = stable_cf(target, th) if target is not None else None
    sup = float(np.max(np.hypot(re - tgt, im))) if tgt is not None else float("nan")
    return EcfReport(th, re, im, tgt, sup, int(x.size), cf_band(x.size))


def ks_two_sample(x, y) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic and p-value."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size == 0 or y.size == 0:
        raise ConfigError("empty sample")
    # exact p-values for small samples, asymptotic ones otherwise
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*Exact calculation unsuccessful.*")
        res = stats.ks_2samp(x, y, method="auto")
    return float(res.statistic), float(res.pvalue)


@dataclass(frozen=True)
class LfConditionReport:
    l_alpha: list[float]
    l_inf: list[float]
    sigma_target: float
    sigma_hat: float
    inf_trend: float
    gaps: list[float]
    condition1: bool
    condition2: bool
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.condition1 and self.condition2

    def to_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}


def lf_conditions(coeff_sequence, sigma_target: float, alpha: float | None = None,
                  tol: float = 1e-2, inf_tol: float = 0.1) -> LfConditionReport:
    """Check l^alpha norms -> sigma_target and sup norms -> 0 along a sequence.

    Entries are CellCoefficients or plain arrays (then ``alpha`` is needed).
    Condition 1 holds when the gaps |l_alpha - sigma| do not increase and the
    last one is within ``tol`` (relative). Condition 2 holds when sup norms do
    not increase and the last is below ``inf_tol`` times the first or zero.
    """
    seq = list(coeff_sequence)
    if len(seq) < 3:
        raise ConfigError("need at least three coefficient families")
    la, li = [], []
    alphas = set()
    for c in seq:
        if isinstance(c, CellCoefficients):
            alphas.add(c.alpha)
            a, b = norms(c)
        else:
            if alpha is None:
                raise ConfigError("alpha is required for plain sequences")
            alphas.add(alpha)
            u = np.asarray(c, dtype=float)
            a = float(np.sum(np.abs(u) ** alpha) ** (1.0 / alpha))
            b = float(np.max(np.abs(u))) if u.size else 0.0
        la.append(a)
        li.append(b)
    if len(alphas) > 1 or (alpha is not None and alphas != {alpha}):
        raise ConfigError("alpha differs across the sequence")
    gaps = [abs(a - sigma_target) for a in la]
    slack = 1e-12 * max(1.0, sigma_target)
    monotone = all(g2 <= g1 + slack for g1, g2 in zip(gaps, gaps[1:]))
    cond1 = monotone and gaps[-1] <= tol * max(sigma_target, 1e-300)
    inf_mono = all(b2 <= b1 * (1 + 1e-12) for b1, b2 in zip(li, li[1:]))
    cond2 = inf_mono and (li[-1] == 0.0 or li[-1] <= inf_tol * li[0])
    trend = li[-1] / li[0] if li[0] > 0 else 0.0
    return LfConditionReport(la, li, float(sigma_target), la[-1], trend, gaps, bool(cond1),
                             bool(cond2), tol)


@dataclass(frozen=True)
class PowerDecay:
    """Tail descriptor u_k ~ C k^{-rho}."""

    rho: float
    constant: float = 1.0


@dataclass(frozen=True)
class LalphaDiagnostic:
    in_l_alpha: bool
    partial_norms: list[float]
    boundary: bool = False


def lalpha_membership(u, alpha: float, checkpoints=(10, 100, 1000, 10_000, 100_000)) -> LalphaDiagnostic:
    """Decide u in l^alpha for a power-decay descriptor or a finite list."""
    if isinstance(u, PowerDecay):
        prod = u.rho * alpha
        k = np.arange(1, max(checkpoints) + 1, dtype=float)
        cums = np.cumsum(np.abs(u.constant) ** alpha * k ** (-prod))
        partial = [float(cums[c - 1] ** (1.0 / alpha)) for c in checkpoints]
        boundary = math.isclose(prod, 1.0, rel_tol=0, abs_tol=1e-12)
        return LalphaDiagnostic(bool(prod > 1.0 and not boundary), partial, boundary)
    arr = np.abs(np.asarray(u, dtype=float).ravel())
    if not np.all(np.isfinite(arr)):
        return LalphaDiagnostic(False, [])
    cums = np.cumsum(arr ** alpha) ** (1.0 / alpha)
    picks = [c for c in checkpoints if c <= arr.size] + [arr.size]
    return LalphaDiagnostic(True, [float(cums[c - 1]) if c else 0.0 for c in picks])


@dataclass
class StudyRow:
    h: float
    sup_distance: float
    l_alpha: float
    l_inf: float
    cells: int
    seconds: float


@dataclass
class ConvergenceTable:
    sigma: float
    alpha: float
    n: int
    band: float
    rows: list[StudyRow] = field(default_factory=list)

    @property
    def distances(self) -> list[float]:
        return [r.sup_distance for r in self.rows]

    def non_increasing(self, floor: float | None = None) -> bool:
        """Each distance is at most the previous one or the Monte-Carlo floor."""
        floor = self.band if floor is None else floor
        d = self.distances
        return all(b <= max(a, floor) for a, b in zip(d, d[1:]))

    def to_dict(self) -> dict:
        return {"sigma": self.sigma, "alpha": self.alpha, "n": self.n, "band": self.band,
                "rows": [asdict(r) for r in self.rows]}


def convergence_study(spec: FunctionSpec, alpha: float, noise: NoiseModel, h_list, n: int,
                      theta_grid=None, seed: SeedSpec = SeedSpec(), scheme: str = "cell-average",
                      trunc_tol: float = 1e-6) -> ConvergenceTable:
    """Sup CF distance to exp(-||f||^alpha |theta|^alpha) for each h, in h_list order."""
    h_list = [float(h) for h in h_list]
    if any(b >= a for a, b in zip(h_list, h_list[1:])):
        raise ConfigError("h_list must be decreasing")
    disc = {"cell-average": discretize, "exact": discretize_exact}.get(scheme)
    if disc is None:
        raise ConfigError(f"unknown scheme {scheme!r}")
    sigma = lp_norm(spec, alpha)
    table = ConvergenceTable(sigma, alpha, n, cf_band(max(n, 1)))
    target = StableParams(alpha, sigma) if sigma > 0 else None
    for h in h_list:
        t0 = time.perf_counter()
        coeffs = disc(spec, h, alpha, trunc_tol)
        x = sample_integral(coeffs, noise, n, seed).column()
        if target is None:
            sup = float(np.max(np.abs(empirical_cf(x, theta_grid).ecf_real - 1.0)))
        else:
            sup = empirical_cf(x, theta_grid, target).sup_distance
        l_a, l_i = norms(coeffs)
        table.rows.append(StudyRow(h, sup, l_a, l_i, len(coeffs), time.perf_counter() - t0))
    return table


def quantile_ratio_errors(x, y, factor: float, probs=None) -> np.ndarray:
    """Relative errors of quantiles of y against factor * quantiles of x.

    The median of a symmetric law is 0, where a relative error is undefined;
    there the error is measured against the half interquartile range of
    factor * x instead.
    """
    probs = np.linspace(0.1, 0.9, 9) if probs is None else np.asarray(probs, dtype=float)
    qx = factor * np.quantile(x, probs)
    qy = np.quantile(y, probs)
    half_iqr = 0.5 * factor * float(np.subtract(*np.quantile(x, [0.75, 0.25])))
    denom = np.where(np.isclose(probs, 0.5), half_iqr, np.abs(qx))
    return np.abs(qy - qx) / denom


def exactness_check(alpha: float = 1.5, h: float = 0.25, n: int = 200_000,
                    seed: SeedSpec = SeedSpec()) -> dict:
    """KS of the exact scheme on 1_[0,1) against direct S_alpha(1) draws."""
    from .function_model import IndicatorBox
    from .stable_core import sample_sas

    coeffs = discretize_exact(IndicatorBox((0.0,), (1.0,)), h, alpha)
    x = sample_integral(coeffs, ExactSaS(alpha), n, seed).column()
    y = sample_sas(StableParams(alpha), n, seed.child(1))
    stat, p = ks_two_sample(x, y)
    return {"alpha": alpha, "h": h, "n": n, "l_alpha": norms(coeffs)[0], "ks_statistic": stat,
            "p_value": p, "level": KS_LEVEL, "passed": p >= KS_LEVEL}
