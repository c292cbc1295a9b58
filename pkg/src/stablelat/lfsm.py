"""Linear fractional stable motion: kernel convolutions, integrals and paths.

For a, b >= 0 the two-sided kernel w(x) = a x_-^{-beta} + b x_+^{-beta}
turns a stable random measure into a fractional one. With H the Hurst index,

    long range dependence  H > 1/alpha,  beta = 1 + 1/alpha - H,  g = f * w
    anti-persistence       H < 1/alpha,  beta = 1/alpha - H,      g = f' * w

Paths are built from the closed-form kernels f_t^{a,b} in both regimes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import frac_calc
from ._rng import SeedSpec
from .errors import ConfigError, UnsupportedInputError
from .function_model import FunctionSpec, KernelConvolution, LfsmKernel, lp_norm
from .lattice import CellCoefficients, discretize, discretize_exact
from .measure_sim import SampleBatch, sample_fdd, sample_integral
from .stable_core import ExactSaS, NoiseModel

LONG_RANGE = "long-range"
ANTI_PERSISTENT = "anti-persistent"


@dataclass(frozen=True)
class LfsmParams:
    alpha: float
    H: float
    a: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        frac_calc.check_lfsm_params(self.H, self.alpha, self.a, self.b)

    @property
    def regime(self) -> str:
        return LONG_RANGE if self.H > 1.0 / self.alpha else ANTI_PERSISTENT

    def kernel(self, t: float) -> LfsmKernel:
        return LfsmKernel(float(t), self.H, self.alpha, self.a, self.b)


def beta_of(params: LfsmParams) -> tuple[float, str]:
    """Kernel exponent beta and regime for the given Hurst index."""
    if params.regime == LONG_RANGE:
        beta = 1.0 + 1.0 / params.alpha - params.H
    else:
        beta = 1.0 / params.alpha - params.H
    return beta, params.regime


def convolved_spec(spec: FunctionSpec, params: LfsmParams) -> KernelConvolution:
    beta, regime = beta_of(params)
    if regime == ANTI_PERSISTENT and not spec.smooth:
        raise UnsupportedInputError(
            "the anti-persistent regime needs a C^1 integrand; sample paths from the "
            "closed-form kernels with sample_lfsm_path instead")
    return KernelConvolution(spec, beta, params.a, params.b, derivative_of=regime == ANTI_PERSISTENT)


def discretize_lfsm(spec: FunctionSpec, params: LfsmParams, h: float, trunc_tol: float = 1e-4,
                    max_cells: int = 2048) -> CellCoefficients:
    """Lattice coefficients of g = f * w (or f' * w), with a far field past max_cells."""
    if spec.dim != 1:
        raise UnsupportedInputError("LFSM integrands are one-dimensional")
    if spec.is_zero():
        return discretize(spec, h, params.alpha, trunc_tol)
    return discretize(convolved_spec(spec, params), h, params.alpha, trunc_tol, max_cells=max_cells)


def sample_lfsm_integral(spec: FunctionSpec, params: LfsmParams, h: float, noise: NoiseModel,
                         n: int, seed: SeedSpec, trunc_tol: float = 1e-4,
                         max_cells: int = 2048) -> SampleBatch:
    coeffs = discretize_lfsm(spec, params, h, trunc_tol, max_cells)
    batch = sample_integral(coeffs, noise, n, seed)
    batch.meta.update(_param_meta(params))
    return batch


def _param_meta(params: LfsmParams) -> dict:
    beta, regime = beta_of(params)
    return {"H": params.H, "a": params.a, "b": params.b, "beta": beta, "regime": regime}


def path_window(times, h: float, params: LfsmParams, margin: float = 4.0,
                max_cells: int = 4096) -> tuple[tuple[int, int]]:
    """Common lattice window: [0, T] padded by margin*T on each kernel side."""
    t_max = max(abs(float(t)) for t in times)
    lo = min(0.0, min(times)) - (margin * t_max if params.a > 0 else 0.0)
    hi = max(0.0, max(times)) + (margin * t_max if params.b > 0 else 0.0)
    k0, k1 = int(math.floor(lo / h)), int(math.ceil(hi / h))
    if k1 - k0 > max_cells:
        c0, c1 = int(math.floor(min(0.0, min(times)) / h)), int(math.ceil(max(times) / h))
        extra = max(0, max_cells - (c1 - c0))
        left = extra if params.b == 0 else (extra if params.a == 0 else extra // 2)
        left = 0 if params.a == 0 else left
        k0, k1 = c0 - left, c1 + (extra - left)
    return ((k0, k1),)


def sample_lfsm_path(params: LfsmParams, times, h: float, noise: NoiseModel | None = None,
                     n: int = 1000, seed: SeedSpec = SeedSpec(), trunc_tol: float = 1e-4,
                     scheme: str = "cell-average", margin: float = 4.0,
                     max_cells: int = 4096) -> SampleBatch:
    """Joint samples (X_{t_1}, ..., X_{t_m}) from the closed-form kernels f_t^{a,b}."""
    times = [float(t) for t in np.atleast_1d(np.asarray(times, dtype=float))]
    if not times:
        raise ConfigError("need at least one time point")
    if any(t < 0 for t in times):
        raise ConfigError("time points must be non-negative")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ConfigError("time points must be strictly increasing")
    noise = noise or ExactSaS(params.alpha)
    disc = {"cell-average": discretize, "exact": discretize_exact}.get(scheme)
    if disc is None:
        raise ConfigError(f"unknown scheme {scheme!r}")
    window = path_window(times, h, params, margin, max_cells)
    coeffs = [disc(params.kernel(t), h, params.alpha, trunc_tol, window=window) for t in times]
    batch = sample_fdd(coeffs, noise, n, seed, [f"t={t!r}" for t in times])
    batch.meta.update(_param_meta(params))
    batch.meta["times"] = times
    return batch


def lfsm_scale(params: LfsmParams, t: float = 1.0) -> float:
    """||f_t^{a,b}||_{L^alpha}, the stable scale of X_t."""
    return lp_norm(params.kernel(t), params.alpha)
