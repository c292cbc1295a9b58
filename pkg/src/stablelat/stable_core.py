"""Symmetric alpha-stable laws, heavy-tailed noise in their domain of normal
attraction, and the reference constants tying the two together."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate, special

from ._rng import KIND_PARETO, KIND_STABLE, SeedSpec, field_values
from .errors import ConfigError


@dataclass(frozen=True)
class StableParams:
    alpha: float
    sigma: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise ConfigError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not self.sigma >= 0.0:
            raise ConfigError(f"sigma must be non-negative, got {self.sigma}")


@dataclass(frozen=True)
class ExactSaS:
    """Noise drawn exactly from S_alpha(1)."""

    alpha: float

    def __post_init__(self):
        StableParams(self.alpha)

    def describe(self) -> dict:
        return {"type": "exact", "alpha": self.alpha}


@dataclass(frozen=True)
class SymmetricPareto:
    """Symmetric law with P(|xi| >= t) = min(1, K t^-alpha).

    With the default K = 1 / c_alpha the partial sums n^{-1/alpha} sum xi_k
    converge to S_alpha(1) without centering.
    """

    alpha: float
    tail_constant: float | None = None

    def __post_init__(self):
        if not (0.0 < self.alpha < 2.0):
            raise ConfigError("Pareto noise needs alpha in (0, 2)")
        if self.tail_constant is None:
            object.__setattr__(self, "tail_constant", 1.0 / c_alpha(self.alpha))
        elif not self.tail_constant > 0:
            raise ConfigError("tail_constant must be positive")

    def describe(self) -> dict:
        return {"type": "pareto", "alpha": self.alpha, "tail_constant": self.tail_constant}


NoiseModel = Union[ExactSaS, SymmetricPareto]


def noise_from_name(name: str, alpha: float) -> NoiseModel:
    if name == "exact":
        return ExactSaS(alpha)
    if name == "pareto":
        return SymmetricPareto(alpha)
    raise ConfigError(f"unknown noise model {name!r}")


def noise_kind(model: NoiseModel) -> tuple[int, float, float]:
    if isinstance(model, ExactSaS):
        return KIND_STABLE, float(model.alpha), 1.0
    if isinstance(model, SymmetricPareto):
        return KIND_PARETO, float(model.alpha), float(model.tail_constant)
    raise ConfigError(f"not a noise model: {model!r}")


def stable_cf(params: StableParams, theta):
    """exp(-|sigma theta|^alpha), vectorized over theta."""
    return np.exp(-np.abs(params.sigma * np.asarray(theta, dtype=float)) ** params.alpha)


def _half_period(alpha: float, m: int) -> float:
    # int_{m pi}^{(m+1) pi} x^-alpha sin x dx
    if m == 0:
        # x^-alpha sin x = x^(1-alpha) * sinc; the algebraic weight absorbs x^(1-alpha)
        val, _ = integrate.quad(lambda x: np.sinc(x / math.pi), 0.0, math.pi, weight="alg",
                                wvar=(1.0 - alpha, 0.0),
                                epsabs=1e-14, epsrel=1e-13)
        return val
    sign = -1.0 if m % 2 else 1.0
    lo = m * math.pi
    val, _ = integrate.quad(lambda y: np.sin(y) * (lo + y) ** -alpha, 0.0, math.pi,
                            epsabs=1e-15, epsrel=1e-13)
    return sign * val


def c_alpha(alpha: float, tol: float = 1e-10) -> float:
    """c_alpha = int_0^inf x^-alpha sin x dx for alpha in (0, 2).

    The oscillatory integral is split into half periods of sin; the resulting
    alternating series is accelerated by repeated pairwise averaging of its
    partial sums.
    """
    if not (0.0 < alpha < 2.0):
        raise ConfigError(f"c_alpha needs alpha in (0, 2), got {alpha}")
    m0, depth = 40, 24
    terms = [_half_period(alpha, m) for m in range(m0 + depth + 1)]
    partial = np.cumsum(terms)[m0:]
    prev = None
    level = partial
    while level.size > 1:
        level = 0.5 * (level[1:] + level[:-1])
        if prev is not None and abs(level[-1] - prev) < tol / 10:
            break
        prev = level[-1]
    return float(level[-1])


def c_alpha_closed_form(alpha: float) -> float:
    if alpha == 1.0:
        return math.pi / 2
    return float(special.gamma(1.0 - alpha) * math.cos(math.pi * alpha / 2))


def sample_sas(params: StableParams, n: int, seed: SeedSpec) -> np.ndarray:
    """n i.i.d. draws from S_alpha(sigma); at alpha = 2 the variance is 2 sigma^2."""
    if n < 0:
        raise ConfigError("n must be non-negative")
    if n == 0:
        return np.zeros(0)
    x = field_values(seed, 1, np.arange(n, dtype=np.int64), KIND_STABLE, params.alpha)[0]
    return params.sigma * x


def sample_noise(model: NoiseModel, n: int, seed: SeedSpec) -> np.ndarray:
    if isinstance(model, ExactSaS):
        return sample_sas(StableParams(model.alpha), n, seed)
    if n < 0:
        raise ConfigError("n must be non-negative")
    if n == 0:
        return np.zeros(0)
    kind, alpha, k = noise_kind(model)
    return field_values(seed, 1, np.arange(n, dtype=np.int64), kind, alpha, k)[0]
