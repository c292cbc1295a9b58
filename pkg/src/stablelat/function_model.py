"""Integrand descriptors.

A FunctionSpec is an immutable tree of parametric leaves (indicator boxes,
Gaussian bumps, power tails, LFSM kernels, kernel convolutions) and
combinators (linear combinations, shifts, value scalings). Every node can be
evaluated pointwise and integrated over axis-aligned boxes, in closed form
wherever the leaf allows it.

Integration works on tensor grids: ``cell_integrals(edges)`` takes one array
of cell edges per axis and returns the integral of f over every cell, shape
``(len(edges[0]) - 1, ...)``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from . import frac_calc
from .errors import ConfigError, NumericalError, UnsupportedInputError

INF = math.inf
MAX_DOUBLINGS = 60


# --------------------------------------------------------------------------
# quadrature helpers


def _finite_piece(fun: Callable[[float], float], a: float, b: float):
    """Map a half-line onto (0, 1] by x = c +- L (1/s - 1), L = max(1, |c|).

    Power tails x^-q become s^(q - 2), an endpoint singularity adaptive
    quadrature handles, even when the finite end is far from the origin.
    """
    if math.isfinite(a) and math.isfinite(b):
        return fun, a, b
    if not (math.isfinite(a) or math.isfinite(b)):
        return fun, a, b
    c = a if math.isfinite(a) else b
    sign = 1.0 if math.isfinite(a) else -1.0
    scale = max(1.0, abs(c))

    def g(s):
        if s <= 0.0:
            return 0.0
        return fun(c + sign * scale * (1.0 / s - 1.0)) * scale / (s * s)

    return g, 0.0, 1.0


def quad_pieces(fun: Callable[[float], float], lo: float, hi: float,
                points: Sequence[float] = (), epsabs: float = 1e-12,
                epsrel: float = 1e-10, limit: int = 400) -> float:
    """Adaptive quadrature of a scalar function, split at the given points."""
    if hi <= lo:
        return 0.0
    cuts = sorted({p for p in points if lo < p < hi})
    edges = [lo, *cuts, hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        g, a, b = _finite_piece(fun, a, b)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err = integrate.quad(g, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit)
        if not np.isfinite(val) or err > 1e3 * max(epsabs, epsrel * abs(val)) + 1e-300:
            if err > 1e-6 * max(1.0, abs(val)):
                raise NumericalError(
                    f"quadrature did not converge on [{a}, {b}]: value {val}, error estimate {err}")
        total += val
    return total


def _as_points(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if d == 1:
        if x.ndim == 2 and x.shape[1] == 1:
            return x[:, 0]
        return np.atleast_1d(x).ravel() if x.ndim <= 1 else x
    x = np.atleast_2d(x)
    if x.shape[-1] != d:
        raise ConfigError(f"expected points of dimension {d}, got shape {x.shape}")
    return x


def _box_cells(box: Sequence[tuple[float, float]]) -> list[np.ndarray]:
    return [np.array([lo, hi], dtype=float) for lo, hi in box]


# --------------------------------------------------------------------------
# node types


class FunctionSpec:
    """Base class of integrand nodes."""

    dim: int = 1

    # -- pointwise -----------------------------------------------------------
    def __call__(self, x) -> np.ndarray:
        raise NotImplementedError

    # -- structure -----------------------------------------------------------
    def support(self) -> list[tuple[float, float]]:
        return [(-INF, INF)] * self.dim

    def core(self) -> list[tuple[float, float]]:
        """Bounded box holding the bulk of the function, seed of tail searches."""
        raise NotImplementedError

    def breakpoints(self) -> list[list[float]]:
        """Per axis, points where f is discontinuous, kinked or singular."""
        return [[] for _ in range(self.dim)]

    def is_zero(self) -> bool:
        return False

    @property
    def piecewise_constant(self) -> bool:
        return False

    @property
    def nonnegative(self) -> bool:
        return False

    @property
    def smooth(self) -> bool:
        return False

    def derivative(self) -> Callable[[np.ndarray], np.ndarray]:
        raise UnsupportedInputError(f"{type(self).__name__} is not continuously differentiable")

    # -- integrals -----------------------------------------------------------
    def _closed_cells(self, edges: list[np.ndarray]) -> np.ndarray | None:
        return None

    def cell_integrals(self, edges: Sequence[np.ndarray], tol: float | None = None) -> np.ndarray:
        edges = [np.asarray(e, dtype=float) for e in edges]
        if len(edges) != self.dim:
            raise ConfigError(f"expected {self.dim} edge arrays, got {len(edges)}")
        closed = self._closed_cells(edges)
        if closed is not None:
            return closed
        return self._quad_cells(lambda x: self(x), edges, tol)

    def _abs_power_closed(self, edges: list[np.ndarray], p: float) -> np.ndarray | None:
        return None

    def abs_power_integrals(self, edges: Sequence[np.ndarray], p: float,
                            tol: float | None = None) -> np.ndarray:
        """Integral of |f|^p over every cell of the tensor grid."""
        edges = [np.asarray(e, dtype=float) for e in edges]
        closed = self._abs_power_closed(edges, p)
        if closed is not None:
            return closed
        if self.piecewise_constant:
            return _piecewise_constant_cells(self, edges, lambda v: np.abs(v) ** p)
        return self._quad_cells(lambda x: np.abs(self(x)) ** p, edges, tol)

    def signed_power_integrals(self, edges: Sequence[np.ndarray], p: float,
                               tol: float | None = None) -> np.ndarray:
        """Integral of sign(f)|f|^p over every cell."""
        edges = [np.asarray(e, dtype=float) for e in edges]
        if self.nonnegative:
            return self.abs_power_integrals(edges, p, tol)
        if self.piecewise_constant:
            return _piecewise_constant_cells(self, edges, lambda v: np.sign(v) * np.abs(v) ** p)
        return self._quad_cells(lambda x: (lambda v: np.sign(v) * np.abs(v) ** p)(self(x)),
                                edges, tol)

    def _quad_cells(self, fun, edges: list[np.ndarray], tol: float | None) -> np.ndarray:
        shape = tuple(len(e) - 1 for e in edges)
        out = np.zeros(shape)
        bps = self.breakpoints()
        if self.dim == 1:
            e = edges[0]
            for i in range(shape[0]):
                h = e[i + 1] - e[i]
                epsabs = 1e-10 * h if tol is None else tol
                out[i] = quad_pieces(lambda t: float(fun(np.array([t]))[0]), e[i], e[i + 1],
                                     bps[0], epsabs=epsabs)
            return out
        ex, ey = edges
        for i in range(shape[0]):
            for j in range(shape[1]):
                area = (ex[i + 1] - ex[i]) * (ey[j + 1] - ey[j])
                epsabs = 1e-10 * area if tol is None else tol
                out[i, j] = _quad2d(fun, (ex[i], ex[i + 1]), (ey[j], ey[j + 1]), bps, epsabs)
        return out

    # -- serialization -------------------------------------------------------
    def to_dict(self) -> dict:
        raise NotImplementedError


def _quad2d(fun, xr, yr, bps, epsabs) -> float:
    def inner(x):
        return quad_pieces(lambda y: float(fun(np.array([[x, y]]))[0]), yr[0], yr[1], bps[1],
                           epsabs=epsabs / max(1.0, xr[1] - xr[0]))
    return quad_pieces(inner, xr[0], xr[1], bps[0], epsabs=epsabs)


def _piecewise_constant_cells(spec: FunctionSpec, edges: list[np.ndarray],
                              transform: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Exact cell integrals of transform(f) for f piecewise constant on a box grid."""
    bps = spec.breakpoints()
    shape = tuple(len(e) - 1 for e in edges)
    out = np.zeros(shape)
    refined = []
    owners = []
    for ax, e in enumerate(edges):
        pts = np.asarray(bps[ax], dtype=float)
        pts = pts[(pts > e[0]) & (pts < e[-1])]
        r = np.union1d(e, pts)
        refined.append(r)
        owners.append(np.searchsorted(e, r[:-1], side="right") - 1)
    mids = [0.5 * (r[1:] + r[:-1]) for r in refined]
    widths = [np.diff(r) for r in refined]
    if spec.dim == 1:
        vals = transform(spec(mids[0])) * widths[0]
        np.add.at(out, owners[0], vals)
        return out
    mx, my = np.meshgrid(mids[0], mids[1], indexing="ij")
    vals = transform(spec(np.column_stack([mx.ravel(), my.ravel()]))).reshape(mx.shape)
    vals = vals * np.outer(widths[0], widths[1])
    tmp = np.zeros((shape[0], len(mids[1])))
    np.add.at(tmp, owners[0], vals)
    np.add.at(out.T, owners[1], tmp.T)
    return out


def _outer(parts: list[np.ndarray]) -> np.ndarray:
    out = parts[0]
    for p in parts[1:]:
        out = np.multiply.outer(out, p)
    return out


@dataclass(frozen=True)
class IndicatorBox(FunctionSpec):
    """Indicator of the half-open box prod [lower_i, upper_i)."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        hi = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lo) != len(hi) or len(lo) not in (1, 2):
            raise ConfigError("IndicatorBox needs matching bounds of dimension 1 or 2")
        if any(b < a for a, b in zip(lo, hi)):
            raise ConfigError("IndicatorBox upper bound below lower bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return len(self.lower)

    def __call__(self, x):
        x = _as_points(x, self.dim)
        if self.dim == 1:
            return ((x >= self.lower[0]) & (x < self.upper[0])).astype(float)
        lo, hi = np.array(self.lower), np.array(self.upper)
        return np.all((x >= lo) & (x < hi), axis=-1).astype(float)

    def support(self):
        return list(zip(self.lower, self.upper))

    def core(self):
        return self.support()

    def breakpoints(self):
        return [[a, b] for a, b in zip(self.lower, self.upper)]

    def is_zero(self):
        return any(b <= a for a, b in zip(self.lower, self.upper))

    piecewise_constant = True
    nonnegative = True

    def _closed_cells(self, edges):
        parts = []
        for (lo, hi), e in zip(zip(self.lower, self.upper), edges):
            parts.append(np.clip(np.minimum(hi, e[1:]) - np.maximum(lo, e[:-1]), 0.0, None))
        return _outer(parts)

    def _abs_power_closed(self, edges, p):
        return self._closed_cells(edges)

    def to_dict(self):
        return {"type": "indicator_box", "lower": list(self.lower), "upper": list(self.upper)}


def _gauss_interval(e: np.ndarray, c: float, w: float) -> np.ndarray:
    # w * sqrt(pi/2) * (erf(z1) - erf(z0)), via erfc on each side for tail accuracy
    z = (e - c) / (w * math.sqrt(2.0))
    z0, z1 = z[:-1], z[1:]
    out = np.where(z0 >= 0, special.erfc(z0) - special.erfc(z1),
                   np.where(z1 <= 0, special.erfc(-z1) - special.erfc(-z0),
                            special.erf(z1) - special.erf(z0)))
    return w * math.sqrt(math.pi / 2.0) * out


@dataclass(frozen=True)
class GaussBump(FunctionSpec):
    """exp(-|x - center|^2 / (2 width^2))."""

    center: tuple[float, ...]
    width: float = 1.0

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.center))
        if len(c) not in (1, 2):
            raise ConfigError("GaussBump center must have dimension 1 or 2")
        if not self.width > 0:
            raise ConfigError("GaussBump width must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "width", float(self.width))

    @property
    def dim(self):
        return len(self.center)

    def __call__(self, x):
        x = _as_points(x, self.dim)
        if self.dim == 1:
            r2 = (x - self.center[0]) ** 2
        else:
            r2 = np.sum((x - np.array(self.center)) ** 2, axis=-1)
        return np.exp(-r2 / (2.0 * self.width ** 2))

    def core(self):
        return [(c - self.width, c + self.width) for c in self.center]

    nonnegative = True
    smooth = True

    def derivative(self):
        if self.dim != 1:
            raise UnsupportedInputError("derivatives are only defined in one dimension")
        c, w = self.center[0], self.width
        return lambda x: -(np.asarray(x, float) - c) / w ** 2 * self(x)

    def _closed_cells(self, edges):
        return _outer([_gauss_interval(e, c, self.width) for e, c in zip(edges, self.center)])

    def _abs_power_closed(self, edges, p):
        w = self.width / math.sqrt(p)
        return _outer([_gauss_interval(e, c, w) for e, c in zip(edges, self.center)])

    def to_dict(self):
        return {"type": "gauss_bump", "center": list(self.center), "width": self.width}


@dataclass(frozen=True)
class PowerTail(FunctionSpec):
    """f(x) = 1 for |x| < max(cutoff, 1), |x|^-delta beyond (d = 1)."""

    delta: float
    cutoff: float = 1.0

    def __post_init__(self):
        if not (self.delta > 0 and self.cutoff > 0):
            raise ConfigError("PowerTail needs delta > 0 and cutoff > 0")

    @property
    def knee(self) -> float:
        return max(self.cutoff, 1.0)

    def __call__(self, x):
        r = np.abs(_as_points(x, 1))
        m = self.knee
        with np.errstate(divide="ignore"):
            return np.where(r < m, 1.0, np.maximum(r, m) ** -self.delta)

    def core(self):
        return [(-self.knee, self.knee)]

    def breakpoints(self):
        return [[-self.knee, self.knee]]

    nonnegative = True

    def _antiderivative(self, x: np.ndarray, delta: float) -> np.ndarray:
        r = np.abs(x)
        m = self.knee
        if delta == 1.0:
            far = m + np.log(np.maximum(r, m) / m)
        else:
            far = m + (np.maximum(r, m) ** (1.0 - delta) - m ** (1.0 - delta)) / (1.0 - delta)
        return np.sign(x) * np.where(r < m, r, far)

    def _closed_cells(self, edges):
        e = edges[0]
        if self.delta <= 1.0 and (np.isinf(e[0]) or np.isinf(e[-1])):
            return None
        big = self._antiderivative(e, self.delta)
        return np.diff(big)

    def _abs_power_closed(self, edges, p):
        e = edges[0]
        if self.delta * p <= 1.0 and (np.isinf(e[0]) or np.isinf(e[-1])):
            raise NumericalError("power tail is not p-integrable")
        return np.diff(self._antiderivative(e, self.delta * p))

    def to_dict(self):
        return {"type": "power_tail", "delta": self.delta, "cutoff": self.cutoff}


@dataclass(frozen=True)
class LfsmKernel(FunctionSpec):
    """The LFSM moving-average kernel f_t^{a,b} (d = 1)."""

    t: float
    H: float
    alpha: float
    a: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        frac_calc.check_lfsm_params(self.H, self.alpha, self.a, self.b)

    @property
    def exponent(self) -> float:
        return self.H - 1.0 / self.alpha

    def __call__(self, x):
        return frac_calc.lfsm_kernel_eval(self.t, _as_points(x, 1), self.H, self.alpha,
                                          self.a, self.b)

    def support(self):
        lo = -INF if self.a > 0 else min(0.0, self.t)
        hi = INF if self.b > 0 else max(0.0, self.t)
        return [(lo, hi)]

    def core(self):
        return [(min(0.0, self.t), max(0.0, self.t))]

    def breakpoints(self):
        return [sorted({0.0, float(self.t)})]

    def is_zero(self):
        return self.t == 0.0 or (self.a == 0 and self.b == 0)

    def _closed_cells(self, edges):
        return frac_calc.lfsm_kernel_cell_integrals(self.t, edges[0], self.H, self.alpha,
                                                    self.a, self.b)

    def to_dict(self):
        return {"type": "lfsm_kernel", "t": self.t, "H": self.H, "alpha": self.alpha,
                "a": self.a, "b": self.b}


@dataclass(frozen=True)
class LinearCombination(FunctionSpec):
    """sum_i coeff_i * spec_i; an empty combination is the zero function."""

    terms: tuple[tuple[float, FunctionSpec], ...] = ()
    dimension: int | None = None

    def __post_init__(self):
        terms = tuple((float(c), s) for c, s in self.terms)
        dims = {s.dim for _, s in terms}
        if self.dimension is not None:
            dims.add(int(self.dimension))
        if len(dims) > 1:
            raise ConfigError(f"inconsistent dimensions in linear combination: {sorted(dims)}")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "dimension", dims.pop() if dims else 1)

    @property
    def dim(self):
        return self.dimension

    def __call__(self, x):
        x = _as_points(x, self.dim)
        out = np.zeros(x.shape[0] if self.dim > 1 else x.shape)
        for c, s in self.terms:
            if c != 0.0:
                out = out + c * s(x)
        return out

    def support(self):
        live = [s for c, s in self.terms if c != 0.0 and not s.is_zero()]
        if not live:
            return [(0.0, 0.0)] * self.dim
        sups = [s.support() for s in live]
        return [(min(b[ax][0] for b in sups), max(b[ax][1] for b in sups))
                for ax in range(self.dim)]

    def core(self):
        live = [s for c, s in self.terms if c != 0.0 and not s.is_zero()]
        if not live:
            return [(0.0, 0.0)] * self.dim
        cores = [s.core() for s in live]
        return [(min(b[ax][0] for b in cores), max(b[ax][1] for b in cores))
                for ax in range(self.dim)]

    def breakpoints(self):
        out = [set() for _ in range(self.dim)]
        for _, s in self.terms:
            for ax, pts in enumerate(s.breakpoints()):
                out[ax].update(pts)
        return [sorted(p) for p in out]

    def is_zero(self):
        return all(c == 0.0 or s.is_zero() for c, s in self.terms)

    @property
    def piecewise_constant(self):
        return all(s.piecewise_constant for _, s in self.terms)

    @property
    def nonnegative(self):
        return all(c >= 0 and s.nonnegative for c, s in self.terms)

    @property
    def smooth(self):
        return all(s.smooth for c, s in self.terms if c != 0.0)

    def derivative(self):
        parts = [(c, s.derivative()) for c, s in self.terms if c != 0.0]
        return lambda x: sum((c * d(x) for c, d in parts), np.zeros(np.shape(x)))

    def cell_integrals(self, edges, tol=None):
        edges = [np.asarray(e, dtype=float) for e in edges]
        out = np.zeros(tuple(len(e) - 1 for e in edges))
        for c, s in self.terms:
            if c != 0.0 and not s.is_zero():
                out += c * s.cell_integrals(edges, tol)
        return out

    def _abs_power_closed(self, edges, p):
        live = [(c, s) for c, s in self.terms if c != 0.0 and not s.is_zero()]
        if not live:
            return np.zeros(tuple(len(e) - 1 for e in edges))
        if len(live) == 1:
            c, s = live[0]
            return abs(c) ** p * s.abs_power_integrals(edges, p)
        return None

    def to_dict(self):
        return {"type": "linear_combination", "dim": self.dim,
                "terms": [{"coeff": c, "spec": s.to_dict()} for c, s in self.terms]}


@dataclass(frozen=True)
class Shift(FunctionSpec):
    """x -> spec(x - offset)."""

    spec: FunctionSpec
    offset: tuple[float, ...]

    def __post_init__(self):
        off = tuple(float(v) for v in np.atleast_1d(self.offset))
        if len(off) != self.spec.dim:
            raise ConfigError("Shift offset dimension does not match the shifted spec")
        object.__setattr__(self, "offset", off)

    @property
    def dim(self):
        return self.spec.dim

    def __call__(self, x):
        x = _as_points(x, self.dim)
        return self.spec(x - (self.offset[0] if self.dim == 1 else np.array(self.offset)))

    def _move(self, boxes):
        return [(lo + o, hi + o) for (lo, hi), o in zip(boxes, self.offset)]

    def support(self):
        return self._move(self.spec.support())

    def core(self):
        return self._move(self.spec.core())

    def breakpoints(self):
        return [[p + o for p in pts] for pts, o in zip(self.spec.breakpoints(), self.offset)]

    def is_zero(self):
        return self.spec.is_zero()

    @property
    def piecewise_constant(self):
        return self.spec.piecewise_constant

    @property
    def nonnegative(self):
        return self.spec.nonnegative

    @property
    def smooth(self):
        return self.spec.smooth

    def derivative(self):
        d = self.spec.derivative()
        return lambda x: d(np.asarray(x, float) - self.offset[0])

    def _shifted(self, edges):
        return [e - o for e, o in zip(edges, self.offset)]

    def cell_integrals(self, edges, tol=None):
        return self.spec.cell_integrals(self._shifted([np.asarray(e, float) for e in edges]), tol)

    def abs_power_integrals(self, edges, p, tol=None):
        return self.spec.abs_power_integrals(self._shifted([np.asarray(e, float) for e in edges]),
                                             p, tol)

    def signed_power_integrals(self, edges, p, tol=None):
        return self.spec.signed_power_integrals(
            self._shifted([np.asarray(e, float) for e in edges]), p, tol)

    def to_dict(self):
        return {"type": "shift", "offset": list(self.offset), "spec": self.spec.to_dict()}


@dataclass(frozen=True)
class Scale(FunctionSpec):
    """x -> factor * spec(x)."""

    spec: FunctionSpec
    factor: float

    def __post_init__(self):
        if self.factor == 0:
            raise ConfigError("Scale factor must be non-zero")
        object.__setattr__(self, "factor", float(self.factor))

    @property
    def dim(self):
        return self.spec.dim

    def __call__(self, x):
        return self.factor * self.spec(x)

    def support(self):
        return self.spec.support()

    def core(self):
        return self.spec.core()

    def breakpoints(self):
        return self.spec.breakpoints()

    def is_zero(self):
        return self.spec.is_zero()

    @property
    def piecewise_constant(self):
        return self.spec.piecewise_constant

    @property
    def nonnegative(self):
        return self.factor > 0 and self.spec.nonnegative

    @property
    def smooth(self):
        return self.spec.smooth

    def derivative(self):
        d = self.spec.derivative()
        return lambda x: self.factor * d(x)

    def cell_integrals(self, edges, tol=None):
        return self.factor * self.spec.cell_integrals(edges, tol)

    def abs_power_integrals(self, edges, p, tol=None):
        return abs(self.factor) ** p * self.spec.abs_power_integrals(edges, p, tol)

    def signed_power_integrals(self, edges, p, tol=None):
        s = math.copysign(abs(self.factor) ** p, self.factor)
        return s * self.spec.signed_power_integrals(edges, p, tol)

    def to_dict(self):
        return {"type": "scale", "factor": self.factor, "spec": self.spec.to_dict()}


@dataclass(frozen=True)
class KernelConvolution(FunctionSpec):
    """g = f * w_{a,b}^{(beta)}, or its derivative f' * w_{a,b}^{(beta)} (d = 1)."""

    spec: FunctionSpec
    beta: float
    a: float
    b: float
    derivative_of: bool = False
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.spec.dim != 1:
            raise UnsupportedInputError("kernel convolutions are one-dimensional")
        frac_calc.FracKernel(self.beta, self.a, self.b)
        if self.derivative_of and not self.spec.smooth:
            raise UnsupportedInputError(
                "the derivative form needs a C^1 integrand; use closed-form kernels instead")

    @property
    def kernel(self) -> "frac_calc.FracKernel":
        return frac_calc.FracKernel(self.beta, self.a, self.b)

    def _value(self, x: float) -> float:
        fun = self.spec.derivative() if self.derivative_of else self.spec
        return frac_calc.convolve_point(fun, self.spec, self.kernel, float(x))

    def __call__(self, x):
        x = _as_points(x, 1)
        flat = np.atleast_1d(x).ravel()
        if self.spec.smooth and not self.spec.is_zero():
            fun = self.spec.derivative() if self.derivative_of else self.spec
            vals = frac_calc.convolve_smooth_values(fun, self.spec, self.kernel, flat)
        elif self.spec.piecewise_constant and not self.derivative_of:
            vals = frac_calc.convolve_values(self.spec, self.kernel, flat)
        else:
            vals = np.array([self._value(v) for v in flat])
        return vals.reshape(np.shape(x))

    def support(self):
        lo, hi = self.spec.support()[0]
        return [(-INF if self.a > 0 else lo, INF if self.b > 0 else hi)]

    def core(self):
        lo, hi = self.spec.core()[0]
        return [(lo - 1.0, hi + 1.0)]

    def breakpoints(self):
        return self.spec.breakpoints()

    def is_zero(self):
        return self.spec.is_zero()

    def _closed_cells(self, edges):
        e = edges[0]
        if self.derivative_of:
            # cell integral of (f * w)' is a difference of f * w at the cell edges
            g0 = frac_calc.convolve_values(self.spec, self.kernel, e)
            return np.diff(g0)
        return np.diff(frac_calc.convolution_antiderivative(self.spec, self.kernel, e))

    def to_dict(self):
        return {"type": "kernel_convolution", "beta": self.beta, "a": self.a, "b": self.b,
                "derivative": self.derivative_of, "spec": self.spec.to_dict()}


@dataclass(frozen=True)
class FractionalIntegral(FunctionSpec):
    """Riemann-Liouville integral I^delta_side f as a function of x (d = 1).

    Values are computed by quadrature, so composing nodes nests quadratures.
    The derivative is I^delta_side f', which exists when f is C^1.
    """

    spec: FunctionSpec
    delta: float
    side: str = "+"

    def __post_init__(self):
        if self.spec.dim != 1:
            raise UnsupportedInputError("fractional integrals are one-dimensional")
        if not (0.0 < self.delta <= 1.0):
            raise ConfigError(f"delta must lie in (0, 1], got {self.delta}")
        if self.side not in ("+", "-"):
            raise ConfigError(f"side must be '+' or '-', got {self.side!r}")

    def __call__(self, x):
        x = _as_points(x, 1)
        vals = frac_calc.rl_integral_values(self.spec, self.delta, self.side, np.ravel(x))
        return vals.reshape(np.shape(x))

    def support(self):
        lo, hi = self.spec.support()[0]
        return [(lo, INF) if self.side == "+" else (-INF, hi)]

    def effective_support(self):
        lo, hi = frac_calc.effective_support(self.spec)
        return (lo, INF) if self.side == "+" else (-INF, hi)

    def core(self):
        return self.spec.core()

    def breakpoints(self):
        return self.spec.breakpoints()

    def is_zero(self):
        return self.spec.is_zero()

    @property
    def smooth(self):
        return self.spec.smooth

    def derivative(self):
        fp = self.spec.derivative()

        def dfun(x):
            x = np.atleast_1d(np.asarray(x, dtype=float))
            vals = frac_calc.one_sided_values(fp, frac_calc.effective_support(self.spec),
                                              x.ravel(), self.delta - 1.0, self.side)
            return (vals / special.gamma(self.delta)).reshape(x.shape)

        return dfun

    def to_dict(self):
        return {"type": "fractional_integral", "delta": self.delta, "side": self.side,
                "spec": self.spec.to_dict()}


def zero_spec(dim: int = 1) -> LinearCombination:
    return LinearCombination((), dimension=dim)


# --------------------------------------------------------------------------
# serialization


def from_dict(d: dict) -> FunctionSpec:
    """Build a spec from its JSON-compatible form (``type`` discriminator per node)."""
    try:
        kind = d["type"]
        if kind == "indicator_box":
            return IndicatorBox(tuple(d["lower"]), tuple(d["upper"]))
        if kind == "gauss_bump":
            return GaussBump(tuple(np.atleast_1d(d["center"])), d.get("width", 1.0))
        if kind == "power_tail":
            return PowerTail(d["delta"], d.get("cutoff", 1.0))
        if kind == "lfsm_kernel":
            return LfsmKernel(d["t"], d["H"], d["alpha"], d.get("a", 1.0), d.get("b", 0.0))
        if kind == "linear_combination":
            terms = tuple((t["coeff"], from_dict(t["spec"])) for t in d.get("terms", []))
            return LinearCombination(terms, dimension=d.get("dim"))
        if kind == "shift":
            return Shift(from_dict(d["spec"]), tuple(np.atleast_1d(d["offset"])))
        if kind == "scale":
            return Scale(from_dict(d["spec"]), d["factor"])
        if kind == "fractional_integral":
            return FractionalIntegral(from_dict(d["spec"]), d["delta"], d.get("side", "+"))
        if kind == "kernel_convolution":
            return KernelConvolution(from_dict(d["spec"]), d["beta"], d.get("a", 0.0),
                                     d.get("b", 0.0), bool(d.get("derivative", False)))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed function spec {d!r}: {exc}") from exc
    raise ConfigError(f"unknown function spec type {d.get('type')!r}")


def load_spec(value) -> FunctionSpec:
    """Spec from a dict, inline JSON text, or the path of a JSON file."""
    if value is None:
        raise ConfigError("a function spec is required")
    if isinstance(value, FunctionSpec):
        return value
    if isinstance(value, dict):
        return from_dict(value)
    text = str(value).strip()
    if not text.startswith("{"):
        path = Path(text)
        if not path.is_file():
            raise ConfigError(f"spec file {text} not found")
        text = path.read_text()
    try:
        return from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"spec is not valid JSON: {exc}") from exc


# --------------------------------------------------------------------------
# operations


@dataclass(frozen=True)
class Cell:
    """The half-open box h * (k + [0, 1)^d)."""

    k: tuple[int, ...]
    h: float

    def __post_init__(self):
        if not self.h > 0:
            raise ConfigError("cell spacing must be positive")
        object.__setattr__(self, "k", tuple(int(v) for v in np.atleast_1d(self.k)))

    def edges(self) -> list[np.ndarray]:
        return [np.array([self.h * k, self.h * (k + 1)]) for k in self.k]


def evaluate(spec: FunctionSpec, x) -> float | np.ndarray:
    """Pointwise value; a single point returns a float."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 0 or (spec.dim > 1 and arr.ndim == 1)
    if spec.dim > 1 and arr.shape[-1] != spec.dim:
        raise ConfigError(f"point dimension {arr.shape[-1]} does not match spec dimension {spec.dim}")
    if spec.dim == 1 and arr.ndim == 1 and arr.shape[0] != 1 and single:
        raise ConfigError("dimension mismatch")
    if spec.dim == 1 and arr.ndim == 2 and arr.shape[1] != 1:
        raise ConfigError(f"point dimension {arr.shape[1]} does not match spec dimension 1")
    val = spec(arr.reshape(1, -1) if spec.dim > 1 and single else arr)
    return float(np.ravel(val)[0]) if single else val


def cell_integral(spec: FunctionSpec, cell: Cell) -> float:
    if len(cell.k) != spec.dim:
        raise ConfigError("cell dimension does not match spec dimension")
    return float(np.ravel(spec.cell_integrals(cell.edges()))[0])


def box_abs_power(spec: FunctionSpec, box: Sequence[tuple[float, float]], p: float) -> float:
    """Integral of |f|^p over one box (infinite bounds allowed in d = 1)."""
    if any(hi <= lo for lo, hi in box):
        return 0.0
    return float(np.ravel(spec.abs_power_integrals(_box_cells(box), p, tol=1e-14))[0])


@dataclass
class TailSearch:
    box: list[tuple[float, float]]
    inside: float
    tail: float
    doublings: int

    @property
    def total(self) -> float:
        return self.inside + self.tail


def _clip_box(center, radius, support):
    return [(max(c - radius, lo), min(c + radius, hi)) for c, (lo, hi) in zip(center, support)]


def _annulus_mass(spec, inner, outer, p) -> float:
    if spec.dim == 1:
        (a0, a1), (b0, b1) = inner[0], outer[0]
        return box_abs_power(spec, [(b0, a0)], p) + box_abs_power(spec, [(a1, b1)], p)
    (ix0, ix1), (iy0, iy1) = inner
    (ox0, ox1), (oy0, oy1) = outer
    pieces = [[(ox0, ix0), (oy0, oy1)], [(ix1, ox1), (oy0, oy1)],
              [(ix0, ix1), (oy0, iy0)], [(ix0, ix1), (iy1, oy1)]]
    return sum(box_abs_power(spec, b, p) for b in pieces)


def search_tail(spec: FunctionSpec, p: float, tol: float) -> TailSearch:
    """Grow a box by doubling until the |f|^p mass outside is below tol * total.

    Stops when the relative increment of a doubling falls below tol / 4 and
    the tail extrapolated from the geometric decay of the increments is below
    tol times the total mass.
    """
    if spec.is_zero():
        return TailSearch([(0.0, 0.0)] * spec.dim, 0.0, 0.0, 0)
    if isinstance(spec, Scale):
        # the window depends on relative mass only; unwrapping avoids underflow
        inner = search_tail(spec.spec, p, tol)
        w = abs(spec.factor) ** p
        return TailSearch(inner.box, w * inner.inside, w * inner.tail, inner.doublings)
    core = spec.core()
    support = spec.support()
    center = [0.5 * (lo + hi) for lo, hi in core]
    radius = max(max(0.5 * (hi - lo) for lo, hi in core), 1e-3)
    box = _clip_box(center, radius, support)
    inside = box_abs_power(spec, box, p)
    incs: list[float] = []
    for m in range(MAX_DOUBLINGS + 1):
        if all(lo <= s_lo and hi >= s_hi for (lo, hi), (s_lo, s_hi) in zip(box, support)):
            return TailSearch(box, inside, 0.0, m)
        outer = _clip_box(center, 2.0 * radius, support)
        inc = _annulus_mass(spec, box, outer, p)
        incs.append(inc)
        total = inside + inc
        if total > 0 and inc <= 0.25 * tol * total:
            if len(incs) >= 2 and incs[-2] > 0:
                r = inc / incs[-2]
                beyond = inc * r / (1.0 - r) if r < 1.0 else INF
            else:
                beyond = inc
            tail = inc + beyond
            if tail <= tol * (total + beyond):
                return TailSearch(box, inside, tail, m)
        inside = total
        box, radius = outer, 2.0 * radius
    raise NumericalError(
        f"tail mass still not below {tol} after {MAX_DOUBLINGS} doublings; "
        f"f is likely not in L^{p}")


def tail_window(spec: FunctionSpec, alpha: float, tol: float = 1e-6) -> list[tuple[float, float]]:
    """Box W with int_{W^c} |f|^alpha <= tol * int |f|^alpha."""
    if not (0.0 < tol < 1.0):
        raise ConfigError("tol must lie in (0, 1)")
    return search_tail(spec, alpha, tol).box


def lp_norm(spec: FunctionSpec, p: float, window="auto", tol: float = 1e-9) -> float:
    """(int_window |f|^p)^{1/p}; ``window="auto"`` integrates over R^d with
    a geometric extrapolation of the tail."""
    if not p > 0:
        raise ConfigError("p must be positive")
    if spec.is_zero():
        return 0.0
    if isinstance(window, str):
        if window != "auto":
            raise ConfigError(f"unknown window {window!r}")
        if spec.dim == 1:
            # direct quadrature over the line copes with slowly decaying tails
            try:
                return box_abs_power(spec, spec.support(), p) ** (1.0 / p)
            except NumericalError:
                pass
        found = search_tail(spec, p, tol)
        return found.total ** (1.0 / p)
    box = [tuple(map(float, b)) for b in window]
    if len(box) != spec.dim:
        raise ConfigError("window dimension does not match spec dimension")
    return box_abs_power(spec, box, p) ** (1.0 / p)
