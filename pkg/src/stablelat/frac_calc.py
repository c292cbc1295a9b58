"""Fractional integro-differentiation on the line.

Conventions: the power kernel w_{a,b}(x) = a x_-^{-beta} + b x_+^{-beta}
carries no Gamma factor; Riemann-Liouville integrals and derivatives carry
1/Gamma(delta) and 1/Gamma(1 - beta). The derivative of either side is the
plain d/dx of the corresponding integral (no sign flip on the minus side).

Singular integrals are split at the singular point; the panel touching it is
integrated against the exact algebraic weight |x - y|^p (QUADPACK QAWS).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

from .errors import ConfigError, NumericalError, UnsupportedInputError

INF = math.inf
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)
SMOOTH_PANEL = 0.5


@dataclass(frozen=True)
class FracKernel:
    beta: float
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise ConfigError(f"beta must lie in (0, 1), got {self.beta}")
        if self.a < 0 or self.b < 0:
            raise ConfigError("kernel weights must be non-negative")
        if self.a == 0 and self.b == 0:
            raise ConfigError("kernel weights (a, b) must not both vanish")


@dataclass(frozen=True)
class GridFunction:
    origin: float
    spacing: float
    values: np.ndarray

    def __post_init__(self):
        if not self.spacing > 0:
            raise ConfigError("grid spacing must be positive")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @property
    def x(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(len(self.values))

    @classmethod
    def template(cls, start: float, stop: float, num: int) -> "GridFunction":
        spacing = (stop - start) / (num - 1) if num > 1 else 1.0
        return cls(start, spacing, np.zeros(num))


def kernel_eval(kernel: FracKernel, x: float) -> float:
    if x == 0:
        raise ConfigError("w_{a,b} is singular at 0; integrate across it instead")
    if x < 0:
        return kernel.a * (-x) ** -kernel.beta
    return kernel.b * x ** -kernel.beta


# --------------------------------------------------------------------------
# one-sided weighted integrals


def _quad(fun, a, b, **kw) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(fun, a, b, limit=400, **kw)
    if not np.isfinite(val):
        raise NumericalError(f"non-finite quadrature on [{a}, {b}]")
    if err > 1e-6 * max(1.0, abs(val)):
        raise NumericalError(f"quadrature on [{a}, {b}] did not converge (error {err:.3g})")
    return val


def _scalar(fun: Callable) -> Callable[[float], float]:
    return lambda y: float(np.ravel(fun(np.array([y])))[0])


def one_sided(fun: Callable, support: tuple[float, float], breakpoints, x: float,
              power: float, side: str, epsabs: float = 1e-11) -> float:
    """int fun(y) |x - y|^power dy over y < x (side '+') or y > x (side '-').

    power > -1. ``support`` bounds where fun may be non-zero; breakpoints mark
    kinks or jumps of fun.
    """
    if power <= -1:
        raise ConfigError("power must exceed -1 for integrability")
    f = _scalar(fun)
    lo, hi = support
    if side == "+":
        end = min(hi, x)
        if end <= lo:
            return 0.0
        # panels of (-inf or lo, end], singular weight only if end == x
        cuts = sorted({p for p in breakpoints if lo < p < end})
        first = cuts[-1] if cuts else lo
        if not np.isfinite(first):
            first = end - 1.0
            cuts = [first]
        # widths doubling away from ``first`` resolve mass sitting near it even
        # when x is far away; the last panel carries the singular weight
        marks = [first]
        step = 1.0
        while marks[-1] + step < end - 0.5 * step:
            marks.append(first + step)
            step *= 2.0
        total = 0.0
        for a, b in zip(marks[:-1], marks[1:]):
            total += _quad(lambda y: f(y) * (x - y) ** power, a, b, epsabs=epsabs, epsrel=1e-11)
        a = marks[-1]
        if end > a:
            if end == x:
                total += _quad(f, a, end, weight="alg", wvar=(0.0, power), epsabs=epsabs,
                               epsrel=1e-11)
            else:
                total += _quad(lambda y: f(y) * (x - y) ** power, a, end, epsabs=epsabs,
                               epsrel=1e-11)
        edges = [lo, *cuts]
        for a, b in zip(edges[:-1], edges[1:]):
            if b > a:
                total += _quad(lambda y: f(y) * (x - y) ** power, a, b, epsabs=epsabs,
                               epsrel=1e-11)
        return total
    if side == "-":
        mirrored = lambda y: fun(-np.asarray(y))  # noqa: E731
        return one_sided(mirrored, (-hi, -lo), [-p for p in breakpoints], -x, power, "+",
                         epsabs)
    raise ConfigError(f"side must be '+' or '-', got {side!r}")


def _support_and_breaks(spec) -> tuple[tuple[float, float], list[float]]:
    if spec.dim != 1:
        raise UnsupportedInputError("fractional calculus is implemented on the line only")
    return spec.support()[0], list(spec.breakpoints()[0])


def _support_and_cuts(spec) -> tuple[tuple[float, float], list[float]]:
    """Support and quadrature split points: breakpoints plus the core edges and
    centre, so that panels far from x still resolve where the mass sits."""
    support, bps = _support_and_breaks(spec)
    (c0, c1), = spec.core()
    hints = [v for v in (c0, 0.5 * (c0 + c1), c1) if math.isfinite(v)]
    return support, sorted({*bps, *hints})


def convolve_point(fun: Callable, spec, kernel: FracKernel, x: float) -> float:
    """(fun * w_{a,b})(x); ``spec`` supplies support and breakpoints of fun."""
    if spec.is_zero():
        return 0.0
    support, bps = _support_and_cuts(spec)
    total = 0.0
    if kernel.b:
        # b x_+^{-beta}: y < x
        total += kernel.b * one_sided(fun, support, bps, x, -kernel.beta, "+")
    if kernel.a:
        total += kernel.a * one_sided(fun, support, bps, x, -kernel.beta, "-")
    return total


def convolve_smooth_values(fun: Callable, spec, kernel: FracKernel, xs) -> np.ndarray:
    """(fun * w)(x) at many points for smooth ``fun``.

    Points at least two panel widths clear of the effective support see an
    analytic weight, so composite Gauss-Legendre over the support is exact to
    rounding; the remaining points use adaptive quadrature.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    lo, hi = effective_support(spec)
    n_pan = max(1, int(math.ceil((hi - lo) / SMOOTH_PANEL)))
    pe = np.linspace(lo, hi, n_pan + 1)
    mid, half = 0.5 * (pe[1:] + pe[:-1]), 0.5 * np.diff(pe)
    nodes = (mid[:, None] + half[:, None] * _GL_X).ravel()
    weights = (half[:, None] * _GL_W).ravel() * np.ravel(fun(nodes))
    gap = 2.0 * (pe[1] - pe[0])
    right, left = xs >= hi + gap, xs <= lo - gap
    out = np.empty_like(xs)
    for mask, sign, coef in ((right, 1.0, kernel.b), (left, -1.0, kernel.a)):
        for i in np.flatnonzero(mask):
            out[i] = coef * float(np.dot(weights, (sign * (xs[i] - nodes)) ** -kernel.beta)) \
                if coef else 0.0
    for i in np.flatnonzero(~(right | left)):
        out[i] = convolve_point(fun, spec, kernel, float(xs[i]))
    return out


def _constant_pieces(spec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Decompose a piecewise-constant compactly supported spec into intervals."""
    (lo, hi), bps = _support_and_breaks(spec)
    pts = np.array(sorted(set(bps)))
    if pts.size < 2:
        return np.zeros(0), np.zeros(0), np.zeros(0)
    mids = 0.5 * (pts[1:] + pts[:-1])
    vals = spec(mids)
    keep = vals != 0
    return pts[:-1][keep], pts[1:][keep], vals[keep]


def _wint(s: np.ndarray, kernel: FracKernel) -> np.ndarray:
    # int_0^s w(u) du
    e = 1.0 - kernel.beta
    return (kernel.b * np.clip(s, 0, None) ** e - kernel.a * np.clip(-s, 0, None) ** e) / e


def _wint_diff(s1: np.ndarray, s2: np.ndarray, kernel: FracKernel) -> np.ndarray:
    """_wint(s1) - _wint(s2) without cancellation when s1, s2 share a sign."""
    e = 1.0 - kernel.beta
    out = _wint(s1, kernel) - _wint(s2, kernel)
    pos = (s1 > 0) & (s2 > 0)
    if np.any(pos):
        out[pos] = kernel.b * _powdiff(s1[pos], s2[pos], e) / e
    neg = (s1 < 0) & (s2 < 0)
    if np.any(neg):
        out[neg] = -kernel.a * _powdiff(-s1[neg], -s2[neg], e) / e
    return out


def _wwint(s: np.ndarray, kernel: FracKernel) -> np.ndarray:
    # int_0^s int_0^r w(u) du dr
    e = 1.0 - kernel.beta
    return (kernel.b * np.clip(s, 0, None) ** (e + 1) + kernel.a * np.clip(-s, 0, None) ** (e + 1)) \
        / (e * (e + 1))


def convolve_values(spec, kernel: FracKernel, xs: np.ndarray) -> np.ndarray:
    """(f * w)(x) at many points; closed form for piecewise-constant f."""
    xs = np.asarray(xs, dtype=float)
    if spec.is_zero():
        return np.zeros_like(xs)
    if spec.piecewise_constant:
        ls, rs, vs = _constant_pieces(spec)
        out = np.zeros_like(xs)
        for l, r, v in zip(ls, rs, vs):
            out += v * _wint_diff(xs - l, xs - r, kernel)
        return out
    if spec.smooth:
        return convolve_smooth_values(spec, spec, kernel, xs)
    return np.array([convolve_point(spec, spec, kernel, float(x)) for x in xs])


def convolution_antiderivative(spec, kernel: FracKernel, us: np.ndarray) -> np.ndarray:
    """G(u) = int f(y) W(u - y) dy with W' = w, so G' = f * w."""
    us = np.asarray(us, dtype=float)
    if spec.is_zero():
        return np.zeros_like(us)
    if spec.piecewise_constant:
        ls, rs, vs = _constant_pieces(spec)
        out = np.zeros_like(us)
        for l, r, v in zip(ls, rs, vs):
            out += v * (_wwint(us - l, kernel) - _wwint(us - r, kernel))
        return out
    from .function_model import quad_pieces

    (lo, hi), bps = _support_and_cuts(spec)
    f = _scalar(spec)
    out = np.empty_like(us)
    for i, u in enumerate(us):
        pts = sorted({*bps, u})
        g = lambda y, u=u: f(y) * float(_wint(np.array(u - y), kernel))  # noqa: E731
        out[i] = quad_pieces(g, lo, hi, pts, epsabs=1e-13, epsrel=1e-12)
    return out


def indicator_convolution_closed_form(t: float, kernel: FracKernel, x) -> np.ndarray:
    """(1_[0,t] * w_{a,b})(x) = (1/(1-beta)) [a((t-x)_+^{1-beta} - (-x)_+^{1-beta})
    + b((-x)_-^{1-beta} - (t-x)_-^{1-beta})]."""
    x = np.asarray(x, dtype=float)
    e = 1.0 - kernel.beta
    pos = lambda v: np.clip(v, 0, None) ** e  # noqa: E731
    neg = lambda v: np.clip(-v, 0, None) ** e  # noqa: E731
    return (kernel.a * (pos(t - x) - pos(-x)) + kernel.b * (neg(-x) - neg(t - x))) / e


def convolve_kernel(spec, kernel: FracKernel, grid: GridFunction) -> GridFunction:
    """values[i] = int f(y) w(x_i - y) dy, numerically at every grid point."""
    vals = np.empty(len(grid.values))
    for i, x in enumerate(grid.x):
        try:
            vals[i] = convolve_point(spec, spec, kernel, float(x))
        except NumericalError as exc:
            raise NumericalError(f"convolution failed at x = {x}: {exc}") from exc
    return GridFunction(grid.origin, grid.spacing, vals)


# --------------------------------------------------------------------------
# Riemann-Liouville and Marchaud


def _side(side: str) -> str:
    if side not in ("+", "-"):
        raise ConfigError(f"side must be '+' or '-', got {side!r}")
    return side


def rl_integral_fn(fun: Callable, spec, delta: float, side: str, x: float) -> float:
    support, bps = _support_and_cuts(spec)
    return one_sided(fun, support, bps, x, delta - 1.0, _side(side)) / special.gamma(delta)


def effective_support(spec, tol: float = 1e-15) -> tuple[float, float]:
    """Support bounds, with infinite ends replaced by an L^1 tail cut at ``tol``."""
    if hasattr(spec, "effective_support"):
        return spec.effective_support()
    lo, hi = spec.support()[0]
    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi
    from .function_model import tail_window

    (blo, bhi), = tail_window(spec, 1.0, tol)
    return (lo if math.isfinite(lo) else blo), (hi if math.isfinite(hi) else bhi)


def one_sided_values(fun: Callable, bounds: tuple[float, float], xs, power: float, side: str,
                     epsabs: float = 1e-13) -> np.ndarray:
    """Vectorized one_sided for smooth ``fun`` on a whole array of points.

    With s = x - y and s = u^{1/(power+1)} the weight disappears:
    int_0^S g(x - s) s^power ds = (1/(power+1)) int_0^{S^(power+1)} g(x - u^{1/(power+1)}) du,
    one adaptive vector quadrature for all points.
    """
    if power <= -1:
        raise ConfigError("power must exceed -1 for integrability")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if side == "-":
        mirrored = lambda y: fun(-np.asarray(y))  # noqa: E731
        return one_sided_values(mirrored, (-bounds[1], -bounds[0]), -xs, power, "+", epsabs)
    if side != "+":
        raise ConfigError(f"side must be '+' or '-', got {side!r}")
    lo, hi = bounds
    if not math.isfinite(lo):
        raise ConfigError("one_sided_values needs a finite lower bound")
    q = power + 1.0
    span = float(np.max(xs)) - lo
    if span <= 0:
        return np.zeros_like(xs)

    def integrand(u):
        y = xs - u ** (1.0 / q)
        out = np.zeros_like(xs)
        ok = (y >= lo) & (y <= hi)
        if np.any(ok):
            out[ok] = np.ravel(fun(y[ok]))
        return out

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad_vec(integrand, 0.0, span ** q, epsabs=epsabs, epsrel=1e-11,
                                      norm="max", limit=2000)
    if not np.all(np.isfinite(val)) or err > 1e-7 * max(1.0, float(np.max(np.abs(val)))):
        raise NumericalError(f"vector quadrature did not converge (error {err:.3g})")
    return val / q


def _rl_integral_pieces(spec, delta: float, side: str, xs: np.ndarray) -> np.ndarray:
    # sum_pieces v ((x - l)_+^delta - (x - r)_+^delta) / Gamma(delta + 1), mirrored for '-'
    ls, rs, vs = _constant_pieces(spec)
    out = np.zeros_like(xs)
    for l, r, v in zip(ls, rs, vs):
        if side == "+":
            out += v * (np.clip(xs - l, 0, None) ** delta - np.clip(xs - r, 0, None) ** delta)
        else:
            out += v * (np.clip(r - xs, 0, None) ** delta - np.clip(l - xs, 0, None) ** delta)
    return out / special.gamma(delta + 1.0)


def rl_integral_values(spec, delta: float, side: str, xs) -> np.ndarray:
    """(I^delta_side f) on an array of points; closed form for piecewise-constant
    f, vectorized quadrature for smooth f."""
    if not (0.0 < delta <= 1.0):
        raise ConfigError(f"delta must lie in (0, 1], got {delta}")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if spec.is_zero():
        return np.zeros_like(xs)
    if spec.piecewise_constant:
        return _rl_integral_pieces(spec, delta, _side(side), xs)
    if not spec.smooth:
        return np.array([rl_integral(spec, delta, side, x) for x in xs])
    vals = one_sided_values(spec, effective_support(spec), xs, delta - 1.0, _side(side))
    return vals / special.gamma(delta)


def rl_derivative_values(spec, beta: float, side: str, xs) -> np.ndarray:
    """(D^beta_side f) on an array of points via the f' form."""
    if not (0.0 < beta < 1.0):
        raise ConfigError(f"beta must lie in (0, 1), got {beta}")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if spec.is_zero():
        return np.zeros_like(xs)
    if not spec.smooth:
        raise UnsupportedInputError(f"{type(spec).__name__} is not C^1; derivative undefined")
    vals = one_sided_values(spec.derivative(), effective_support(spec), xs, -beta, _side(side))
    return vals / special.gamma(1.0 - beta)


def rl_integral(spec, delta: float, side: str, x: float) -> float:
    """(I^delta_{side} f)(x); delta = 1 gives the running integral."""
    if not (0.0 < delta <= 1.0):
        raise ConfigError(f"delta must lie in (0, 1], got {delta}")
    if spec.is_zero():
        return 0.0
    if spec.piecewise_constant:
        return float(_rl_integral_pieces(spec, delta, _side(side), np.array([float(x)]))[0])
    return rl_integral_fn(spec, spec, delta, side, x)


def rl_derivative(spec, beta: float, side: str, x: float) -> float:
    """(D^beta_{side} f)(x) = (1/Gamma(1-beta)) int f'(t) (x - t)_{side}^{-beta} dt."""
    if not (0.0 < beta < 1.0):
        raise ConfigError(f"beta must lie in (0, 1), got {beta}")
    if spec.is_zero():
        return 0.0
    if not spec.smooth:
        raise UnsupportedInputError(f"{type(spec).__name__} is not C^1; derivative undefined")
    support, bps = _support_and_cuts(spec)
    val = one_sided(spec.derivative(), support, bps, x, -beta, _side(side))
    return val / special.gamma(1.0 - beta)


def marchaud_derivative(spec, beta: float, x: float, split: float = 0.25) -> float:
    """(beta/Gamma(1-beta)) int_0^inf (f(x) - f(x - s)) s^{-1-beta} ds."""
    if not (0.0 < beta < 1.0):
        raise ConfigError(f"beta must lie in (0, 1), got {beta}")
    if spec.is_zero():
        return 0.0
    (lo, hi), bps = _support_and_breaks(spec)
    f = _scalar(spec)
    fx = f(x)
    if spec.smooth:
        # (f(x) - f(x-s)) / s = int_0^1 f'(x - s v) dv, free of cancellation near s = 0
        fp = spec.derivative()
        nodes = 0.5 * (_GL_X + 1.0)
        weights = 0.5 * _GL_W

        def slope(s):
            return float(np.dot(weights, fp(x - s * nodes)))

        near = _quad(slope, 0.0, split, weight="alg", wvar=(-beta, 0.0), epsabs=1e-13,
                     epsrel=1e-12)
    elif spec.piecewise_constant:
        left = [p for p in bps if p <= x]
        gap = x - max(left) if left else INF
        if gap == 0:
            raise NumericalError("Marchaud derivative of a jump function at its jump")
        split = min(split, gap)
        near = 0.0
    else:
        raise UnsupportedInputError("Marchaud derivative needs a smooth or piecewise-constant f")
    # int_split^inf f(x) s^{-1-beta} ds in closed form
    far_const = fx * split ** -beta / beta
    # int_split^inf f(x - s) s^{-1-beta} ds = int_{-inf}^{x - split} f(y) (x - y)^{-1-beta} dy
    upper = min(hi, x - split)
    far_var = 0.0
    if upper > lo:
        from .function_model import quad_pieces

        far_var = quad_pieces(lambda y: f(y) * (x - y) ** (-1.0 - beta), lo, upper,
                              _support_and_cuts(spec)[1],
                              epsabs=1e-13, epsrel=1e-12)
    return beta / special.gamma(1.0 - beta) * (near + far_const - far_var)


# --------------------------------------------------------------------------
# LFSM kernel


def check_lfsm_params(H: float, alpha: float, a: float, b: float) -> None:
    if not (1.0 < alpha <= 2.0):
        raise ConfigError(f"LFSM needs alpha in (1, 2], got {alpha}")
    if not (0.0 < H < 1.0):
        raise ConfigError(f"Hurst index must lie in (0, 1), got {H}")
    if math.isclose(H, 1.0 / alpha, rel_tol=0, abs_tol=1e-12):
        raise ConfigError("H = 1/alpha is excluded (the kernel degenerates)")
    if a < 0 or b < 0 or (a == 0 and b == 0):
        raise ConfigError("need a, b >= 0 with (a, b) != (0, 0)")


def _powdiff(p: np.ndarray, q: np.ndarray, g: float) -> np.ndarray:
    """p^g - q^g for p >= 0, q > 0 without cancellation."""
    with np.errstate(divide="ignore"):
        return q ** g * np.expm1(g * np.log1p((p - q) / q))


def _pos_part_term(t: float, x: np.ndarray, g: float) -> np.ndarray:
    # (t - x)_+^g - (-x)_+^g, singular values flagged as +-inf
    p = t - x
    q = -x
    out = np.zeros_like(x)
    both = (p > 0) & (q > 0)
    out[both] = _powdiff(p[both], q[both], g)
    only_p = (p > 0) & (q <= 0)
    out[only_p] = p[only_p] ** g
    only_q = (q > 0) & (p <= 0)
    out[only_q] = -(q[only_q] ** g)
    if g < 0:
        out[(p == 0)] = np.inf
        out[(q == 0)] = -np.inf
        out[(p == 0) & (q == 0)] = 0.0
    return out


def lfsm_kernel_eval(t: float, x, H: float, alpha: float, a: float = 1.0, b: float = 0.0):
    """f_t^{a,b}(x) = a((t-x)_+^g - (-x)_+^g) + b((t-x)_-^g - (-x)_-^g), g = H - 1/alpha."""
    check_lfsm_params(H, alpha, a, b)
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    g = H - 1.0 / alpha
    out = np.zeros_like(x)
    if t != 0.0:
        if a:
            out = out + a * _pos_part_term(t, x, g)
        if b:
            # (t-x)_- = (x - t)_+ = ((-t) - (-x))_+ : mirror of the a-part
            out = out + b * _pos_part_term(-t, -x, g)
    return float(out[0]) if scalar else out


def _pos_part_cells(t: float, e: np.ndarray, g: float) -> np.ndarray:
    """Cell integrals of (t - x)_+^g - (-x)_+^g over consecutive edges."""
    g1 = g + 1.0
    e0, e1 = e[:-1], e[1:]
    h = e1 - e0
    prim = lambda v: np.clip(v, 0, None) ** g1 / g1  # noqa: E731
    near = (prim(t - e0) - prim(t - e1)) - (prim(-e0) - prim(-e1))
    # far from both singular points the integrand is analytic: Gauss-Legendre
    dist = np.minimum(np.minimum(np.abs(e0), np.abs(e1)), np.minimum(np.abs(e0 - t), np.abs(e1 - t)))
    inside = ((e0 < 0) & (e1 > 0)) | ((e0 < t) & (e1 > t))
    far = (dist > 4 * h) & ~inside
    if np.any(far):
        mids = 0.5 * (e0[far] + e1[far])
        half = 0.5 * h[far]
        xs = mids[:, None] + half[:, None] * _GL_X[None, :]
        vals = _pos_part_term(t, xs.ravel(), g).reshape(xs.shape)
        near[far] = half * (vals @ _GL_W)
    return near


def lfsm_kernel_cell_integrals(t, edges, H, alpha, a=1.0, b=0.0):
    e = np.asarray(edges, dtype=float)
    if not np.all(np.isfinite(e)):
        return None
    g = H - 1.0 / alpha
    out = np.zeros(len(e) - 1)
    if t == 0.0:
        return out
    if a:
        out += a * _pos_part_cells(t, e, g)
    if b:
        # mirror: int_{e0}^{e1} F(-x) dx = int_{-e1}^{-e0} F(y) dy
        out += b * _pos_part_cells(-t, -e[::-1], g)[::-1]
    return out
