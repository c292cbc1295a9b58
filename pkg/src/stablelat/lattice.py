"""Lattice discretization of integrands into coefficient families.

Cell-average coefficients are normalized as

    entry(k) = h^{d(1/alpha - 1)} * int_{h(k + [0,1)^d)} f,

so that sum_k |entry(k)|^alpha equals the L^alpha mass of the piecewise
constant cell-average function f_h. The exact one-dimensional scheme uses
signed powers instead, entry(k) = (int_cell f^<alpha>)^<1/alpha>.

Slowly decaying integrands (LFSM kernels) may be discretized with a bounded
number of lattice cells plus a far field: geometrically growing blocks past
the lattice window and a terminal block out to infinity on each side, each
carrying the signed-power coefficient of its block. Nothing is truncated. The
far field is always driven by exact stable noise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import io
from .errors import ConfigError, NumericalError
from .function_model import FunctionSpec, box_abs_power, quad_pieces, search_tail

CELL_AVERAGE = "cell-average"
EXACT = "exact"
FAR_SUBDIVISIONS = 8
FAR_LEVELS = 20
DEFAULT_MAX_CELLS = 4096
_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


def signed_power(x, p: float):
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.abs(x) ** p


@dataclass(frozen=True)
class FarField:
    """Coarse blocks [lo, hi) beyond the lattice window with their coefficients."""

    lo: np.ndarray
    hi: np.ndarray
    values: np.ndarray
    ids: np.ndarray
    near_window: tuple[int, int]

    @property
    def size(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class CellCoefficients:
    h: float
    d: int
    alpha: float
    scheme: str
    indices: np.ndarray  # (n, d) lattice indices, sup-norm shell order
    values: np.ndarray  # (n,)
    window: tuple[tuple[int, int], ...]  # per axis [kmin, kmax)
    tail_mass_bound: float = 0.0
    trunc_tol: float = 0.0
    far: FarField | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64).reshape(-1, self.d))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __len__(self) -> int:
        return len(self.values)

    def nonzero(self) -> tuple[np.ndarray, np.ndarray]:
        keep = self.values != 0
        return self.indices[keep], self.values[keep]

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return {tuple(int(v) for v in k): float(c) for k, c in zip(self.indices, self.values)}

    def scaled(self, c: float) -> "CellCoefficients":
        far = None
        if self.far is not None:
            far = replace(self.far, values=c * self.far.values)
        return replace(self, values=c * self.values, far=far)


def shell_order(indices: np.ndarray) -> np.ndarray:
    """Permutation listing lattice indices shell by shell in the sup norm."""
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size == 0:
        return np.zeros(0, dtype=np.int64)
    shell = np.max(np.abs(indices), axis=1)
    keys = [indices[:, j] for j in range(indices.shape[1] - 1, -1, -1)] + [shell]
    return np.lexsort(keys)


def _grid_indices(window) -> np.ndarray:
    axes = [np.arange(lo, hi, dtype=np.int64) for lo, hi in window]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh]) if axes[0].size else np.zeros((0, len(window)), np.int64)


def _window_from_box(box, h) -> tuple[tuple[int, int], ...]:
    return tuple((int(math.floor(lo / h + 1e-12)), int(math.ceil(hi / h - 1e-12))) for lo, hi in box)


def _core_window(spec: FunctionSpec, h: float, max_cells: int) -> tuple[tuple[int, int], ...]:
    """max_cells lattice cells centred on the core of f, clipped to its support."""
    (lo, hi), = spec.core()
    (s_lo, s_hi), = spec.support()
    c0, c1 = int(math.floor(lo / h)), int(math.ceil(hi / h))
    size = max(max_cells, c1 - c0)
    n0 = c0 - (size - (c1 - c0)) // 2
    k_lo = int(math.floor(s_lo / h)) if math.isfinite(s_lo) else n0
    k_hi = int(math.ceil(s_hi / h)) if math.isfinite(s_hi) else n0 + size
    n0 = max(n0, k_lo)
    n1 = min(n0 + size, k_hi)
    n0 = max(k_lo, n1 - size)
    return ((n0, n1),)


def far_field_blocks(near_window: tuple[int, int], h: float, levels: int = FAR_LEVELS):
    """Canonical far-field partition of the line outside the lattice window.

    Level m < ``levels`` covers distances [W(2^m - 1), W(2^{m+1} - 1)) from
    the window edge, W being the window width, in FAR_SUBDIVISIONS equal
    blocks; a terminal block per side runs from the last level to infinity.
    """
    k0, k1 = near_window
    xl, xr = h * k0, h * k1
    width = xr - xl
    lo, hi, ids = [], [], []
    for m in range(levels):
        d0 = width * (2 ** m - 1)
        step = width * 2 ** m / FAR_SUBDIVISIONS
        for j in range(FAR_SUBDIVISIONS):
            a, b = d0 + j * step, d0 + (j + 1) * step
            bid = m * FAR_SUBDIVISIONS + j + 1
            lo += [xl - b, xr + a]
            hi += [xl - a, xr + b]
            ids += [-bid, bid]
    d_end = width * (2 ** levels - 1)
    bid = levels * FAR_SUBDIVISIONS + 1
    lo += [-math.inf, xr + d_end]
    hi += [xl - d_end, math.inf]
    ids += [-bid, bid]
    return np.array(lo), np.array(hi), np.array(ids, dtype=np.int64)


def _block_integrals(spec: FunctionSpec, a: float, b: float, alpha: float) -> tuple[float, float]:
    """(int f^<alpha>, int |f|^alpha) over [a, b)."""
    bps = [p for p in spec.breakpoints()[0] if a < p < b]
    if bps or not (math.isfinite(a) and math.isfinite(b)):
        sp = quad_pieces(lambda x: float(signed_power(spec(np.array([x])), alpha)[0]),
                         a, b, bps, epsabs=1e-14, epsrel=1e-10)
        ap = quad_pieces(lambda x: float(np.abs(spec(np.array([x])))[0] ** alpha),
                         a, b, bps, epsabs=1e-14, epsrel=1e-10)
        return sp, ap
    # smooth on the block: Gauss-Legendre
    half = 0.5 * (b - a)
    vals = np.asarray(spec(0.5 * (a + b) + half * _GL_X), dtype=float)
    return half * float(signed_power(vals, alpha) @ _GL_W), half * float(np.abs(vals) ** alpha @ _GL_W)


def _far_field(spec: FunctionSpec, near_window, h, alpha) -> FarField:
    """Signed-power coefficients of f on every block of the canonical partition.

    The partition reaches infinity, so no mass is dropped; it depends on the
    lattice window only, so functionals sharing a window share their blocks.
    """
    (s_lo, s_hi), = spec.support()
    lo_all, hi_all, id_all = far_field_blocks(near_window[0], h)
    values = []
    for a, b in zip(lo_all, hi_all):
        a, b = max(a, s_lo), min(b, s_hi)
        if b <= a:
            values.append(0.0)
            continue
        sp, _ = _block_integrals(spec, a, b, alpha)
        values.append(float(signed_power(sp, 1.0 / alpha)))
    return FarField(lo_all, hi_all, np.array(values), id_all, tuple(near_window[0]))


def _discretize(spec: FunctionSpec, h: float, alpha: float, trunc_tol: float, scheme: str,
                max_cells: int | None, window=None) -> CellCoefficients:
    if not h > 0:
        raise ConfigError("h must be positive")
    if not (0.0 < trunc_tol < 1.0):
        raise ConfigError("trunc_tol must lie in (0, 1)")
    if not (0.0 < alpha <= 2.0):
        raise ConfigError("alpha must lie in (0, 2]")
    d = spec.dim
    meta = {"spec": spec.to_dict()}
    if spec.is_zero():
        return CellCoefficients(h, d, alpha, scheme, np.zeros((0, d)), np.zeros(0),
                                tuple((0, 0) for _ in range(d)), 0.0, trunc_tol, meta=meta)
    if (max_cells is not None or window is not None) and d != 1:
        raise ConfigError("far-field discretization is implemented for d = 1")
    far_mode = window is not None
    tail = 0.0
    if window is None:
        finite = all(math.isfinite(v) for box in spec.support() for v in box)
        if max_cells is not None and not finite:
            window, far_mode = _core_window(spec, h, max_cells), True
        else:
            try:
                found = search_tail(spec, alpha, trunc_tol)
            except NumericalError:
                # slowly decaying tails: a capped lattice and the far field instead,
                # provided the alpha-th power is integrable at all
                if d != 1 or finite:
                    raise
                box_abs_power(spec, spec.support(), alpha)
                found = None
            if found is None:
                window, far_mode = _core_window(spec, h, max_cells or DEFAULT_MAX_CELLS), True
            else:
                window, tail = _window_from_box(found.box, h), found.tail
                if max_cells is not None and window[0][1] - window[0][0] > max_cells:
                    window, far_mode = _core_window(spec, h, max_cells), True
    window = tuple((int(lo), int(hi)) for lo, hi in window)
    edges = [h * np.arange(lo, hi + 1, dtype=float) for lo, hi in window]
    if scheme == CELL_AVERAGE:
        vals = spec.cell_integrals(edges) * h ** (d * (1.0 / alpha - 1.0))
    else:
        vals = signed_power(spec.signed_power_integrals(edges, alpha), 1.0 / alpha)
    idx = _grid_indices(window)
    vals = np.asarray(vals).reshape(-1)
    order = shell_order(idx)
    far = None
    if far_mode:
        far, tail = _far_field(spec, window, h, alpha), 0.0
    return CellCoefficients(h, d, alpha, scheme, idx[order], vals[order], window, tail,
                            trunc_tol, far, meta)


def discretize(spec: FunctionSpec, h: float, alpha: float, trunc_tol: float = 1e-6,
               max_cells: int | None = None, window=None) -> CellCoefficients:
    """Cell-average coefficients over the alpha-mass tail window of f.

    With ``max_cells`` (d = 1) the lattice window is capped and the rest of
    the line is carried by a far field of signed-power block coefficients
    reaching to infinity; an explicit lattice ``window`` ((k0, k1),) always
    comes with a far field. Tails too slow for the window search also fall
    back to a capped lattice with a far field.
    """
    return _discretize(spec, h, alpha, trunc_tol, CELL_AVERAGE, max_cells, window)


def discretize_exact(spec: FunctionSpec, h: float, alpha: float, trunc_tol: float = 1e-6,
                     max_cells: int | None = None, window=None) -> CellCoefficients:
    """Signed-power coefficients (int_cell f^<alpha>)^<1/alpha>.

    For f of constant sign on each cell, sum |u_k|^alpha is the alpha-mass of
    f over the window and exact stable noise reproduces the law of the
    stable integral exactly.
    """
    return _discretize(spec, h, alpha, trunc_tol, EXACT, max_cells, window)


def from_values(values, alpha: float, h: float = 1.0, start: int = 0) -> CellCoefficients:
    """Wrap an explicit one-dimensional coefficient sequence u_start, u_start+1, ..."""
    values = np.asarray(values, dtype=float).ravel()
    idx = np.arange(start, start + len(values), dtype=np.int64)[:, None]
    order = shell_order(idx)
    return CellCoefficients(h, 1, alpha, CELL_AVERAGE, idx[order], values[order],
                            ((start, start + len(values)),))


def norms(coeffs: CellCoefficients) -> tuple[float, float]:
    """(l^alpha norm, l^infinity norm) of the entries.

    The l^alpha norm includes far-field blocks; the sup norm covers the
    lattice entries, which are the ones driven by the noise model.
    """
    mass = float(np.sum(np.abs(coeffs.values) ** coeffs.alpha))
    if coeffs.far is not None:
        mass += float(np.sum(np.abs(coeffs.far.values) ** coeffs.alpha))
    l_inf = float(np.max(np.abs(coeffs.values))) if len(coeffs) else 0.0
    return mass ** (1.0 / coeffs.alpha), l_inf


def cell_averages(spec: FunctionSpec, h: float, window) -> np.ndarray:
    edges = [h * np.arange(lo, hi + 1, dtype=float) for lo, hi in window]
    return spec.cell_integrals(edges) / h ** spec.dim


def piecewise_error(spec: FunctionSpec, h: float, alpha: float, trunc_tol: float = 1e-10) -> float:
    """||f_h - f||_{L^alpha} with f_h the cell-average step function (d = 1)."""
    if spec.dim != 1:
        raise ConfigError("piecewise_error is implemented for d = 1")
    if not 1.0 <= alpha <= 2.0:
        warnings.warn(f"alpha = {alpha} lies outside [1, 2], where convergence of f_h is not "
                      "guaranteed", RuntimeWarning, stacklevel=2)
    if spec.is_zero():
        return 0.0
    box = search_tail(spec, alpha, trunc_tol).box
    (k0, k1), = _window_from_box(box, h)
    edges = h * np.arange(k0, k1 + 1, dtype=float)
    avg = spec.cell_integrals([edges]) / h
    bps = spec.breakpoints()[0]
    if spec.piecewise_constant:
        pts = np.asarray(bps, dtype=float)
        refined = np.union1d(edges, pts[(pts > edges[0]) & (pts < edges[-1])])
        owner = np.searchsorted(edges, refined[:-1], side="right") - 1
        mids = 0.5 * (refined[1:] + refined[:-1])
        mass = float(np.sum(np.abs(spec(mids) - avg[owner]) ** alpha * np.diff(refined)))
        return mass ** (1.0 / alpha)
    mass = 0.0
    for i in range(len(avg)):
        c = avg[i]
        mass += quad_pieces(lambda x: abs(float(spec(np.array([x]))[0]) - c) ** alpha,
                            edges[i], edges[i + 1], bps, epsabs=1e-13 * h, epsrel=1e-9)
    return mass ** (1.0 / alpha)


# --------------------------------------------------------------------------
# export


def write_coefficients(coeffs: CellCoefficients, path) -> None:
    header = {
        "kind": "cell_coefficients", "h": coeffs.h, "d": coeffs.d, "alpha": coeffs.alpha,
        "scheme": coeffs.scheme, "window": [list(w) for w in coeffs.window],
        "tail_mass_bound": coeffs.tail_mass_bound, "trunc_tol": coeffs.trunc_tol,
        "far": None if coeffs.far is None else {
            "near_window": list(coeffs.far.near_window),
            "blocks": [[float(a), float(b), float(v), int(i)] for a, b, v, i in
                       zip(coeffs.far.lo, coeffs.far.hi, coeffs.far.values, coeffs.far.ids)]},
    }
    names = [f"k{j + 1}" for j in range(coeffs.d)] + ["coefficient"]
    cols = [coeffs.indices[:, j] for j in range(coeffs.d)] + [coeffs.values]
    io.write_table(path, header, names, cols)


def read_coefficients(path) -> CellCoefficients:
    header, names, cols = io.read_table(path)
    if header.get("kind") != "cell_coefficients":
        raise ConfigError(f"{path} is not a coefficient file")
    d = int(header["d"])
    idx = np.column_stack([cols[j].astype(np.int64) for j in range(d)]) if len(cols[0]) \
        else np.zeros((0, d), np.int64)
    far = None
    if header.get("far"):
        blocks = np.array(header["far"]["blocks"], dtype=float).reshape(-1, 4)
        far = FarField(blocks[:, 0], blocks[:, 1], blocks[:, 2], blocks[:, 3].astype(np.int64),
                       tuple(header["far"]["near_window"]))
    return CellCoefficients(float(header["h"]), d, float(header["alpha"]), header["scheme"],
                            idx, cols[d], tuple(tuple(w) for w in header["window"]),
                            float(header["tail_mass_bound"]), float(header["trunc_tol"]), far)
