"""Monte-Carlo sampling of discretized stable integrals.

A replicate is one realization of the i.i.d. noise field on the lattice. The
field is keyed by lattice site, so any collection of functionals sampled with
the same seed sees the same noise, and the integral of a linear combination
is the same combination of integrals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import io
from ._rng import KIND_STABLE, SeedSpec, field_dot, field_values, site_ids
from .errors import ConfigError
from .lattice import CellCoefficients, shell_order
from .stable_core import NoiseModel, noise_kind


@dataclass(frozen=True)
class SampleBatch:
    values: np.ndarray  # (n_replicates, n_functionals)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v.reshape(v.shape[0], -1) if v.ndim < 2 else v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def column(self, j: int = 0) -> np.ndarray:
        return self.values[:, j]

    def write(self, path) -> None:
        labels = self.meta.get("labels") or [f"x{j}" for j in range(self.values.shape[1])]
        io.write_table(path, {"kind": "sample_batch", **self.meta}, list(labels),
                       [self.values[:, j] for j in range(self.values.shape[1])])

    @classmethod
    def read(cls, path) -> "SampleBatch":
        header, names, cols = io.read_table(path)
        if header.pop("kind", None) not in ("sample_batch", "lfsm_path"):
            raise ConfigError(f"{path} is not a sample file")
        values = np.column_stack(cols) if cols and len(cols[0]) else np.zeros((0, len(names)))
        return cls(values, header)


def _check_alpha(coeffs: CellCoefficients, noise: NoiseModel) -> None:
    if abs(coeffs.alpha - noise.alpha) > 1e-12:
        raise ConfigError(f"noise alpha {noise.alpha} does not match coefficient alpha {coeffs.alpha}")


def _meta(coeffs: CellCoefficients, noise: NoiseModel, seed: SeedSpec, labels) -> dict:
    return {"alpha": coeffs.alpha, "h": coeffs.h, "d": coeffs.d, "noise": noise.describe(),
            "seed": seed.as_dict(),
            "labels": list(labels)}


def _far_seed(seed: SeedSpec) -> SeedSpec:
    return seed.child(0)


def _check_far(coeff_list: list[CellCoefficients]) -> tuple[tuple[int, int] | None, dict]:
    """Far-field blocks of all functionals must come from one partition."""
    with_far = [c for c in coeff_list if c.far is not None]
    if not with_far:
        return None, {}
    near = with_far[0].far.near_window
    for c in with_far:
        if c.far.near_window != near:
            raise ConfigError("far-field partitions differ; use a common lattice window")
    for c in coeff_list:
        if c.far is None and len(c) and (c.indices.min() < near[0] or c.indices.max() >= near[1]):
            raise ConfigError("lattice cells overlap another functional's far field")
    blocks: dict[int, tuple[float, float]] = {}
    for c in with_far:
        for i, a, b in zip(c.far.ids, c.far.lo, c.far.hi):
            blocks.setdefault(int(i), (a, b))
    return near, blocks


def sample_fdd(coeff_list: list[CellCoefficients], noise: NoiseModel, n: int,
               seed: SeedSpec, labels=None) -> SampleBatch:
    """Joint samples of several functionals on one noise field per replicate."""
    if not coeff_list:
        raise ConfigError("need at least one coefficient family")
    if n < 0:
        raise ConfigError("n must be non-negative")
    first = coeff_list[0]
    for c in coeff_list[1:]:
        if (c.h, c.d, c.alpha) != (first.h, first.d, first.alpha):
            raise ConfigError("coefficient families live on different grids")
    _check_alpha(first, noise)
    labels = labels or [f"x{j}" for j in range(len(coeff_list))]
    kind, alpha, tail_k = noise_kind(noise)
    nf = len(coeff_list)

    parts = [c.nonzero() for c in coeff_list]
    all_idx = np.concatenate([p[0] for p in parts]) if parts else np.zeros((0, first.d))
    out = np.zeros((n, nf))
    if len(all_idx):
        uniq = np.unique(all_idx, axis=0)
        uniq = uniq[shell_order(uniq)]
        sites = site_ids(uniq)
        pos = {int(s): i for i, s in enumerate(sites)}
        mat = np.zeros((len(sites), nf))
        for j, (idx, vals) in enumerate(parts):
            rows = [pos[int(s)] for s in site_ids(idx)]
            mat[rows, j] = vals
        out += field_dot(seed, n, sites, mat, kind, alpha, tail_k)

    _, blocks = _check_far(coeff_list)
    if blocks:
        ids = np.array(sorted(blocks, key=lambda i: (abs(i), i)), dtype=np.int64)
        pos = {int(i): r for r, i in enumerate(ids)}
        mat = np.zeros((len(ids), nf))
        for j, c in enumerate(coeff_list):
            if c.far is not None:
                mat[[pos[int(i)] for i in c.far.ids], j] = c.far.values
        out += field_dot(_far_seed(seed), n, ids, mat, KIND_STABLE, first.alpha)
    return SampleBatch(out, _meta(first, noise, seed, labels))


def sample_integral(coeffs: CellCoefficients, noise: NoiseModel, n: int, seed: SeedSpec,
                    label: str = "x0") -> SampleBatch:
    """Samples of sum_k entry(k) xi_k, summed in shell order."""
    return sample_fdd([coeffs], noise, n, seed, [label])


def materialize_noise(noise: NoiseModel, n: int, indices, seed: SeedSpec) -> np.ndarray:
    """The noise field at the given lattice indices, shape (n, len(indices))."""
    kind, alpha, tail_k = noise_kind(noise)
    return field_values(seed, n, site_ids(np.asarray(indices, dtype=np.int64)), kind, alpha, tail_k)


def _filter_taps(filt) -> tuple[np.ndarray, int]:
    """Accept a sequence (taps at 0, 1, ...) or a mapping offset -> value."""
    if isinstance(filt, dict):
        if not filt:
            raise ConfigError("empty filter")
        lo, hi = min(filt), max(filt)
        taps = np.zeros(hi - lo + 1)
        for k, v in filt.items():
            taps[k - lo] = v
        return taps, int(lo)
    taps = np.asarray(filt, dtype=float).ravel()
    if taps.size == 0:
        raise ConfigError("empty filter")
    return taps, 0


def filtered_coefficients(coeffs: CellCoefficients, filt) -> CellCoefficients:
    """Coefficients c_l = sum_j f_{l+j} v_j, i.e. f convolved with the reversed filter.

    With xi_hat_k = sum_j v_j xi_{k-j}, sum_k f_k xi_hat_k = sum_l c_l xi_l.
    """
    if coeffs.d != 1:
        raise ConfigError("filtered noise is implemented for d = 1")
    if coeffs.far is not None:
        raise ConfigError("filtered noise requires finitely supported coefficients")
    taps, j0 = _filter_taps(filt)
    (k0, k1), = coeffs.window
    dense = np.zeros(k1 - k0)
    dense[coeffs.indices[:, 0] - k0] = coeffs.values
    # c_l for l in [k0 - j_max, k1 - j0)
    j1 = j0 + len(taps)
    lo, hi = k0 - (j1 - 1), k1 - j0
    conv = np.zeros(hi - lo)
    for t, v in enumerate(taps):
        j = j0 + t
        # l = k - j for k in [k0, k1)
        conv[k0 - j - lo:k1 - j - lo] += v * dense
    idx = np.arange(lo, hi, dtype=np.int64)[:, None]
    order = shell_order(idx)
    return CellCoefficients(coeffs.h, 1, coeffs.alpha, coeffs.scheme, idx[order], conv[order],
                            ((lo, hi),), coeffs.tail_mass_bound, coeffs.trunc_tol,
                            meta={**coeffs.meta, "filter": {"taps": taps.tolist(), "start": j0}})


def sample_filtered(coeffs: CellCoefficients, filt, noise: NoiseModel, n: int, seed: SeedSpec,
                    method: str = "rearranged") -> SampleBatch:
    """Samples of sum_k f_k xi_hat_k for linearly filtered noise xi_hat.

    ``rearranged`` samples the convolved coefficient family (bit-identical to
    sample_integral on it); ``direct`` materializes xi_hat and sums against f.
    """
    conv = filtered_coefficients(coeffs, filt)
    if method == "rearranged":
        return sample_integral(conv, noise, n, seed)
    if method != "direct":
        raise ConfigError(f"unknown method {method!r}")
    _check_alpha(coeffs, noise)
    taps, j0 = _filter_taps(filt)
    (lo, hi), = conv.window
    xi = materialize_noise(noise, n, np.arange(lo, hi), seed)
    idx, vals = coeffs.nonzero()
    out = np.zeros(n)
    for k, fk in zip(idx[:, 0], vals):
        xhat = np.zeros(n)
        for t, v in enumerate(taps):
            xhat += v * xi[:, k - (j0 + t) - lo]
        out += fk * xhat
    return SampleBatch(out[:, None], _meta(coeffs, noise, seed, ["x0"]))
