"""Counter-based random field keyed by (seed, replicate, lattice site).

Every draw is a pure function of its coordinates, so a noise field can be
materialized on any window, in any order, on any number of threads, and the
same site always carries the same value.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

_threads = os.environ.get("STABLELAT_THREADS")
if _threads and "NUMBA_NUM_THREADS" not in os.environ:
    os.environ["NUMBA_NUM_THREADS"] = str(max(1, int(_threads)))
# the portable layer; results never depend on the threading backend
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

import numba  # noqa: E402
import numpy as np  # noqa: E402
from numba import njit, prange  # noqa: E402

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_F1 = np.uint64(0xFF51AFD7ED558CCD)
_F2 = np.uint64(0xC4CEB9FE1A85EC53)
_MASK53 = np.uint64((1 << 53) - 1)
_TWO53 = 1.0 / 9007199254740992.0

KIND_STABLE = 0
KIND_PARETO = 1


@dataclass(frozen=True)
class SeedSpec:
    """Stream address: a master seed, a stream id, and a path of child offsets.

    Children live in their own branch of the seed tree, so no child ever
    coincides with a plain stream or with a child of another stream.
    """

    master_seed: int = 0
    stream_id: int = 0
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if self.stream_id < 0 or any(p < 0 for p in self.path):
            raise ValueError("stream ids and child offsets must be non-negative")
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    def key(self) -> np.uint64:
        ss = np.random.SeedSequence(self.master_seed % (1 << 64),
                                    spawn_key=(self.stream_id, *self.path))
        return ss.generate_state(1, dtype=np.uint64)[0]

    def child(self, offset: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, self.stream_id, self.path + (int(offset),))

    def as_dict(self) -> dict:
        out = {"master_seed": self.master_seed, "stream_id": self.stream_id}
        if self.path:
            out["path"] = list(self.path)
        return out


def configure_threads(n: int | None = None) -> int:
    """Cap numba worker threads; results do not depend on the value."""
    if n is None:
        env = os.environ.get("STABLELAT_THREADS")
        n = int(env) if env else numba.config.NUMBA_NUM_THREADS
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _fmix64(z):
    z = (z ^ (z >> np.uint64(33))) * _F1
    z = (z ^ (z >> np.uint64(33))) * _F2
    return z ^ (z >> np.uint64(33))


@njit(cache=True)
def _site_codes(site_ids):
    n = site_ids.shape[0]
    c0 = np.empty(n, dtype=np.uint64)
    c1 = np.empty(n, dtype=np.uint64)
    for i in range(n):
        s = np.uint64(site_ids[i]) * np.uint64(4)
        c0[i] = _fmix64(s)
        c1[i] = _fmix64(s + np.uint64(1))
    return c0, c1


@njit(cache=True, inline="always")
def _draw(rk, c0, c1, kind, alpha, tail_k):
    x = _mix64(rk ^ c0)
    if kind == 1:
        v = (np.float64(x & _MASK53) + 0.5) * _TWO53
        mag = np.exp((np.log(tail_k) - np.log(v)) / alpha)
        if (x >> np.uint64(63)) == np.uint64(1):
            return -mag
        return mag
    u0 = (np.float64(x >> np.uint64(11)) + 0.5) * _TWO53
    y = _mix64(rk ^ c1)
    u1 = (np.float64(y >> np.uint64(11)) + 0.5) * _TWO53
    phi = np.pi * (u0 - 0.5)
    w = -np.log(u1)
    if alpha == 2.0:
        return 2.0 * np.sqrt(w) * np.sin(phi)
    if alpha == 1.0:
        return np.tan(phi)
    return (np.sin(alpha * phi) / np.cos(phi) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * phi) / w) ** ((1.0 - alpha) / alpha))


@njit(cache=True, inline="always")
def _replicate_key(key, rep):
    return _mix64(key + np.uint64(rep) * GAMMA)


@njit(parallel=True, cache=True)
def _field_values(key, rep0, nrep, c0, c1, kind, alpha, tail_k):
    nsite = c0.shape[0]
    out = np.empty((nrep, nsite))
    for i in prange(nrep):
        rk = _replicate_key(key, rep0 + i)
        for j in range(nsite):
            out[i, j] = _draw(rk, c0[j], c1[j], kind, alpha, tail_k)
    return out


@njit(parallel=True, cache=True)
def _field_dot(key, rep0, nrep, c0, c1, coeffs, kind, alpha, tail_k):
    nsite, nf = coeffs.shape
    out = np.zeros((nrep, nf))
    for i in prange(nrep):
        rk = _replicate_key(key, rep0 + i)
        acc = np.zeros(nf)
        for j in range(nsite):
            x = _draw(rk, c0[j], c1[j], kind, alpha, tail_k)
            for f in range(nf):
                acc[f] += coeffs[j, f] * x
        for f in range(nf):
            out[i, f] = acc[f]
    return out


def site_ids(indices: np.ndarray) -> np.ndarray:
    """Pack lattice indices (n, d) with d in {1, 2} into int64 site ids."""
    indices = np.asarray(indices, dtype=np.int64)
    if indices.ndim == 1:
        return indices.copy()
    if indices.shape[1] == 1:
        return indices[:, 0].copy()
    hi = indices[:, 0].astype(np.uint64) << np.uint64(32)
    lo = indices[:, 1].astype(np.uint64) & np.uint64(0xFFFFFFFF)
    return (hi ^ lo).view(np.int64)


def field_values(seed: SeedSpec, n: int, sites: np.ndarray, kind: int, alpha: float,
                 tail_k: float = 1.0, rep0: int = 0) -> np.ndarray:
    """Materialize the noise field: array (n, len(sites))."""
    c0, c1 = _site_codes(np.ascontiguousarray(sites, dtype=np.int64))
    return _field_values(seed.key(), np.int64(rep0), np.int64(n), c0, c1,
                         np.int64(kind), float(alpha), float(tail_k))


def field_dot(seed: SeedSpec, n: int, sites: np.ndarray, coeffs: np.ndarray, kind: int,
              alpha: float, tail_k: float = 1.0, rep0: int = 0) -> np.ndarray:
    """Per replicate, sum_j coeffs[j, f] * xi_{sites[j]} in the given site order."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    if coeffs.ndim == 1:
        coeffs = coeffs[:, None]
    c0, c1 = _site_codes(np.ascontiguousarray(sites, dtype=np.int64))
    return _field_dot(seed.key(), np.int64(rep0), np.int64(n), c0, c1, coeffs,
                      np.int64(kind), float(alpha), float(tail_k))
