import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from conftest import ecf_distance
from stablelat import (ConfigError, ExactSaS, LfsmParams,
                       UnsupportedInputError, beta_of, discretize_lfsm, norms, sample_lfsm_integral,
                       sample_lfsm_path)
from stablelat._rng import SeedSpec
from stablelat.function_model import Scale, zero_spec
from stablelat.lfsm import ANTI_PERSISTENT, LONG_RANGE, lfsm_scale, path_window


def kernel_norm_oracle(H, alpha, a=1.0, b=0.0):
    """||f_1^{a,b}||_alpha by quadrature, written out from the kernel formula."""
    g = H - 1 / alpha
    pos = lambda v: v ** g if v > 0 else 0.0  # noqa: E731

    def f(x):
        return a * (pos(1 - x) - pos(-x)) + b * (pos(x - 1) - pos(x))

    pts = [(-1e6, -1e4), (-1e4, -1e2), (-1e2, -1), (-1, 0), (0, 1), (1, 2), (2, 1e2), (1e2, 1e4),
           (1e4, 1e6)]
    mass = sum(integrate.quad(lambda x: abs(f(x)) ** alpha, lo, hi, limit=400)[0] for lo, hi in pts)
    # beyond 1e6: |f| ~ |a - b| |g| |x|^{g - 1}
    q = alpha * (g - 1) + 1
    mass += 2 * (abs(g) ** alpha) * (a ** alpha + b ** alpha) / 2 * (1e6) ** q / -q
    return mass ** (1 / alpha)


@pytest.mark.parametrize("alpha, H, beta, regime", [
    (1.5, 0.9, 1 + 2 / 3 - 0.9, LONG_RANGE),
    (1.5, 0.4, 2 / 3 - 0.4, ANTI_PERSISTENT),
])
def test_beta_of_examples(alpha, H, beta, regime):
    b, r = beta_of(LfsmParams(alpha, H))
    assert b == pytest.approx(beta, abs=1e-15)
    assert r == regime


@given(st.floats(1.05, 2.0), st.floats(0.02, 0.98))
def test_beta_range_matches_regime(alpha, H):
    if abs(H - 1 / alpha) < 1e-6:
        return
    b, r = beta_of(LfsmParams(alpha, H))
    if r == LONG_RANGE:
        assert 1 / alpha < b < 1
    else:
        assert 0 < b < 1 / alpha


def test_boundary_hurst_index_rejected():
    with pytest.raises(ConfigError):
        LfsmParams(2.0, 0.5)
    with pytest.raises(ConfigError):
        LfsmParams(1.5, 0.7, 0.0, 0.0)


def test_kernel_norm_oracle_agrees_with_library():
    assert lfsm_scale(LfsmParams(1.5, 0.7)) == pytest.approx(kernel_norm_oracle(0.7, 1.5), rel=1e-4)


@settings(max_examples=8)
@given(st.floats(0.1, 0.95).filter(lambda h: abs(h - 1 / 1.5) > 0.02), st.floats(0.25, 4.0))
def test_scale_is_self_similar(H, t):
    p = LfsmParams(1.5, H, 1.0, 0.5)
    assert lfsm_scale(p, t) == pytest.approx(t ** H * lfsm_scale(p, 1.0), rel=1e-6)


def test_discretize_indicator_long_range(unit_box):
    p = LfsmParams(1.5, 0.8)
    beta, _ = beta_of(p)
    # 1_[0,1] * w = f_1 / (1 - beta) in the long-range regime
    sigma_star = kernel_norm_oracle(0.8, 1.5) / (1 - beta)
    c = discretize_lfsm(unit_box, p, 0.1)
    assert norms(c)[0] == pytest.approx(sigma_star, rel=1e-3)
    assert c.far is not None


def test_discretize_zero_spec():
    c = discretize_lfsm(zero_spec(), LfsmParams(1.5, 0.8), 0.1)
    assert len(c) == 0 and c.far is None


def test_anti_persistent_gauss_refinement(gauss):
    p = LfsmParams(1.5, 0.4)
    sups = []
    for h in (0.2, 0.1, 0.05):
        c = discretize_lfsm(gauss, p, h, max_cells=1024)
        assert np.all(np.isfinite(c.values))
        sups.append(norms(c)[1])
    assert sups[0] > sups[1] > sups[2]
    # cell averages of a bounded function: sup ~ h^{1/alpha}
    assert sups[2] / sups[1] == pytest.approx(2 ** (-1 / 1.5), rel=0.05)


def test_anti_persistent_needs_smooth_integrand(unit_box):
    with pytest.raises(UnsupportedInputError):
        discretize_lfsm(unit_box, LfsmParams(1.5, 0.4), 0.1)


def test_lfsm_integral_law(unit_box):
    p = LfsmParams(1.5, 0.8)
    sigma_star = kernel_norm_oracle(0.8, 1.5) / (1 - beta_of(p)[0])
    x = sample_lfsm_integral(unit_box, p, 2.0 ** -5, ExactSaS(1.5), 30_000, SeedSpec(31),
                             max_cells=512).column()
    assert ecf_distance(x, 1.5, sigma_star) <= 0.03


def test_lfsm_integral_zero_and_linearity(unit_box):
    p = LfsmParams(1.5, 0.8)
    z = sample_lfsm_integral(zero_spec(), p, 0.1, ExactSaS(1.5), 100, SeedSpec(1))
    assert not np.any(z.values)
    a = sample_lfsm_integral(unit_box, p, 0.1, ExactSaS(1.5), 300, SeedSpec(2), max_cells=256)
    b = sample_lfsm_integral(Scale(unit_box, 2.0), p, 0.1, ExactSaS(1.5), 300, SeedSpec(2),
                             max_cells=256)
    np.testing.assert_allclose(b.values, 2 * a.values, rtol=1e-12)


def test_path_zero_time_column():
    b = sample_lfsm_path(LfsmParams(1.5, 0.7), [0.0, 0.5, 1.0], 2.0 ** -4, n=200, seed=SeedSpec(3))
    assert not np.any(b.column(0))
    assert b.meta["times"] == [0.0, 0.5, 1.0]
    assert b.meta["labels"] == ["t=0.0", "t=0.5", "t=1.0"]


def test_gaussian_path_variance():
    # alpha = 2: X_1 ~ N(0, 2 ||f_1||_2^2)
    p = LfsmParams(2.0, 0.7)
    x = sample_lfsm_path(p, [1.0], 2.0 ** -4, n=100_000, seed=SeedSpec(4)).column()
    target = 2 * kernel_norm_oracle(0.7, 2.0) ** 2
    assert np.var(x) == pytest.approx(target, rel=0.03)


def test_path_reproducible():
    p = LfsmParams(1.5, 0.4, 1.0, 1.0)
    a = sample_lfsm_path(p, [1.0, 2.0], 2.0 ** -3, n=100, seed=SeedSpec(5))
    b = sample_lfsm_path(p, [1.0, 2.0], 2.0 ** -3, n=100, seed=SeedSpec(5))
    np.testing.assert_array_equal(a.values, b.values)


@pytest.mark.parametrize("times", [[], [1.0, 1.0], [2.0, 1.0], [-1.0, 1.0]])
def test_path_time_validation(times):
    with pytest.raises(ConfigError):
        sample_lfsm_path(LfsmParams(1.5, 0.7), times, 0.1, n=10)


@given(st.floats(0.1, 5.0), st.sampled_from([(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]),
       st.sampled_from([2.0 ** -5, 2.0 ** -3, 0.3]))
def test_path_window_covers_times(t_max, ab, h):
    p = LfsmParams(1.5, 0.7, *ab)
    (k0, k1), = path_window([t_max / 2, t_max], h, p, max_cells=4096)
    assert k0 * h <= 0.0 and k1 * h >= t_max
    assert k1 - k0 <= max(4096, math.ceil(t_max / h) + 1)
