import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from stablelat import ConfigError, IndicatorBox, LinearCombination, UnsupportedInputError
from stablelat import frac_calc as fc
from stablelat.function_model import FractionalIntegral, Scale, zero_spec

GRID = np.linspace(-3.0, 3.0, 13)


def pbdv(v, x):
    return special.pbdv(v, x)[0]


def test_kernel_eval_examples():
    assert fc.kernel_eval(fc.FracKernel(0.5, 1, 0), -4.0) == 0.5
    assert fc.kernel_eval(fc.FracKernel(0.5, 1, 0), 4.0) == 0.0
    assert fc.kernel_eval(fc.FracKernel(0.25, 1, 2), 16.0) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ConfigError):
        fc.kernel_eval(fc.FracKernel(0.5, 1, 1), 0.0)


@pytest.mark.parametrize("beta, a, b", [(0.0, 1, 0), (1.0, 1, 0), (0.5, 0, 0), (0.5, -1, 1)])
def test_frac_kernel_validation(beta, a, b):
    with pytest.raises(ConfigError):
        fc.FracKernel(beta, a, b)


def test_rl_integral_indicator_examples(unit_box):
    assert fc.rl_integral(unit_box, 0.5, "+", 1.0) == pytest.approx(2 / math.sqrt(math.pi), abs=1e-10)
    assert 2 / math.sqrt(math.pi) == pytest.approx(1.128379, abs=1e-6)
    assert fc.rl_integral(unit_box, 0.5, "+", 0.0) == 0.0


@given(st.floats(0.05, 0.95), st.floats(-1.0, 4.0))
def test_rl_integral_indicator_closed_form(delta, x):
    box = IndicatorBox((0.0,), (1.0,))
    pos = lambda v: max(v, 0.0) ** delta  # noqa: E731
    expected = (pos(x) - pos(x - 1)) / special.gamma(delta + 1)
    assert fc.rl_integral(box, delta, "+", x) == pytest.approx(expected, abs=1e-9)
    # the '-' side integrates from the right: mirror image
    mirrored = (pos(1 - x) - pos(-x)) / special.gamma(delta + 1)
    assert fc.rl_integral(box, delta, "-", x) == pytest.approx(mirrored, abs=1e-9)


def test_rl_integral_order_one_is_running_integral(gauss):
    for x in (-2.0, 0.0, 0.7, 3.0):
        running = math.sqrt(math.pi / 2) * (1 + special.erf(x / math.sqrt(2)))
        assert fc.rl_integral(gauss, 1.0, "+", x) == pytest.approx(running, abs=1e-8)


@pytest.mark.parametrize("delta", [0.2, 0.5, 0.8])
def test_rl_integral_gauss_parabolic_cylinder(gauss, delta):
    # I^delta_+ exp(-x^2/2) = exp(-x^2/4) D_{-delta}(-x)
    expected = np.exp(-GRID ** 2 / 4) * pbdv(-delta, -GRID)
    np.testing.assert_allclose(fc.rl_integral_values(gauss, delta, "+", GRID), expected, atol=1e-10)
    np.testing.assert_allclose(fc.rl_integral_values(gauss, delta, "-", GRID),
                               expected[::-1], atol=1e-10)
    scalar = [fc.rl_integral(gauss, delta, "+", x) for x in GRID[::4]]
    np.testing.assert_allclose(scalar, expected[::4], atol=1e-9)


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7])
def test_rl_derivative_gauss_parabolic_cylinder(gauss, beta):
    # D^beta_+ exp(-x^2/2) = exp(-x^2/4) D_beta(-x)
    expected = np.exp(-GRID ** 2 / 4) * pbdv(beta, -GRID)
    np.testing.assert_allclose(fc.rl_derivative_values(gauss, beta, "+", GRID), expected, atol=1e-9)
    assert fc.rl_derivative(gauss, beta, "+", 0.4) == pytest.approx(
        math.exp(-0.04) * pbdv(beta, -0.4), abs=1e-9)


def test_rl_derivative_examples(gauss, unit_box):
    assert fc.rl_derivative(gauss, 0.3, "+", 0.0) == pytest.approx(
        fc.marchaud_derivative(gauss, 0.3, 0.0), abs=1e-6)
    assert fc.rl_derivative(zero_spec(), 0.4, "+", 1.0) == 0.0
    with pytest.raises(UnsupportedInputError):
        fc.rl_derivative(unit_box, 0.4, "+", 0.5)
    with pytest.raises(ConfigError):
        fc.rl_derivative(gauss, 1.0, "+", 0.5)
    with pytest.raises(ConfigError):
        fc.rl_integral(gauss, 0.5, "left", 0.5)


def test_inversion_recovers_f(gauss):
    # D^0.5 I^0.5 f at x = 0.7
    val = fc.rl_derivative_values(FractionalIntegral(gauss, 0.5), 0.5, "+", [0.7])[0]
    assert val == pytest.approx(math.exp(-0.245), abs=1e-3)


@pytest.mark.parametrize("beta, x, tol", [(0.3, 0.0, 1e-6), (0.7, 1.0, 1e-5), (0.5, -1.5, 1e-6)])
def test_marchaud_matches_rl(gauss, beta, x, tol):
    oracle = math.exp(-x * x / 4) * pbdv(beta, -x)
    assert fc.marchaud_derivative(gauss, beta, x) == pytest.approx(oracle, abs=tol)


@given(st.floats(0.1, 0.9), st.floats(0.5, 20.0))
def test_marchaud_of_centered_indicator(beta, half_width):
    # f(0) - f(-s) = 1{s >= L}: (beta / Gamma(1-beta)) int_L^inf s^{-1-beta} ds
    box = IndicatorBox((-half_width,), (half_width,))
    expected = half_width ** -beta / special.gamma(1 - beta)
    assert fc.marchaud_derivative(box, beta, 0.0) == pytest.approx(expected, rel=1e-9)


def test_marchaud_zero_and_jump():
    assert fc.marchaud_derivative(zero_spec(), 0.5, 0.3) == 0.0
    with pytest.raises(fc.NumericalError):
        fc.marchaud_derivative(IndicatorBox((0.0,), (1.0,)), 0.5, 0.0)


@pytest.mark.parametrize("kernel, x, expected", [
    (fc.FracKernel(0.5, 0.0, 1.0), 0.5, 2 * math.sqrt(0.5)),
    (fc.FracKernel(0.5, 0.0, 1.0), -1.0, 0.0),
    (fc.FracKernel(0.5, 1.0, 0.0), 0.5, 2 * math.sqrt(0.5)),
])
def test_convolve_kernel_examples(unit_box, kernel, x, expected):
    g = fc.convolve_kernel(unit_box, kernel, fc.GridFunction(x, 1.0, np.zeros(1)))
    assert g.values[0] == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("beta, a, b", [(0.3, 1, 0), (0.5, 0, 1), (0.7, 1, 1), (0.45, 0.3, 2)])
def test_indicator_convolution_closed_form(beta, a, b):
    kern = fc.FracKernel(beta, a, b)
    xs = np.linspace(-2.0, 3.0, 21) + 1e-3
    numeric = fc.convolve_kernel(IndicatorBox((0.0,), (1.0,)), kern,
                                 fc.GridFunction(xs[0], xs[1] - xs[0], np.zeros(xs.size))).values
    np.testing.assert_allclose(numeric, fc.indicator_convolution_closed_form(1.0, kern, xs), atol=1e-9)


@given(st.floats(0.1, 0.9), st.floats(0, 2), st.floats(0, 2), st.floats(-3, 3))
def test_convolution_is_linear_in_kernel_weights(beta, a, b, x):
    if a + b == 0:
        return
    f = LinearCombination(((1.0, IndicatorBox((0.0,), (1.0,))), (-2.0, IndicatorBox((0.5,), (2.0,)))))
    whole = fc.convolve_values(f, fc.FracKernel(beta, a, b), np.array([x]))[0]
    parts = 0.0
    if a:
        parts += a * fc.convolve_values(f, fc.FracKernel(beta, 1.0, 0.0), np.array([x]))[0]
    if b:
        parts += b * fc.convolve_values(f, fc.FracKernel(beta, 0.0, 1.0), np.array([x]))[0]
    assert whole == pytest.approx(parts, abs=1e-10)


def test_convolution_young_bound():
    # ||f * w|| on [-R, R] is bounded by ||f||_1 times the kernel integral over [-2R, 2R]
    f = Scale(IndicatorBox((0.0,), (1.0,)), 3.0)
    kern = fc.FracKernel(0.6, 1.0, 0.5)
    xs = np.linspace(-4.0, 4.0, 41) + 1e-3
    vals = fc.convolve_values(f, kern, xs)
    bound = 3.0 * (kern.a + kern.b) / (1 - kern.beta)  # sup_x of int_{x-1}^{x} w
    assert np.max(np.abs(vals)) <= bound + 1e-12


def test_convolve_zero_spec():
    g = fc.convolve_kernel(zero_spec(), fc.FracKernel(0.5, 1, 1), fc.GridFunction.template(-1, 1, 5))
    np.testing.assert_array_equal(g.values, 0.0)


@pytest.mark.parametrize("t, x, H, alpha, expected", [
    (1.0, 2.0, 0.7, 2.0, 0.0),
    (0.0, 0.3, 0.7, 1.5, 0.0),
    (1.0, 0.5, 0.75, 2.0, 0.5 ** 0.25),
])
def test_lfsm_kernel_examples(t, x, H, alpha, expected):
    assert fc.lfsm_kernel_eval(t, x, H, alpha) == pytest.approx(expected, abs=1e-15)


def test_lfsm_kernel_rejects_excluded_parameters():
    for H, alpha, a, b in [(0.5, 2.0, 1, 0), (0.7, 1.0, 1, 0), (1.0, 1.5, 1, 0), (0.7, 1.5, 0, 0)]:
        with pytest.raises(ConfigError):
            fc.lfsm_kernel_eval(1.0, 0.3, H, alpha, a, b)


@given(st.floats(0.05, 0.95).filter(lambda h: abs(h - 1 / 1.5) > 0.01), st.floats(0.2, 5.0),
       st.floats(-4, 4).filter(lambda x: abs(x) > 1e-3 and abs(x - 1) > 1e-3),
       st.floats(0, 2), st.floats(0, 2))
def test_lfsm_kernel_self_similar_and_linear(H, c, x, a, b):
    if a + b == 0:
        return
    alpha = 1.5
    g = H - 1 / alpha
    base = fc.lfsm_kernel_eval(1.0, x, H, alpha, a, b)
    assert fc.lfsm_kernel_eval(c, c * x, H, alpha, a, b) == pytest.approx(c ** g * base, rel=1e-9,
                                                                          abs=1e-12)
    sides = 0.0
    if a:
        sides += a * fc.lfsm_kernel_eval(1.0, x, H, alpha, 1.0, 0.0)
    if b:
        sides += b * fc.lfsm_kernel_eval(1.0, x, H, alpha, 0.0, 1.0)
    assert base == pytest.approx(sides, rel=1e-12, abs=1e-12)


@given(st.floats(0.05, 0.95).filter(lambda h: abs(h - 1 / 1.5) > 0.01), st.floats(-3, 3),
       st.floats(0.01, 0.5))
def test_lfsm_kernel_cells_integrate_pointwise_values(H, x0, h):
    from scipy import integrate

    edges = np.array([x0, x0 + h])
    cells = fc.lfsm_kernel_cell_integrals(1.0, edges, H, 1.5)
    pts = [p for p in (0.0, 1.0) if x0 < p < x0 + h]
    ref = integrate.quad(lambda y: fc.lfsm_kernel_eval(1.0, y, H, 1.5), x0, x0 + h,
                         points=pts or None, limit=200, epsabs=1e-13)[0]
    assert cells[0] == pytest.approx(ref, abs=1e-8)
