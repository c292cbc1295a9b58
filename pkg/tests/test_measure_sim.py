import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import ecf_distance
from stablelat import (ConfigError, ExactSaS, IndicatorBox, PowerTail, SampleBatch,
                       SeedSpec, StableParams, SymmetricPareto, discretize, discretize_exact,
                       ks_two_sample, norms, sample_fdd, sample_filtered, sample_integral, sample_sas)
from stablelat.function_model import Scale, zero_spec
from stablelat.lattice import from_values
from stablelat.measure_sim import filtered_coefficients, materialize_noise


def test_empty_coefficients_give_zeros():
    x = sample_integral(discretize(zero_spec(), 0.5, 1.5), ExactSaS(1.5), 100, SeedSpec(1))
    assert x.values.shape == (100, 1)
    assert not np.any(x.values)


def test_exact_scheme_is_exact_in_law(unit_box):
    c = discretize_exact(unit_box, 0.25, 1.5)
    x = sample_integral(c, ExactSaS(1.5), 50_000, SeedSpec(21)).column()
    y = sample_sas(StableParams(1.5), 50_000, SeedSpec(22))
    assert ks_two_sample(x, y)[1] >= 0.01


def test_pareto_cell_average_fine_grid(unit_box):
    c = discretize(unit_box, 2.0 ** -6, 1.2)
    x = sample_integral(c, SymmetricPareto(1.2), 100_000, SeedSpec(23)).column()
    assert ecf_distance(x, 1.2) <= 0.03


def test_fdd_of_one_is_sample_integral(gauss):
    c = discretize(gauss, 0.25, 1.5)
    a = sample_fdd([c], ExactSaS(1.5), 500, SeedSpec(2)).values
    b = sample_integral(c, ExactSaS(1.5), 500, SeedSpec(2)).values
    np.testing.assert_array_equal(a, b)


def test_fdd_of_f_and_minus_f_cancels(gauss):
    c = discretize(gauss, 0.25, 1.5)
    neg = discretize(Scale(gauss, -1.0), 0.25, 1.5)
    v = sample_fdd([c, neg], SymmetricPareto(1.5), 1000, SeedSpec(3)).values
    assert np.all(v[:, 0] + v[:, 1] == 0.0)


def test_fdd_joint_law():
    # ||1_[0,1) - 1_[0,2)||_1.5^1.5 = 1
    f1 = discretize(IndicatorBox((0.0,), (1.0,)), 0.25, 1.5)
    f2 = discretize(IndicatorBox((0.0,), (2.0,)), 0.25, 1.5)
    v = sample_fdd([f1, f2], ExactSaS(1.5), 100_000, SeedSpec(4)).values
    ecf = np.mean(np.exp(1j * (v[:, 0] - v[:, 1])))
    assert abs(ecf - math.exp(-1)) <= 0.01


def test_fdd_columns_share_the_noise_field():
    f1 = from_values([1.0, 0.0, 0.0], 1.5)
    f2 = from_values([0.0, 0.0, 2.0], 1.5)
    v = sample_fdd([f1, f2], ExactSaS(1.5), 200, SeedSpec(5)).values
    xi = materialize_noise(ExactSaS(1.5), 200, [0, 2], SeedSpec(5))
    np.testing.assert_array_equal(v[:, 0], xi[:, 0])
    np.testing.assert_allclose(v[:, 1], 2 * xi[:, 1], rtol=1e-15)


@given(st.floats(-4, 4).filter(lambda c: abs(c) > 1e-3), st.integers(0, 1000))
def test_sampling_is_linear_in_coefficients(c, master):
    base = from_values(np.linspace(-1, 1, 7), 1.3)
    a = sample_integral(base, SymmetricPareto(1.3), 50, SeedSpec(master)).column()
    b = sample_integral(base.scaled(c), SymmetricPareto(1.3), 50, SeedSpec(master)).column()
    np.testing.assert_allclose(b, c * a, rtol=1e-12, atol=1e-12)


def test_far_field_sampling_matches_stable_law():
    # exact scheme + exact noise, f >= 0: the integral is S_alpha(||f||_alpha)
    spec, alpha = PowerTail(1.5, 1.0), 1.2
    c = discretize_exact(spec, 0.25, alpha, max_cells=64)
    sigma = norms(c)[0]
    x = sample_integral(c, ExactSaS(alpha), 40_000, SeedSpec(6)).column()
    y = sample_sas(StableParams(alpha, sigma), 40_000, SeedSpec(7))
    assert ks_two_sample(x, y)[1] >= 0.01


def test_identity_filter_is_sample_integral(unit_box):
    c = discretize(unit_box, 0.25, 1.5)
    a = sample_filtered(c, [1.0], ExactSaS(1.5), 300, SeedSpec(8)).values
    b = sample_integral(c, ExactSaS(1.5), 300, SeedSpec(8)).values
    np.testing.assert_array_equal(a, b)


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=4), st.integers(-3, 3), st.integers(0, 99))
def test_rearranged_equals_direct(taps, start, master):
    c = from_values([0.5, -1.0, 2.0, 0.25], 1.5, start=-1)
    filt = {start + j: v for j, v in enumerate(taps)}
    a = sample_filtered(c, filt, SymmetricPareto(1.5), 200, SeedSpec(master), "rearranged").column()
    b = sample_filtered(c, filt, SymmetricPareto(1.5), 200, SeedSpec(master), "direct").column()
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(a))))


def test_filtered_coefficients_two_tap():
    # c_l = f_l v_0 + f_{l+1} v_1
    c = from_values([1.0, 2.0, 3.0], 1.5)
    conv = filtered_coefficients(c, [1.0, 1.0]).as_dict()
    assert conv == {(-1,): 1.0, (0,): 3.0, (1,): 5.0, (2,): 3.0}


def test_two_tap_average_law(unit_box):
    c = discretize(unit_box, 0.25, 1.5)
    filt = [2 ** (-1 / 1.5), 2 ** (-1 / 1.5)]
    sigma = norms(filtered_coefficients(c, filt))[0]
    x = sample_filtered(c, filt, ExactSaS(1.5), 100_000, SeedSpec(9)).column()
    assert ecf_distance(x, 1.5, sigma) <= 0.02


def test_sampling_errors(unit_box):
    c = discretize(unit_box, 0.5, 1.5)
    with pytest.raises(ConfigError):
        sample_integral(c, ExactSaS(1.2), 10, SeedSpec())
    with pytest.raises(ConfigError):
        sample_fdd([c, discretize(unit_box, 0.25, 1.5)], ExactSaS(1.5), 10, SeedSpec())
    with pytest.raises(ConfigError):
        sample_integral(c, ExactSaS(1.5), -1, SeedSpec())
    with pytest.raises(ConfigError):
        sample_filtered(c, [], ExactSaS(1.5), 10, SeedSpec())
    with pytest.raises(ConfigError):
        sample_filtered(c, [1.0], ExactSaS(1.5), 10, SeedSpec(), method="fft")
    with pytest.raises(ConfigError):
        filtered_coefficients(discretize(PowerTail(1.5), 0.5, 1.2, max_cells=16), [1.0])


def test_sample_batch_roundtrip(tmp_path, gauss):
    c = discretize(gauss, 0.5, 1.5)
    batch = sample_fdd([c, c.scaled(2.0)], ExactSaS(1.5), 50, SeedSpec(10), ["f", "2f"])
    path = tmp_path / "batch.csv"
    batch.write(path)
    back = SampleBatch.read(path)
    np.testing.assert_array_equal(back.values, batch.values)
    assert back.meta["labels"] == ["f", "2f"]
    empty = sample_integral(c, ExactSaS(1.5), 0, SeedSpec(10))
    empty.write(tmp_path / "empty.csv")
    assert SampleBatch.read(tmp_path / "empty.csv").n == 0
