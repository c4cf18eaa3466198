import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invoreduce import specfun
from invoreduce.specfun import bessel_j, bessel_j_orders, bessel_j_prime, bessel_zero, bessel_zero_table
from oracles import bessel_j_series

# frozen from the arbitrary-precision oracles in oracles.py
J1_AT_1 = 0.4400505857449335
MU01 = 2.404825557695773
MU11 = 3.8317059702075125
MU02 = 5.520078110286311
J1_AT_MU01 = 0.5191474972894667
MU_5_3 = 15.70017407971167
MU_20_20 = 91.26354816250439
MU_60_200 = 719.27712191186


def test_values_at_zero():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert bessel_j(5, 0.0) == 0.0


def test_first_zero_is_a_root():
    assert abs(bessel_j(0, MU01)) <= 1e-12


def test_derivative_examples():
    assert bessel_j_prime(0, 1.0) == pytest.approx(-J1_AT_1, abs=1e-15)
    assert bessel_j_prime(0, MU01) == pytest.approx(-J1_AT_MU01, abs=1e-15)
    assert bessel_j_prime(1, 0.0) == 0.5
    with pytest.raises(ValueError):
        bessel_j_prime(0, 0.0)


@pytest.mark.parametrize("n", [0, 1, 2, 7, 20])
def test_derivative_matches_finite_difference(n):
    h = 1e-5
    for x in (0.5, 3.0, 11.0, 27.5):
        fd = (bessel_j(n, x + h) - bessel_j(n, x - h)) / (2 * h)
        assert abs(fd - bessel_j_prime(n, x)) <= 1e-8


def test_against_oracle_small_sample():
    rng = np.random.default_rng(7)
    for n, x in zip(rng.integers(0, 21, 40), rng.uniform(0, 50, 40)):
        assert abs(bessel_j(int(n), float(x)) - float(bessel_j_series(int(n), float(x)))) <= 1e-12


def test_large_order_and_argument():
    for n, x in ((150, 100.0), (200, 900.0), (60, 719.0)):
        ref = float(bessel_j_series(n, x, dps=600))
        assert abs(bessel_j(n, x) - ref) <= 1e-12 * (1 + abs(ref))


def test_series_and_recurrence_overlap():
    x = np.linspace(specfun.SERIES_CUTOFF, 12.0, 50)
    for n in range(0, 21):
        s = specfun._series(n, x)
        m = specfun._miller([n], x)[0]
        assert np.max(np.abs(s - m)) <= 1e-12


def test_range_errors():
    with pytest.raises(ValueError):
        bessel_j(201, 1.0)
    with pytest.raises(ValueError):
        bessel_j(0, -1.0)
    with pytest.raises(ValueError):
        bessel_j(0, 1001.0)
    with pytest.raises(ValueError):
        bessel_zero(61, 1)
    with pytest.raises(ValueError):
        bessel_zero(0, 0)


def test_array_input_shape():
    x = np.linspace(0, 30, 12).reshape(3, 4)
    v = bessel_j(3, x)
    assert v.shape == (3, 4)
    assert v[1, 2] == bessel_j(3, float(x[1, 2]))
    assert bessel_j_orders([0, 1], [1.0, 20.0]).shape == (2, 2)


def test_zero_examples():
    assert bessel_zero(0, 1) == pytest.approx(MU01, abs=1e-10)
    assert bessel_zero(1, 1) == pytest.approx(MU11, abs=1e-10)
    assert bessel_zero(0, 1) < bessel_zero(1, 1) < bessel_zero(0, 2)
    assert bessel_zero(0, 2) == pytest.approx(MU02, abs=1e-12)
    assert bessel_zero(5, 3) == pytest.approx(MU_5_3, abs=1e-11)
    assert bessel_zero(20, 20) == pytest.approx(MU_20_20, abs=1e-10)
    assert bessel_zero(60, 200) == pytest.approx(MU_60_200, abs=1e-9)


def test_zero_table_properties():
    tab = bessel_zero_table(20, 20)
    assert tab.shape == (21, 20)
    assert np.all(np.diff(tab, axis=1) > 0)
    for n in range(21):
        for m in range(20):
            mu = tab[n, m]
            assert abs(bessel_j(n, mu)) <= 1e-12 * (1 + mu)
            assert bessel_j(n, mu - 1e-6) * bessel_j(n, mu + 1e-6) < 0
    # interlacing of consecutive orders
    assert np.all(tab[0, :-1] < tab[1, :-1]) and np.all(tab[1, :-1] < tab[0, 1:])


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 20), st.floats(1e-3, 50.0))
def test_turan_inequality(n, x):
    a, b, c = bessel_j_orders([n - 1, n, n + 1], x)[:, 0]
    assert c * a <= b * b + 1e-15


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 60), st.floats(0.1, 200.0))
def test_three_term_recurrence(n, x):
    a, b, c = bessel_j_orders([n - 1, n, n + 1], x)[:, 0]
    assert abs(a + c - (2 * n / x) * b) <= 1e-10


def test_deterministic():
    x = np.linspace(0.1, 60, 101)
    assert np.array_equal(bessel_j(4, x), bessel_j(4, x.copy()))


def test_scalar_and_array_paths_agree_bitwise():
    x = np.concatenate([np.linspace(0.05, 999.0, 997), np.arange(1.0, 11.0) ** 3])
    v = bessel_j(7, x)
    assert all(v[i] == bessel_j(7, float(x[i])) for i in range(x.size))
