import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from sparsefourier.dense import dft_naive, fft, ifft, top_b
from sparsefourier.errors import ContractError
from sparsefourier.signal_model import SparseRepresentation, SparseSignalOracle, random_modes


def test_delta_gives_flat_spectrum():
    x = np.zeros(8)
    x[0] = 1
    assert np.allclose(dft_naive(x), 1 / math.sqrt(8))
    assert np.allclose(fft(x), 1 / math.sqrt(8))


def test_pure_mode_one_hot():
    x = SparseSignalOracle(SparseRepresentation(64, 1, [((5,), 1)])).dense()
    expected = np.zeros(64)
    expected[5] = 1
    assert np.allclose(dft_naive(x), expected, atol=1e-13)


def test_prime_length_pure_mode():
    x = SparseSignalOracle(SparseRepresentation(10009, 1, [((7,), 1)])).dense()
    y = fft(x)
    assert abs(y[7] - 1) < 1e-9
    y[7] = 0
    assert np.max(np.abs(y)) < 1e-9


def test_naive_round_trip():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(128) + 1j * rng.standard_normal(128)
    assert np.max(np.abs(dft_naive(dft_naive(x), inverse=True) - x)) < 1e-10


@pytest.mark.parametrize("n", [1, 2, 3, 12, 101, 1024])
def test_fft_matches_naive(n):
    rng = np.random.default_rng(n)
    for _ in range(50):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        assert np.max(np.abs(fft(x) - dft_naive(x))) < 1e-9


@given(st.integers(1, 300), st.integers(0, 2 ** 32 - 1))
def test_fft_matches_numpy(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    assert np.allclose(fft(x), np.fft.fft(x, norm="ortho"), atol=1e-9)
    assert np.allclose(ifft(fft(x)), x, atol=1e-9)


@given(st.integers(2, 16), st.integers(0, 2 ** 32 - 1))
def test_multidimensional_matches_naive(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    assert np.allclose(fft(x), dft_naive(x), atol=1e-9)
    assert np.allclose(fft(x), np.fft.fft2(x, norm="ortho"), atol=1e-9)


@given(st.integers(2, 256), st.integers(0, 2 ** 32 - 1))
def test_unitarity_linearity_shift(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    a, b = complex(rng.standard_normal(), 1.0), 2.5
    fx, fy = fft(x), fft(y)
    assert math.isclose(np.sum(np.abs(fx) ** 2), np.sum(np.abs(x) ** 2), rel_tol=1e-9)
    assert np.allclose(fft(a * x + b * y), a * fx + b * fy, atol=1e-9)
    m = int(rng.integers(0, n))
    w = np.arange(n)
    assert np.allclose(fft(np.roll(x, m)), fx * np.exp(-2j * np.pi * w * m / n), atol=1e-9)
    modulated = x * np.exp(2j * np.pi * m * w / n)
    assert np.allclose(fft(modulated), np.roll(fx, m), atol=1e-9)


def test_cap_enforced():
    with pytest.raises(ContractError):
        dft_naive(np.zeros(100), cap=99)
    with pytest.raises(ContractError):
        fft(np.zeros((3, 4)))


def test_top_b_recovers_planted():
    n = 257
    modes = random_modes(n, 6, np.random.default_rng(1), complex_coefficients=True)
    rep = SparseRepresentation(n, 1, modes)
    got = top_b(fft(SparseSignalOracle(rep).dense()), 6)
    assert set(got.keys()) == set(rep.keys())
    for k, c in rep:
        assert abs(got.coefficient(k) - c) < 1e-9


def test_top_b_ties_prefer_small_index():
    assert top_b(np.array([1, 2, 2, 1]), 2).keys() == [(1,), (2,)]
    assert top_b(np.ones((3, 3)), 1).keys() == [(0, 0)]
