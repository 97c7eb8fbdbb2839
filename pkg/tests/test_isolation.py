import numpy as np
import pytest

from sparsefourier.dense import dft_naive
from sparsefourier.errors import ParameterError
from sparsefourier.group_testing import MsbParams, group_test
from sparsefourier.isolation import IsolationParams, choose_filter_width, isolate, same_batch
from sparsefourier.signal_model import SparseRepresentation, SparseSignalOracle, random_modes
from sparsefourier.transform_sampling import dirichlet_response


def sparse(n, modes, d=1):
    return SparseSignalOracle(SparseRepresentation(n, d, modes))


def purity(values):
    e = np.abs(dft_naive(values)) ** 2
    return e.max() / e.sum()


@pytest.mark.parametrize("b, k", [(1, 1), (2, 1), (8, 1), (9, 2), (64, 2), (65, 4), (1024, 5)])
def test_filter_width(b, k):
    assert choose_filter_width(b) == k


def test_for_sparsity_frozen():
    p = IsolationParams.for_sparsity(8, 0.05)
    assert (p.filter_half_width, p.repetitions, p.eta) == (1, 5, 1 / 32)


def test_pure_mode_stays_pure():
    s = sparse(101, [((17,), 2)])
    for x in isolate(s, IsolationParams(1, 6), np.random.default_rng(0)):
        assert purity(x.oracle.dense()) > 1 - 1e-12


def test_two_mode_isolation_rate():
    s = sparse(101, [((3,), 1), ((4,), 1)])
    pure_count = total = 0
    for seed in range(100):
        for x in isolate(s, IsolationParams(1, 8), np.random.default_rng(seed)):
            pure_count += purity(x.oracle.dense()) >= 0.98
            total += 1
    assert pure_count / total >= 0.25


def test_two_mode_isolation_rate_matches_enumeration():
    # exact rate over every (theta, sigma) with the 3-tap filter
    n = 101
    hit = 0
    for sigma in range(1, n):
        inv = pow(sigma, -1, n)
        for theta in range(n):
            a = dirichlet_response(1, n, inv * (3 - theta) % n) ** 2
            b = dirichlet_response(1, n, inv * (4 - theta) % n) ** 2
            hit += max(a, b) / (a + b) >= 0.98
    exact = hit / (n * (n - 1))
    assert abs(exact - 0.15247524752475247) < 1e-12
    s = sparse(n, [((3,), 1), ((4,), 1)])
    rate = np.mean([purity(x.oracle.dense()) >= 0.98 for seed in range(100)
                    for x in isolate(s, IsolationParams(1, 8), np.random.default_rng(seed))])
    # 800 draws: standard error about 0.013
    assert abs(rate - exact) < 4 * np.sqrt(exact * (1 - exact) / 800)


def test_batch_matches_composite_oracle_1d():
    s = sparse(53, random_modes(53, 4, np.random.default_rng(1), complex_coefficients=True))
    for x in isolate(s, IsolationParams(2, 4), np.random.default_rng(2)):
        assert np.allclose(x.slice_oracle().dense(), x.oracle.dense(), atol=1e-12)


def test_batch_matches_composite_oracle_2d():
    n = 13
    s = sparse(n, random_modes(n, 3, np.random.default_rng(1), d=2), 2)
    xs = isolate(s, IsolationParams(1, 4), np.random.default_rng(3))
    assert same_batch(xs) is xs[0].batch
    for x in xs:
        full = x.oracle.dense()
        base = x.batch.base_points[x.index]
        for axis in range(2):
            idx = [base[0], base[1]]
            idx[axis] = slice(None)
            assert np.allclose(x.slice_oracle(axis).dense(), full[tuple(idx)], atol=1e-12)


def test_inverse_map_recovers_planted_mode():
    n = 1009
    rng = np.random.default_rng(4)
    for trial in range(100):
        omega = int(rng.integers(0, n))
        s = sparse(n, [((omega,), 1)])
        x = isolate(s, IsolationParams(1, 1), np.random.default_rng(trial))[0]
        found = group_test(x.slice_oracle(), MsbParams(), np.random.default_rng(trial + 500))
        assert int(x.inverse_map(found.frequency)) == omega


def test_filter_wider_than_signal():
    with pytest.raises(ParameterError):
        isolate(sparse(4, [((1,), 1)]), IsolationParams(2, 1), np.random.default_rng(0))


def test_invalid_parameters():
    with pytest.raises(ParameterError):
        IsolationParams(1, 0)
    with pytest.raises(ParameterError):
        IsolationParams.for_sparsity(4, 1.5)
