import math

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from sparsefourier.errors import ContractError, ParameterError
from sparsefourier.estimators import CoefficientEstimatorParams
from sparsefourier.group_testing import (MsbParams, decide_cluster, group_test, group_test_many,
                                         msb, narrow_interval, neighbor_refine, plan_round)
from sparsefourier.signal_model import (DenseOracle, SparseRepresentation, SparseSignalOracle,
                                        complex_noise)
from sparsefourier.transform_sampling import dirichlet_response


def pure(n, omega, c=1.0):
    return SparseSignalOracle(SparseRepresentation(n, 1, [((omega,), c)]))


def cluster_contains(v, c, omega, n, w):
    # the cluster is the arc of c bands centred at band v
    dist = abs((omega * w / n - v + w / 2) % w - w / 2)
    return dist <= c / 2 + 1e-9


def test_band_counts():
    assert MsbParams(1, "practice").bands == 3
    assert MsbParams(1, "theory").bands == 12
    assert MsbParams(2, "theory").bands == 20
    with pytest.raises(ParameterError):
        MsbParams(1, "fast")


@pytest.mark.parametrize("energies, expected", [
    ([0, 0, 0], (0.0, 3)),
    ([5, 0, 0, 0], (0.0, 1)),
    ([0, 0, 1, 1, 0, 0], (2.5, 2)),
    ([1, 0, 0, 0, 0, 1], (5.5, 2)),
    ([1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0], (1.0, 3)),
    ([1, 2, 1, 1], (1.0, 2)),
])
def test_decide_cluster_frozen(energies, expected):
    assert decide_cluster(np.array(energies, float), 0.1) == expected


@pytest.mark.parametrize("k", range(1, 65))
def test_elimination_inequality(k):
    w = 2 * k + 1
    near = 0.294 * (math.sin(math.pi / 8) / (w * math.sin(math.pi / (8 * w)))) ** 2
    far = 2 * (1 / (w * math.sin(9 * math.pi / (8 * w)))) ** 2 + 0.04
    assert near >= far


@given(st.integers(1, 30), st.integers(400, 100000), st.floats(0, 1))
def test_passband_response_bound(k, n, frac):
    # inside a band of width N / (2k + 1) the box-car keeps at least 2/pi of the amplitude
    omega = frac * n / (2 * (2 * k + 1))
    assert abs(dirichlet_response(k, n, omega)) >= 2 / math.pi - 1e-12


def test_msb_zero_signal():
    r = msb(DenseOracle(np.zeros(3 ** 5)), MsbParams(), np.random.default_rng(0))
    assert (r.v, r.c) == (0.0, 12) and r.dead


def test_msb_pure_mode_theory():
    n = 10009
    rng = np.random.default_rng(1)
    for _ in range(50):
        omega = int(rng.integers(0, n))
        r = msb(pure(n, omega), MsbParams(), rng)
        assert r.c <= 9
        assert cluster_contains(r.v, r.c, omega, n, 12)


def test_msb_nearly_pure_mode():
    n = 3 ** 7
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        omega = int(rng.integers(0, n))
        clean = pure(n, omega).dense()
        noise = complex_noise(n, 1.0, rng)
        # 98% of the energy in the mode
        noise *= math.sqrt(0.02 / 0.98 * np.sum(np.abs(clean) ** 2) / np.sum(np.abs(noise) ** 2))
        r = msb(DenseOracle(clean + noise), MsbParams(), rng)
        hits += cluster_contains(r.v, r.c, omega, n, 12)
    assert hits >= 90


def test_msb_requires_1d():
    s = SparseSignalOracle(SparseRepresentation(7, 2, [((1, 1), 1)]))
    with pytest.raises(ContractError):
        msb(s, MsbParams(), np.random.default_rng(0))


def test_group_test_dc():
    assert group_test(pure(10009, 0), MsbParams(), np.random.default_rng(0)).frequency == 0


def test_group_test_zero_signal():
    g = group_test(DenseOracle(np.zeros(101)), MsbParams(), np.random.default_rng(0))
    assert g.frequency is None and g.rounds == 1


def test_group_test_theory_round_bound():
    n = 10009
    bound = math.ceil(math.log(n) / math.log(12 / 9)) + 1
    rng = np.random.default_rng(2)
    for _ in range(100):
        omega = int(rng.integers(0, n))
        g = group_test(pure(n, omega), MsbParams(), rng)
        assert g.frequency == omega
        assert g.rounds <= bound
        assert g.energy_estimates == 12 * g.rounds


@pytest.mark.parametrize("mode", ["practice", "theory"])
def test_group_test_widths_shrink(mode):
    g = group_test(pure(3 ** 8, 1234), MsbParams(1, mode), np.random.default_rng(5))
    assert g.widths[0] == 3 ** 8 and g.widths[-1] < 1
    assert all(b <= a for a, b in zip(g.widths, g.widths[1:]))


def test_lockstep_matches_single():
    n = 4099
    signals = [pure(n, w) for w in (5, 77, 4000, 2048)]
    many = group_test_many(signals, MsbParams(), [np.random.default_rng(i) for i in range(4)])
    for i, f in enumerate(signals):
        one = group_test(f, MsbParams(), np.random.default_rng(i))
        assert (one.frequency, one.rounds, one.widths) == (many[i].frequency, many[i].rounds,
                                                           many[i].widths)


def test_group_test_many_checks_inputs():
    with pytest.raises(ContractError):
        group_test_many([pure(11, 1)], MsbParams(), [])
    assert group_test_many([], MsbParams(), []) == []


@pytest.mark.parametrize("n", [3 ** 5, 1000, 3 ** 8])
def test_digit_recomposition_identity(n):
    # encode every frequency with the band geometry (exact bands, one band
    # kept per round) and decode the recorded digits again
    w = 3
    for omega in range(n):
        rng = np.random.default_rng(omega)
        lo, hi, stuck, digits = -n / 2, n / 2, False, []
        while hi - lo >= 1:
            s, centre = plan_round(lo, hi, n, w, stuck, rng)
            digit = round((s * (omega - int(centre)) % n) * w / n) % w
            digits.append((s, centre, digit))
            new = narrow_interval(lo, hi, centre, s, digit, 1, w, n)
            stuck = new[1] - new[0] >= hi - lo
            lo, hi = new
            assert len(digits) < 64
        lo, hi = -n / 2, n / 2
        for s, centre, digit in digits:
            lo, hi = narrow_interval(lo, hi, centre, s, digit, 1, w, n)
        assert round((lo + hi) / 2) % n == omega


def test_narrow_interval_full_circle():
    assert narrow_interval(-50, 50, 0, 1, 0, 1, 4, 100) == (-12.5, 12.5)
    assert narrow_interval(-50, 50, 10, 1, 2, 1, 4, 100) == (47.5, 72.5)


def test_plan_round_dilation():
    rng = np.random.default_rng(0)
    s, centre = plan_round(0.0, 10.0, 1000, 3, False, rng)
    assert s == 100 and abs(centre - 5) <= 1


@pytest.mark.parametrize("query, radius, expected", [(40, 1, 40), (41, 1, 40), (39, 2, 40),
                                                      (45, 0, 45)])
def test_neighbor_refine(query, radius, expected):
    s = pure(101, 40, 3.0)
    p = CoefficientEstimatorParams(10, 5)
    assert neighbor_refine(s, query, radius, p, np.random.default_rng(0)) == expected


def test_neighbor_refine_wraps():
    s = pure(101, 0)
    p = CoefficientEstimatorParams(10, 5)
    assert neighbor_refine(s, 100, 1, p, np.random.default_rng(0)) == 0
    with pytest.raises(ParameterError):
        neighbor_refine(s, 3, -1, p, np.random.default_rng(0))
