"""Median-of-means coefficient estimates and order-statistic energy estimates."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ParameterError
from .signal_model import SignalOracle, SparseRepresentation, residual_oracle, unit_roots
from .transform_sampling import sample_positions


@dataclass(frozen=True)
class CoefficientEstimatorParams:
    """Median of ``num_means`` means of ``samples_per_mean`` samples.

    ``epsilon_hat`` is the per-round accuracy factor used by the multi-step
    refinement contraction check ``q * epsilon_hat**2 < 1``.
    """

    samples_per_mean: int
    num_means: int
    refinement_steps: int = 1
    epsilon_hat: float = 0.1
    sampling_mode: str = "independent"
    progression_length: int = 8

    def __post_init__(self):
        if self.samples_per_mean < 1 or self.num_means < 1:
            raise ParameterError("sample counts must be positive")
        if self.num_means % 2 == 0:
            raise ParameterError("num_means must be odd")
        if self.refinement_steps < 1:
            raise ParameterError("refinement_steps must be positive")
        if not 0 < self.epsilon_hat:
            raise ParameterError("epsilon_hat must be positive")

    @classmethod
    def proven(cls, epsilon: float, delta: float, steps: int = 1,
               sampling_mode: str = "independent") -> "CoefficientEstimatorParams":
        """``L = ceil(8 / eps^2)``, ``K = ceil(2 log2(1/delta))`` rounded up to odd."""
        if not (0 < epsilon and 0 < delta < 1):
            raise ParameterError("need epsilon > 0 and 0 < delta < 1")
        big_l = math.ceil(8.0 / epsilon ** 2)
        k = max(1, math.ceil(2.0 * math.log2(1.0 / delta)))
        k += 1 - k % 2
        return cls(big_l, k, steps, epsilon, sampling_mode)

    @classmethod
    def practical(cls, sampling_mode: str = "independent") -> "CoefficientEstimatorParams":
        """Ten samples per mean, five means, three refinement steps."""
        return cls(10, 5, 3, 0.1, sampling_mode)

    @property
    def samples_per_estimate(self) -> int:
        return self.samples_per_mean * self.num_means


@dataclass(frozen=True)
class EnergyEstimatorParams:
    """``num_samples`` must be a positive multiple of five."""

    num_samples: int

    def __post_init__(self):
        if self.num_samples < 5 or self.num_samples % 5:
            raise ParameterError("num_samples must be a positive multiple of 5")

    @classmethod
    def from_delta(cls, delta: float) -> "EnergyEstimatorParams":
        """``floor(12.5 ln(1/delta))`` rounded down to a multiple of 5 (at least 5)."""
        if not 0 < delta < 1:
            raise ParameterError("delta must lie in (0, 1)")
        r = int(math.floor(12.5 * math.log(1.0 / delta)))
        return cls(max(5, r - r % 5))

    @property
    def order_index(self) -> int:
        """1-based index of the reported order statistic, ``floor(3r/5)``."""
        return (3 * self.num_samples) // 5


def _draw(s: SignalOracle, count: int, rng, mode: str = "independent",
          progression_length: int = 8) -> np.ndarray:
    if s.d == 1:
        return sample_positions(mode, count, s.n, rng, progression_length)[:count]
    if mode == "independent":
        return rng.integers(0, s.n, size=(count, s.d), dtype=np.int64)
    # progressions run along the first axis, other coordinates uniform
    first = sample_positions(mode, count, s.n, rng, progression_length)[:count]
    rest = rng.integers(0, s.n, size=(count, s.d - 1), dtype=np.int64)
    return np.column_stack([first, rest])


def _median_of_means(x: np.ndarray, big_l: int, k: int) -> np.ndarray:
    """``x`` has shape ``(q, k * L)``; returns the componentwise median of means."""
    means = x.reshape(x.shape[0], k, big_l).mean(axis=2)
    return np.median(means.real, axis=1) + 1j * np.median(means.imag, axis=1)


def estimate_coefficients(s: SignalOracle, omegas, p: CoefficientEstimatorParams,
                          rng: np.random.Generator) -> np.ndarray:
    """Estimate ``S_hat`` at several frequencies from one shared sample set.

    Each sample contributes ``N^{d/2} S(t) e^{-2 pi i <w, t>/N}``, an unbiased
    estimate of ``S_hat(w)`` with variance at most ``||S||^2``.
    """
    n, d = s.n, s.d
    om = np.asarray(omegas, dtype=np.int64)
    om = om.reshape(-1) if d == 1 else om.reshape(-1, d)
    if om.size and (om.min() < 0 or om.max() >= n):
        raise ContractError("frequency outside [0, N)")
    count = p.samples_per_estimate
    t = _draw(s, count, rng, p.sampling_mode, p.progression_length)
    vals = s.evaluate(t, check=False)
    phase = np.mod(np.outer(om, t) if d == 1 else om @ t.T, n)
    x = (n ** (d / 2)) * vals[None, :] * unit_roots(-phase, n)
    return _median_of_means(x, p.samples_per_mean, p.num_means)


def estimate_coefficient(s: SignalOracle, omega, p: CoefficientEstimatorParams,
                         rng: np.random.Generator) -> complex:
    """Median-of-means estimate of a single coefficient ``S_hat(omega)``."""
    om = np.asarray(omega, dtype=np.int64)
    if s.d > 1 and om.shape != (s.d,):
        raise ContractError(f"frequency must have {s.d} coordinates")
    return complex(estimate_coefficients(s, om.reshape(1, -1) if s.d > 1 else om.reshape(1),
                                         p, rng)[0])


def order_statistic_energy(values: np.ndarray, scale: float, order_index: int) -> np.ndarray:
    """``scale`` times the ``order_index``-th smallest ``|v|^2`` along the last axis."""
    e = np.abs(values) ** 2
    return scale * np.partition(e, order_index - 1, axis=-1)[..., order_index - 1]


def estimate_energy(s: SignalOracle, p: EnergyEstimatorParams,
                    rng: np.random.Generator) -> float:
    """Order-statistic estimate of ``||S||^2`` from ``r`` uniform samples.

    Returns ``N^d`` times the ``floor(3r/5)``-th smallest of ``|S(t_i)|^2``.
    """
    t = _draw(s, p.num_samples, rng)
    vals = s.evaluate(t, check=False)
    return float(order_statistic_energy(vals, float(s.n) ** s.d, p.order_index))


def refine_coefficients(s: SignalOracle, omegas, p: CoefficientEstimatorParams,
                        rng: np.random.Generator, initial=None) -> np.ndarray:
    """Multi-step estimation of the coefficients at known frequencies.

    Round ``k`` estimates every coefficient of the residual
    ``S - sum_i Z_i phi_{w_i}`` and adds the estimates to ``Z``.  The error
    contracts by roughly ``q * epsilon_hat**2`` per round, so that product
    must stay below one.
    """
    n, d = s.n, s.d
    om = np.asarray(omegas, dtype=np.int64)
    om = om.reshape(-1) if d == 1 else om.reshape(-1, d)
    q = om.shape[0]
    if q == 0:
        return np.zeros(0, dtype=complex)
    keys = om.reshape(q, d)
    if len({tuple(r) for r in keys.tolist()}) != q:
        raise ContractError("frequencies must be distinct")
    if q * p.epsilon_hat ** 2 >= 1:
        raise ParameterError(
            f"q * epsilon_hat^2 = {q * p.epsilon_hat ** 2:.3g} >= 1; the refinement diverges")
    z = np.zeros(q, dtype=complex) if initial is None else np.array(initial, dtype=complex)
    for _ in range(p.refinement_steps):
        current = SparseRepresentation.from_arrays(n, keys, z, d)
        z = z + estimate_coefficients(residual_oracle(s, current), om, p, rng)
    return z
