"""Greedy sparse Fourier recovery driver.

Each iteration estimates the residual energy, stops when it is small
relative to the current representation, and otherwise locates candidate
frequencies of the residual (isolation, group testing, neighbour check),
estimates their coefficients and keeps the significant ones.  Once the
residual is a small fraction of the representation the coefficients are
polished by multi-step refinement.  All randomness comes from generators
keyed by ``(seed, iteration, task)``.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ContractError, ParameterError
from .estimators import (CoefficientEstimatorParams, EnergyEstimatorParams, estimate_coefficients,
                         estimate_energy, refine_coefficients)
from .group_testing import MsbParams, group_test_many, neighbor_refine
from .isolation import IsolationParams, isolate
from .signal_model import SignalOracle, SparseRepresentation, residual_oracle

_L_MAX = 1 << 20


@dataclass
class RecoveryParams:
    """Settings for :func:`recover`.

    ``b`` is the number of terms to report.  ``epsilon`` is the relative l2
    accuracy targeted by the final coefficient refinement, ``iota`` the
    stopping ratio ``||S - R||^2 <= iota ||R||^2``.  With ``noise_sigma > 0``
    the default significance cutoff is a per-sample amplitude of
    ``noise_sigma / 6``, i.e. a coefficient of ``N^{d/2} noise_sigma / 6``.
    """

    b: int
    epsilon: float = 0.01
    delta: float = 0.05
    iota: float = 1e-4
    noise_sigma: float = 0.0
    energy_bound: float | None = None
    significance_cutoff: float | None = None
    max_iterations: int = 1000
    k_isolation: int | None = None
    k_msb: int = 1
    msb_mode: str = "theory"
    eta_compare: float = 0.1
    preset: str = "practical"
    sampling_mode: str = "independent"
    switch_ratio: float = 0.1
    neighbor_radius: int = 1
    isolation_repetitions: int | None = None

    def __post_init__(self):
        if self.b < 1:
            raise ParameterError("b must be positive")
        if not 0 < self.delta < 1:
            raise ParameterError("delta must lie in (0, 1)")
        if not (self.epsilon > 0 and self.iota > 0):
            raise ParameterError("epsilon and iota must be positive")
        if self.noise_sigma < 0:
            raise ParameterError("noise_sigma must be non-negative")
        if self.preset not in ("practical", "proven"):
            raise ParameterError("preset must be 'practical' or 'proven'")
        if self.max_iterations < 1:
            raise ParameterError("max_iterations must be positive")

    @property
    def eta(self) -> float:
        return 1.0 / (4 * self.b)

    def iteration_cap(self, n: int) -> int:
        """``ceil(b log2 N log2(1/delta) / epsilon^2)`` capped by ``max_iterations``."""
        t = math.ceil(self.b * math.log2(n) * math.log2(1 / self.delta) / self.epsilon ** 2)
        return max(1, min(t, self.max_iterations))

    def cutoff(self, n: int, d: int) -> float:
        if self.significance_cutoff is not None:
            return self.significance_cutoff
        if self.noise_sigma > 0:
            return self.noise_sigma * n ** (d / 2) / 6.0
        if self.energy_bound is not None:
            return self.epsilon * math.sqrt(self.energy_bound)
        return 0.0

    def coarse_params(self) -> CoefficientEstimatorParams:
        if self.preset == "practical":
            return CoefficientEstimatorParams.practical(self.sampling_mode)
        return CoefficientEstimatorParams.proven(math.sqrt(self.eta) / 2, self.delta, 1,
                                                 self.sampling_mode)

    def energy_params(self) -> EnergyEstimatorParams:
        return EnergyEstimatorParams.from_delta(self.delta)

    def isolation_params(self) -> IsolationParams:
        p = IsolationParams.for_sparsity(self.b, self.delta, self.k_isolation)
        if self.isolation_repetitions is not None:
            p = IsolationParams(p.filter_half_width, self.isolation_repetitions, p.eta)
        return p

    def msb_params(self) -> MsbParams:
        return MsbParams(self.k_msb, self.msb_mode, self.eta_compare, self.energy_params())


@dataclass
class RecoveryReport:
    representation: SparseRepresentation
    iterations: int
    samples_used: int
    wall_time_total: float
    wall_time_excluding_sampling: float
    residual_energy_estimate: float
    status: str
    trace: list = field(default_factory=list)

    @property
    def exhausted(self) -> bool:
        return self.status == "iteration_cap"

    def to_dict(self) -> dict:
        return {
            "representation": self.representation.to_dict(),
            "iterations": self.iterations,
            "samples_used": self.samples_used,
            "wall_time_total": self.wall_time_total,
            "wall_time_excluding_sampling": self.wall_time_excluding_sampling,
            "residual_energy_estimate": self.residual_energy_estimate,
            "status": self.status,
            "trace": self.trace,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def stream(seed: int, iteration: int, task: int) -> np.random.Generator:
    """Independent generator for one logical task of one iteration."""
    return np.random.default_rng([int(seed), int(iteration), int(task)])


# Task ids within an iteration.
_T_ENERGY, _T_ISOLATE, _T_REFINE, _T_CONFIRM, _T_NEIGHBOR, _T_GROUP = 0, 1, 2, 3, 4, 5

Locator = Callable[[SignalOracle, RecoveryParams, int, int], list]


def refinement_params(p: RecoveryParams, q: int, rep_energy: float, residual: float,
                      noise_energy: float) -> CoefficientEstimatorParams:
    """Sample sizes for refining ``q`` coefficients to relative accuracy ``epsilon``.

    Each round shrinks the coefficient error energy by roughly
    ``rho = q * epsilon_hat^2``.  Without noise the rounds compound, so
    ``rho`` is the ``n``-th root of the needed reduction; with noise the
    residual never drops below the noise floor and one round must already
    reach the target.
    """
    coarse = p.coarse_params()
    steps = max(coarse.refinement_steps, 3)
    target = (p.epsilon ** 2) * rep_energy
    base = max(residual, noise_energy, 1e-300)
    if noise_energy > 0:
        rho = target / base
    else:
        rho = (target / base) ** (1.0 / steps)
    rho = min(max(rho, 1e-12), 0.5)
    per_coefficient = math.ceil(4 * q / rho)
    k = coarse.num_means
    big_l = min(max(math.ceil(per_coefficient / k), coarse.samples_per_mean), _L_MAX)
    return CoefficientEstimatorParams(big_l, k, steps, math.sqrt(rho / q) * 0.999,
                                      p.sampling_mode)


def confirm_params(p: RecoveryParams, residual: float, threshold: float,
                   precision: float = 3.0) -> CoefficientEstimatorParams:
    """Estimator whose error is about ``threshold / precision`` on this residual."""
    coarse = p.coarse_params()
    k = coarse.num_means
    if threshold <= 0:
        return coarse
    need = math.ceil(1.6 * precision ** 2 * residual / (threshold ** 2 * k))
    big_l = min(max(need, coarse.samples_per_mean), _L_MAX)
    return CoefficientEstimatorParams(big_l, k, 1, coarse.epsilon_hat, p.sampling_mode)


def greedy_recover(s: SignalOracle, p: RecoveryParams, seed: int, locate: Locator) -> RecoveryReport:
    """Shared greedy loop; ``locate`` proposes candidate frequencies of a residual."""
    n, d = s.n, s.d
    count0, sampling0 = s.counter.snapshot()
    t0 = time.perf_counter()
    rep = SparseRepresentation(n, d)
    cap = p.iteration_cap(n)
    noisy = p.noise_sigma > 0
    noise_energy = float(n) ** d * p.noise_sigma ** 2
    keep = max(2 * p.b, p.b + 8)
    energy_p = p.energy_params()
    trace = []
    status = "iteration_cap"
    refined = True
    residual_est = float("nan")
    iteration = 0
    quiet = False

    def polish(it: int, est: float) -> None:
        nonlocal rep
        if len(rep) == 0:
            return
        q = len(rep)
        rp = refinement_params(p, q, rep.energy(), est, noise_energy if noisy else 0.0)
        freqs = rep.frequencies()
        z = refine_coefficients(s, freqs, rp, stream(seed, it, _T_REFINE),
                                initial=rep.coefficients())
        rep = SparseRepresentation.from_arrays(n, freqs, z, d)

    for iteration in range(cap):
        res = residual_oracle(s, rep)
        residual_est = estimate_energy(res, energy_p, stream(seed, iteration, _T_ENERGY))
        r2 = rep.energy()
        if residual_est == 0.0:
            status = "converged" if len(rep) else "zero_signal"
            break
        if r2 > 0 and residual_est <= p.iota * r2:
            status = "converged"
            break
        if noisy and len(rep) >= p.b and quiet:
            status = "saturated"
            break
        if not noisy and not refined and r2 > 0 and residual_est <= p.switch_ratio * r2:
            polish(iteration, residual_est)
            refined = True
            res = residual_oracle(s, rep)
            residual_est = estimate_energy(res, energy_p, stream(seed, iteration, _T_ENERGY + 100))
            r2 = rep.energy()
            if residual_est <= p.iota * r2:
                status = "converged"
                break

        candidates = locate(res, p, seed, iteration)
        candidates = sorted(set(candidates))
        accepted = []
        if candidates:
            if noisy:
                tau = p.cutoff(n, d)
            else:
                tau = max(p.cutoff(n, d), math.sqrt(p.eta * residual_est))
            # a screening estimate, then a precise one for the candidates that pass
            arr = np.array(candidates, dtype=np.int64).reshape(len(candidates), d)
            arr = arr if d > 1 else arr.reshape(-1)
            est = estimate_coefficients(res, arr, confirm_params(p, residual_est, tau),
                                        stream(seed, iteration, _T_CONFIRM))
            keep_idx = np.flatnonzero(np.abs(est) >= tau)
            passed = []
            if len(keep_idx):
                est2 = estimate_coefficients(res, arr[keep_idx],
                                             confirm_params(p, residual_est, tau, 8.0),
                                             stream(seed, iteration, _T_CONFIRM + 100))
                passed = [(candidates[i], c) for i, c in zip(keep_idx, est2)]
            for freq, c in passed:
                if abs(c) >= tau and abs(c) > 0:
                    rep.add(freq, c)
                    accepted.append([list(freq), c.real, c.imag])
                    refined = False
            if len(rep) > keep:
                rep = rep.top(keep)
        quiet = not accepted
        trace.append({
            "iteration": iteration,
            "residual_estimate": residual_est,
            "candidates": [list(c) for c in candidates],
            "accepted": accepted,
            "terms": len(rep),
            "samples": s.counter.count - count0,
        })
    else:
        iteration = cap

    iterations = iteration + 1 if status != "iteration_cap" else cap
    if len(rep) and (noisy or not refined):
        polish(cap + 1, residual_est)
    rep = rep.top(p.b)
    count1, sampling1 = s.counter.snapshot()
    total = time.perf_counter() - t0
    return RecoveryReport(rep, iterations, count1 - count0, total,
                          total - (sampling1 - sampling0), residual_est, status, trace)


def locate_1d(res: SignalOracle, p: RecoveryParams, seed: int, iteration: int) -> list:
    """Candidate frequencies of a 1-D residual, one per isolation repetition."""
    isolated = isolate(res, p.isolation_params(), stream(seed, iteration, _T_ISOLATE))
    rngs = [stream(seed, iteration, _T_GROUP + j) for j in range(len(isolated))]
    found = group_test_many([x.slice_oracle() for x in isolated], p.msb_params(), rngs)
    coarse = p.coarse_params()
    out = set()
    for j, (x, g) in enumerate(zip(isolated, found)):
        if g.frequency is None:
            continue
        omega = int(x.inverse_map(g.frequency))
        if p.neighbor_radius > 0:
            omega = neighbor_refine(res, omega, p.neighbor_radius, coarse,
                                    stream(seed, iteration, _T_NEIGHBOR + 1000 * (j + 1)))
        out.add((omega,))
    return sorted(out)


def recover(s: SignalOracle, p: RecoveryParams, seed: int = 0) -> RecoveryReport:
    """Recover a ``b``-term Fourier approximation of a 1-D signal."""
    if s.d != 1:
        raise ContractError("recover expects a 1-D signal; use recover_nd")
    if 2 * p.isolation_params().filter_half_width + 1 > s.n:
        raise ParameterError("isolation filter is wider than the signal")
    return greedy_recover(s, p, seed, locate_1d)
