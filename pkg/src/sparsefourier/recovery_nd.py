"""Recovery on Z_N^d.

Location works one axis at a time.  A random affine permutation spreads the
significant frequencies, a box-car filter along one random axis isolates one
of them, and for every axis a 1-D group test runs on the slice through a
random base point.  The per-axis answers form a frequency of the permuted
signal; it and its ``2d`` axis neighbours are mapped back through the
inverse permutation and the one with the largest estimated coefficient is
proposed.  The cost of a candidate is one group test per axis, so the number
of band-energy estimates grows linearly with ``d``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ParameterError
from .estimators import estimate_coefficients
from .group_testing import group_test_many
from .isolation import isolate
from .recovery import (RecoveryParams, RecoveryReport, _T_GROUP, _T_ISOLATE, _T_NEIGHBOR,
                       greedy_recover, recover, stream)
from .signal_model import SignalOracle


@dataclass
class NdCandidate:
    frequency: tuple[int, ...] | None
    permuted: tuple[int, ...] | None
    energy_estimates: int
    rounds_per_axis: list[int]


def locate_nd_detailed(res: SignalOracle, p: RecoveryParams, seed: int,
                       iteration: int) -> list[NdCandidate]:
    n, d = res.n, res.d
    isolated = isolate(res, p.isolation_params(), stream(seed, iteration, _T_ISOLATE))
    slices, rngs = [], []
    for j, x in enumerate(isolated):
        for axis in range(d):
            slices.append(x.slice_oracle(axis))
            rngs.append(stream(seed, iteration, _T_GROUP + j * d + axis))
    found = group_test_many(slices, p.msb_params(), rngs)
    coarse = p.coarse_params()
    out = []
    for j, x in enumerate(isolated):
        parts = found[j * d:(j + 1) * d]
        rounds = [g.rounds for g in parts]
        count = sum(g.energy_estimates for g in parts)
        if any(g.frequency is None for g in parts):
            out.append(NdCandidate(None, None, count, rounds))
            continue
        nu = np.array([g.frequency for g in parts], dtype=np.int64)
        around = [nu]
        if p.neighbor_radius > 0:
            for axis in range(d):
                for step in range(1, p.neighbor_radius + 1):
                    for sign in (-1, 1):
                        v = nu.copy()
                        v[axis] = (v[axis] + sign * step) % n
                        around.append(v)
        around = np.array(around)
        omegas = np.asarray(x.inverse_map(around), dtype=np.int64)
        if len(omegas) > 1:
            est = estimate_coefficients(res, omegas, coarse,
                                        stream(seed, iteration, _T_NEIGHBOR + 1000 * (j + 1)))
            best = int(np.argmax(np.abs(est)))
        else:
            best = 0
        out.append(NdCandidate(tuple(int(v) for v in omegas[best]),
                               tuple(int(v) for v in around[best]), count, rounds))
    return out


def locate_nd(res: SignalOracle, p: RecoveryParams, seed: int, iteration: int) -> list:
    cands = locate_nd_detailed(res, p, seed, iteration)
    return sorted({c.frequency for c in cands if c.frequency is not None})


def recover_nd(s: SignalOracle, p: RecoveryParams, seed: int = 0) -> RecoveryReport:
    """Recover a ``b``-term approximation of a signal on Z_N^d.

    For ``d = 1`` this is exactly :func:`recover`.
    """
    if s.d == 1:
        return recover(s, p, seed)
    if s.d < 1:
        raise ContractError("dimension must be positive")
    if 2 * p.isolation_params().filter_half_width + 1 > s.n:
        raise ParameterError("isolation filter is wider than the signal")
    return greedy_recover(s, p, seed, locate_nd)
