"""Isolation: random spectral permutation followed by a narrow box-car filter.

Each repetition draws a fresh permutation so that, with constant probability,
one significant frequency lands in the filter pass band while the others are
attenuated.  The filtered signals are evaluated lazily; a family of them is
held in an :class:`IsolationBatch` so that group testing can sample all of
them with one call into the underlying signal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ParameterError
from .signal_model import SignalOracle, unit_roots
from .transform_sampling import (AffinePermutationND, AffinePermutedOracle, AxisConvolvedOracle,
                                 ConvolvedOracle, FrequencyPermutation1D, PermutedOracle,
                                 filter_taps, random_affine_permutation, random_permutation)


def choose_filter_width(b: int) -> int:
    """Box-car half-width for sparsity ``b``: 1 up to 8, 2 up to 64, then ``ceil(log2(b)/2)``."""
    if b < 1:
        raise ParameterError("sparsity must be positive")
    if b <= 8:
        return 1
    if b <= 64:
        return 2
    return math.ceil(math.log2(b) / 2)


@dataclass(frozen=True)
class IsolationParams:
    filter_half_width: int = 1
    repetitions: int = 5
    eta: float = 1.0 / 32

    def __post_init__(self):
        if self.filter_half_width < 0 or self.repetitions < 1:
            raise ParameterError("invalid isolation parameters")

    @classmethod
    def for_sparsity(cls, b: int, delta: float, k: int | None = None) -> "IsolationParams":
        """``ceil(log2(1/delta))`` repetitions and ``eta = 1/(4b)``."""
        if not 0 < delta < 1:
            raise ParameterError("delta must lie in (0, 1)")
        k = choose_filter_width(b) if k is None else k
        return cls(k, max(1, math.ceil(math.log2(1.0 / delta))), 1.0 / (4 * b))


class IsolationBatch:
    """Filtered permuted copies ``F_j = H_k *_axis P_j S`` of one signal.

    ``P_j`` is the affine permutation ``x -> e^{2 pi i <b_j, x>/N} S(A_j^T x)``
    (in 1-D, ``R_{theta, sigma}``) and the filter acts along ``filter_axes[j]``.
    One-dimensional slices through ``base_points[j]`` are the objects handed
    to group testing.
    """

    def __init__(self, s: SignalOracle, perms: list[AffinePermutationND], k: int,
                 filter_axes=None, base_points=None):
        if 2 * k + 1 > s.n:
            raise ParameterError("filter support exceeds the signal length")
        self.s = s
        self.n, self.d = s.n, s.d
        self.k = k
        self.perms = list(perms)
        m = len(perms)
        self.a = np.stack([p.a for p in perms]).astype(np.int64)
        self.b = np.stack([p.b for p in perms]).astype(np.int64)
        self.filter_axes = np.zeros(m, np.int64) if filter_axes is None else np.asarray(filter_axes, np.int64)
        self.base_points = (np.zeros((m, self.d), np.int64) if base_points is None
                            else np.asarray(base_points, np.int64).reshape(m, self.d) % self.n)
        self.taps = filter_taps(k, self.n)
        self.offsets = np.arange(-k, k + 1, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.perms)

    def evaluate(self, rep: np.ndarray, axis: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Values of ``F_rep`` on the slice along ``axis`` at coordinate ``u``.

        All three arguments are integer arrays of equal length.  Each value
        costs ``2k + 1`` samples of the underlying signal.
        """
        n, d = self.n, self.d
        rep = np.asarray(rep, np.int64)
        u = np.asarray(u, np.int64)
        if d == 1:
            y = np.mod(u[:, None] - self.offsets[None, :], n)
            src = np.mod(self.a[rep, 0, 0][:, None] * y, n)
            phase = np.mod(self.b[rep, 0][:, None] * y, n)
            vals = self.s.evaluate(src.reshape(-1), check=False).reshape(src.shape)
        else:
            x = self.base_points[rep].copy()
            x[np.arange(len(u)), np.asarray(axis, np.int64)] = u
            y = np.repeat(x[:, None, :], len(self.offsets), axis=1)
            fa = self.filter_axes[rep]
            rows = np.arange(len(u))
            y[rows, :, fa] = np.mod(y[rows, :, fa] - self.offsets[None, :], n)
            src = np.mod(np.einsum("mlr,mrj->mlj", y, self.a[rep]), n)
            phase = np.mod(np.einsum("mlr,mr->ml", y, self.b[rep]), n)
            vals = self.s.evaluate(src.reshape(-1, d), check=False).reshape(phase.shape)
        return (unit_roots(phase, n) * vals) @ self.taps

    def member(self, rep: int, axis: int = 0) -> "BatchSliceOracle":
        return BatchSliceOracle(self, rep, axis)


class BatchSliceOracle(SignalOracle):
    """1-D oracle for one slice of one member of an :class:`IsolationBatch`."""

    def __init__(self, batch: IsolationBatch, rep: int, axis: int = 0):
        super().__init__(batch.n, 1, batch.s.counter)
        self.batch = batch
        self.rep = int(rep)
        self.axis = int(axis)

    def _evaluate(self, u):
        m = u.shape[0]
        return self.batch.evaluate(np.full(m, self.rep), np.full(m, self.axis), u)


@dataclass
class IsolatedSignal:
    """One filtered permuted copy of the input.

    ``oracle`` is the full filtered signal (d-dimensional); ``slice_oracle``
    gives the 1-D slices used by group testing.  ``inverse_map`` takes a
    frequency of the filtered signal back to the input's frequency grid.
    """

    batch: IsolationBatch
    index: int
    permutation: FrequencyPermutation1D | AffinePermutationND

    @property
    def oracle(self) -> SignalOracle:
        s, k = self.batch.s, self.batch.k
        if isinstance(self.permutation, FrequencyPermutation1D):
            return ConvolvedOracle(PermutedOracle(s, self.permutation), k)
        axis = int(self.batch.filter_axes[self.index])
        return AxisConvolvedOracle(AffinePermutedOracle(s, self.permutation), k, axis)

    def slice_oracle(self, axis: int = 0) -> BatchSliceOracle:
        return self.batch.member(self.index, axis)

    def inverse_map(self, nu):
        return self.permutation.inverse(nu)


def isolate(s: SignalOracle, p: IsolationParams, rng: np.random.Generator) -> list[IsolatedSignal]:
    """Draw ``p.repetitions`` permutations and return the filtered signals.

    In 1-D the permutations are ``R_{theta, sigma}`` with ``sigma`` coprime
    to ``N``.  In higher dimension each repetition draws an affine map, a
    random filter axis and a uniform base point for its slices.
    """
    if s.d == 1:
        perms1 = [random_permutation(s.n, rng) for _ in range(p.repetitions)]
        batch = IsolationBatch(s, [AffinePermutationND.from_1d(q) for q in perms1],
                               p.filter_half_width)
        return [IsolatedSignal(batch, j, q) for j, q in enumerate(perms1)]
    perms = [random_affine_permutation(s.d, s.n, rng) for _ in range(p.repetitions)]
    axes = rng.integers(0, s.d, size=p.repetitions)
    base = rng.integers(0, s.n, size=(p.repetitions, s.d))
    batch = IsolationBatch(s, perms, p.filter_half_width, axes, base)
    return [IsolatedSignal(batch, j, q) for j, q in enumerate(perms)]


def same_batch(signals: list[IsolatedSignal]) -> IsolationBatch | None:
    if not signals:
        raise ContractError("no isolated signals given")
    first = signals[0].batch
    return first if all(x.batch is first for x in signals) else None
