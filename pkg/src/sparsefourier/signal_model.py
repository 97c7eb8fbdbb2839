"""Discrete signals on Z_N^d, sparse Fourier representations and sample oracles.

Conventions
-----------
The transform is unitary::

    S_hat(w) = N^{-d/2} sum_t S(t) exp(-2 pi i <w, t> / N)

with basis ``phi_w(t) = N^{-d/2} exp(2 pi i <w, t> / N)``.  A sparse
representation ``R = sum_j c_j phi_{w_j}`` is therefore evaluated as
``R(t) = N^{-d/2} sum_j c_j exp(2 pi i <w_j, t> / N)``.

Oracles evaluate index *arrays*.  Source oracles count every evaluated point
and the wall time spent producing the values; composite oracles (residuals,
permutations, filters) forward to their parent and share its counter.
"""
from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ContractError, RangeError

# Largest N for which a table of N-th roots of unity is cached (16 bytes each).
_TABLE_MAX = 1 << 23


@lru_cache(maxsize=6)
def _roots_table(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def unit_roots(k, n: int) -> np.ndarray:
    """Return ``exp(2 pi i k / n)`` for integer ``k`` of any sign.

    Integer phases are reduced mod ``n`` first, so the result stays exact to
    rounding even when ``k`` is large.
    """
    k = np.mod(np.asarray(k, dtype=np.int64), n)
    if n <= _TABLE_MAX:
        return _roots_table(n)[k]
    return np.exp(2j * np.pi * k / n)


def _as_points(t, n: int, d: int, check: bool = True) -> tuple[np.ndarray, bool]:
    """Normalise ``t`` to an int64 array of shape ``(m,)`` (d=1) or ``(m, d)``."""
    arr = np.asarray(t)
    if arr.dtype.kind not in "iu":
        if arr.dtype.kind == "f" and np.all(np.floor(arr) == arr):
            arr = arr.astype(np.int64)
        else:
            raise ContractError("sample positions must be integers")
    arr = arr.astype(np.int64, copy=False)
    if d == 1:
        scalar = arr.ndim == 0
        arr = arr.reshape(-1) if arr.ndim <= 1 else arr
        if arr.ndim != 1:
            raise ContractError("1-D oracle expects a scalar or a vector of positions")
    else:
        scalar = arr.ndim == 1
        arr = arr.reshape(1, d) if scalar else arr
        if arr.ndim != 2 or arr.shape[1] != d:
            raise ContractError(f"{d}-D oracle expects points of shape (m, {d})")
    if check and arr.size and (arr.min() < 0 or arr.max() >= n):
        raise RangeError(f"sample position outside [0, {n})")
    return arr, scalar


def inner_phase(freqs: np.ndarray, t: np.ndarray, n: int) -> np.ndarray:
    """Integer phases ``<w_j, t_m> mod n`` with shape ``(len(freqs), len(t))``."""
    if t.ndim == 1:
        return np.mod(np.outer(freqs.reshape(-1), t), n)
    return np.mod(freqs @ t.T, n)


# ---------------------------------------------------------------------------
# Sparse representations


def _freq_key(freq, n: int, d: int) -> tuple[int, ...]:
    f = np.atleast_1d(np.asarray(freq, dtype=np.int64))
    if f.shape != (d,):
        raise ContractError(f"frequency must have {d} coordinate(s)")
    return tuple(int(x) % n for x in f)


class SparseRepresentation:
    """Finite set of (frequency, coefficient) pairs on Z_N^d.

    Frequencies are canonical tuples in ``[0, N)^d``; adding a frequency that
    is already present accumulates the coefficient.
    """

    def __init__(self, n: int, d: int = 1, modes: Iterable | None = None):
        if n < 2:
            raise ContractError("N must be at least 2")
        if d < 1:
            raise ContractError("d must be at least 1")
        self.n = int(n)
        self.d = int(d)
        self._modes: dict[tuple[int, ...], complex] = {}
        self._cache = None
        for freq, coef in modes or ():
            self.add(freq, coef)

    # -- container protocol
    def __len__(self) -> int:
        return len(self._modes)

    def __contains__(self, freq) -> bool:
        return _freq_key(freq, self.n, self.d) in self._modes

    def __iter__(self):
        return iter(self._modes.items())

    def __repr__(self) -> str:
        return f"SparseRepresentation(n={self.n}, d={self.d}, modes={len(self)})"

    def copy(self) -> "SparseRepresentation":
        out = SparseRepresentation(self.n, self.d)
        out._modes = dict(self._modes)
        return out

    def add(self, freq, coef: complex) -> None:
        key = _freq_key(freq, self.n, self.d)
        self._modes[key] = self._modes.get(key, 0j) + complex(coef)
        self._cache = None

    def set(self, freq, coef: complex) -> None:
        self._modes[_freq_key(freq, self.n, self.d)] = complex(coef)
        self._cache = None

    def remove(self, freq) -> None:
        del self._modes[_freq_key(freq, self.n, self.d)]
        self._cache = None

    def coefficient(self, freq) -> complex:
        return self._modes.get(_freq_key(freq, self.n, self.d), 0j)

    def keys(self) -> list[tuple[int, ...]]:
        return list(self._modes)

    def frequencies(self) -> np.ndarray:
        """Frequencies as ``(q,)`` (d=1) or ``(q, d)`` int64 array."""
        return self._arrays()[0]

    def coefficients(self) -> np.ndarray:
        return self._arrays()[1]

    def _arrays(self):
        if self._cache is None:
            keys = list(self._modes)
            f = np.array(keys, dtype=np.int64).reshape(len(keys), self.d)
            if self.d == 1:
                f = f.reshape(-1)
            c = np.array([self._modes[k] for k in keys], dtype=complex)
            self._cache = (f, c)
        return self._cache

    def energy(self) -> float:
        """Squared l2 norm; by Parseval this equals the energy of ``R(t)``."""
        c = self.coefficients()
        return float(np.sum(np.abs(c) ** 2))

    def top(self, b: int) -> "SparseRepresentation":
        """The ``b`` terms of largest magnitude (ties by smallest frequency)."""
        items = sorted(self._modes.items(), key=lambda kv: (-abs(kv[1]), kv[0]))
        return SparseRepresentation(self.n, self.d, items[:b])

    def evaluate(self, t) -> np.ndarray:
        return evaluate_sparse(self, t)

    def to_dense_spectrum(self) -> np.ndarray:
        out = np.zeros((self.n,) * self.d, dtype=complex)
        for k, c in self._modes.items():
            out[k] += c
        return out

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "modes": [
                {"freq": list(k), "re": v.real, "im": v.imag}
                for k, v in sorted(self._modes.items())
            ],
        }

    @classmethod
    def from_arrays(cls, n: int, freqs, coefs, d: int = 1) -> "SparseRepresentation":
        freqs = np.asarray(freqs, dtype=np.int64).reshape(-1, d)
        return cls(n, d, zip(freqs, np.asarray(coefs, dtype=complex)))


def evaluate_sparse(rep: SparseRepresentation, t) -> np.ndarray:
    """Evaluate ``R(t) = N^{-d/2} sum_j c_j e^{2 pi i <w_j, t>/N}``.

    ``t`` may be a single point or an array of points.  Positions outside
    ``[0, N)`` raise :class:`RangeError`.
    """
    pts, scalar = _as_points(t, rep.n, rep.d)
    out = _sparse_values(rep, pts)
    return out[0] if scalar else out


def _sparse_values(rep: SparseRepresentation, pts: np.ndarray) -> np.ndarray:
    m = pts.shape[0]
    if len(rep) == 0 or m == 0:
        return np.zeros(m, dtype=complex)
    freqs, coefs = rep._arrays()
    scale = rep.n ** (-rep.d / 2)
    phase = inner_phase(freqs, pts, rep.n)
    return scale * (coefs @ unit_roots(phase, rep.n))


# ---------------------------------------------------------------------------
# Oracles


class SampleCounter:
    """Counts evaluated points and the wall time spent producing them."""

    def __init__(self):
        self._lock = threading.Lock()
        self.count = 0
        self.seconds = 0.0

    def add(self, m: int, dt: float) -> None:
        with self._lock:
            self.count += int(m)
            self.seconds += dt

    def snapshot(self) -> tuple[int, float]:
        with self._lock:
            return self.count, self.seconds


class SignalOracle:
    """Point access to a signal on Z_N^d.

    ``evaluate`` accepts a scalar/point or an array of positions and returns
    complex values of matching leading shape.
    """

    def __init__(self, n: int, d: int = 1, counter: SampleCounter | None = None):
        if n < 2:
            raise ContractError("N must be at least 2")
        self.n = int(n)
        self.d = int(d)
        self.counter = counter if counter is not None else SampleCounter()

    @property
    def samples(self) -> int:
        return self.counter.count

    def evaluate(self, t, check: bool = True):
        pts, scalar = _as_points(t, self.n, self.d, check)
        out = self._evaluate(pts)
        return out[0] if scalar else out

    __call__ = evaluate

    def _evaluate(self, pts: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def dense(self) -> np.ndarray:
        """All ``N^d`` values in row-major order (reshaped to ``(N,)*d``)."""
        grid = all_points(self.n, self.d)
        return self.evaluate(grid).reshape((self.n,) * self.d)


def all_points(n: int, d: int) -> np.ndarray:
    if d == 1:
        return np.arange(n, dtype=np.int64)
    axes = np.meshgrid(*([np.arange(n, dtype=np.int64)] * d), indexing="ij")
    return np.stack([a.reshape(-1) for a in axes], axis=1)


def flat_index(pts: np.ndarray, n: int, d: int) -> np.ndarray:
    if d == 1:
        return pts
    return np.ravel_multi_index(tuple(pts.T), (n,) * d)


class SourceOracle(SignalOracle):
    """An oracle whose evaluations are counted as samples."""

    def evaluate(self, t, check: bool = True):
        pts, scalar = _as_points(t, self.n, self.d, check)
        t0 = time.perf_counter()
        out = self._evaluate(pts)
        self.counter.add(pts.shape[0], time.perf_counter() - t0)
        return out[0] if scalar else out


class SparseSignalOracle(SourceOracle):
    """Exactly sparse signal plus optional precomputed additive noise."""

    def __init__(self, rep: SparseRepresentation, noise: np.ndarray | None = None):
        super().__init__(rep.n, rep.d)
        self.rep = rep
        self.noise = None if noise is None else np.asarray(noise, complex).reshape(-1)

    def _evaluate(self, pts):
        out = _sparse_values(self.rep, pts)
        if self.noise is not None:
            out = out + self.noise[flat_index(pts, self.n, self.d)]
        return out


class FunctionOracle(SourceOracle):
    """Signal given by a vectorised function of the positions, plus noise."""

    def __init__(self, n: int, fn: Callable[[np.ndarray], np.ndarray], d: int = 1,
                 noise: np.ndarray | None = None):
        super().__init__(n, d)
        self.fn = fn
        self.noise = None if noise is None else np.asarray(noise, complex).reshape(-1)

    def _evaluate(self, pts):
        out = np.asarray(self.fn(pts), dtype=complex)
        if self.noise is not None:
            out = out + self.noise[flat_index(pts, self.n, self.d)]
        return out


class DenseOracle(SourceOracle):
    """Oracle backed by a stored array of ``N^d`` values."""

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=complex)
        d = values.ndim
        n = values.shape[0]
        if any(s != n for s in values.shape):
            raise ContractError("dense signal must have equal side lengths")
        super().__init__(n, d)
        self.values = values.reshape(-1)

    def _evaluate(self, pts):
        return self.values[flat_index(pts, self.n, self.d)]


class ResidualOracle(SignalOracle):
    """``S - R`` without materialising either signal."""

    def __init__(self, s: SignalOracle, rep: SparseRepresentation):
        if (s.n, s.d) != (rep.n, rep.d):
            raise ContractError("signal and representation live on different grids")
        super().__init__(s.n, s.d, s.counter)
        self.parent = s
        self.rep = rep.copy()

    def _evaluate(self, pts):
        return self.parent.evaluate(pts, check=False) - _sparse_values(self.rep, pts)


def residual_oracle(s: SignalOracle, rep: SparseRepresentation) -> ResidualOracle:
    """Lazy oracle for ``S - R``; each call costs exactly one sample of ``S``."""
    return ResidualOracle(s, rep)


# ---------------------------------------------------------------------------
# Signal generation


@dataclass
class GeneratedSignalSpec:
    """Description of a synthetic signal.

    ``kind`` is ``"superposition"`` (the listed modes) or ``"decay_spectrum"``
    (``1 / (1.5 + cos(2 pi t / N))``, 1-D only).  Noise is complex Gaussian
    with ``E|n(t)|^2 = noise_sigma**2``, generated deterministically from
    ``seed``.
    """

    n: int
    d: int = 1
    kind: str = "superposition"
    modes: list[tuple[tuple[int, ...], complex]] = field(default_factory=list)
    noise_sigma: float = 0.0
    seed: int = 0

    def representation(self) -> SparseRepresentation:
        return SparseRepresentation(self.n, self.d, self.modes)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "kind": self.kind,
            "modes": [
                {"freq": [int(x) for x in np.atleast_1d(f)],
                 "re": complex(c).real, "im": complex(c).imag}
                for f, c in self.modes
            ],
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "GeneratedSignalSpec":
        modes = [(tuple(int(x) for x in m["freq"]), complex(m["re"], m["im"]))
                 for m in obj.get("modes", [])]
        return cls(n=int(obj["n"]), d=int(obj.get("d", 1)),
                   kind=obj.get("kind", "superposition"), modes=modes,
                   noise_sigma=float(obj.get("noise_sigma", 0.0)),
                   seed=int(obj.get("seed", 0)))


def complex_noise(shape, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Circular complex Gaussian noise with ``E|n|^2 = sigma**2``."""
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z * (sigma / np.sqrt(2.0))


def decay_function(n: int) -> Callable[[np.ndarray], np.ndarray]:
    def fn(t):
        return 1.0 / (1.5 + np.cos(2 * np.pi * np.asarray(t) / n))
    return fn


def generate_signal(spec: GeneratedSignalSpec) -> SourceOracle:
    """Build a counted oracle for ``spec``.

    Noise for all ``N^d`` positions is drawn up front from ``seed`` so that
    every evaluation of the same position returns the same value.
    """
    if spec.noise_sigma < 0:
        raise ContractError("noise_sigma must be non-negative")
    noise = None
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        noise = complex_noise(spec.n ** spec.d, spec.noise_sigma, rng)
    if spec.kind == "superposition":
        return SparseSignalOracle(spec.representation(), noise)
    if spec.kind == "decay_spectrum":
        if spec.d != 1:
            raise ContractError("decay_spectrum signals are one-dimensional")
        return FunctionOracle(spec.n, decay_function(spec.n), 1, noise)
    raise ContractError(f"unknown signal kind {spec.kind!r}")


def random_modes(n: int, b: int, rng: np.random.Generator, d: int = 1,
                 low: float = 1.0, high: float = 10.0,
                 complex_coefficients: bool = False) -> list[tuple[tuple[int, ...], complex]]:
    """``b`` distinct uniform frequencies with coefficients drawn from ``[low, high]``.

    With ``complex_coefficients`` the real and imaginary parts are drawn
    independently from the interval.
    """
    total = n ** d
    if b > total:
        raise ContractError("more modes than grid points")
    flat = rng.choice(total, size=b, replace=False)
    freqs = np.array(np.unravel_index(flat, (n,) * d)).T
    re = rng.uniform(low, high, size=b)
    im = rng.uniform(low, high, size=b) if complex_coefficients else np.zeros(b)
    return [(tuple(int(x) for x in f), complex(r, i)) for f, r, i in zip(freqs, re, im)]


def snr_db(clean_energy: float, n_points: int, sigma: float) -> float:
    """``10 log10(||S_clean||^2 / (N^d sigma^2))``."""
    if sigma <= 0:
        return float("inf")
    return 10.0 * np.log10(clean_energy / (n_points * sigma ** 2))


def sigma_for_snr(clean_energy: float, n_points: int, snr: float) -> float:
    return float(np.sqrt(clean_energy / (n_points * 10 ** (snr / 10.0))))


def canonical(freq: Sequence[int] | int, n: int) -> tuple[int, ...]:
    return tuple(int(x) % n for x in np.atleast_1d(freq))
