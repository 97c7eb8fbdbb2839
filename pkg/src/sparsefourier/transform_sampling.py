"""Spectral permutations, box-car filtering and sample-position generators.

A 1-D spectral permutation ``(theta, sigma)`` with ``sigma`` invertible mod
``N`` produces the signal

    (R S)(t) = exp(-2 pi i theta sigma* t / N) S(sigma* t mod N),

whose spectrum is ``(R S)^(nu) = S_hat(sigma nu + theta)``.  A frequency
``nu`` of the permuted signal therefore maps back to ``sigma nu + theta``.

The box-car filter of half-width ``k`` has taps ``sqrt(N) / (2k + 1)`` on
``[-k, k]`` and unitary transform equal to the Dirichlet kernel
``sin(pi (2k+1) w / N) / ((2k+1) sin(pi w / N))``.  Convolution multiplies
the unitary spectrum by ``sqrt(N)`` times the filter transform.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ParameterError
from .signal_model import SignalOracle, unit_roots

_MAX_DRAWS = 64


def mod_inverse(a: int, n: int) -> int | None:
    """Inverse of ``a`` modulo ``n`` or ``None`` when ``gcd(a, n) > 1``."""
    try:
        return pow(int(a) % n, -1, n)
    except ValueError:
        return None


@dataclass(frozen=True)
class FrequencyPermutation1D:
    n: int
    theta: int
    sigma: int
    sigma_inv: int

    def __post_init__(self):
        if (self.sigma * self.sigma_inv) % self.n != 1 % self.n:
            raise ContractError("sigma_inv is not the inverse of sigma")

    @classmethod
    def make(cls, n: int, theta: int, sigma: int) -> "FrequencyPermutation1D":
        inv = mod_inverse(sigma, n)
        if inv is None:
            raise ContractError(f"sigma={sigma} is not invertible mod {n}")
        return cls(n, int(theta) % n, int(sigma) % n, inv)

    def forward(self, omega):
        """Position of original frequency ``omega`` in the permuted spectrum."""
        return np.mod(self.sigma_inv * (np.asarray(omega, np.int64) - self.theta), self.n)

    def inverse(self, nu):
        """Original frequency of permuted frequency ``nu``."""
        return np.mod(self.sigma * np.asarray(nu, np.int64) + self.theta, self.n)


def random_permutation(n: int, rng: np.random.Generator) -> FrequencyPermutation1D:
    """Uniform ``theta`` and a uniform ``sigma`` coprime to ``n``.

    A non-invertible draw is discarded and redrawn, at most 64 times.
    """
    theta = int(rng.integers(0, n))
    for _ in range(_MAX_DRAWS):
        sigma = int(rng.integers(1, n))
        inv = mod_inverse(sigma, n)
        if inv is not None:
            return FrequencyPermutation1D(n, theta, sigma, inv)
    raise ParameterError(f"no invertible dilation found mod {n} in {_MAX_DRAWS} draws")


class PermutedOracle(SignalOracle):
    """Lazy ``R_{theta, sigma} S`` for a 1-D oracle."""

    def __init__(self, s: SignalOracle, perm: FrequencyPermutation1D):
        if s.d != 1 or s.n != perm.n:
            raise ContractError("permutation does not match the signal")
        super().__init__(s.n, 1, s.counter)
        self.parent = s
        self.perm = perm
        self._phase_step = (perm.theta * perm.sigma_inv) % s.n

    def _evaluate(self, t):
        n = self.n
        src = np.mod(self.perm.sigma_inv * t, n)
        return unit_roots(-self._phase_step * t, n) * self.parent.evaluate(src, check=False)


def sample_permuted(s: SignalOracle, perm: FrequencyPermutation1D, t):
    """Values of the permuted signal at ``t`` (one sample of ``s`` per point)."""
    return PermutedOracle(s, perm).evaluate(t)


def dirichlet_response(k: int, n: int, omega) -> np.ndarray:
    """Unitary transform of the normalised box-car ``H_k`` at ``omega``.

    Equals 1 at ``omega = 0 (mod N)``.
    """
    w = np.mod(np.asarray(omega, dtype=float), n)
    w = np.where(w > n / 2, w - n, w)
    num = np.sin(np.pi * (2 * k + 1) * w / n)
    den = (2 * k + 1) * np.sin(np.pi * w / n)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(np.abs(den) < 1e-300, 1.0, num / np.where(den == 0, 1, den))
    return out


def filter_taps(k: int, n: int, shift_num: int = 0, shift_den: int = 1) -> np.ndarray:
    """Taps ``h(i)`` for ``i = -k..k`` of the box-car modulated by ``e^{2 pi i j i / W}``."""
    if k < 0:
        raise ParameterError("filter half-width must be non-negative")
    i = np.arange(-k, k + 1)
    return (np.sqrt(n) / (2 * k + 1)) * np.exp(2j * np.pi * shift_num * i / shift_den)


class ConvolvedOracle(SignalOracle):
    """Lazy ``(H_k e^{2 pi i j . / W}) * S``: ``sum_i h(i) S(t - i)``.

    Each output point costs ``2k + 1`` samples of ``s``.  The output spectrum
    is ``sqrt(N) H_k(w - jN/W) S_hat(w)``.
    """

    def __init__(self, s: SignalOracle, k: int, shift_num: int = 0, shift_den: int = 1):
        if s.d != 1:
            raise ContractError("ConvolvedOracle is one-dimensional; see AxisConvolvedOracle")
        if 2 * k + 1 > s.n:
            raise ParameterError("filter support exceeds the signal length")
        super().__init__(s.n, 1, s.counter)
        self.parent = s
        self.k = k
        self.taps = filter_taps(k, s.n, shift_num, shift_den)

    def _evaluate(self, t):
        offs = np.arange(-self.k, self.k + 1)
        src = np.mod(t[:, None] - offs[None, :], self.n)
        vals = self.parent.evaluate(src.reshape(-1), check=False).reshape(src.shape)
        return vals @ self.taps


def sample_convolved(s: SignalOracle, k: int, shift_num: int, shift_den: int, t):
    """Values of the modulated box-car convolution at ``t``."""
    return ConvolvedOracle(s, k, shift_num, shift_den).evaluate(t)


# ---------------------------------------------------------------------------
# d-dimensional affine permutations


def _det_mod(a: np.ndarray, n: int) -> int:
    """Determinant mod ``n`` by exact integer (Bareiss) elimination."""
    m = [[int(x) for x in row] for row in a]
    size = len(m)
    sign, prev = 1, 1
    for k in range(size - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, size) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return (sign * m[-1][-1]) % n


def matrix_inverse_mod(a: np.ndarray, n: int) -> np.ndarray | None:
    """Inverse of an integer matrix modulo ``n`` (adjugate form), or ``None``."""
    a = np.asarray(a, dtype=np.int64) % n
    size = a.shape[0]
    det = _det_mod(a, n)
    det_inv = mod_inverse(det, n)
    if det_inv is None:
        return None
    if size == 1:
        return np.array([[det_inv]], dtype=np.int64)
    adj = np.zeros_like(a)
    for i in range(size):
        for j in range(size):
            minor = np.delete(np.delete(a, i, axis=0), j, axis=1)
            cof = _det_mod(minor, n) * (-1) ** (i + j)
            adj[j, i] = cof % n
    return (adj * det_inv) % n


@dataclass(frozen=True)
class AffinePermutationND:
    """Frequency map ``nu = A w + b (mod N)`` with ``A`` invertible mod ``N``.

    The permuted signal is ``P(x) = e^{2 pi i <b, x>/N} S(A^T x mod N)``,
    whose spectrum at ``A w + b`` equals ``S_hat(w)``.
    """

    n: int
    a: np.ndarray
    b: np.ndarray
    a_inv: np.ndarray

    @property
    def d(self) -> int:
        return self.a.shape[0]

    @classmethod
    def make(cls, n: int, a, b) -> "AffinePermutationND":
        a = np.asarray(a, dtype=np.int64) % n
        b = np.asarray(b, dtype=np.int64).reshape(-1) % n
        inv = matrix_inverse_mod(a, n)
        if inv is None:
            raise ContractError("matrix is not invertible mod N")
        return cls(n, a, b, inv)

    @classmethod
    def from_1d(cls, perm: FrequencyPermutation1D) -> "AffinePermutationND":
        n = perm.n
        a = np.array([[perm.sigma_inv]], dtype=np.int64)
        b = np.array([(-perm.sigma_inv * perm.theta) % n], dtype=np.int64)
        return cls(n, a, b, np.array([[perm.sigma]], dtype=np.int64))

    def forward(self, omega) -> np.ndarray:
        w = np.asarray(omega, dtype=np.int64)
        return np.mod(w @ self.a.T + self.b, self.n)

    def inverse(self, nu) -> np.ndarray:
        v = np.asarray(nu, dtype=np.int64)
        return np.mod((v - self.b) @ self.a_inv.T, self.n)


def random_affine_permutation(d: int, n: int, rng: np.random.Generator) -> AffinePermutationND:
    """Uniform matrix conditioned on invertibility mod ``n`` and uniform offset."""
    for _ in range(_MAX_DRAWS):
        a = rng.integers(0, n, size=(d, d))
        inv = matrix_inverse_mod(a, n)
        if inv is not None:
            b = rng.integers(0, n, size=d)
            return AffinePermutationND(n, a.astype(np.int64), b.astype(np.int64), inv)
    raise ParameterError(f"no invertible matrix found mod {n} in {_MAX_DRAWS} draws")


class AffinePermutedOracle(SignalOracle):
    def __init__(self, s: SignalOracle, perm: AffinePermutationND):
        if s.d != perm.d or s.n != perm.n:
            raise ContractError("permutation does not match the signal")
        super().__init__(s.n, s.d, s.counter)
        self.parent = s
        self.perm = perm

    def _evaluate(self, x):
        n = self.n
        xs = x.reshape(-1, self.d)
        src = np.mod(xs @ self.perm.a, n)          # (A^T x)_j = sum_r A_rj x_r
        phase = np.mod(xs @ self.perm.b, n)
        vals = self.parent.evaluate(src if self.d > 1 else src.reshape(-1), check=False)
        return unit_roots(phase, n) * vals


class AxisConvolvedOracle(SignalOracle):
    """Box-car filter of half-width ``k`` applied along one axis."""

    def __init__(self, s: SignalOracle, k: int, axis: int, shift_num: int = 0, shift_den: int = 1):
        if not 0 <= axis < s.d:
            raise ContractError("axis out of range")
        super().__init__(s.n, s.d, s.counter)
        self.parent = s
        self.k = k
        self.axis = axis
        self.taps = filter_taps(k, s.n, shift_num, shift_den)

    def _evaluate(self, x):
        offs = np.arange(-self.k, self.k + 1)
        pts = np.repeat(x.reshape(-1, self.d)[:, None, :], len(offs), axis=1)
        pts[:, :, self.axis] = np.mod(pts[:, :, self.axis] - offs[None, :], self.n)
        flat = pts.reshape(-1, self.d) if self.d > 1 else pts.reshape(-1)
        vals = self.parent.evaluate(flat, check=False).reshape(pts.shape[:2])
        return vals @ self.taps


class SliceOracle(SignalOracle):
    """1-D view ``u -> S(x0 with coordinate axis replaced by u)``."""

    def __init__(self, s: SignalOracle, base, axis: int):
        super().__init__(s.n, 1, s.counter)
        self.parent = s
        self.base = np.asarray(base, dtype=np.int64).reshape(s.d) % s.n
        self.axis = axis

    def _evaluate(self, u):
        pts = np.repeat(self.base[None, :], u.shape[0], axis=0)
        pts[:, self.axis] = u
        src = pts if self.parent.d > 1 else pts.reshape(-1)
        return self.parent.evaluate(src, check=False)


# ---------------------------------------------------------------------------
# Sample positions


def sample_positions(mode: str, count: int, n: int, rng: np.random.Generator,
                     progression_length: int = 8) -> np.ndarray:
    """``count`` positions in ``[0, N)``.

    ``"independent"`` draws uniform positions.  ``"progression"`` draws
    uniform starts of unit-step arithmetic progressions of the given length;
    the count is rounded up to a whole number of progressions.
    """
    if count < 0:
        raise ContractError("count must be non-negative")
    if mode == "independent":
        return rng.integers(0, n, size=count, dtype=np.int64)
    if mode == "progression":
        if progression_length < 1:
            raise ParameterError("progression length must be positive")
        blocks = -(-count // progression_length)
        starts = rng.integers(0, n, size=blocks, dtype=np.int64)
        steps = np.arange(progression_length, dtype=np.int64)
        return np.mod(starts[:, None] + steps[None, :], n).reshape(-1)
    raise ParameterError(f"unknown sampling mode {mode!r}")
