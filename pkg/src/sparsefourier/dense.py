"""Dense reference transforms with unitary normalization.

``dft_naive`` is the quadratic-time oracle.  ``fft`` is an in-repo
``O(N log N)`` transform: iterative radix-2 for powers of two and a chirp-z
(Bluestein) embedding into a power-of-two convolution for every other
length.  Multi-dimensional arrays are transformed one axis at a time.
"""
from __future__ import annotations

import numpy as np

from .errors import ContractError
from .signal_model import SparseRepresentation

DEFAULT_CAP = 1 << 24


def _check(x, cap: int) -> np.ndarray:
    a = np.asarray(x, dtype=complex)
    if a.ndim == 0:
        raise ContractError("expected at least one axis")
    if len(set(a.shape)) > 1:
        raise ContractError("all axes must have the same length N")
    if a.size > cap:
        raise ContractError(f"{a.size} points exceed the dense cap {cap}")
    return a


def _naive_axis(a: np.ndarray, axis: int, sign: int) -> np.ndarray:
    n = a.shape[axis]
    k = np.arange(n)
    w = np.exp(sign * 2j * np.pi * (np.outer(k, k) % n) / n) / np.sqrt(n)
    return np.moveaxis(np.tensordot(w, np.moveaxis(a, axis, 0), axes=(1, 0)), 0, axis)


def dft_naive(x, cap: int = DEFAULT_CAP, inverse: bool = False) -> np.ndarray:
    """Unitary DFT by direct summation, ``Ŝ(w) = N^{-d/2} sum_t S(t) e^{-2 pi i <w, t>/N}``.

    Raises
    ------
    ContractError
        If the array has more than ``cap`` points.
    """
    a = _check(x, cap)
    sign = 1 if inverse else -1
    for axis in range(a.ndim):
        a = _naive_axis(a, axis, sign)
    return a


def _bit_reverse(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _radix2(a: np.ndarray, sign: int) -> np.ndarray:
    """Unnormalized transform along the last axis; length must be a power of two."""
    n = a.shape[-1]
    out = a[..., _bit_reverse(n)].copy()
    size = 2
    while size <= n:
        half = size // 2
        tw = np.exp(sign * 2j * np.pi * np.arange(half) / size)
        v = out.reshape(out.shape[:-1] + (n // size, size))
        even = v[..., :half].copy()
        odd = v[..., half:] * tw
        v[..., :half] = even + odd
        v[..., half:] = even - odd
        size *= 2
    return out


def _bluestein(a: np.ndarray, sign: int) -> np.ndarray:
    """Unnormalized transform of arbitrary length along the last axis."""
    n = a.shape[-1]
    m = 1 << (2 * n - 1).bit_length()
    k = np.arange(n)
    # k^2 mod 2n keeps the chirp phase exact for large n
    chirp = np.exp(sign * 1j * np.pi * ((k * k) % (2 * n)) / n)
    fa = np.zeros(a.shape[:-1] + (m,), dtype=complex)
    fa[..., :n] = a * chirp
    g = np.zeros(m, dtype=complex)
    g[:n] = np.conj(chirp)
    g[m - n + 1:] = np.conj(chirp[1:])[::-1]
    conv = _radix2(_radix2(fa, -1) * _radix2(g, -1), 1) / m
    return conv[..., :n] * chirp


def _fft_last(a: np.ndarray, sign: int) -> np.ndarray:
    n = a.shape[-1]
    if n == 1:
        return a.copy()
    raw = _radix2(a, sign) if n & (n - 1) == 0 else _bluestein(a, sign)
    return raw / np.sqrt(n)


def fft(x, inverse: bool = False) -> np.ndarray:
    """Unitary fast transform of any length, same convention as :func:`dft_naive`."""
    a = _check(x, np.iinfo(np.int64).max)
    sign = 1 if inverse else -1
    for axis in range(a.ndim):
        a = np.moveaxis(_fft_last(np.moveaxis(a, axis, -1), sign), -1, axis)
    return a


def ifft(x) -> np.ndarray:
    return fft(x, inverse=True)


def top_b(spectrum, b: int) -> SparseRepresentation:
    """The ``b`` largest coefficients of a dense spectrum; ties go to the smaller index."""
    s = np.asarray(spectrum)
    n, d = s.shape[0], s.ndim
    flat = s.reshape(-1)
    order = np.lexsort((np.arange(flat.size), -np.abs(flat)))[:b]
    freqs = np.array(np.unravel_index(order, s.shape)).T
    return SparseRepresentation.from_arrays(n, freqs, flat[order], d)
