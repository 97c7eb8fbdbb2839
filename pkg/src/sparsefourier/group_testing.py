"""Locating the dominant frequency of an isolated 1-D signal.

The MSB test splits the spectrum into ``W`` equal bands, estimates the
energy each band passes through a modulated box-car filter and keeps the
cyclic cluster complementary to the longest run of negligible bands.

Group testing repeats the MSB test while zooming in.  It tracks an interval
``[lo, hi]`` known to contain the frequency; each round modulates the
signal so the interval is centred at 0 and dilates time by the integer
``s = floor(N / (hi - lo))``, which spreads the interval over (at most) the
whole circle without wrapping; after a round without progress the next
round spreads it over a random 40-90% of the circle.  The surviving bands are pulled back through
the dilation and intersected with the interval.  The band grid is shifted by a random fraction of a band each
round.  The loop ends once the interval is narrower than one frequency.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ContractError, ParameterError
from .estimators import (CoefficientEstimatorParams, EnergyEstimatorParams, estimate_coefficients,
                         order_statistic_energy)
from .isolation import BatchSliceOracle
from .signal_model import SignalOracle, unit_roots
from .transform_sampling import filter_taps


@dataclass(frozen=True)
class MsbParams:
    """Band test settings.

    ``mode="practice"`` uses ``2k + 1`` bands; ``mode="theory"`` uses
    ``4(2k + 1)``.  A band is negligible when its energy is below
    ``eta_compare`` times the largest band energy.
    """

    filter_half_width: int = 1
    mode: str = "theory"
    eta_compare: float = 0.1
    energy: EnergyEstimatorParams = field(default_factory=lambda: EnergyEstimatorParams.from_delta(0.05))
    max_rounds: int | None = None
    patience: int = 4

    def __post_init__(self):
        if self.mode not in ("practice", "theory"):
            raise ParameterError("mode must be 'practice' or 'theory'")
        if self.filter_half_width < 1:
            raise ParameterError("MSB filter half-width must be at least 1")
        if not 0 < self.eta_compare < 1:
            raise ParameterError("eta_compare must lie in (0, 1)")

    @property
    def bands(self) -> int:
        w = 2 * self.filter_half_width + 1
        return w if self.mode == "practice" else 4 * w

    def round_limit(self, n: int) -> int:
        if self.max_rounds is not None:
            return self.max_rounds
        return 4 * math.ceil(math.log2(n)) + 8


@dataclass(frozen=True)
class MsbResult:
    """``v`` is the (possibly half-integer) centre band of the cluster, ``c`` its size."""

    v: float
    c: int
    energies: np.ndarray

    @property
    def dead(self) -> bool:
        return not np.any(self.energies > 0)


def decide_cluster(energies: np.ndarray, eta: float) -> tuple[float, int]:
    """Cluster centre and size from band energies.

    With no energy at all the result is ``(0, W)``.  If the cluster would
    cover more than half of the bands, the fallback is two bands centred on
    the strongest band.
    """
    e = np.asarray(energies, dtype=float)
    w = len(e)
    top = int(np.argmax(e))
    if not e[top] > 0:
        return 0.0, w
    small = e < eta * e[top]
    best_len, best_start = 0, 0
    for start in range(w):
        if not small[start] or small[start - 1]:
            continue
        length = 0
        while length < w and small[(start + length) % w]:
            length += 1
        if length > best_len:
            best_len, best_start = length, start
    c = w - best_len
    if c > w / 2:
        return float(top), 2
    centre_small = best_start + (best_len - 1) / 2
    return float((centre_small + w / 2) % w), c


def _band_taps(p: MsbParams, n: int) -> np.ndarray:
    w = p.bands
    return np.stack([filter_taps(p.filter_half_width, n, j, w) for j in range(w)])


def _band_energies(sample: Callable, members: np.ndarray, n: int, p: MsbParams,
                   rngs: Sequence[np.random.Generator], dilation: np.ndarray,
                   shift: np.ndarray) -> np.ndarray:
    """Energies of ``W * (e^{2 pi i j ./W} H_k)`` for every member and band.

    The member signal is first modulated by ``-shift`` and dilated by
    ``dilation``: ``W(x) = e^{-2 pi i shift * dilation * x / N} f(dilation * x)``.
    """
    wb = p.bands
    r = p.energy.num_samples
    offs = np.arange(-p.filter_half_width, p.filter_half_width + 1, dtype=np.int64)
    u = np.stack([rngs[j].integers(0, n, size=(wb, r), dtype=np.int64) for j in members])
    x = np.mod(u[..., None] - offs, n)
    src = np.mod(dilation[:, None, None, None] * x, n)
    who = np.broadcast_to(members[:, None, None, None], x.shape).reshape(-1)
    vals = sample(who, src.reshape(-1)).reshape(x.shape)
    step = np.mod(shift * dilation, n)
    vals = vals * unit_roots(-np.mod(step[:, None, None, None] * x, n), n)
    g = np.einsum("abrt,bt->abr", vals, _band_taps(p, n))
    return order_statistic_energy(g, float(n), p.energy.order_index)


def msb(f: SignalOracle, p: MsbParams, rng: np.random.Generator) -> MsbResult:
    """Band test on a 1-D signal."""
    if f.d != 1:
        raise ContractError("msb expects a 1-D signal")
    if 2 * p.filter_half_width + 1 > f.n:
        raise ParameterError("filter support exceeds the signal length")
    sample = lambda who, u: f.evaluate(u, check=False)
    e = _band_energies(sample, np.array([0]), f.n, p, [rng], np.array([1]), np.array([0]))[0]
    v, c = decide_cluster(e, p.eta_compare)
    return MsbResult(v, c, e)


@dataclass
class GroupTestResult:
    """``stalled`` is set when the interval stopped shrinking before reaching width 1."""

    frequency: int | None
    rounds: int
    energy_estimates: int
    widths: list[float]
    stalled: bool = False


def plan_round(lo: float, hi: float, n: int, bands: int, stuck: bool,
               rng: np.random.Generator) -> tuple[int, float]:
    """Dilation and (integer) centre for the next band test on ``[lo, hi]``."""
    # after a round without progress, spread the interval over a random
    # part of the circle so the next arc meets it in a different geometry
    reach = n * (rng.uniform(0.4, 0.9) if stuck else 1.0)
    dil = max(1, math.floor(reach / (hi - lo)))
    # a random sub-band offset of the band grid keeps a frequency sitting
    # between two bands from stalling the search round after round
    jitter = rng.uniform(-0.5, 0.5) * n / (bands * dil)
    return dil, float(np.round((lo + hi) / 2 + jitter))


def narrow_interval(lo: float, hi: float, centre: float, dilation: int, v: float, c: int,
                    bands: int, n: int) -> tuple[float, float]:
    """New interval after a band test.

    The round looked at ``x -> e^{-2 pi i centre s x / N} f(s x)``, whose
    frequency ``w`` appears at ``s (w - centre) mod N``; ``(v, c)`` is the
    surviving cluster of ``bands`` equal bands.  The cluster's arc is pulled
    back through the dilation ``s`` and intersected with ``[lo, hi]``.
    """
    s = float(dilation)
    arc = v * n / bands
    arc = arc - n if arc > n / 2 else arc
    half = c * n / (2 * bands)
    if hi - lo >= n:
        # the whole circle: the surviving arc is the new interval
        return centre + (arc - half) / s, centre + (arc + half) / s
    lo_d, hi_d = s * (lo - centre), s * (hi - centre)
    pieces = []
    for wrap in (-1, 0, 1):
        a = max(arc + wrap * n - half, lo_d)
        b = min(arc + wrap * n + half, hi_d)
        if a <= b:
            pieces.append((a, b))
    if not pieces:
        return lo, hi
    # two pieces mean the arc covers both ends; keep their hull
    a, b = min(pc[0] for pc in pieces), max(pc[1] for pc in pieces)
    return centre + a / s, centre + b / s


def _group_test_core(sample: Callable, count: int, n: int, p: MsbParams,
                     rngs: Sequence[np.random.Generator]) -> list[GroupTestResult]:
    wb = p.bands
    limit = p.round_limit(n)
    lo = np.full(count, -n / 2.0)
    hi = np.full(count, n / 2.0)
    active = np.ones(count, dtype=bool)
    results: list[GroupTestResult | None] = [None] * count
    widths: list[list[float]] = [[float(n)] for _ in range(count)]
    rounds = np.zeros(count, dtype=np.int64)
    stuck = np.zeros(count, dtype=np.int64)
    while active.any():
        idx = np.flatnonzero(active)
        plan = [plan_round(lo[j], hi[j], n, wb, bool(stuck[j]), rngs[j]) for j in idx]
        dil = np.array([q[0] for q in plan], dtype=np.int64)
        centre = np.array([q[1] for q in plan])
        shift = np.mod(centre.astype(np.int64), n)
        energies = _band_energies(sample, idx, n, p, rngs, dil, shift)
        for row, j in enumerate(idx):
            rounds[j] += 1
            e = energies[row]
            if not np.any(e > 0):
                results[j] = GroupTestResult(None, int(rounds[j]), int(rounds[j]) * wb, widths[j])
                active[j] = False
                continue
            v, c = decide_cluster(e, p.eta_compare)
            lo[j], hi[j] = narrow_interval(lo[j], hi[j], centre[row], int(dil[row]), v, c, wb, n)
            width_now = float(hi[j] - lo[j])
            stuck[j] = stuck[j] + 1 if width_now >= widths[j][-1] else 0
            widths[j].append(width_now)
            done = width_now < 1
            if done or rounds[j] >= limit or stuck[j] >= p.patience:
                freq = int(np.round((lo[j] + hi[j]) / 2)) % n
                results[j] = GroupTestResult(freq, int(rounds[j]), int(rounds[j]) * wb,
                                             widths[j], not done)
                active[j] = False
    return results  # type: ignore[return-value]


def _sampler_for(signals: Sequence[SignalOracle]):
    batches = {id(f.batch) for f in signals if isinstance(f, BatchSliceOracle)}
    if len(batches) == 1 and all(isinstance(f, BatchSliceOracle) for f in signals):
        batch = signals[0].batch
        rep = np.array([f.rep for f in signals], dtype=np.int64)
        axis = np.array([f.axis for f in signals], dtype=np.int64)
        return lambda who, u: batch.evaluate(rep[who], axis[who], u)

    def generic(who, u):
        out = np.empty(u.shape[0], dtype=complex)
        for j in np.unique(who):
            sel = who == j
            out[sel] = signals[j].evaluate(u[sel], check=False)
        return out
    return generic


def group_test_many(signals: Sequence[SignalOracle], p: MsbParams,
                    rngs: Sequence[np.random.Generator]) -> list[GroupTestResult]:
    """Group testing on several 1-D signals in lock step.

    Signal ``j`` draws all of its sample positions from ``rngs[j]``, so each
    result equals what :func:`group_test` returns for that signal alone.
    """
    if len(signals) != len(rngs):
        raise ContractError("one generator per signal is required")
    if not signals:
        return []
    n = signals[0].n
    if any(f.n != n or f.d != 1 for f in signals):
        raise ContractError("signals must be 1-D and share N")
    if 2 * p.filter_half_width + 1 > n:
        raise ParameterError("filter support exceeds the signal length")
    return _group_test_core(_sampler_for(signals), len(signals), n, p, rngs)


def group_test(f: SignalOracle, p: MsbParams, rng: np.random.Generator) -> GroupTestResult:
    """Locate the dominant frequency of a (nearly) pure 1-D signal."""
    return group_test_many([f], p, [rng])[0]


def neighbor_refine(s: SignalOracle, omega: int, radius: int, p: CoefficientEstimatorParams,
                    rng: np.random.Generator) -> int:
    """Frequency in ``[omega - radius, omega + radius]`` with the largest estimated coefficient.

    All candidates share one sample set; ties go to the smallest canonical
    frequency.
    """
    if s.d != 1:
        raise ContractError("neighbor_refine expects a 1-D signal")
    if radius < 0:
        raise ParameterError("radius must be non-negative")
    cands = np.unique(np.mod(omega + np.arange(-radius, radius + 1), s.n))
    est = estimate_coefficients(s, cands, p, rng)
    return int(cands[int(np.argmax(np.abs(est)))])
