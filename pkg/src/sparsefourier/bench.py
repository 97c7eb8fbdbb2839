"""Experiment harness: seeded recoveries over parameter grids, result tables.

Families
--------
``recover_bmode``  clean B-sparse 1-D signals, coefficients in [1, 10]
``sweep_n``        the same over several N, with the dense baseline
``sweep_b``        the same over several B at fixed N, with the dense baseline
``sweep_noise``    one mode of per-sample amplitude 1 plus Gaussian noise
``decay_spectrum`` ``1 / (1.5 + cos(2 pi t / N))`` plus noise at a given SNR
``nd_grid``        clean B-sparse signals on Z_N^d, complex coefficients
"""
from __future__ import annotations

import csv
import itertools
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from .dense import DEFAULT_CAP, fft
from .errors import ParameterError
from .recovery import RecoveryParams, RecoveryReport
from .recovery_nd import recover_nd
from .signal_model import (GeneratedSignalSpec, SparseRepresentation, decay_function,
                           generate_signal, random_modes, sigma_for_snr)

FAMILIES = ("recover_bmode", "sweep_n", "sweep_b", "sweep_noise", "decay_spectrum", "nd_grid")

DEFAULT_GRIDS = {
    "recover_bmode": {"n": [10009], "b": [8]},
    "sweep_n": {"n": [1009, 10007, 100003, 1000003], "b": [8]},
    "sweep_b": {"n": [2097169], "b": [2, 4, 8, 16, 32]},
    "sweep_noise": {"n": [10009], "sigma": [2.0, 2.5, 3.0, 3.5, 4.0]},
    "decay_spectrum": {"n": [1000], "snr": [-8.0]},
    "nd_grid": {"n": [101], "d": [2], "b": [8]},
}

# the B sweep times its dense baseline at a power-of-two length near the sparse N
BASELINE_LENGTHS = {"sweep_b": 1 << 21}

# noise alone reorders or hides a planted decay mode in roughly one seed in ten
DECAY_RATE = 0.8

RECORD_COLUMNS = ["family", "cell", "n", "d", "b", "sigma", "snr", "seed", "success", "status",
                  "iterations", "samples", "t_total_s", "t_excl_sampling_s", "residual",
                  "coef_error", "baseline_total_s", "baseline_excl_s"]

SUMMARY_COLUMNS = ["family", "cell", "n", "d", "b", "sigma", "snr", "runs", "successes",
                   "success_rate", "wilson_lo", "wilson_hi", "time_median", "time_mean",
                   "time_q1", "time_q3", "time_min", "time_max", "samples_median",
                   "iterations_median", "baseline_median"]


@dataclass
class ExperimentSpec:
    """One experiment: a family, a parameter grid and a number of runs per cell.

    ``grid`` maps parameter names (``n``, ``d``, ``b``, ``sigma``, ``snr``) to
    value lists; missing names take the family defaults.  ``timing`` selects
    which wall time the summary reports.  The dense baseline runs for the
    first ``baseline_runs`` seeds of a cell when ``N^d <= baseline_cap``; with
    ``baseline_n`` set it transforms a signal of that length carrying the same
    number of modes instead of the recovered one.  Each baseline time is the
    fastest of ``baseline_repeats`` transforms of the same data.
    """

    family: str
    grid: dict = field(default_factory=dict)
    runs: int = 100
    seed: int = 0
    timing: str = "excl-sampling"
    epsilon: float = 0.01
    delta: float = 0.05
    iota: float = 1e-4
    max_iterations: int = 1000
    k_isolation: int | None = None
    k_msb: int = 1
    preset: str = "practical"
    baseline: bool | None = None
    baseline_runs: int = 1
    baseline_cap: int = DEFAULT_CAP
    baseline_n: int | None = None
    baseline_repeats: int = 3

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown family {self.family!r}")
        if self.runs < 1:
            raise ParameterError("runs must be at least 1")
        if self.timing not in ("total", "excl-sampling"):
            raise ParameterError("timing must be 'total' or 'excl-sampling'")
        unknown = set(self.grid) - {"n", "d", "b", "sigma", "snr"}
        if unknown:
            raise ParameterError(f"unknown grid parameters {sorted(unknown)}")

    @property
    def with_baseline(self) -> bool:
        if self.baseline is not None:
            return self.baseline
        return self.family in ("sweep_n", "sweep_b")

    @property
    def baseline_length(self) -> int | None:
        return self.baseline_n if self.baseline_n is not None else BASELINE_LENGTHS.get(self.family)

    def cells(self) -> list[dict]:
        grid = dict(DEFAULT_GRIDS[self.family])
        grid.update({k: list(v) for k, v in self.grid.items()})
        names = sorted(grid)
        out = []
        for values in itertools.product(*(grid[k] for k in names)):
            cell = {"n": None, "d": 1, "b": None, "sigma": 0.0, "snr": None}
            cell.update(dict(zip(names, values)))
            cell["n"], cell["d"] = int(cell["n"]), int(cell["d"])
            if self.family == "sweep_noise":
                cell["b"] = 1
            if self.family == "decay_spectrum":
                cell["b"] = cell["b"] or 3
            out.append(cell)
        return out


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    records: list[dict]
    summary: list[dict]

    def to_json(self) -> str:
        return json.dumps({"family": self.spec.family, "runs": self.spec.runs,
                           "seed": self.spec.seed, "timing": self.spec.timing,
                           "records": self.records, "summary": self.summary}, indent=2)


def run_seed(master: int, cell: int, run: int) -> int:
    return int(np.random.SeedSequence([master, cell, run]).generate_state(1)[0])


def wilson_interval(successes: int, runs: int) -> tuple[float, float]:
    ci = binomtest(successes, runs).proportion_ci(0.95, method="wilson")
    return float(ci.low), float(ci.high)


def _relative_error(rep: SparseRepresentation, truth: dict) -> float:
    num = sum(abs(rep.coefficient(k) - c) ** 2 for k, c in truth.items())
    den = sum(abs(c) ** 2 for c in truth.values())
    return math.sqrt(num / den)


def _build(spec: ExperimentSpec, cell: dict, seed: int):
    """Signal oracle, recovery parameters, planted truth and the success rule of one run."""
    n, d, b = cell["n"], cell["d"], cell["b"]
    rng = np.random.default_rng(seed)
    common = dict(epsilon=spec.epsilon, delta=spec.delta, iota=spec.iota,
                  max_iterations=spec.max_iterations, k_isolation=spec.k_isolation,
                  k_msb=spec.k_msb, preset=spec.preset)
    fam = spec.family
    if fam in ("recover_bmode", "sweep_n", "sweep_b", "nd_grid"):
        modes = random_modes(n, b, rng, d=d, complex_coefficients=(fam == "nd_grid"))
        sig = GeneratedSignalSpec(n, d, modes=modes, seed=seed)
        truth = {k: c for k, c in SparseRepresentation(n, d, modes)}
        return generate_signal(sig), RecoveryParams(b, **common), truth, "exact"
    if fam == "sweep_noise":
        sigma = float(cell["sigma"])
        freq = (int(rng.integers(0, n)),)
        # per-sample amplitude 1, so sigma is the noise-to-signal amplitude ratio
        truth = {freq: complex(math.sqrt(n))}
        sig = GeneratedSignalSpec(n, 1, modes=list(truth.items()), noise_sigma=sigma, seed=seed)
        return generate_signal(sig), RecoveryParams(1, noise_sigma=sigma, **common), truth, "locate"
    # decay_spectrum
    clean = decay_function(n)(np.arange(n))
    sigma = sigma_for_snr(float(np.sum(clean ** 2)), n, float(cell["snr"]))
    cell["sigma"] = sigma
    sig = GeneratedSignalSpec(n, 1, kind="decay_spectrum", noise_sigma=sigma, seed=seed)
    oracle = generate_signal(sig)
    # the modes are the largest clean coefficients, the targets their values in the noisy data
    clean_spec = np.abs(fft(clean))
    top = sorted(range(n), key=lambda w: -clean_spec[w])[:b]
    spectrum = fft(oracle.dense())
    truth = {(w,): complex(spectrum[w]) for w in top}
    # a noise coefficient exceeds sigma * sqrt(ln(N / delta)) with probability about delta / N
    cutoff = sigma * math.sqrt(math.log(n / spec.delta))
    common["epsilon"] = min(spec.epsilon, 0.005)
    params = RecoveryParams(b, noise_sigma=sigma, significance_cutoff=cutoff, **common)
    return oracle, params, truth, "exact"


def _baseline(oracle, cap: int, repeats: int = 1) -> tuple[float, float] | tuple[None, None]:
    if oracle.n ** oracle.d > cap:
        return None, None
    t0 = time.perf_counter()
    values = oracle.dense()
    sampling = time.perf_counter() - t0
    # the fastest repeat is the least disturbed by other load on the machine
    best = math.inf
    for _ in range(max(1, repeats)):
        t1 = time.perf_counter()
        fft(values)
        best = min(best, time.perf_counter() - t1)
    return sampling + best, best


def run_cell(spec: ExperimentSpec, index: int, cell: dict) -> list[dict]:
    rows = []
    for run in range(spec.runs):
        seed = run_seed(spec.seed, index, run)
        oracle, params, truth, rule = _build(spec, cell, seed)
        report: RecoveryReport = recover_nd(oracle, params, seed)
        rep = report.representation
        found = all(k in rep for k in truth)
        err = _relative_error(rep, truth)
        success = found and (rule == "locate" or (len(rep) == len(truth) and err <= 0.01))
        base_total = base_excl = None
        if spec.with_baseline and run < spec.baseline_runs:
            target = oracle
            m = spec.baseline_length
            if m is not None and m != oracle.n:
                modes = random_modes(m, params.b, np.random.default_rng(seed), d=cell["d"])
                target = generate_signal(GeneratedSignalSpec(m, cell["d"], modes=modes, seed=seed))
            base_total, base_excl = _baseline(target, spec.baseline_cap,
                                                  spec.baseline_repeats)
        rows.append({
            "family": spec.family, "cell": index, "n": cell["n"], "d": cell["d"],
            "b": params.b, "sigma": float(cell["sigma"] or 0.0), "snr": cell["snr"],
            "seed": seed, "success": bool(success), "status": report.status,
            "iterations": report.iterations, "samples": report.samples_used,
            "t_total_s": report.wall_time_total,
            "t_excl_sampling_s": report.wall_time_excluding_sampling,
            "residual": report.residual_energy_estimate, "coef_error": err,
            "baseline_total_s": base_total, "baseline_excl_s": base_excl,
        })
    return rows


def summarize(spec: ExperimentSpec, rows: list[dict]) -> list[dict]:
    key = "t_total_s" if spec.timing == "total" else "t_excl_sampling_s"
    bkey = "baseline_total_s" if spec.timing == "total" else "baseline_excl_s"
    out = []
    for index in sorted({r["cell"] for r in rows}):
        cell = [r for r in rows if r["cell"] == index]
        ok = sum(r["success"] for r in cell)
        t = np.array([r[key] for r in cell])
        base = [r[bkey] for r in cell if r[bkey] is not None]
        lo, hi = wilson_interval(ok, len(cell))
        first = cell[0]
        out.append({
            "family": spec.family, "cell": index, "n": first["n"], "d": first["d"],
            "b": first["b"], "sigma": first["sigma"], "snr": first["snr"],
            "runs": len(cell), "successes": ok, "success_rate": ok / len(cell),
            "wilson_lo": lo, "wilson_hi": hi,
            "time_median": float(np.median(t)), "time_mean": float(np.mean(t)),
            "time_q1": float(np.percentile(t, 25)), "time_q3": float(np.percentile(t, 75)),
            "time_min": float(t.min()), "time_max": float(t.max()),
            "samples_median": float(np.median([r["samples"] for r in cell])),
            "iterations_median": float(np.median([r["iterations"] for r in cell])),
            "baseline_median": float(np.median(base)) if base else None,
        })
    return out


def run_experiment(spec: ExperimentSpec, progress=None) -> ExperimentResult:
    """Run every cell of ``spec`` and return per-run records and per-cell summaries."""
    rows = []
    for index, cell in enumerate(spec.cells()):
        rows.extend(run_cell(spec, index, cell))
        if progress is not None:
            progress(index, cell)
    return ExperimentResult(spec, rows, summarize(spec, rows))


def write_csv(path, rows: list[dict], columns: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: "" if r.get(k) is None else r.get(k) for k in columns})


# ---------------------------------------------------------------------------
# Acceptance checks


def monotone_violations(rates) -> int:
    """Number of adjacent pairs in which the rate increases."""
    return int(sum(b > a for a, b in zip(rates, rates[1:])))


def fit_rss(x, y, degree: int) -> tuple[float, np.ndarray]:
    coef = np.polyfit(x, y, degree)
    resid = np.asarray(y) - np.polyval(coef, x)
    return float(np.sum(resid ** 2)), coef


def check(result: ExperimentResult) -> list[tuple[str, bool, str]]:
    """Threshold checks for a family; each entry is ``(name, passed, detail)``."""
    s = sorted(result.summary, key=lambda r: (r["n"], r["b"], r["sigma"]))
    fam = result.spec.family
    out = []
    if fam in ("recover_bmode", "nd_grid"):
        need = 0.95 if fam == "recover_bmode" else 0.90
        for r in s:
            out.append((f"success n={r['n']} d={r['d']} b={r['b']}", r["success_rate"] >= need,
                        f"{r['successes']}/{r['runs']} (need {need:.0%})"))
    elif fam == "sweep_noise":
        for n in sorted({r["n"] for r in s}):
            cells = [r for r in s if r["n"] == n]
            rates = [r["success_rate"] for r in cells]
            out.append((f"n={n} lowest sigma >= 95%", rates[0] >= 0.95, f"{rates[0]:.2f}"))
            out.append((f"n={n} highest sigma <= 40%", rates[-1] <= 0.40, f"{rates[-1]:.2f}"))
            v = monotone_violations(rates)
            out.append((f"n={n} monotone", v <= 1, f"{v} violations in {rates}"))
    elif fam == "sweep_n":
        s = sorted(s, key=lambda r: r["n"])
        ratio = s[-1]["time_median"] / s[0]["time_median"]
        sratio = s[-1]["samples_median"] / s[0]["samples_median"]
        out.append(("sparse time ratio <= 10", ratio <= 10, f"{ratio:.2f}"))
        out.append(("samples ratio <= 10", sratio <= 10, f"{sratio:.2f}"))
        if s[0]["baseline_median"] and s[-1]["baseline_median"]:
            bratio = s[-1]["baseline_median"] / s[0]["baseline_median"]
            out.append(("baseline ratio >= 200", bratio >= 200, f"{bratio:.1f}"))
    elif fam == "sweep_b":
        s = sorted(s, key=lambda r: r["b"])
        b = np.array([r["b"] for r in s], dtype=float)
        t = np.array([r["time_median"] for r in s])
        rss1, _ = fit_rss(b, t, 1)
        rss2, c2 = fit_rss(b, t, 2)
        out.append(("quadratic fits better than linear", rss2 < rss1 and c2[0] > 0,
                    f"rss1={rss1:.3g} rss2={rss2:.3g} a2={c2[0]:.3g}"))
        base = [r["baseline_median"] for r in s if r["baseline_median"]]
        if base:
            spread = max(base) / min(base) - 1
            out.append(("baseline constant within 20%", spread <= 0.2, f"{spread:.2%}"))
    elif fam == "decay_spectrum":
        for r in s:
            out.append((f"decay n={r['n']} snr={r['snr']}", r["success_rate"] >= DECAY_RATE,
                        f"{r['successes']}/{r['runs']}"))
    return out
