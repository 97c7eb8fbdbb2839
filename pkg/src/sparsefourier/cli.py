"""Command line: ``generate``, ``recover``, ``dft``, ``bench`` and ``sweep``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, dense, formats
from .errors import ContractError, FormatError, ParameterError
from .recovery import RecoveryParams
from .recovery_nd import recover_nd
from .signal_model import DenseOracle, GeneratedSignalSpec, generate_signal, random_modes


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _common(p: argparse.ArgumentParser, lists: bool = False) -> None:
    num = _ints if lists else int
    p.add_argument("--n", type=num, help="signal length per axis")
    p.add_argument("--d", type=num, help="dimension")
    p.add_argument("--b", type=num, help="number of terms")
    p.add_argument("--sigma", type=_floats if lists else float, help="noise standard deviation")
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--iota", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--k-isolation", type=int)
    p.add_argument("--k-msb", type=int, default=1)
    p.add_argument("--preset", choices=["proven", "practical"], default="practical")
    p.add_argument("--timing", choices=["total", "excl-sampling"], default="excl-sampling")
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=["csv", "json"], default="json")


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text + ("" if text.endswith("\n") else "\n"))
    else:
        out.write_text(text)


def cmd_generate(a) -> int:
    n, d = a.n or 10009, a.d or 1
    if a.kind == "decay_spectrum":
        spec = GeneratedSignalSpec(n, 1, "decay_spectrum", [], a.sigma or 0.0, a.seed)
    else:
        modes = random_modes(n, a.b or 8, np.random.default_rng(a.seed), d=d,
                             complex_coefficients=a.complex)
        spec = GeneratedSignalSpec(n, d, "superposition", modes, a.sigma or 0.0, a.seed)
    if a.dense:
        if a.out is None:
            raise ParameterError("--dense needs --out")
        formats.write_rlsf(a.out, generate_signal(spec).dense())
        return 0
    _emit(json.dumps(spec.to_dict(), indent=2), a.out)
    return 0


def _load_signal(path: Path):
    if path.suffix.lower() == ".rlsf":
        return DenseOracle(formats.read_rlsf(path))
    return generate_signal(formats.load_signal_spec(path))


def cmd_recover(a) -> int:
    if a.input is not None:
        s = _load_signal(a.input)
    else:
        n, d = a.n or 10009, a.d or 1
        modes = random_modes(n, a.b or 8, np.random.default_rng(a.seed), d=d)
        s = generate_signal(GeneratedSignalSpec(n, d, modes=modes, noise_sigma=a.sigma or 0.0,
                                                seed=a.seed))
    p = RecoveryParams(a.b or 8, epsilon=a.epsilon, delta=a.delta, iota=a.iota,
                       noise_sigma=a.sigma or 0.0, max_iterations=a.max_iters,
                       k_isolation=a.k_isolation, k_msb=a.k_msb, preset=a.preset)
    report = recover_nd(s, p, a.seed)
    if a.format == "csv":
        lines = ["freq,re,im"] + [f"{' '.join(map(str, k))},{c.real!r},{c.imag!r}"
                                  for k, c in sorted(report.representation)]
        _emit("\n".join(lines), a.out)
    else:
        obj = report.to_dict()
        if not a.trace:
            obj.pop("trace")
        _emit(json.dumps(obj, indent=2), a.out)
    return 0


def cmd_dft(a) -> int:
    x = formats.read_rlsf(a.input)
    y = dense.dft_naive(x, inverse=a.inverse) if a.naive else dense.fft(x, inverse=a.inverse)
    if a.out is None:
        raise ParameterError("dft needs --out")
    formats.write_rlsf(a.out, y)
    return 0


def _spec_from(a, family: str, grid: dict) -> bench.ExperimentSpec:
    return bench.ExperimentSpec(family, grid, runs=a.runs, seed=a.seed, timing=a.timing,
                                epsilon=a.epsilon, delta=a.delta, iota=a.iota,
                                max_iterations=a.max_iters, k_isolation=a.k_isolation,
                                k_msb=a.k_msb, preset=a.preset)


def _report(a, result: bench.ExperimentResult) -> int:
    if a.out is not None:
        if a.format == "csv":
            bench.write_csv(a.out, result.records, bench.RECORD_COLUMNS)
            bench.write_csv(a.out.with_suffix(".summary.csv"), result.summary,
                            bench.SUMMARY_COLUMNS)
        else:
            a.out.write_text(result.to_json())
    for r in result.summary:
        print(f"cell {r['cell']}: n={r['n']} d={r['d']} b={r['b']} sigma={r['sigma']:.4g} "
              f"success {r['successes']}/{r['runs']} [{r['wilson_lo']:.2f}, {r['wilson_hi']:.2f}] "
              f"time {r['time_median']:.4g}s samples {r['samples_median']:.0f}")
    if not a.assert_:
        return 0
    breach = False
    for name, ok, detail in bench.check(result):
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        breach |= not ok
    return 2 if breach else 0


def cmd_bench(a) -> int:
    grid = {}
    for key in ("n", "d", "b", "sigma", "snr"):
        v = getattr(a, key, None)
        if v is not None:
            grid[key] = v
    return _report(a, bench.run_experiment(_spec_from(a, a.family, grid)))


def cmd_sweep(a) -> int:
    grid = {key: [getattr(a, key)] for key in ("n", "d", "b", "sigma")
            if getattr(a, key) is not None}
    grid[a.param] = _floats(a.values) if a.param in ("sigma", "snr") else _ints(a.values)
    return _report(a, bench.run_experiment(_spec_from(a, a.family, grid)))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sparsefourier", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic signal description or dense data")
    _common(g)
    g.add_argument("--kind", choices=["superposition", "decay_spectrum"], default="superposition")
    g.add_argument("--complex", action="store_true", help="complex coefficients")
    g.add_argument("--dense", action="store_true", help="write RLSF samples instead of JSON")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("recover", help="recover a sparse representation")
    _common(r)
    r.add_argument("--input", type=Path, help="signal JSON or .rlsf file")
    r.add_argument("--trace", action="store_true", help="include the iteration trace")
    r.set_defaults(func=cmd_recover)

    f = sub.add_parser("dft", help="dense transform of an RLSF file")
    _common(f)
    f.add_argument("--input", type=Path, required=True)
    f.add_argument("--naive", action="store_true", help="quadratic-time reference transform")
    f.add_argument("--inverse", action="store_true")
    f.set_defaults(func=cmd_dft)

    b = sub.add_parser("bench", help="run an experiment family")
    _common(b, lists=True)
    b.add_argument("--family", choices=bench.FAMILIES, required=True)
    b.add_argument("--snr", type=_floats)
    b.add_argument("--assert", dest="assert_", action="store_true",
                   help="exit with status 2 when an acceptance threshold is breached")
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("sweep", help="vary one parameter of an experiment family")
    _common(s)
    s.add_argument("--family", choices=bench.FAMILIES, required=True)
    s.add_argument("--param", choices=["n", "d", "b", "sigma", "snr"], required=True)
    s.add_argument("--values", required=True, help="comma separated values")
    s.add_argument("--assert", dest="assert_", action="store_true")
    s.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    try:
        return a.func(a)
    except (ContractError, ParameterError, FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
