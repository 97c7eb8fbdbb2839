"""Run every experiment family at its default grid and write CSV tables.

Usage: python scripts/run_tables.py --out results --runs 20
"""
import argparse
from pathlib import Path

from sparsefourier import bench


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--families", nargs="*", default=list(bench.FAMILIES))
    a = ap.parse_args()
    a.out.mkdir(parents=True, exist_ok=True)
    for family in a.families:
        spec = bench.ExperimentSpec(family, runs=a.runs, seed=a.seed)
        result = bench.run_experiment(
            spec, progress=lambda i, cell: print(f"{family} cell {i} {cell}", flush=True))
        bench.write_csv(a.out / f"{family}.csv", result.records, bench.RECORD_COLUMNS)
        bench.write_csv(a.out / f"{family}.summary.csv", result.summary, bench.SUMMARY_COLUMNS)
        for name, ok, detail in bench.check(result):
            print(f"  {'PASS' if ok else 'FAIL'} {name}: {detail}")


if __name__ == "__main__":
    main()
