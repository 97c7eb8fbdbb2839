"""Locate where single-mode success collapses as the noise level grows.

The acceptance grid stops at sigma = 4; this sweep extends it so the
transition is visible.  Usage: python scripts/noise_transition.py --runs 50
"""
import argparse

from sparsefourier import bench


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="*", default=[10009, 100003])
    ap.add_argument("--sigma", type=float, nargs="*", default=[2, 3, 4, 5, 6, 7, 8, 10])
    ap.add_argument("--runs", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    spec = bench.ExperimentSpec("sweep_noise", {"n": a.n, "sigma": a.sigma}, runs=a.runs,
                                seed=a.seed)
    result = bench.run_experiment(spec)
    print("n,sigma,success_rate,wilson_lo,wilson_hi,iterations_median")
    for r in sorted(result.summary, key=lambda r: (r["n"], r["sigma"])):
        print(f"{r['n']},{r['sigma']},{r['success_rate']:.2f},{r['wilson_lo']:.2f},"
              f"{r['wilson_hi']:.2f},{r['iterations_median']:.0f}")


if __name__ == "__main__":
    main()
