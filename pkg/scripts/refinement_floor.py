"""Coefficient error after multi-step refinement against the per-coefficient budget.

With m samples per estimate the error of one median-of-means estimate is of
order ||S|| / sqrt(m), so a fixed budget sets a floor no number of steps can
pass.  Usage: python scripts/refinement_floor.py
"""
import argparse

import numpy as np

from sparsefourier.estimators import CoefficientEstimatorParams, refine_coefficients
from sparsefourier.signal_model import SparseRepresentation, SparseSignalOracle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--seeds", type=int, default=100)
    a = ap.parse_args()
    s = SparseSignalOracle(SparseRepresentation(a.n, 1, [((1,), 1.0), ((2,), 1.0)]))
    print("samples_per_mean,num_means,steps,median_error,share_below_1e-4")
    for per_mean, means, steps in [(10, 5, 1), (10, 5, 3), (10, 5, 6), (100, 5, 3),
                                   (1000, 5, 3), (10000, 5, 3)]:
        p = CoefficientEstimatorParams(per_mean, means, steps, 0.1)
        errs = np.array([np.max(np.abs(refine_coefficients(s, [1, 2], p,
                                                           np.random.default_rng(i)) - 1))
                         for i in range(a.seeds)])
        print(f"{per_mean},{means},{steps},{np.median(errs):.2e},{np.mean(errs <= 1e-4):.2f}")


if __name__ == "__main__":
    main()
