"""Randomized sparse Fourier approximation on Z_N^d."""
from .dense import dft_naive, fft, ifft, top_b
from .errors import ContractError, FormatError, ParameterError, RangeError
from .estimators import (CoefficientEstimatorParams, EnergyEstimatorParams, estimate_coefficient,
                         estimate_coefficients, estimate_energy, refine_coefficients)
from .group_testing import MsbParams, group_test, msb, neighbor_refine
from .isolation import IsolationParams, isolate
from .recovery import RecoveryParams, RecoveryReport, recover
from .recovery_nd import recover_nd
from .signal_model import (DenseOracle, FunctionOracle, GeneratedSignalSpec, SignalOracle,
                           SparseRepresentation, SparseSignalOracle, generate_signal)
from .transform_sampling import AffinePermutationND, FrequencyPermutation1D

__version__ = "0.1.0"

__all__ = [
    "AffinePermutationND", "CoefficientEstimatorParams", "ContractError", "DenseOracle",
    "EnergyEstimatorParams", "FormatError", "FrequencyPermutation1D", "FunctionOracle",
    "GeneratedSignalSpec", "IsolationParams", "MsbParams", "ParameterError", "RangeError",
    "RecoveryParams", "RecoveryReport", "SignalOracle", "SparseRepresentation",
    "SparseSignalOracle", "dft_naive", "estimate_coefficient", "estimate_coefficients",
    "estimate_energy", "fft", "generate_signal", "group_test", "ifft", "isolate", "msb",
    "neighbor_refine", "recover", "recover_nd", "refine_coefficients", "top_b",
]
