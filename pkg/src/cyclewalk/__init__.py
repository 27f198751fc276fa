"""Continuous- and discrete-time quantum and classical walks on the cycle C_N."""

from .walks import (
    MODELS,
    AmplitudeVector,
    CoinedState,
    CoinMatrix,
    NumericalInvariantError,
    ProbabilityDistribution,
    WalkSpec,
    ct_classical_distribution,
    ct_quantum_amplitude,
    ct_quantum_distribution,
    distribution,
    distribution_series,
    dt_classical_distribution,
    dt_coined_distribution,
    dt_coined_step,
    hadamard,
    phase_grid,
    r_oscillation,
    r_reference_closed,
)

__version__ = "0.1.0"
