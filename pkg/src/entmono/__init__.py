"""Concurrence monogamy analysis for 2x2xd quantum systems."""

from .linalg import HermitianEigenResult, hermitian_eig, psd_sqrt, sqrt_det2
from .measures import (
    RoofConfig,
    RoofResult,
    average_concurrence,
    coa_2qubit,
    concurrence_2qubit,
    convex_roof,
    pure_concurrence,
    spin_flip,
)
from .states import (
    DensityMatrix,
    EnsembleRotation,
    PureEnsemble,
    PureState,
    fidelity,
    haar_rotation,
    hjw_ensemble,
    is_ppt,
    partial_trace,
    partial_transpose,
    random_density,
    random_pure,
    rng_stream,
    spectral_ensemble,
)

__all__ = [
    "HermitianEigenResult",
    "hermitian_eig",
    "psd_sqrt",
    "sqrt_det2",
    "PureState",
    "DensityMatrix",
    "PureEnsemble",
    "EnsembleRotation",
    "partial_trace",
    "partial_transpose",
    "is_ppt",
    "spectral_ensemble",
    "hjw_ensemble",
    "haar_rotation",
    "random_pure",
    "random_density",
    "fidelity",
    "rng_stream",
    "pure_concurrence",
    "spin_flip",
    "concurrence_2qubit",
    "coa_2qubit",
    "average_concurrence",
    "RoofConfig",
    "RoofResult",
    "convex_roof",
]

__version__ = "0.1.0"
