"""Entanglement entropy of two-mode bosonic states in truncated Fock space."""
from .entanglement import (
    Base,
    DensityMatrix,
    EntropyValue,
    density_from_pure,
    entanglement_entropy,
    entropy_gaussian_closed,
    entropy_tms_closed,
    entropy_tv_closed,
    partial_trace,
    reduced_density,
    schmidt_weights,
    von_neumann_entropy,
)
from .exceptions import (
    BosentError,
    InstabilityError,
    InvalidStateError,
    NegativeEigenvalueError,
    NonHermitianError,
    TruncationWarning,
)
from .states import (
    NormalModeData,
    OscillatorPair,
    ThermalParams,
    TwoModePureState,
    beta_omega,
    cho_ground_state_numeric,
    normal_mode_params,
    partition_function,
    thermal_vacuum_state,
    tms_state,
)

__version__ = "0.1.0"
