"""Quantum switch of two thermal-noise qubit rotations and its use for phase estimation."""

from .channels import (
    E_X,
    E_Y,
    E_Z,
    AffineBlochMap,
    KrausChannel,
    ThermalNoiseParams,
    UnitaryParams,
    UnphysicalTemperatureWarning,
    apply_channel,
    bloch_affine_of_thermal,
    effective_temperature,
    noisy_unitary_channel,
    p_from_effective_temperature,
    p_from_temperature,
    thermal_kraus,
    thermal_output,
)
from .linalg import DensityOperator, InvalidInput, density, hermitian_eig, kron, partial_trace, qubit_state
from .metrology import (
    ConsistencyError,
    FisherReport,
    StandardProbeConfig,
    cfi_control,
    fisher_report,
    hadamard_probs,
    post_measurement_states,
    qfi_control,
    qfi_spectral,
    qfi_standard,
)
from .switch import (
    ControlState,
    SwitchOutput,
    apply_switch_generic,
    dq_factor,
    joint_state_closed,
    q_factor,
    s00_closed,
    s01_closed,
    switch_kraus,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
