"""Heralded single-magnon addition onto coherent and thermal magnon states.

Closed-form results (``analytic``) are paired with a truncated Fock-space
pipeline (``fock``, ``channels``, ``metrics``) that checks them numerically.
"""
from ._backend import BACKEND
from .analytic import (
    StateFamily,
    StateKind,
    macs_mandel_q,
    macs_variance,
    macs_wigner,
    mats_mandel_q,
    mats_reduced_nbar,
    mats_wigner,
    readout_macs_q,
    readout_macs_variance,
    readout_macs_wigner,
    readout_mats_q,
    readout_mats_wigner,
    sub_poissonian_threshold,
)
from .channels import (
    HeraldMode,
    KrausChannel,
    PhysicalParams,
    WritePulseParams,
    addition_kraus,
    drive_power_for_amplitude,
    heralded_add,
    loss_channel,
    steady_state_averages,
    swap_efficiency,
    thermal_occupation_from_temperature,
    unheralded_pass,
    write_pulse_params,
)
from .errors import (
    AdiabaticityError,
    DomainError,
    InvalidStateError,
    MagnonAddError,
    NormalizationError,
    ScheduleError,
    TruncationError,
    UndefinedQError,
)
from .fock import (
    DensityMatrix,
    OperatorKind,
    OperatorMatrix,
    annihilation_op,
    coherent_state,
    creation_op,
    displacement_op,
    expectation,
    fock_state,
    number_distribution,
    thermal_state,
)
from .metrics import (
    WignerMap,
    mandel_q_numeric,
    negativity_volume,
    quadrature_variance_numeric,
    wigner_grid,
    wigner_numeric,
)

__version__ = "0.1.0"
