"""Resolve a configuration into concrete protocol inputs and run the three steps."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .. import analytic as an
from ..channels import (
    HeraldMode,
    PhysicalParams,
    heralded_add,
    loss_channel,
    swap_efficiency,
    thermal_occupation_from_temperature,
    unheralded_pass,
    write_pulse_params,
)
from ..errors import DomainError, UndefinedQError
from ..fock import (
    DensityMatrix,
    coherent_state,
    default_dim_coherent,
    default_dim_thermal,
    mean_number,
    safe_radius_dim,
    thermal_state,
)
from ..metrics import mandel_q_numeric, quadrature_variance_numeric, wigner_numeric
from .config import STATE_FIELDS, ExperimentConfig, sweep_value_to_internal

PHYSICAL_FIELDS = frozenset(f.name for f in fields(PhysicalParams))


@dataclass(frozen=True)
class Resolved:
    """Concrete inputs for one protocol run; exactly one of beta / nbar0 is set."""

    params: PhysicalParams
    M: float
    eta: float
    beta: float | None
    nbar0: float | None
    herald: bool
    herald_mode: HeraldMode
    gain_time: float | None
    M_source: str
    eta_source: str

    @property
    def coherent(self) -> bool:
        return self.beta is not None

    def family(self) -> an.StateFamily:
        if self.coherent:
            return an.StateFamily.macs(self.M, self.beta)
        return an.StateFamily.mats(self.M, self.nbar0)

    def describe(self) -> dict:
        return {
            "M": self.M,
            "M_source": self.M_source,
            "gain_time": self.gain_time,
            "eta": self.eta,
            "eta_source": self.eta_source,
            "beta": self.beta,
            "nbar0": self.nbar0,
            "herald": self.herald,
            "herald_mode": self.herald_mode.value,
        }


def resolve(config: ExperimentConfig, overrides: dict | None = None, hz: bool = False) -> Resolved:
    """Merge config, state overrides and per-point ``overrides``.

    With ``hz`` the physical entries of ``overrides`` are taken in config
    units (Hz) and converted; otherwise they are already internal.
    """
    overrides = dict(overrides or {})
    phys_changes = {}
    state = {k: getattr(config.state, k) for k in ("beta", "nbar0", "M", "eta")}
    for key, value in overrides.items():
        if key in PHYSICAL_FIELDS:
            phys_changes[key] = sweep_value_to_internal(key, value) if hz else value
        elif key in STATE_FIELDS or key == "eta":
            state[key] = value
        else:
            raise DomainError(f"unknown parameter {key!r}")
    if "beta" in overrides:
        state["nbar0"] = None
    if "nbar0" in overrides:
        state["beta"] = None
    params = config.physical.replace(**phys_changes) if phys_changes else config.physical

    gain_time = None
    if state["M"] is not None:
        M, M_source = float(state["M"]), "override"
    else:
        wp = write_pulse_params(params.G1, params.kappa_1, params.tau_w)
        M, M_source, gain_time = wp.M, "write_pulse", wp.gain_time
    if state["eta"] is not None:
        eta, eta_source = float(state["eta"]), "override"
    else:
        eta, eta_source = swap_efficiency(params.g_mc, params.kappa_c, params.tau_r), "swap"

    beta, nbar0 = state["beta"], state["nbar0"]
    if beta is None and nbar0 is None:
        if params.T_bath > 0:
            nbar0 = thermal_occupation_from_temperature(
                params.T_bath, params.omega_m, config.state.occupation_mode
            )
        else:
            beta = 1.0
    return Resolved(
        params=params,
        M=M,
        eta=eta,
        beta=None if beta is None else float(beta),
        nbar0=None if nbar0 is None else float(nbar0),
        herald=config.state.herald,
        herald_mode=HeraldMode(config.state.herald_mode),
        gain_time=gain_time,
        M_source=M_source,
        eta_source=eta_source,
    )


def auto_dim(res: Resolved, radius: float = 0.0, requested: int | None = None) -> int:
    if requested is not None:
        return int(requested)
    base = default_dim_coherent(res.beta) if res.coherent else default_dim_thermal(res.nbar0)
    return max(base, safe_radius_dim(radius) if radius else 0)


def prepare(res: Resolved, dim: int) -> DensityMatrix:
    if res.coherent:
        return coherent_state(res.beta, dim)
    return thermal_state(res.nbar0, dim)


def add(res: Resolved, rho: DensityMatrix) -> tuple[DensityMatrix, float | None]:
    if not res.herald:
        return unheralded_pass(rho, res.M), None
    return heralded_add(rho, res.M, res.herald_mode)


def read(res: Resolved, rho: DensityMatrix) -> DensityMatrix:
    return loss_channel(rho, res.eta)


def analytic_applies(res: Resolved) -> bool:
    """Closed forms describe the exactly-one herald; unheralded stages have their own."""
    return not res.herald or res.herald_mode is HeraldMode.EXACT_ONE


def q_or_nan(rho: DensityMatrix) -> float:
    try:
        return mandel_q_numeric(rho)
    except UndefinedQError:
        return math.nan


# -- closed forms per stage ----------------------------------------------------
# stage: "prepared", "added" or "readout"

def _gaussian_stage(res: Resolved, stage: str) -> tuple[complex, float]:
    """Coherent amplitude and thermal occupation of a Gaussian stage."""
    amp = res.beta if res.coherent else 0.0
    nb = 0.0 if res.coherent else res.nbar0
    if stage in ("added", "readout"):
        amp *= res.M
        nb = 0.0 if res.coherent else an.mats_reduced_nbar(res.nbar0, res.M)
    if stage == "readout":
        amp *= math.sqrt(res.eta)
        nb *= res.eta
    return amp, nb


def _is_added(res: Resolved, stage: str) -> bool:
    return res.herald and stage in ("added", "readout")


def analytic_q(res: Resolved, stage: str) -> float:
    fam = res.family()
    if stage == "readout" and res.eta == 0:
        return math.nan  # vacuum output
    if _is_added(res, stage):
        if stage == "added":
            return an.macs_mandel_q(fam) if res.coherent else an.mats_mandel_q(fam)
        return an.readout_macs_q(fam, res.eta) if res.coherent else an.readout_mats_q(fam, res.eta)
    amp, nb = _gaussian_stage(res, stage)
    if amp == 0 and nb == 0:
        return math.nan
    return 0.0 if res.coherent else nb


def analytic_variance(res: Resolved, stage: str, theta: float) -> float:
    fam = res.family()
    if _is_added(res, stage):
        if res.coherent:
            if stage == "added":
                return an.macs_variance(fam, theta)
            return an.readout_macs_variance(fam, theta, res.eta)
        # phase-insensitive: <x^2> = (2<n> + 1) / 4
        n = an.mats_mean_number(fam)
        if stage == "readout":
            n *= res.eta
        return (2 * n + 1) / 4
    _, nb = _gaussian_stage(res, stage)
    return (2 * nb + 1) / 4


def analytic_wigner(res: Resolved, stage: str, alpha):
    fam = res.family()
    if _is_added(res, stage):
        if stage == "added":
            return an.macs_wigner(alpha, fam) if res.coherent else an.mats_wigner(alpha, fam)
        if res.coherent:
            return an.readout_macs_wigner(alpha, fam, res.eta)
        return an.readout_mats_wigner(alpha, fam, res.eta)
    amp, nb = _gaussian_stage(res, stage)
    alpha = np.asarray(alpha, dtype=np.complex128)
    w = 2 / (math.pi * (2 * nb + 1)) * np.exp(-2 * np.abs(alpha - amp) ** 2 / (2 * nb + 1))
    return float(w) if w.ndim == 0 else w


def analytic_mean_number(res: Resolved, stage: str) -> float:
    fam = res.family()
    if _is_added(res, stage):
        if res.coherent:
            n = an.macs_mean_number(fam)
        else:
            n = an.mats_mean_number(fam)
        return n * res.eta if stage == "readout" else n
    amp, nb = _gaussian_stage(res, stage)
    return abs(amp) ** 2 + nb


def analytic_herald_probability(res: Resolved) -> float:
    fam = res.family()
    if res.herald_mode is HeraldMode.EXACT_ONE:
        if res.coherent:
            return an.macs_herald_probability(fam)
        return an.mats_herald_probability(fam)
    # click: 1 - Tr(K_0 rho K_0^dag)
    M2 = res.M**2
    if res.coherent:
        return 1 - M2 * math.exp(-(res.beta**2) * (1 - M2))
    p = res.nbar0 / (1 + res.nbar0)
    return 1 - M2 * (1 - p) / (1 - p * M2)


def stage_metrics(res: Resolved, stage: str, rho: DensityMatrix, thetas=(0.0, math.pi / 2)) -> dict:
    """Numeric and closed-form scalar witnesses of one stage, side by side."""
    out = {
        "mean_number": {"numeric": mean_number(rho), "analytic": analytic_mean_number(res, stage)},
        "mandel_q": {"numeric": q_or_nan(rho), "analytic": analytic_q(res, stage)},
        "wigner_origin": {
            "numeric": wigner_numeric(rho, 0.0),
            "analytic": analytic_wigner(res, stage, 0.0),
        },
    }
    for theta in thetas:
        out[f"variance_theta={theta:.6g}"] = {
            "numeric": quadrature_variance_numeric(rho, theta),
            "analytic": analytic_variance(res, stage, theta),
        }
    return out
