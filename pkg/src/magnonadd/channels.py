"""The three protocol steps as maps on density matrices.

1. Preparation: a weak microwave drive displaces the magnon mode to a coherent
   state (steady state of the driven cavity-magnon mean-field equations), or
   the bath temperature sets a thermal state.
2. Addition: a weak optical write pulse activates the Stokes two-mode-squeezing
   interaction; conditioning on a scattered photon adds one magnon. The photon
   temporal mode starts in vacuum and is traced out analytically, giving an
   exact Kraus family on the magnon mode alone.
3. Readout: the cavity-magnon beamsplitter maps the magnon onto the cavity
   output with efficiency eta, i.e. a pure-loss channel.

Decay-rate convention: every ``kappa`` is an amplitude decay rate. It enters
the mean-field equations as ``-kappa * c`` and the input coupling as
``sqrt(2 * kappa)``. A full linewidth (FWHM) is ``2 * kappa``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy import constants
from scipy.integrate import solve_ivp
from scipy.special import comb, gammaln

from .errors import (
    AdiabaticityError,
    AdiabaticityWarning,
    DomainError,
    ScheduleError,
    ScheduleWarning,
    SingularSteadyStateError,
    TruncationError,
)
from .fock import TAIL_TOL, DensityMatrix, OperatorKind, OperatorMatrix

TWO_PI = 2.0 * math.pi

ADIABATIC_RATIO_MAX = 0.3
ADIABATIC_RATIO_WARN = 0.1
SCHEDULE_SLACK = 0.05
COMPLETENESS_TOL = 1e-8


@dataclass(frozen=True)
class PhysicalParams:
    """Device constants in SI units; all frequencies and rates in rad/s.

    Defaults are the parameter set used for the coherent-state figures: a
    10 GHz cavity/magnon pair, kappa_c/2pi = 40 MHz, kappa_m/2pi = 0.5 MHz,
    g_mc/2pi = 2 MHz, G1/2pi = 1 MHz, kappa_1/2pi = 10 MHz, a 16 ns write
    pulse and a 70 ns read pulse. ``tau_s`` and ``tau_d`` are not fixed by the
    source and are placeholders that satisfy the schedule ordering.
    """

    omega_c: float = TWO_PI * 10e9
    omega_m: float = TWO_PI * 10e9
    omega_d: float = TWO_PI * 10e9
    g_mc: float = TWO_PI * 2e6
    G1: float = TWO_PI * 1e6
    kappa_c: float = TWO_PI * 40e6
    kappa_m: float = TWO_PI * 0.5e6
    kappa_1: float = TWO_PI * 10e6
    kappa_2: float = TWO_PI * 10e6
    P_d: float = 0.0
    P_2: float = 0.0
    tau_s: float = 50e-9
    tau_w: float = 16e-9
    tau_d: float = 10e-9
    tau_r: float = 70e-9
    T_bath: float = 0.0
    g_om: float = 0.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not np.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be finite and >= 0, got {value!r}")

    @property
    def tau_total(self) -> float:
        return self.tau_s + self.tau_w + self.tau_d + self.tau_r

    def replace(self, **changes) -> "PhysicalParams":
        data = asdict(self)
        data.update(changes)
        return PhysicalParams(**data)


def check_schedule(params: PhysicalParams) -> list[str]:
    """Check the pulse ordering ``1/kappa_c << tau_s`` and ``tau_total << 1/kappa_m``.

    Raises ``ScheduleError`` when an ordering is outright violated (ratio past
    one); returns, and emits as ``ScheduleWarning``, the softer concerns.
    """
    problems = []
    if params.kappa_c * params.tau_s < 1.0:
        raise ScheduleError(
            f"settling time tau_s={params.tau_s:.3g}s is shorter than the cavity lifetime "
            f"1/kappa_c={1.0 / params.kappa_c if params.kappa_c else math.inf:.3g}s"
        )
    if params.kappa_m * params.tau_total >= 1.0:
        raise ScheduleError(
            f"tau_total*kappa_m = {params.kappa_m * params.tau_total:.3g} >= 1: "
            "magnon decay during the protocol is not negligible"
        )
    if params.kappa_c * params.tau_s < 10.0:
        problems.append(f"tau_s*kappa_c = {params.kappa_c * params.tau_s:.3g} < 10")
    if params.kappa_m * params.tau_total > SCHEDULE_SLACK:
        problems.append(
            f"tau_total*kappa_m = {params.kappa_m * params.tau_total:.3g} > {SCHEDULE_SLACK}"
        )
    for msg in problems:
        warnings.warn(msg, ScheduleWarning, stacklevel=2)
    return problems


# -- step 1: preparation ------------------------------------------------------

def drive_coupling(power: float, kappa_c: float, omega_d: float) -> float:
    """E_d = sqrt(2 P kappa_c / (hbar omega_d)) in 1/s."""
    return math.sqrt(2.0 * power * kappa_c / (constants.hbar * omega_d))


def _steady_denominator(params, delta_c, delta_m):
    den = params.g_mc**2 - (delta_c - 1j * params.kappa_c) * (delta_m - 1j * params.kappa_m)
    scale = params.g_mc**2 + abs(delta_c - 1j * params.kappa_c) * abs(delta_m - 1j * params.kappa_m)
    if scale == 0 or abs(den) <= 1e-12 * scale:
        raise SingularSteadyStateError("steady-state denominator vanishes")
    return den


def steady_state_averages(
    params: PhysicalParams, delta_c: float = 0.0, delta_m: float = 0.0
) -> tuple[complex, complex]:
    """Steady-state (<m>, <c>) under a constant microwave drive of power ``params.P_d``."""
    den = _steady_denominator(params, delta_c, delta_m)
    e_d = drive_coupling(params.P_d, params.kappa_c, params.omega_d)
    mean_m = -1j * params.g_mc * e_d / den
    mean_c = (1j * delta_m + params.kappa_m) * e_d / den
    return complex(mean_m), complex(mean_c)


def drive_power_for_amplitude(
    params: PhysicalParams, target_beta: float, delta_c: float = 0.0, delta_m: float = 0.0
) -> float:
    """Drive power (W) that yields ``|<m>| = target_beta`` in steady state."""
    if not target_beta > 0:
        raise DomainError(f"target amplitude must be > 0, got {target_beta!r}")
    if params.g_mc <= 0:
        raise DomainError("g_mc must be > 0 to displace the magnon mode")
    den = _steady_denominator(params, delta_c, delta_m)
    e_d = target_beta * abs(den) / params.g_mc
    return e_d**2 * constants.hbar * params.omega_d / (2.0 * params.kappa_c)


def integrate_mean_fields(
    params: PhysicalParams,
    delta_c: float = 0.0,
    delta_m: float = 0.0,
    t_final: float | None = None,
    rtol: float = 1e-13,
) -> tuple[complex, complex]:
    """Time-integrate the driven mean-field equations from vacuum.

    Independent check on ``steady_state_averages``: no algebraic solve, just
    the linear ODE run for ``t_final`` (default: 45 slowest relaxation times).
    """
    e_d = drive_coupling(params.P_d, params.kappa_c, params.omega_d)
    g = params.g_mc
    gen = np.array(
        [[-(1j * delta_c + params.kappa_c), -1j * g], [-1j * g, -(1j * delta_m + params.kappa_m)]]
    )
    if t_final is None:
        slowest = np.min(-np.linalg.eigvals(gen).real)
        if slowest <= 0:
            raise SingularSteadyStateError("mean-field dynamics do not relax")
        t_final = 45.0 / slowest

    def rhs(_t, y):
        z = y[:2] + 1j * y[2:]
        dz = gen @ z + np.array([e_d, 0.0])
        return np.concatenate([dz.real, dz.imag])

    sol = solve_ivp(rhs, (0.0, t_final), np.zeros(4), method="DOP853", rtol=rtol, atol=1e-14 * max(e_d, 1.0) / params.kappa_c)
    c_end, m_end = sol.y[0, -1] + 1j * sol.y[2, -1], sol.y[1, -1] + 1j * sol.y[3, -1]
    return complex(m_end), complex(c_end)


def thermal_occupation_from_temperature(T: float, omega_m: float, mode: str = "bose_einstein") -> float:
    """Thermal magnon occupation at bath temperature ``T`` (K).

    ``mode="bose_einstein"`` gives 1/(exp(hbar w / k T) - 1). ``mode="linear"``
    gives the high-temperature limit k T / (hbar w), which is what the quoted
    0.417-2.084 range for 0.2-1 K at 10 GHz corresponds to.
    """
    if not T > 0:
        raise DomainError(f"temperature must be > 0, got {T!r}")
    x = constants.hbar * omega_m / (constants.k * T)
    if mode == "bose_einstein":
        return 1.0 / math.expm1(x)
    if mode == "linear":
        return 1.0 / x
    raise DomainError(f"unknown occupation mode {mode!r}")


# -- step 2: single-magnon addition -------------------------------------------

def _adiabatic_guard(ratio: float, what: str, ratio_max: float) -> None:
    if ratio > ratio_max:
        raise AdiabaticityError(f"{what} = {ratio:.4g} exceeds adiabatic limit {ratio_max}")
    if ratio > ADIABATIC_RATIO_WARN:
        warnings.warn(f"{what} = {ratio:.4g} > {ADIABATIC_RATIO_WARN}", AdiabaticityWarning, stacklevel=3)


@dataclass(frozen=True)
class WritePulseParams:
    """Effective write-pulse quantities after eliminating the optical mode.

    ``scattering_rate`` is G1**2 / kappa_1; ``M = exp(-scattering_rate * tau_w)``
    is the amplitude attenuation of the magnon during the pulse.
    """

    scattering_rate: float
    M: float
    herald_prob_approx: float
    tau_w: float

    def __post_init__(self):
        if not 0.0 < self.M <= 1.0:
            raise DomainError(f"M must lie in (0, 1], got {self.M!r}")

    @property
    def gain_time(self) -> float:
        """Dimensionless scattering_rate * tau_w."""
        return self.scattering_rate * self.tau_w


def write_pulse_params(
    G1: float, kappa_1: float, tau_w: float, adiabatic_ratio_max: float = ADIABATIC_RATIO_MAX
) -> WritePulseParams:
    if G1 < 0 or kappa_1 <= 0 or tau_w < 0:
        raise DomainError("need G1 >= 0, kappa_1 > 0, tau_w >= 0")
    _adiabatic_guard(G1 / kappa_1, "G1/kappa_1", adiabatic_ratio_max)
    rate = G1**2 / kappa_1
    M = math.exp(-rate * tau_w)
    return WritePulseParams(rate, M, 1.0 - M**2, tau_w)


def _check_M(M: float) -> float:
    if not (np.isfinite(M) and 0.0 < M < 1.0):
        raise DomainError(f"M must lie in (0, 1), got {M!r}")
    return float(M)


def _addition_log_amplitude(M: float, k: int, n: np.ndarray) -> np.ndarray:
    """log |<n+k|K_k|n>| for K_k = (-i sqrt(1-M^2))^k / sqrt(k!) (m^dag)^k M^{1+n}."""
    return (
        0.5 * k * math.log1p(-M * M)
        - 0.5 * gammaln(k + 1.0)
        + 0.5 * (gammaln(n + k + 1.0) - gammaln(n + 1.0))
        + (1.0 + n) * math.log(M)
    )


def _addition_operator(M: float, k: int, dim: int) -> np.ndarray:
    op = np.zeros((dim, dim), dtype=np.complex128)
    if k >= dim:
        return op
    n = np.arange(dim - k)
    op[n + k, n] = (-1j) ** k * np.exp(_addition_log_amplitude(M, k, n))
    return op


def _truncation_loss(M: float, k: int, populations: np.ndarray) -> float:
    """Weight K_k would map from the top ``k`` levels to levels >= dim."""
    dim = populations.size
    n = np.arange(max(dim - k, 0), dim)
    return float(np.sum(populations[n] * np.exp(2.0 * _addition_log_amplitude(M, k, n))))


@dataclass(frozen=True)
class KrausChannel:
    """Ordered Kraus family; ``completeness_defect`` is max|sum K^dag K - I| on the lower half-basis."""

    operators: tuple[OperatorMatrix, ...]
    completeness_defect: float
    declared_complete: bool = True

    def __post_init__(self):
        if self.declared_complete and self.completeness_defect > COMPLETENESS_TOL:
            raise TruncationError(
                f"Kraus family declared complete but defect is {self.completeness_defect:.3e}"
            )

    @property
    def dim(self) -> int:
        return self.operators[0].dim

    def apply(self, rho: DensityMatrix, outcomes=None) -> np.ndarray:
        """Unnormalized sum_k K_k rho K_k^dag over ``outcomes`` (default all)."""
        r = rho.elements
        idx = range(len(self.operators)) if outcomes is None else outcomes
        out = np.zeros_like(r)
        for k in idx:
            K = self.operators[k].elements
            out += K @ r @ K.conj().T
        return out


def _completeness_defect(ops, dim: int) -> float:
    half = dim // 2
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for K in ops:
        acc += K.conj().T @ K
    return float(np.max(np.abs(acc[:half, :half] - np.eye(half))))


def addition_kraus(
    M: float,
    dim: int,
    k_max: int = 1,
    auto: bool = True,
    test_state: DensityMatrix | None = None,
    tol: float = 1e-12,
) -> KrausChannel:
    """Kraus family {K_0, ..., K_kmax} of the write pulse with the photon mode in vacuum.

    K_k is the magnon-mode operator for ``k`` scattered photons. With ``auto``
    the list grows until the completeness defect on the lower half-basis (and
    the weight dropped on ``test_state``, if given) falls below ``tol``, or
    until ``k_max`` reaches ``dim - 1``.
    """
    M = _check_M(M)
    if k_max < 1:
        raise DomainError(f"k_max must be >= 1, got {k_max}")
    ops = [_addition_operator(M, k, dim) for k in range(k_max + 1)]

    def dropped(ops_):
        if test_state is None:
            return 0.0
        r = test_state.elements
        kept = sum(np.real(np.trace(K @ r @ K.conj().T)) for K in ops_)
        return 1.0 - kept

    defect = _completeness_defect(ops, dim)
    if auto:
        while (defect > tol or dropped(ops) > tol) and len(ops) < dim:
            ops.append(_addition_operator(M, len(ops), dim))
            defect = _completeness_defect(ops, dim)
    return KrausChannel(
        tuple(OperatorMatrix(K, OperatorKind.KRAUS) for K in ops),
        defect,
        declared_complete=defect <= COMPLETENESS_TOL,
    )


class HeraldMode(str, enum.Enum):
    EXACT_ONE = "exact_one"  # number-resolving detector: exactly one photon
    CLICK = "click"  # on/off detector: one or more photons


def heralded_add(
    rho: DensityMatrix, M: float, herald_mode: str | HeraldMode = HeraldMode.EXACT_ONE
) -> tuple[DensityMatrix, float]:
    """Condition the magnon state on a herald from the write pulse.

    Returns the normalized conditional state and the exact success
    probability (trace before normalization). ``exact_one`` keeps only K_1;
    ``click`` sums K_k rho K_k^dag over k >= 1.
    """
    M = _check_M(M)
    mode = HeraldMode(herald_mode)
    dim = rho.dim
    r = rho.elements
    pops = np.real(np.diag(r))

    if mode is HeraldMode.EXACT_ONE:
        K = _addition_operator(M, 1, dim)
        out = K @ r @ K.conj().T
        p = float(np.trace(out).real)
        lost = _truncation_loss(M, 1, pops)
    else:
        out = np.zeros_like(r)
        p = 0.0
        lost = 0.0
        for k in range(1, dim):
            K = _addition_operator(M, k, dim)
            term = K @ r @ K.conj().T
            w = float(np.trace(term).real)
            out += term
            p += w
            lost += _truncation_loss(M, k, pops)
            if w < 1e-16 * max(p, 1e-300):
                break
    if not p > 0:
        raise TruncationError("herald probability vanished on the truncated space")
    if lost > TAIL_TOL * p:
        raise TruncationError(f"m^dag pushed relative weight {lost / p:.3e} past dim={dim}")
    label = f"added[{mode.value}]({rho.label})" if rho.label else f"added[{mode.value}]"
    return DensityMatrix(out / p, label), p


def unheralded_pass(rho: DensityMatrix, M: float) -> DensityMatrix:
    """State left behind when no photon is scattered (K_0 branch), renormalized."""
    M = _check_M(M)
    K0 = _addition_operator(M, 0, rho.dim)
    out = K0 @ rho.elements @ K0.conj().T
    label = f"unheralded({rho.label})" if rho.label else "unheralded"
    return DensityMatrix.from_array(out, label)


# -- step 3: readout ----------------------------------------------------------

def swap_efficiency(
    g_mc: float, kappa_c: float, tau_r: float, adiabatic_ratio_max: float = ADIABATIC_RATIO_MAX
) -> float:
    """eta = 1 - exp(-2 g_mc^2 tau_r / kappa_c)."""
    if g_mc < 0 or kappa_c <= 0 or tau_r < 0:
        raise DomainError("need g_mc >= 0, kappa_c > 0, tau_r >= 0")
    _adiabatic_guard(g_mc / kappa_c, "g_mc/kappa_c", adiabatic_ratio_max)
    return -math.expm1(-2.0 * g_mc**2 / kappa_c * tau_r)


def loss_kraus(eta: float, dim: int) -> list[np.ndarray]:
    """Pure-loss Kraus family: <n-k|E_k|n> = sqrt(C(n,k) eta^(n-k) (1-eta)^k)."""
    eta = _check_eta(eta)
    ops = []
    for k in range(dim):
        n = np.arange(k, dim)
        E = np.zeros((dim, dim))
        E[n - k, n] = np.sqrt(comb(n, k) * eta ** (n - k) * (1.0 - eta) ** k)
        ops.append(E)
    return ops


def _check_eta(eta: float) -> float:
    if not (np.isfinite(eta) and 0.0 <= eta <= 1.0):
        raise DomainError(f"eta must lie in [0, 1], got {eta!r}")
    return float(eta)


def loss_channel(rho: DensityMatrix, eta: float) -> DensityMatrix:
    """Beamsplitter with transmissivity ``eta`` and vacuum in the other port."""
    eta = _check_eta(eta)
    dim = rho.dim
    r = rho.elements
    out = np.zeros_like(r)
    for k in range(dim):
        n = np.arange(k, dim)
        d = np.sqrt(comb(n, k) * eta ** (n - k) * (1.0 - eta) ** k)
        if not d.any():
            continue
        # E_k rho E_k^dag: E_k is a k-shifted diagonal
        out[: dim - k, : dim - k] += np.outer(d, d) * r[k:, k:]
    label = f"loss({eta:.6g})({rho.label})" if rho.label else f"loss({eta:.6g})"
    return DensityMatrix(out, label)
