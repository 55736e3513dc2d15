"""Closed-form results for single-magnon-added coherent (MACS) and thermal (MATS) states.

Conventions: quadrature x_theta = (m e^{i theta} + m^dag e^{-i theta}) / 2, so
vacuum variance is 1/4; Wigner functions are normalized over
d(Re alpha) d(Im alpha) with vacuum peak 2/pi. Formulas are written for a
real, non-negative coherent amplitude. A complex ``beta`` is handled by
rotating phase space: alpha -> alpha e^{-i arg beta}, theta -> theta + arg beta.

Every Wigner function accepts scalar or array ``alpha``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError


class StateKind(str, enum.Enum):
    MACS = "MACS"
    MATS = "MATS"


@dataclass(frozen=True)
class StateFamily:
    """Parameters of a single-magnon-added state.

    ``M`` is the write-pulse attenuation, in (0, 1] (M = 1 is the no-pulse limit).
    ``beta`` is used for MACS, ``nbar0`` for MATS.
    """

    kind: StateKind
    M: float
    beta: complex = 0.0
    nbar0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", StateKind(self.kind))
        if not (np.isfinite(self.M) and 0.0 < self.M <= 1.0):
            raise DomainError(f"M must lie in (0, 1], got {self.M!r}")
        if self.kind is StateKind.MACS and self.nbar0 != 0.0:
            raise DomainError("MACS family takes beta, not nbar0")
        if self.kind is StateKind.MATS:
            if self.beta != 0:
                raise DomainError("MATS family takes nbar0, not beta")
            if not (np.isfinite(self.nbar0) and self.nbar0 >= 0):
                raise DomainError(f"nbar0 must be >= 0, got {self.nbar0!r}")

    @classmethod
    def macs(cls, M: float, beta: complex) -> "StateFamily":
        return cls(StateKind.MACS, M, beta=beta)

    @classmethod
    def mats(cls, M: float, nbar0: float) -> "StateFamily":
        return cls(StateKind.MATS, M, nbar0=nbar0)

    @property
    def amplitude(self) -> float:
        """|M beta|, the coherent amplitude left after the write pulse."""
        return self.M * abs(self.beta)


def _require(family: StateFamily, kind: StateKind) -> StateFamily:
    if family.kind is not kind:
        raise DomainError(f"expected a {kind.value} family, got {family.kind.value}")
    return family


def _check_eta(eta: float) -> float:
    if not (np.isfinite(eta) and 0.0 <= eta <= 1.0):
        raise DomainError(f"eta must lie in [0, 1], got {eta!r}")
    return float(eta)


def _rotated(alpha, family: StateFamily):
    alpha = np.asarray(alpha, dtype=np.complex128)
    phase = np.angle(family.beta) if family.beta != 0 else 0.0
    return alpha * np.exp(-1j * phase)


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


# -- MACS ---------------------------------------------------------------------

def macs_mandel_q(family: StateFamily) -> float:
    x = _require(family, StateKind.MACS).amplitude ** 2
    return -(1 + 2 * x + 2 * x * x) / (1 + x * (2 + x) ** 2)


def macs_mean_number(family: StateFamily) -> float:
    x = _require(family, StateKind.MACS).amplitude ** 2
    return (1 + 3 * x + x * x) / (1 + x)


def macs_variance(family: StateFamily, theta: float) -> float:
    """(Delta x_theta)^2 of the normalized m^dag |M beta>."""
    fam = _require(family, StateKind.MACS)
    x = fam.amplitude**2
    phi = np.angle(fam.beta) if fam.beta != 0 else 0.0
    return (1 - x * math.cos(2 * (theta + phi))) / (2 * (1 + x) ** 2) + 0.25


def macs_wigner(alpha, family: StateFamily):
    fam = _require(family, StateKind.MACS)
    a = _rotated(alpha, fam)
    g = fam.amplitude
    a2 = np.abs(a) ** 2
    s = 2 * a.real  # alpha + alpha^*
    w = (
        2
        / (math.pi * (1 + g * g))
        * np.exp(-2 * (a2 + g * g - g * s))
        * (4 * a2 - 2 * g * s + g * g - 1)
    )
    return _scalar(w)


def macs_herald_probability(family: StateFamily) -> float:
    """Exact exactly-one-photon probability Tr(K_1 |beta><beta| K_1^dag)."""
    fam = _require(family, StateKind.MACS)
    M2 = fam.M**2
    b2 = abs(fam.beta) ** 2
    return (1 - M2) * M2 * math.exp(-b2 * (1 - M2)) * (1 + M2 * b2)


# -- MATS ---------------------------------------------------------------------

def mats_reduced_nbar(nbar0: float, M: float) -> float:
    """Thermal occupation left after the write pulse (no-photon branch)."""
    if not nbar0 >= 0:
        raise DomainError(f"nbar0 must be >= 0, got {nbar0!r}")
    M2 = M * M
    return nbar0 * M2 / (1 + (1 - M2) * nbar0)


def mats_mean_number(family: StateFamily) -> float:
    fam = _require(family, StateKind.MATS)
    return 2 * mats_reduced_nbar(fam.nbar0, fam.M) + 1


def mats_number_distribution(family: StateFamily, dim: int) -> np.ndarray:
    """p_n proportional to n (p')^(n-1), p' = nbar/(1+nbar), for n < dim (not renormalized)."""
    fam = _require(family, StateKind.MATS)
    nb = mats_reduced_nbar(fam.nbar0, fam.M)
    q = nb / (1 + nb)
    n = np.arange(dim, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = (1 - q) ** 2 * n * np.where(n > 0, q ** np.maximum(n - 1, 0), 0.0)
    return p


def mats_mandel_q(family: StateFamily) -> float:
    fam = _require(family, StateKind.MATS)
    n0, M2 = fam.nbar0, fam.M**2
    return 2 * M2 * n0 * (n0 + 1) / (((1 + M2) * n0 + 1) * ((1 - M2) * n0 + 1)) - 1


def mats_wigner(alpha, family: StateFamily):
    fam = _require(family, StateKind.MATS)
    n0, M2 = fam.nbar0, fam.M**2
    a2 = np.abs(np.asarray(alpha, dtype=np.complex128)) ** 2
    # prefactor (1 + n0 - M^2 n0)^2: required for unit normalization and the eta = 1 readout limit
    lo = 1 + n0 - M2 * n0
    hi = 1 + n0 + M2 * n0
    w = (
        2 * lo**2 / (math.pi * hi**3)
        * np.exp(-2 * a2 * lo / hi)
        * ((4 * a2 - 1) * (n0 + 1) - M2 * n0)
    )
    return _scalar(w)


def mats_herald_probability(family: StateFamily) -> float:
    fam = _require(family, StateKind.MATS)
    M2 = fam.M**2
    p = fam.nbar0 / (1 + fam.nbar0)
    return (1 - M2) * M2 * (1 - p) / (1 - p * M2) ** 2


def sub_poissonian_threshold(N_added: int) -> float:
    """The MATS is sub-Poissonian iff the reduced occupation is below this value."""
    if int(N_added) != N_added or N_added < 1:
        raise DomainError(f"number of added magnons must be a positive integer, got {N_added!r}")
    return math.sqrt(N_added / (N_added + 1))


def mats_threshold_nbar0(M: float, N_added: int = 1) -> float:
    """Initial occupation at which the reduced occupation reaches the threshold.

    Inverts nbar = nbar0 M^2 / (1 + (1 - M^2) nbar0) at nbar = threshold.
    Returns ``inf`` if the threshold is never reached.
    """
    c = sub_poissonian_threshold(N_added)
    M2 = M * M
    den = M2 - c * (1 - M2)
    return c / den if den > 0 else math.inf


def mats_q_crossover(M: float, eta: float = 1.0, upper: float = 1e3) -> float:
    """Root in nbar0 of the (readout) MATS Mandel Q, by bracketing."""
    if not eta > 0:
        raise DomainError("Q vanishes identically at eta = 0; no crossover to locate")
    fam = lambda n0: StateFamily.mats(M, n0)  # noqa: E731
    f = lambda n0: readout_mats_q(fam(n0), eta)  # noqa: E731
    return brentq(f, 0.0, upper, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


# -- readout (cavity output after a swap with efficiency eta) -----------------

def readout_macs_q(family: StateFamily, eta: float) -> float:
    eta = _check_eta(eta)
    x = _require(family, StateKind.MACS).amplitude ** 2
    return -eta * (1 + 2 * x + 2 * x * x) / (1 + x * (2 + x) ** 2)


def readout_macs_variance(family: StateFamily, theta: float, eta: float) -> float:
    eta = _check_eta(eta)
    fam = _require(family, StateKind.MACS)
    x = fam.amplitude**2
    phi = np.angle(fam.beta) if fam.beta != 0 else 0.0
    return eta * (1 - x * math.cos(2 * (theta + phi))) / (2 * (1 + x) ** 2) + 0.25


def readout_macs_wigner(alpha, family: StateFamily, eta: float):
    fam = _require(family, StateKind.MACS)
    eta = _check_eta(eta)
    a = _rotated(alpha, fam)
    g = fam.amplitude
    se = math.sqrt(eta)
    a2 = np.abs(a) ** 2
    re = a.real
    bracket = 4 * eta * a2 - (2 * eta - 1) * (4 * se * g * re - g * g * (2 * eta - 1) + 1)
    w = bracket * 2 / (math.pi * (1 + g * g)) * np.exp(-2 * (a2 - 2 * se * g * re + eta * g * g))
    return _scalar(w)


def readout_mats_q(family: StateFamily, eta: float) -> float:
    eta = _check_eta(eta)
    fam = _require(family, StateKind.MATS)
    n0, M2 = fam.nbar0, fam.M**2
    return 2 * eta * M2 * n0 * (n0 + 1) / (((1 + M2) * n0 + 1) * ((1 - M2) * n0 + 1)) - eta


def readout_mats_wigner(alpha, family: StateFamily, eta: float):
    fam = _require(family, StateKind.MATS)
    eta = _check_eta(eta)
    n0, M2 = fam.nbar0, fam.M**2
    a2 = np.abs(np.asarray(alpha, dtype=np.complex128)) ** 2
    num = 1 + n0 - M2 * n0
    den = 1 + n0 + (2 * eta - 1) * M2 * n0
    w = (
        2 * num**2 / (math.pi * den**3)
        * np.exp(-2 * a2 * num / den)
        * ((n0 + 1) * (4 * eta * a2 - 2 * eta + 1) - (2 * eta - 1) ** 2 * M2 * n0)
    )
    return _scalar(w)


def vacuum_wigner(alpha):
    a2 = np.abs(np.asarray(alpha, dtype=np.complex128)) ** 2
    return _scalar(2 / math.pi * np.exp(-2 * a2))
