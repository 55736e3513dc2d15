"""Truncated Fock-space representation of a single bosonic mode.

States are dense ``dim x dim`` density matrices; operators are dense matrices
in the same basis ``|0>, ..., |dim-1>``. Everything here is immutable after
construction.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .errors import DomainError, InvalidStateError, TruncationError

HERM_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
TAIL_TOL = 1e-10
MIN_DIM = 30


class OperatorKind(str, enum.Enum):
    ANNIHILATION = "annihilation"
    CREATION = "creation"
    DISPLACEMENT = "displacement"
    PARITY = "parity"
    NUMBER = "number"
    QUADRATURE = "quadrature"
    KRAUS = "kraus"
    GENERIC = "generic"


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator on the truncated Fock space."""

    elements: np.ndarray
    kind: OperatorKind = OperatorKind.GENERIC

    def __post_init__(self):
        arr = _frozen(self.elements)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DomainError(f"operator must be square, got shape {arr.shape}")
        object.__setattr__(self, "elements", arr)
        object.__setattr__(self, "kind", OperatorKind(self.kind))

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    def dag(self) -> "OperatorMatrix":
        kind = {
            OperatorKind.ANNIHILATION: OperatorKind.CREATION,
            OperatorKind.CREATION: OperatorKind.ANNIHILATION,
        }.get(self.kind, self.kind)
        if kind in (OperatorKind.DISPLACEMENT, OperatorKind.KRAUS):
            kind = OperatorKind.GENERIC
        return OperatorMatrix(self.elements.conj().T, kind)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.elements @ np.asarray(_as_array(other)))


def _as_array(obj) -> np.ndarray:
    if isinstance(obj, (OperatorMatrix, DensityMatrix)):
        return obj.elements
    return np.asarray(obj)


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace, Hermitian, positive semidefinite state of one mode.

    The constructor checks every invariant and raises instead of repairing:
    a failed positivity check usually means a channel bug upstream. The tail
    check (population of the top Fock level <= ``TAIL_TOL``) guards against
    silently truncated states.
    """

    elements: np.ndarray
    label: str = ""
    tail_tol: float = field(default=TAIL_TOL, repr=False)

    def __post_init__(self):
        arr = _frozen(self.elements)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got {arr.shape}")
        if arr.shape[0] < 2:
            raise InvalidStateError("dimension must be at least 2")
        herm = np.max(np.abs(arr - arr.conj().T))
        if herm > HERM_TOL:
            raise InvalidStateError(f"not Hermitian: max|rho - rho^dag| = {herm:.3e}")
        tr = np.trace(arr).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"trace is {tr!r}, expected 1")
        lam_min = np.linalg.eigvalsh(arr)[0]
        if lam_min < -PSD_TOL:
            raise InvalidStateError(f"not positive semidefinite: min eigenvalue {lam_min:.3e}")
        tail = arr[-1, -1].real
        if tail > self.tail_tol:
            raise TruncationError(
                f"top-level population {tail:.3e} exceeds {self.tail_tol:.0e} at dim={arr.shape[0]}"
            )
        object.__setattr__(self, "elements", arr)

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    @classmethod
    def from_array(cls, arr, label: str = "", normalize: bool = True) -> "DensityMatrix":
        arr = np.asarray(arr, dtype=np.complex128)
        if normalize:
            tr = np.trace(arr).real
            if not tr > 0:
                raise InvalidStateError(f"cannot normalize a matrix with trace {tr!r}")
            arr = arr / tr
        return cls(arr, label)

    @classmethod
    def from_ket(cls, psi, label: str = "") -> "DensityMatrix":
        psi = np.asarray(psi, dtype=np.complex128).ravel()
        norm = np.vdot(psi, psi).real
        if not norm > 0:
            raise InvalidStateError("zero state vector")
        psi = psi / math.sqrt(norm)
        return cls(np.outer(psi, psi.conj()), label)

    def embed(self, dim: int) -> "DensityMatrix":
        """Zero-pad into a larger truncation."""
        if dim < self.dim:
            raise DomainError(f"cannot embed dim {self.dim} into smaller dim {dim}")
        out = np.zeros((dim, dim), dtype=np.complex128)
        out[: self.dim, : self.dim] = self.elements
        return DensityMatrix(out, self.label)


# -- dimension policy ---------------------------------------------------------

def default_dim_coherent(beta: complex) -> int:
    return max(MIN_DIM, math.ceil((abs(beta) + 5.0) ** 2))


def default_dim_thermal(nbar: float) -> int:
    return max(MIN_DIM, math.ceil(25.0 * (1.0 + nbar)))


def safe_radius_dim(radius: float) -> int:
    """Smallest dim with ``radius**2 + 6*radius + 9 <= dim``."""
    return math.ceil((abs(radius) + 3.0) ** 2)


def _check_dim(dim: int) -> int:
    if int(dim) != dim or dim < 2:
        raise DomainError(f"dim must be an integer >= 2, got {dim!r}")
    return int(dim)


# -- operators ----------------------------------------------------------------

def annihilation_op(dim: int) -> OperatorMatrix:
    dim = _check_dim(dim)
    return OperatorMatrix(np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1), OperatorKind.ANNIHILATION)


def creation_op(dim: int) -> OperatorMatrix:
    return annihilation_op(dim).dag()


def number_op(dim: int) -> OperatorMatrix:
    dim = _check_dim(dim)
    return OperatorMatrix(np.diag(np.arange(dim, dtype=float)), OperatorKind.NUMBER)


def parity_op(dim: int) -> OperatorMatrix:
    dim = _check_dim(dim)
    return OperatorMatrix(np.diag((-1.0) ** np.arange(dim)), OperatorKind.PARITY)


def quadrature_op(theta: float, dim: int) -> OperatorMatrix:
    """x_theta = (m e^{i theta} + m^dag e^{-i theta}) / 2."""
    a = annihilation_op(dim).elements
    x = 0.5 * (a * np.exp(1j * theta) + a.conj().T * np.exp(-1j * theta))
    return OperatorMatrix(x, OperatorKind.QUADRATURE)


def quadrature_sq_op(theta: float, dim: int) -> OperatorMatrix:
    """x_theta^2 assembled in normal order, so the top Fock level is exact."""
    dim = _check_dim(dim)
    a = annihilation_op(dim).elements
    a2 = a @ a
    n = np.diag(np.arange(dim, dtype=float))
    x2 = 0.25 * (a2 * np.exp(2j * theta) + a2.conj().T * np.exp(-2j * theta) + 2.0 * n + np.eye(dim))
    return OperatorMatrix(x2, OperatorKind.GENERIC)


def _displacement_elements(alpha: complex, dim: int) -> np.ndarray:
    alpha = complex(alpha)
    if alpha == 0:
        return np.eye(dim, dtype=np.complex128)
    row = np.arange(dim)[:, None]
    col = np.arange(dim)[None, :]
    hi = np.maximum(row, col)
    lo = np.minimum(row, col)
    k = hi - lo
    x = abs(alpha) ** 2
    log_mag = 0.5 * (gammaln(lo + 1.0) - gammaln(hi + 1.0)) + k * math.log(abs(alpha)) - 0.5 * x
    lag = eval_genlaguerre(lo, k, x)
    phase_below = np.exp(1j * k * np.angle(alpha))
    phase_above = np.exp(1j * k * np.angle(-np.conj(alpha)))
    phase = np.where(row >= col, phase_below, phase_above)
    return np.exp(log_mag) * lag * phase


def displacement_op(alpha: complex, dim: int) -> OperatorMatrix:
    """D(alpha) from the associated-Laguerre closed form of <m|D|n>.

    Each element is exact (no truncation of intermediate sums), so the matrix
    is the top-left block of the infinite-dimensional D(alpha).
    """
    dim = _check_dim(dim)
    return OperatorMatrix(_displacement_elements(alpha, dim), OperatorKind.DISPLACEMENT)


@functools.lru_cache(maxsize=1024)
def _displaced_parity_cached(alpha: complex, dim: int) -> OperatorMatrix:
    # D(a) P D(a)^dag = D(2a) P exactly; elements of D(2a) are closed form
    d2 = _displacement_elements(2.0 * alpha, dim)
    return OperatorMatrix(d2 * ((-1.0) ** np.arange(dim))[None, :], OperatorKind.GENERIC)


def displaced_parity_op(alpha: complex, dim: int) -> OperatorMatrix:
    """D(alpha) Pi D(alpha)^dag, with Pi the parity operator."""
    return _displaced_parity_cached(complex(alpha), _check_dim(dim))


# -- states -------------------------------------------------------------------

def fock_state(n: int, dim: int) -> DensityMatrix:
    dim = _check_dim(dim)
    if not 0 <= n < dim - 1:
        raise TruncationError(f"Fock level {n} needs dim > {n + 1}, got {dim}")
    psi = np.zeros(dim)
    psi[n] = 1.0
    return DensityMatrix.from_ket(psi, label=f"fock({n})")


def vacuum(dim: int = MIN_DIM) -> DensityMatrix:
    return fock_state(0, dim)


def coherent_ket(beta: complex, dim: int) -> np.ndarray:
    """Unnormalized-by-truncation amplitudes e^{-|b|^2/2} b^n / sqrt(n!)."""
    n = np.arange(dim)
    beta = complex(beta)
    if beta == 0:
        psi = np.zeros(dim, dtype=np.complex128)
        psi[0] = 1.0
        return psi
    log_amp = -0.5 * abs(beta) ** 2 + n * math.log(abs(beta)) - 0.5 * gammaln(n + 1.0)
    return np.exp(log_amp) * np.exp(1j * n * np.angle(beta))


def coherent_state(beta: complex, dim: int | None = None) -> DensityMatrix:
    """Coherent state |beta><beta|, renormalized on the truncated space."""
    if dim is None:
        dim = default_dim_coherent(beta)
    dim = _check_dim(dim)
    if abs(beta) ** 2 + 6 * abs(beta) + 9 > dim:
        raise TruncationError(f"dim={dim} too small for coherent amplitude |beta|={abs(beta):.4g}")
    return DensityMatrix.from_ket(coherent_ket(beta, dim), label=f"coherent({complex(beta):.6g})")


def thermal_state(nbar: float, dim: int | None = None) -> DensityMatrix:
    """Thermal state with p_n = (1 - p) p^n, p = nbar / (1 + nbar)."""
    if not (np.isfinite(nbar) and nbar >= 0):
        raise DomainError(f"thermal occupation must be >= 0, got {nbar!r}")
    if dim is None:
        dim = default_dim_thermal(nbar)
    dim = _check_dim(dim)
    p = nbar / (1.0 + nbar)
    pops = (1.0 - p) * p ** np.arange(dim, dtype=float)
    return DensityMatrix.from_array(np.diag(pops), label=f"thermal({nbar:.6g})")


# -- expectations -------------------------------------------------------------

def expectation(rho: DensityMatrix, op) -> complex:
    """Tr(rho op)."""
    r = _as_array(rho)
    o = _as_array(op)
    if r.shape != o.shape:
        raise DomainError(f"dimension mismatch: state {r.shape} vs operator {o.shape}")
    # Tr(AB) = sum_ij A_ij B_ji
    return complex(np.sum(r * o.T))


def number_distribution(rho: DensityMatrix) -> np.ndarray:
    p = np.real(np.diag(_as_array(rho))).copy()
    p[(p < 0) & (p >= -1e-12)] = 0.0
    return p / p.sum()


def mean_number(rho: DensityMatrix) -> float:
    p = number_distribution(rho)
    return float(np.dot(np.arange(p.size), p))


def _psd_sqrt(arr: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(arr)
    # eigenvalue noise of order eps would otherwise leak in as sqrt(eps)
    w = np.where(w > 1e-14 * max(w[-1], 0.0), w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity ||sqrt(sigma) sqrt(rho)||_1^2.

    Eigenvalues below 1e-14 of the largest are treated as zero, which bounds
    the error near 1e-11 for typical mixed states and keeps pure-state
    fidelities exact to rounding.
    """
    r = _as_array(rho)
    s = _as_array(sigma)
    if r.shape != s.shape:
        raise DomainError(f"dimension mismatch: {r.shape} vs {s.shape}")
    sv = np.linalg.svd(_psd_sqrt(s) @ _psd_sqrt(r), compute_uv=False)
    return float(np.sum(sv) ** 2)


def ket_fidelity(rho: DensityMatrix, psi) -> float:
    """<psi|rho|psi> for a (re)normalized ket."""
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    psi = psi / math.sqrt(np.vdot(psi, psi).real)
    return float(np.real(np.vdot(psi, _as_array(rho) @ psi)))
