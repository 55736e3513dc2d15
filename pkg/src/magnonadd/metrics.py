"""Nonclassicality witnesses computed directly from a density matrix."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from . import _backend
from .errors import InvalidStateError, NormalizationError, TruncationError, UndefinedQError
from .fock import (
    DensityMatrix,
    annihilation_op,
    displaced_parity_op,
    expectation,
    quadrature_op,
    quadrature_sq_op,
    safe_radius_dim,
)

Q_FLOOR = 1e-12
GRID_NORM_TOL = 1e-4
IMAG_TOL = 1e-10
DEFAULT_STEP = 0.05


def mandel_q_numeric(rho: DensityMatrix) -> float:
    """Q = (<m^dag^2 m^2> - <m^dag m>^2) / <m^dag m>."""
    a = annihilation_op(rho.dim).elements
    ad = a.conj().T
    n1 = expectation(rho, ad @ a).real
    if n1 <= Q_FLOOR:
        raise UndefinedQError(f"mean occupation {n1:.3e} below {Q_FLOOR:.0e}; Q is undefined")
    n2 = expectation(rho, ad @ ad @ a @ a).real
    return (n2 - n1 * n1) / n1


def quadrature_variance_numeric(rho: DensityMatrix, theta: float) -> float:
    """<x_theta^2> - <x_theta>^2 with x_theta = (m e^{i theta} + h.c.) / 2."""
    mean = expectation(rho, quadrature_op(theta, rho.dim)).real
    second = expectation(rho, quadrature_sq_op(theta, rho.dim)).real
    return second - mean * mean


def _check_radius(radius: float, dim: int) -> None:
    if safe_radius_dim(radius) > dim:
        raise TruncationError(
            f"phase-space radius {radius:.4g} needs dim >= {safe_radius_dim(radius)}, got {dim}"
        )


def wigner_numeric(rho: DensityMatrix, alpha: complex) -> float:
    """W(alpha) = (2/pi) Tr[rho D(alpha) Pi D(alpha)^dag]."""
    _check_radius(abs(alpha), rho.dim)
    val = 2.0 / math.pi * expectation(rho, displaced_parity_op(alpha, rho.dim))
    if abs(val.imag) > IMAG_TOL:
        raise InvalidStateError(f"Wigner value has imaginary residue {val.imag:.3e}")
    return val.real


def simpson_2d(values: np.ndarray, x: np.ndarray, p: np.ndarray) -> float:
    """Composite Simpson over a rectangular grid; ``values`` has shape (len(p), len(x))."""
    return float(simpson(simpson(values, x=x, axis=1), x=p))


@dataclass(frozen=True)
class WignerMap:
    """Wigner function sampled on a uniform rectangular grid, alpha = x + i p."""

    x: np.ndarray
    p: np.ndarray
    values: np.ndarray
    step: float
    integral: float = field(init=False)
    delta: float = field(init=False)

    def __post_init__(self):
        for name in ("x", "p", "values"):
            arr = np.array(getattr(self, name), dtype=float, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.values.shape != (self.p.size, self.x.size):
            raise ValueError(f"values shape {self.values.shape} != ({self.p.size}, {self.x.size})")
        object.__setattr__(self, "integral", simpson_2d(self.values, self.x, self.p))
        object.__setattr__(self, "delta", negativity_volume(self))

    @property
    def x_range(self) -> tuple[float, float]:
        return float(self.x[0]), float(self.x[-1])

    @property
    def p_range(self) -> tuple[float, float]:
        return float(self.p[0]), float(self.p[-1])


def negativity_volume(wmap: WignerMap) -> float:
    """delta = integral of (|W| - W) dx dp, i.e. twice the negative volume."""
    if abs(wmap.integral - 1.0) > GRID_NORM_TOL:
        raise NormalizationError(
            f"Wigner map integrates to {wmap.integral:.8f}; enlarge the grid or refine the step"
        )
    w = wmap.values
    return max(simpson_2d(np.abs(w) - w, wmap.x, wmap.p), 0.0)


def grid_axis(lo: float, hi: float, step: float) -> np.ndarray:
    if not step > 0 or not hi > lo:
        raise ValueError(f"need lo < hi and step > 0, got ({lo}, {hi}, {step})")
    n = int(round((hi - lo) / step))
    return lo + step * np.arange(n + 1)


def wigner_points(rho: DensityMatrix, alphas) -> np.ndarray:
    """Vectorized W at arbitrary points via the Fock-basis recurrence kernel."""
    alphas = np.asarray(alphas, dtype=np.complex128)
    if alphas.size:
        _check_radius(float(np.max(np.abs(alphas))), rho.dim)
    flat = _backend.wigner_points(rho.elements, alphas.ravel())
    return flat.reshape(alphas.shape)


def wigner_grid(
    rho: DensityMatrix,
    x_range: tuple[float, float],
    p_range: tuple[float, float],
    step: float = DEFAULT_STEP,
) -> WignerMap:
    """Sample W on a rectangular grid and compute its negativity volume.

    The truncation guard uses the range half-width (max |x|, |p| over the
    ranges), not the corner modulus.
    """
    x = grid_axis(*x_range, step)
    p = grid_axis(*p_range, step)
    radius = max(abs(x_range[0]), abs(x_range[1]), abs(p_range[0]), abs(p_range[1]))
    _check_radius(radius, rho.dim)
    alphas = (x[None, :] + 1j * p[:, None]).ravel()
    values = _backend.wigner_points(rho.elements, alphas).reshape(p.size, x.size)
    return WignerMap(x, p, values, step)


def default_radius(beta: float = 0.0, nbar0: float = 0.0) -> float:
    """Grid half-width: |beta| + 4 for coherent-based states, sqrt(nbar0) + 4 for thermal."""
    return max(abs(beta), math.sqrt(nbar0)) + 4.0


def negativity_converged(
    rho: DensityMatrix, radius: float, step: float = DEFAULT_STEP, tol: float = 1e-3
) -> tuple[float, float, bool]:
    """delta at ``step`` and ``step/2``; converged if they differ by less than ``tol``."""
    rng = (-radius, radius)
    coarse = wigner_grid(rho, rng, rng, step).delta
    fine = wigner_grid(rho, rng, rng, step / 2).delta
    return coarse, fine, abs(coarse - fine) < tol
