"""Closed forms against the Fock-space pipeline over a fixed parameter grid."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import analytic as an
from ..channels import (
    PhysicalParams,
    TWO_PI,
    _check_M,
    _check_eta,
    drive_power_for_amplitude,
    heralded_add,
    integrate_mean_fields,
    loss_channel,
    steady_state_averages,
    swap_efficiency,
    write_pulse_params,
)
from ..errors import AdiabaticityWarning, DomainError
from ..fock import coherent_state, mean_number, thermal_state
from ..metrics import mandel_q_numeric, quadrature_variance_numeric, wigner_numeric
from .config import ExperimentConfig
from .io import write_csv, write_json

DEFAULT_GRID = {
    "M": (0.95, 0.99),
    "beta": (0.0, 0.5, 1.0, 2.0, 4.0),
    "nbar0": (0.0, 0.4, 0.8, 1.5, 2.0),
    "eta": (0.0, 0.3, 0.5, 0.7, 0.9, 1.0),
    "theta": (0.0, math.pi / 4, math.pi / 2),
    "alpha_points": 11,
    "alpha_radius": 3.0,
    "dim": 81,
    "tol": 1e-8,
    "reduction_tol": 1e-12,
}
FEMTO = 1e-15


@dataclass(frozen=True)
class Row:
    quantity: str
    parameters: str
    analytic: float
    numeric: float
    tol: float

    @property
    def abs_error(self) -> float:
        if math.isnan(self.analytic) and math.isnan(self.numeric):
            return 0.0
        return abs(self.numeric - self.analytic)

    @property
    def passed(self) -> bool:
        return self.abs_error <= self.tol


@dataclass
class ValidationReport:
    rows: list[Row] = field(default_factory=list)

    def add(self, quantity: str, parameters: str, analytic: float, numeric: float, tol: float):
        self.rows.append(Row(quantity, parameters, float(analytic), float(numeric), float(tol)))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def failures(self) -> list[Row]:
        return [r for r in self.rows if not r.passed]

    def by_quantity(self) -> dict[str, dict]:
        out: dict[str, dict] = {}
        for r in self.rows:
            d = out.setdefault(r.quantity, {"rows": 0, "failed": 0, "max_abs_error": 0.0, "tol": r.tol})
            d["rows"] += 1
            d["failed"] += not r.passed
            d["max_abs_error"] = max(d["max_abs_error"], r.abs_error)
        return out

    def write(self, out_dir: Path) -> tuple[Path, Path]:
        out_dir = Path(out_dir)
        csv_path = out_dir / "validation.csv"
        header = ("quantity", "parameters", "analytic_value", "numeric_value", "abs_error", "tol", "pass")
        write_csv(
            csv_path,
            header,
            ((r.quantity, r.parameters, r.analytic, r.numeric, r.abs_error, r.tol, r.passed) for r in self.rows),
        )
        summary_path = out_dir / "validation_summary.json"
        write_json(
            summary_path,
            {"rows": len(self.rows), "failed": len(self.failures), "passed": self.passed, "quantities": self.by_quantity()},
        )
        return csv_path, summary_path


def _grid(overrides: dict) -> dict:
    unknown = set(overrides) - set(DEFAULT_GRID)
    if unknown:
        raise DomainError(f"unknown validation key(s): {sorted(unknown)}")
    g = {**DEFAULT_GRID, **overrides}
    for M in g["M"]:
        _check_M(M)
    for eta in g["eta"]:
        _check_eta(eta)
    for b in g["beta"]:
        if not (math.isfinite(b) and b >= 0):
            raise DomainError(f"validation beta must be >= 0, got {b!r}")
    for n0 in g["nbar0"]:
        if not (math.isfinite(n0) and n0 >= 0):
            raise DomainError(f"validation nbar0 must be >= 0, got {n0!r}")
    return g


def _alphas(g) -> np.ndarray:
    axis = np.linspace(-g["alpha_radius"], g["alpha_radius"], int(g["alpha_points"]))
    return (axis[None, :] + 1j * axis[:, None]).ravel()


def _p(**kw) -> str:
    return " ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in kw.items())


def _wigner_rows(report, name, rho, analytic_fn, alphas, tol, **params):
    ana = analytic_fn(alphas)
    for a, w in zip(alphas, ana):
        num = wigner_numeric(rho, a)
        report.add(name, _p(**params, x=a.real, p=a.imag), w, num, tol)


def _macs_rows(report, g, alphas):
    tol, dim = g["tol"], g["dim"]
    for M in g["M"]:
        for beta in g["beta"]:
            fam = an.StateFamily.macs(M, beta)
            added, prob = heralded_add(coherent_state(beta, dim), M)
            report.add("macs_herald_probability", _p(M=M, beta=beta), an.macs_herald_probability(fam), prob, tol)
            report.add("macs_mean_number", _p(M=M, beta=beta), an.macs_mean_number(fam), mean_number(added), tol)
            report.add("macs_mandel_q", _p(M=M, beta=beta), an.macs_mandel_q(fam), mandel_q_numeric(added), tol)
            for th in g["theta"]:
                report.add(
                    "macs_variance", _p(M=M, beta=beta, theta=th),
                    an.macs_variance(fam, th), quadrature_variance_numeric(added, th), tol,
                )
            _wigner_rows(report, "macs_wigner", added, lambda a: an.macs_wigner(a, fam), alphas, tol, M=M, beta=beta)
            for eta in g["eta"]:
                out = loss_channel(added, eta)
                if eta > 0:
                    report.add(
                        "readout_macs_q", _p(M=M, beta=beta, eta=eta),
                        an.readout_macs_q(fam, eta), mandel_q_numeric(out), tol,
                    )
                for th in g["theta"]:
                    report.add(
                        "readout_macs_variance", _p(M=M, beta=beta, eta=eta, theta=th),
                        an.readout_macs_variance(fam, th, eta), quadrature_variance_numeric(out, th), tol,
                    )
                _wigner_rows(
                    report, "readout_macs_wigner", out, lambda a: an.readout_macs_wigner(a, fam, eta),
                    alphas, tol, M=M, beta=beta, eta=eta,
                )


def _mats_rows(report, g, alphas):
    tol, dim = g["tol"], g["dim"]
    for M in g["M"]:
        for n0 in g["nbar0"]:
            fam = an.StateFamily.mats(M, n0)
            added, prob = heralded_add(thermal_state(n0, dim), M)
            report.add("mats_herald_probability", _p(M=M, nbar0=n0), an.mats_herald_probability(fam), prob, tol)
            nbar = an.mats_reduced_nbar(n0, M)
            report.add("mats_mean_number", _p(M=M, nbar0=n0), 2 * nbar + 1, mean_number(added), tol)
            report.add("mats_mandel_q", _p(M=M, nbar0=n0), an.mats_mandel_q(fam), mandel_q_numeric(added), tol)
            _wigner_rows(report, "mats_wigner", added, lambda a: an.mats_wigner(a, fam), alphas, tol, M=M, nbar0=n0)
            for eta in g["eta"]:
                out = loss_channel(added, eta)
                if eta > 0:
                    report.add(
                        "readout_mats_q", _p(M=M, nbar0=n0, eta=eta),
                        an.readout_mats_q(fam, eta), mandel_q_numeric(out), tol,
                    )
                _wigner_rows(
                    report, "readout_mats_wigner", out, lambda a: an.readout_mats_wigner(a, fam, eta),
                    alphas, tol, M=M, nbar0=n0, eta=eta,
                )


def _reduction_rows(report, g, alphas):
    rtol = g["reduction_tol"]
    vac = an.vacuum_wigner(alphas)
    for M in g["M"]:
        for beta in g["beta"]:
            fam = an.StateFamily.macs(M, beta)
            prm = _p(M=M, beta=beta)
            report.add("reduction_macs_wigner_eta1", prm, 0.0,
                       np.max(np.abs(an.readout_macs_wigner(alphas, fam, 1.0) - an.macs_wigner(alphas, fam))), rtol)
            report.add("reduction_macs_wigner_eta0", prm, 0.0,
                       np.max(np.abs(an.readout_macs_wigner(alphas, fam, 0.0) - vac)), rtol)
            report.add("reduction_macs_q_eta1", prm, an.macs_mandel_q(fam), an.readout_macs_q(fam, 1.0), rtol)
            for th in g["theta"]:
                p = _p(M=M, beta=beta, theta=th)
                report.add("reduction_macs_variance_eta1", p, an.macs_variance(fam, th),
                           an.readout_macs_variance(fam, th, 1.0), rtol)
                report.add("reduction_macs_variance_eta0", p, 0.25, an.readout_macs_variance(fam, th, 0.0), rtol)
        for n0 in g["nbar0"]:
            fam = an.StateFamily.mats(M, n0)
            prm = _p(M=M, nbar0=n0)
            report.add("reduction_mats_wigner_eta1", prm, 0.0,
                       np.max(np.abs(an.readout_mats_wigner(alphas, fam, 1.0) - an.mats_wigner(alphas, fam))), rtol)
            report.add("reduction_mats_wigner_eta0", prm, 0.0,
                       np.max(np.abs(an.readout_mats_wigner(alphas, fam, 0.0) - vac)), rtol)
            report.add("reduction_mats_q_eta1", prm, an.mats_mandel_q(fam), an.readout_mats_q(fam, 1.0), rtol)


def _crossover_rows(report, g):
    for M in g["M"]:
        root = an.mats_q_crossover(M)
        report.add("mats_q_root_vs_threshold", _p(M=M), an.mats_threshold_nbar0(M), root, 1e-6)
        for eta in (0.3, 0.6, 0.9):
            report.add("readout_mats_q_root_eta_independent", _p(M=M, eta=eta), root, an.mats_q_crossover(M, eta), 1e-10)


def _constant_rows(report):
    """Parameter arithmetic quoted alongside the figures."""
    hz = TWO_PI
    for G1, target in ((1e6, 0.01005), (2.23e6, 0.050)):
        wp = write_pulse_params(G1 * hz, 10e6 * hz, 16e-9)
        report.add("write_gain_time", _p(G1_MHz=G1 / 1e6), target, wp.gain_time, 0.01 * target)
    for g, target in ((2.2e6, 0.10), (10.2e6, 0.90)):
        report.add("swap_efficiency", _p(g_mc_MHz=g / 1e6), target, swap_efficiency(g * hz, 40e6 * hz, 70e-9), 0.005)
    base = PhysicalParams()
    for beta, lo, hi in ((0.5, 0.018, 0.021), (4.0, 1.15, 1.25)):
        power = drive_power_for_amplitude(base, beta) / FEMTO
        report.add("drive_power_fW", _p(beta=beta), 0.5 * (lo + hi), power, 0.5 * (hi - lo))
        driven = base.replace(P_d=power * FEMTO)
        m_ss, _ = steady_state_averages(driven)
        m_ode, _ = integrate_mean_fields(driven)
        report.add("steady_state_ode_relative", _p(beta=beta), 0.0, abs(m_ode - m_ss) / abs(m_ss), 1e-10)


def validate(config: ExperimentConfig | None = None) -> ValidationReport:
    overrides = dict(config.validation) if config is not None else {}
    g = _grid(overrides)
    alphas = _alphas(g)
    report = ValidationReport()
    _macs_rows(report, g, alphas)
    _mats_rows(report, g, alphas)
    _reduction_rows(report, g, alphas)
    _crossover_rows(report, g)
    with warnings.catch_warnings():
        # the quoted endpoints sit past the soft adiabatic ratio on purpose
        warnings.simplefilter("ignore", AdiabaticityWarning)
        _constant_rows(report)
    return report
