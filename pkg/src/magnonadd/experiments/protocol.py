"""Prepare -> add -> read, with witnesses reported after every step."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .. import BACKEND, __version__
from ..channels import check_schedule, drive_power_for_amplitude
from ..errors import ScheduleWarning
from ..metrics import default_radius, wigner_grid
from ..fock import DensityMatrix
from . import pipeline as pl
from .config import ExperimentConfig, physical_manifest
from .io import write_json

FEMTO = 1e-15
DEFAULT_TOL = 1e-8


@dataclass
class ProtocolResult:
    resolved: pl.Resolved
    dim: int
    drive_power: float | None  # W
    herald_probability: float | None
    herald_probability_analytic: float | None
    stages: dict = field(default_factory=dict)
    schedule_warnings: list[str] = field(default_factory=list)
    states: dict = field(default_factory=dict)
    passed: bool = True
    manifest_path: Path | None = None

    def summary(self) -> str:
        res = self.resolved
        lines = []
        if res.coherent:
            lines.append(f"prepared coherent state beta={res.beta:.6g}")
            if self.drive_power is not None:
                lines.append(f"drive power P_d = {self.drive_power / FEMTO:.6g} fW")
        else:
            lines.append(f"prepared thermal state nbar0={res.nbar0:.6g}")
        lines.append(f"M={res.M:.8g} eta={res.eta:.8g} herald={res.herald} ({res.herald_mode.value})")
        if self.herald_probability is not None:
            lines.append(
                f"herald probability {self.herald_probability:.10g}"
                f" (closed form {self.herald_probability_analytic:.10g})"
            )
        for stage, metrics in self.stages.items():
            parts = []
            for name, v in metrics.items():
                parts.append(f"{name}={v['numeric']:.8g}")
            lines.append(f"{stage}: " + " ".join(parts))
        for w in self.schedule_warnings:
            lines.append(f"schedule warning: {w}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _delta(rho: DensityMatrix, res: pl.Resolved, step: float) -> float:
    r = default_radius(res.beta or 0.0, res.nbar0 or 0.0)
    return wigner_grid(rho, (-r, r), (-r, r), step).delta


def run_protocol(config: ExperimentConfig, write: bool = True) -> ProtocolResult:
    res = pl.resolve(config)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ScheduleWarning)
        check_schedule(res.params)
    sched = [str(w.message) for w in caught if issubclass(w.category, ScheduleWarning)]

    power = drive_power_for_amplitude(res.params, res.beta) if res.coherent and res.beta > 0 else None
    radius = default_radius(res.beta or 0.0, res.nbar0 or 0.0)
    dim = pl.auto_dim(res, radius, config.dim)
    step = config.grid.step

    prepared = pl.prepare(res, dim)
    added, p = pl.add(res, prepared)
    readout = pl.read(res, added)
    states = {"prepared": prepared, "added": added, "readout": readout}

    tol = float(config.validation.get("tol", DEFAULT_TOL))
    applies = pl.analytic_applies(res)
    stages, passed = {}, True
    for stage, rho in states.items():
        m = pl.stage_metrics(res, stage, rho)
        m["delta"] = {"numeric": _delta(rho, res, step), "analytic": None}
        for v in m.values():
            a, n = v["analytic"], v["numeric"]
            if a is None:
                v["abs_error"] = None
                continue
            both_nan = math.isnan(a) and math.isnan(n)
            v["abs_error"] = 0.0 if both_nan else abs(n - a)
            if applies and not v["abs_error"] <= tol:
                passed = False
        stages[stage] = m

    p_analytic = pl.analytic_herald_probability(res) if res.herald else None
    if p is not None and applies and abs(p - p_analytic) > tol:
        passed = False
    result = ProtocolResult(
        resolved=res,
        dim=dim,
        drive_power=power,
        herald_probability=p,
        herald_probability_analytic=p_analytic,
        stages=stages,
        schedule_warnings=sched,
        states=states,
        passed=passed,
    )
    if write:
        out = Path(config.output_dir)
        manifest = {
            "version": __version__,
            "backend": BACKEND,
            "physical": physical_manifest(res.params),
            "resolved": res.describe(),
            "dim": dim,
            "grid_step": step,
            "drive_power": {"value": power, "unit": "W", "value_fW": None if power is None else power / FEMTO},
            "herald_probability": {"numeric": p, "analytic": p_analytic},
            "tau_total": {"value": res.params.tau_total, "unit": "s"},
            "schedule_warnings": sched,
            "analytic_applies": applies,
            "tolerance": tol,
            "stages": stages,
            "passed": passed,
        }
        result.manifest_path = out / "protocol.json"
        write_json(result.manifest_path, manifest)
    return result
