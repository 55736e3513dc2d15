"""Plot-ready data for each figure: numeric and closed-form columns side by side.

Every figure has an *axis* parameter (the abscissa, or the list of surfaces
and slices) and a *curve* parameter (one CSV per value). A config sweep over
the axis parameter replaces the axis values; a sweep over anything else
replaces the curve values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import BACKEND, __version__
from ..analytic import mats_number_distribution, mats_q_crossover, mats_threshold_nbar0
from ..fock import number_distribution
from ..metrics import (
    WignerMap,
    default_radius,
    grid_axis,
    quadrature_variance_numeric,
    wigner_grid,
    wigner_points,
)
from . import pipeline as pl
from .config import ConfigError, ExperimentConfig, FigureId, physical_manifest
from .io import write_csv, write_json
from .sweep import run_sweep

DEFAULT_TOL = 1e-8
ETAS = (0.1, 0.3, 0.5, 0.7, 0.9)


def _arange(lo, hi, step):
    n = int(round((hi - lo) / step))
    return tuple(float(lo + i * step) for i in range(n + 1))


@dataclass(frozen=True)
class FigureSpec:
    kind: str  # "curve", "surface", "slice" or "distribution"
    axis: str
    axis_values: tuple
    curve: str | None = None
    curve_values: tuple = (None,)
    stage: str = "added"
    quantity: str = "Q"  # for curves: "Q" or "V" (4 (Delta x_theta)^2)
    thetas: tuple = (0.0,)
    fixed: dict = field(default_factory=dict)
    inset: tuple | None = None  # axis values for the delta(.) inset


FIGURES: dict[FigureId, FigureSpec] = {
    FigureId.FIG3A: FigureSpec("curve", "beta", _arange(0, 4, 0.05)),
    FigureId.FIG3B: FigureSpec("curve", "beta", _arange(0, 4, 0.05), quantity="V", thetas=(0.0, math.pi / 2)),
    FigureId.FIG4: FigureSpec("surface", "beta", (0.0, 0.5, 1.5, 4.0)),
    FigureId.FIG5: FigureSpec(
        "slice", "beta", (0.0, 0.5, 1.0, 1.5, 2.0), inset=_arange(0, 3.5, 0.5)
    ),
    FigureId.FIG6A: FigureSpec("distribution", "n", tuple(range(16)), fixed={"nbar0": 0.8}),
    FigureId.FIG6B: FigureSpec(
        "curve",
        "nbar0",
        _arange(0, 2, 0.05),
        curve="M",
        curve_values=tuple(math.exp(-g) for g in (0.01, 0.03, 0.05)),
    ),
    FigureId.FIG7: FigureSpec(
        "slice", "nbar0", (0.0, 0.4, 0.8, 1.5, 2.0), inset=_arange(0, 1.75, 0.25)
    ),
    FigureId.FIG8A: FigureSpec("curve", "beta", _arange(0, 4, 0.05), "eta", ETAS, stage="readout"),
    FigureId.FIG8B: FigureSpec(
        "curve", "beta", _arange(0, 4, 0.05), "eta", ETAS, stage="readout", quantity="V"
    ),
    FigureId.FIG8C: FigureSpec(
        "slice", "eta", ETAS, stage="readout", fixed={"beta": 1.0}, inset=_arange(0, 1, 0.1)
    ),
    FigureId.FIG9A: FigureSpec("curve", "nbar0", _arange(0, 2, 0.05), "eta", ETAS, stage="readout"),
    FigureId.FIG9B: FigureSpec(
        "slice", "eta", ETAS, stage="readout", fixed={"nbar0": 0.8}, inset=_arange(0, 1, 0.1)
    ),
}


@dataclass
class FigureResult:
    figure_id: str
    files: list[dict]
    manifest_path: Path
    passed: bool


def _tag(name: str, value) -> str:
    return f"{name}_{value:.6g}"


def _max_diff(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    both_nan = np.isnan(a) & np.isnan(b)
    d = np.abs(a - b)
    d[both_nan] = 0.0
    return float(np.max(d)) if d.size else 0.0


class _Runner:
    def __init__(self, config: ExperimentConfig, spec: FigureSpec, fig: str):
        self.config = config
        self.spec = spec
        self.fig = fig
        self.out = Path(config.output_dir)
        self.tol = float(config.validation.get("tol", DEFAULT_TOL))
        self.files: list[dict] = []
        sw = config.sweep
        self.axis_values = spec.axis_values
        self.curve_name, self.curve_values = spec.curve, spec.curve_values
        self.hz = set()
        if sw is not None:
            if sw.parameter == spec.axis:
                self.axis_values = sw.values
            else:
                self.curve_name, self.curve_values = sw.parameter, sw.values
                self.hz.add(sw.parameter)

    # sweep values of physical params are in Hz
    def resolve(self, curve_value, **point) -> pl.Resolved:
        over = {k: v for k, v in self.spec.fixed.items()}
        for k in ("beta", "nbar0"):
            if getattr(self.config.state, k) is not None and k in over:
                over[k] = getattr(self.config.state, k)
        if self.curve_name is not None and curve_value is not None:
            over[self.curve_name] = curve_value
        over.update(point)
        return pl.resolve(self.config, over, hz=True)

    def record(self, name: str, header, rows, diffs: dict, applies: bool, extra=None):
        path = self.out / name
        n = write_csv(path, header, rows)
        entry = {"file": name, "rows": n, "columns": list(header), "max_abs_diff": diffs}
        entry["analytic_applies"] = applies
        entry["passed"] = (not applies) or all(v <= self.tol for v in diffs.values())
        if extra:
            entry.update(extra)
        self.files.append(entry)

    def grid_ranges(self, res: pl.Resolved):
        g = self.config.grid
        r = default_radius(res.beta or 0.0, res.nbar0 or 0.0)
        return g.x_range or (-r, r), g.p_range or (-r, r)

    # -- figure kinds ----------------------------------------------------------

    def curve(self):
        spec = self.spec
        for cv in self.curve_values:
            for theta in spec.thetas:
                cols, num, ana = [], [], []
                applies = True
                for x in self.axis_values:
                    res = self.resolve(cv, **{spec.axis: x})
                    applies = applies and pl.analytic_applies(res)
                    rho = self.state(res, spec.stage)
                    if spec.quantity == "Q":
                        n, a = pl.q_or_nan(rho), pl.analytic_q(res, spec.stage)
                    else:
                        n = 4 * quadrature_variance_numeric(rho, theta)
                        a = 4 * pl.analytic_variance(res, spec.stage, theta)
                    cols.append(x)
                    num.append(n)
                    ana.append(a)
                label = "Q" if spec.quantity == "Q" else "V4"
                parts = [self.fig]
                if cv is not None:
                    parts.append(_tag(self.curve_name, cv))
                if spec.quantity == "V":
                    parts.append(_tag("theta", theta))
                name = "__".join(parts) + ".csv"
                header = (spec.axis, f"{label}_numeric", f"{label}_analytic")
                self.record(
                    name, header, zip(cols, num, ana), {label: _max_diff(num, ana)}, applies,
                    {"curve": {self.curve_name: cv} if cv is not None else {}, "theta": theta},
                )

    def state(self, res: pl.Resolved, stage: str, radius: float = 0.0):
        dim = pl.auto_dim(res, radius, self.config.dim)
        rho = pl.prepare(res, dim)
        if stage == "prepared":
            return rho
        rho, _ = pl.add(res, rho)
        if stage == "added":
            return rho
        return pl.read(res, rho)

    def wigner_map(self, res: pl.Resolved):
        xr, pr = self.grid_ranges(res)
        radius = max(abs(v) for v in (*xr, *pr))
        rho = self.state(res, self.spec.stage, radius)
        num = wigner_grid(rho, xr, pr, self.config.grid.step)
        alphas = num.x[None, :] + 1j * num.p[:, None]
        ana = WignerMap(num.x, num.p, pl.analytic_wigner(res, self.spec.stage, alphas), num.step)
        return num, ana

    def surface(self):
        spec = self.spec
        for v in self.axis_values:
            for cv in self.curve_values:
                res = self.resolve(cv, **{spec.axis: v})
                num, ana = self.wigner_map(res)
                xx, pp = np.meshgrid(num.x, num.p)
                rows = zip(xx.ravel(), pp.ravel(), num.values.ravel(), ana.values.ravel())
                name = f"{self.fig}__{_tag(spec.axis, v)}.csv"
                self.record(
                    name,
                    ("x", "p", "W_numeric", "W_analytic"),
                    rows,
                    {"W": _max_diff(num.values, ana.values), "delta": abs(num.delta - ana.delta)},
                    pl.analytic_applies(res),
                    {
                        spec.axis: v,
                        "delta_numeric": num.delta,
                        "delta_analytic_grid": ana.delta,
                        "integral_numeric": num.integral,
                        "dim": pl.auto_dim(res, max(map(abs, (*num.x_range, *num.p_range))), self.config.dim),
                    },
                )

    def slice(self):
        spec = self.spec
        for cv in self.curve_values:
            for v in self.axis_values:
                res = self.resolve(cv, **{spec.axis: v})
                xr, _ = self.grid_ranges(res)
                x = grid_axis(*xr, self.config.grid.step)
                radius = max(abs(xr[0]), abs(xr[1]))
                rho = self.state(res, spec.stage, radius)
                num = wigner_points(rho, x.astype(np.complex128))
                ana = pl.analytic_wigner(res, spec.stage, x.astype(np.complex128))
                name = f"{self.fig}__{_tag(spec.axis, v)}.csv"
                self.record(
                    name,
                    ("x", "W_numeric", "W_analytic"),
                    zip(x, num, ana),
                    {"W": _max_diff(num, ana)},
                    pl.analytic_applies(res),
                    {spec.axis: v, "W_min_numeric": float(np.min(num)), "W_min_analytic": float(np.min(ana))},
                )
            if spec.inset is None:
                continue
            rows, dn, da = [], [], []
            applies = True
            for v in spec.inset:
                res = self.resolve(cv, **{spec.axis: v})
                applies = applies and pl.analytic_applies(res)
                num, ana = self.wigner_map(res)
                rows.append((v, num.delta, ana.delta))
                dn.append(num.delta)
                da.append(ana.delta)
            name = f"{self.fig}__delta_vs_{spec.axis}.csv"
            self.record(
                name,
                (spec.axis, "delta_numeric", "delta_analytic_grid"),
                rows,
                {"delta": _max_diff(dn, da)},
                applies,
                {"grid_step": self.config.grid.step},
            )

    def distribution(self):
        spec = self.spec
        for cv in self.curve_values:
            res = self.resolve(cv)
            if res.coherent:
                raise ConfigError(f"{self.fig} needs a thermal state (state.nbar0)")
            n = np.asarray(self.axis_values, dtype=int)
            dim = pl.auto_dim(res, 0.0, self.config.dim)
            if n.max() >= dim:
                raise ConfigError(f"requested n up to {n.max()} but dim is {dim}")
            thermal = pl.prepare(res, dim)
            added = self.state(res, "added")
            nb = res.nbar0
            p_th = nb**n / (1 + nb) ** (n + 1)
            p_add = mats_number_distribution(res.family(), dim)[n]
            num_th = number_distribution(thermal)[n]
            num_add = number_distribution(added)[n]
            rows = zip(n, num_th, p_th, num_add, p_add)
            name = f"{self.fig}__{_tag('nbar0', nb)}.csv"
            self.record(
                name,
                ("n", "p_thermal_numeric", "p_thermal_analytic", "p_added_numeric", "p_added_analytic"),
                rows,
                {"p_thermal": _max_diff(num_th, p_th), "p_added": _max_diff(num_add, p_add)},
                pl.analytic_applies(res),
                {"nbar0": nb, "mean_added_numeric": float(np.sum(np.arange(dim) * number_distribution(added)))},
            )


def _crossovers(runner: _Runner) -> dict | None:
    if runner.fig not in ("fig6b", "fig9a"):
        return None
    out = {}
    for cv in runner.curve_values:
        res = runner.resolve(cv, nbar0=0.0)
        eta = res.eta if runner.spec.stage == "readout" else 1.0
        key = "default" if cv is None else f"{cv:.17g}"
        out[key] = {
            "M": res.M,
            "root_nbar0": mats_q_crossover(res.M, eta) if eta > 0 else None,
            "threshold_nbar0": mats_threshold_nbar0(res.M),
        }
    return out


def run_figure(config: ExperimentConfig, figure_id: str | FigureId | None = None) -> FigureResult:
    fid = FigureId(figure_id) if figure_id is not None else config.figure_id
    if fid is FigureId.CUSTOM:
        return run_sweep(config)
    spec = FIGURES[fid]
    runner = _Runner(config, spec, fid.value)
    getattr(runner, spec.kind)()
    passed = all(f["passed"] for f in runner.files)
    manifest = {
        "figure_id": fid.value,
        "version": __version__,
        "backend": BACKEND,
        "physical": physical_manifest(config.physical),
        "state": vars(config.state),
        "resolved_default": runner.resolve(runner.curve_values[0]).describe()
        if spec.kind != "distribution"
        else runner.resolve(None).describe(),
        "axis": {"parameter": spec.axis, "values": list(runner.axis_values)},
        "curve": {"parameter": runner.curve_name, "values": list(runner.curve_values)},
        "sweep_units": "Hz" if runner.hz & pl.PHYSICAL_FIELDS else "as given",
        "grid": {
            "x_range": config.grid.x_range,
            "p_range": config.grid.p_range,
            "step": config.grid.step,
            "default_radius": "max(|beta|, sqrt(nbar0)) + 4",
        },
        "dim_override": config.dim,
        "tolerance": runner.tol,
        "files": runner.files,
        "passed": passed,
    }
    cross = _crossovers(runner)
    if cross is not None:
        manifest["q_crossover"] = cross
    path = runner.out / f"{fid.value}_manifest.json"
    write_json(path, manifest)
    return FigureResult(fid.value, runner.files, path, passed)
