"""JSON experiment configuration.

Frequencies, couplings and decay rates are given in Hz (cycles per second,
i.e. the omega/2pi values) and converted to rad/s on load. Everything else
is SI: W, s, K. Example::

    {
      "figure_id": "fig8c",
      "physical": {"kappa_c": 40e6, "tau_r": 70e-9, "G1": 1e6},
      "sweep": {"parameter": "eta", "values": [0.1, 0.5, 0.9]},
      "grid": {"x_range": [-5, 5], "p_range": [-5, 5], "step": 0.05},
      "state": {"beta": 1.0, "herald_mode": "exact_one"},
      "output_dir": "out/fig8c"
    }
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from ..channels import TWO_PI, PhysicalParams
from ..errors import DomainError

# config keys given in Hz and stored in rad/s
ANGULAR_FIELDS = frozenset(
    {"omega_c", "omega_m", "omega_d", "g_mc", "G1", "kappa_c", "kappa_m", "kappa_1", "kappa_2", "g_om"}
)
UNITS = {
    "P_d": "W",
    "P_2": "W",
    "tau_s": "s",
    "tau_w": "s",
    "tau_d": "s",
    "tau_r": "s",
    "T_bath": "K",
}
STATE_FIELDS = frozenset({"beta", "nbar0", "M"})
# protocol-level knobs that may also be swept
EXTRA_SWEEP_FIELDS = frozenset({"eta"})


class ConfigError(DomainError):
    """Malformed or inconsistent experiment configuration."""


class FigureId(str, enum.Enum):
    FIG3A = "fig3a"
    FIG3B = "fig3b"
    FIG4 = "fig4"
    FIG5 = "fig5"
    FIG6A = "fig6a"
    FIG6B = "fig6b"
    FIG7 = "fig7"
    FIG8A = "fig8a"
    FIG8B = "fig8b"
    FIG8C = "fig8c"
    FIG9A = "fig9a"
    FIG9B = "fig9b"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Sweep:
    parameter: str
    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise ConfigError(f"sweep over {self.parameter!r} has no values")
        if not all(math.isfinite(v) for v in self.values):
            raise ConfigError(f"sweep over {self.parameter!r} has non-finite values")


@dataclass(frozen=True)
class GridSpec:
    x_range: tuple[float, float] | None = None
    p_range: tuple[float, float] | None = None
    step: float = 0.05

    def __post_init__(self):
        if not self.step > 0:
            raise ConfigError(f"grid step must be > 0, got {self.step!r}")
        for rng in (self.x_range, self.p_range):
            if rng is not None and not rng[1] > rng[0]:
                raise ConfigError(f"grid range must be increasing, got {rng!r}")


@dataclass(frozen=True)
class StateSpec:
    """What the protocol prepares and how it is processed.

    Exactly one of ``beta`` (coherent) or ``nbar0`` (thermal) may be given; if
    neither is, a positive ``T_bath`` selects a thermal state with occupation
    from ``occupation_mode``. ``M`` and ``eta`` override the values derived from
    the write- and read-pulse parameters.
    """

    beta: float | None = None
    nbar0: float | None = None
    M: float | None = None
    eta: float | None = None
    herald: bool = True
    herald_mode: str = "exact_one"
    occupation_mode: str = "bose_einstein"

    def __post_init__(self):
        if self.beta is not None and self.nbar0 is not None:
            raise ConfigError("give either state.beta or state.nbar0, not both")
        if self.beta is not None and self.beta < 0:
            raise ConfigError("state.beta must be >= 0 (phase is fixed by convention)")
        if self.herald_mode not in ("exact_one", "click"):
            raise ConfigError(f"unknown herald_mode {self.herald_mode!r}")
        if self.occupation_mode not in ("bose_einstein", "linear"):
            raise ConfigError(f"unknown occupation_mode {self.occupation_mode!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    figure_id: FigureId = FigureId.CUSTOM
    physical: PhysicalParams = field(default_factory=PhysicalParams)
    sweep: Sweep | None = None
    grid: GridSpec = field(default_factory=GridSpec)
    state: StateSpec = field(default_factory=StateSpec)
    output_dir: Path = Path("out")
    dim: int | None = None
    validation: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.sweep is not None:
            allowed = {f.name for f in fields(PhysicalParams)} | STATE_FIELDS | EXTRA_SWEEP_FIELDS
            if self.sweep.parameter not in allowed:
                raise ConfigError(
                    f"sweep parameter {self.sweep.parameter!r} is not a physical or state parameter"
                )
        if self.dim is not None and (int(self.dim) != self.dim or self.dim < 2):
            raise ConfigError(f"dim must be an integer >= 2, got {self.dim!r}")


def physical_from_hz(values: dict) -> PhysicalParams:
    known = {f.name for f in fields(PhysicalParams)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown physical parameter(s): {sorted(unknown)}")
    converted = {
        k: (float(v) * TWO_PI if k in ANGULAR_FIELDS else float(v)) for k, v in values.items()
    }
    return PhysicalParams(**converted)


def sweep_value_to_internal(parameter: str, value: float) -> float:
    return value * TWO_PI if parameter in ANGULAR_FIELDS else value


def config_from_dict(data: dict, base_dir: Path | None = None) -> ExperimentConfig:
    data = dict(data)
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
    try:
        kwargs = {}
        if "figure_id" in data:
            kwargs["figure_id"] = FigureId(data["figure_id"])
        if "physical" in data:
            kwargs["physical"] = physical_from_hz(data["physical"])
        if data.get("sweep") is not None:
            sw = data["sweep"]
            if "values" in sw:
                values = tuple(float(v) for v in sw["values"])
            elif "range" in sw:
                start, stop, step = (float(v) for v in sw["range"])
                n = int(round((stop - start) / step))
                values = tuple(start + i * step for i in range(n + 1))
            else:
                raise ConfigError("sweep needs 'values' or 'range'")
            kwargs["sweep"] = Sweep(str(sw["parameter"]), values)
        if data.get("grid") is not None:
            g = data["grid"]
            kwargs["grid"] = GridSpec(
                tuple(g["x_range"]) if g.get("x_range") else None,
                tuple(g["p_range"]) if g.get("p_range") else None,
                float(g.get("step", 0.05)),
            )
        if data.get("state") is not None:
            kwargs["state"] = StateSpec(**data["state"])
        if "output_dir" in data:
            out = Path(data["output_dir"])
            kwargs["output_dir"] = out if out.is_absolute() or base_dir is None else base_dir / out
        if data.get("dim") is not None:
            kwargs["dim"] = data["dim"]
        if data.get("validation") is not None:
            kwargs["validation"] = dict(data["validation"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise ConfigError(f"invalid config: {exc}") from exc
    return ExperimentConfig(**kwargs)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return config_from_dict(data)


def physical_manifest(params: PhysicalParams) -> dict:
    """Every constant with its unit; angular quantities also in Hz."""
    out = {}
    for f in fields(PhysicalParams):
        value = getattr(params, f.name)
        if f.name in ANGULAR_FIELDS:
            out[f.name] = {"value": value, "unit": "rad/s", "value_hz": value / TWO_PI}
        else:
            out[f.name] = {"value": value, "unit": UNITS[f.name]}
    return out
