"""Scenario configuration and TOML loading."""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .controller import Gains
from .disturbance import Coupling, DragParams, DrydenParams
from .errors import ConfigError
from .ga3 import Bivector, Rotor, Vector
from .reference import Hover, Rhodonea, Scenario, TrajectoryKind, load_custom_csv
from .rigid_body import DT_MAX, RigidBodyState, VehicleParams

__all__ = ["DisturbanceConfig", "ScenarioConfig", "PRESETS", "load_config", "load_preset",
           "config_from_mapping"]

PRESETS = ("flip", "rhodonea")


@dataclass(frozen=True)
class DisturbanceConfig:
    """``wind`` switches gusts and steady wind together; ``drag`` switches the drag force.

    Wind reaches the vehicle only through drag, so ``wind`` without ``drag``
    has no effect on the trajectory (it is still logged).
    """

    wind: bool = False
    drag: bool = False
    dryden: DrydenParams = field(default_factory=DrydenParams)
    drag_params: DragParams = field(default_factory=DragParams)
    steady_wind: Vector = field(default_factory=Vector)
    coupling: Coupling = Coupling.DRAG
    stationary_start: bool = True


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: Scenario = Scenario.FLIP
    trajectory: TrajectoryKind = field(default_factory=Hover)
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    gains: Gains = field(default_factory=Gains)
    dt: float = 1e-3
    t_end: float = 20.0
    initial: RigidBodyState = field(default_factory=RigidBodyState)
    disturbance: DisturbanceConfig = field(default_factory=DisturbanceConfig)
    control_divisor: int = 1
    output: Optional[str] = None
    euler_sequence: str = "zxz"
    derivative_mode: str = "exact"

    def __post_init__(self):
        if not 0.0 < self.dt <= DT_MAX:
            raise ConfigError(f"dt must lie in (0, {DT_MAX}], got {self.dt!r}")
        if not self.t_end > 0.0:
            raise ConfigError(f"t_end must be positive, got {self.t_end!r}")
        if not (isinstance(self.control_divisor, int) and self.control_divisor >= 1):
            raise ConfigError("control_divisor must be an integer >= 1")
        if self.euler_sequence not in ("zxz", "zyx"):
            raise ConfigError(f"unknown Euler sequence {self.euler_sequence!r}")
        if self.derivative_mode not in ("exact", "power-rule"):
            raise ConfigError(f"unknown derivative mode {self.derivative_mode!r}")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def with_disturbance(self, **changes) -> "ScenarioConfig":
        return self.replace(disturbance=dataclasses.replace(self.disturbance, **changes))


# --------------------------------------------------------------------------
# parsing helpers

def _take(section: Mapping[str, Any], where: str, allowed: set) -> dict:
    if not isinstance(section, Mapping):
        raise ConfigError(f"[{where}] must be a table")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"[{where}] unknown keys: {', '.join(sorted(unknown))}")
    return dict(section)


def _floats(value, n: int, where: str) -> tuple:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        raise ConfigError(f"{where} must be a list of {n} numbers")
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where} must be numeric") from exc


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number")
    return float(value)


def _trajectory(sec: Mapping, base: Path) -> TrajectoryKind:
    d = _take(sec, "trajectory", {"kind", "point", "amplitude", "a", "z0", "sink_rate", "file"})
    kind = d.pop("kind", "hover")
    if kind == "hover":
        if set(d) - {"point"}:
            raise ConfigError("hover trajectory accepts only 'point'")
        return Hover(Vector(*_floats(d.get("point", [0.0, 0.0, -1.2]), 3, "trajectory.point")))
    if kind == "rhodonea":
        if set(d) - {"amplitude", "a", "z0", "sink_rate"}:
            raise ConfigError("rhodonea trajectory accepts amplitude, a, z0, sink_rate")
        return Rhodonea(**{k: _number(v, f"trajectory.{k}") for k, v in d.items()})
    if kind == "custom":
        if set(d) != {"file"}:
            raise ConfigError("custom trajectory needs exactly 'file'")
        path = Path(d["file"])
        if not path.is_absolute():
            path = base / path
        return load_custom_csv(path)
    raise ConfigError(f"unknown trajectory kind {kind!r}")


def _vehicle(sec: Mapping) -> VehicleParams:
    d = _take(sec, "vehicle", {"m", "i12", "i23", "i31", "g", "thrust_axis"})
    kw = {k: _number(v, f"vehicle.{k}") for k, v in d.items() if k != "thrust_axis"}
    if "thrust_axis" in d:
        kw["thrust_axis_ref"] = Vector(*_floats(d["thrust_axis"], 3, "vehicle.thrust_axis"))
    return VehicleParams(**kw)


def _gains(sec: Mapping) -> Gains:
    d = _take(sec, "gains", {"translational_poles", "rotational_poles", "k1", "k2"})
    k1 = Gains.poles_to_matrix(*_floats(d.get("translational_poles", [-1.5, -2.5]), 2,
                                        "gains.translational_poles"))
    k2 = Gains.poles_to_matrix(*_floats(d.get("rotational_poles", [-8.0, -12.0]), 2,
                                        "gains.rotational_poles"))
    if "k1" in d:
        k1 = tuple(_floats(row, 6, "gains.k1 row") for row in d["k1"])
    if "k2" in d:
        k2 = tuple(_floats(row, 6, "gains.k2 row") for row in d["k2"])
    return Gains(k1, k2)


def _initial(sec: Mapping) -> RigidBodyState:
    d = _take(sec, "initial", {"xi", "dxi", "r", "omega_b"})
    xi = Vector(*_floats(d.get("xi", [0.0, 0.0, 0.0]), 3, "initial.xi"))
    dxi = Vector(*_floats(d.get("dxi", [0.0, 0.0, 0.0]), 3, "initial.dxi"))
    try:
        r = Rotor(*_floats(d.get("r", [1.0, 0.0, 0.0, 0.0]), 4, "initial.r"))
    except ValueError as exc:
        raise ConfigError(f"initial.r: {exc}") from exc
    om = Bivector(*_floats(d.get("omega_b", [0.0, 0.0, 0.0]), 3, "initial.omega_b"))
    return RigidBodyState(xi, dxi, r, om)


def _disturbance(sec: Mapping) -> DisturbanceConfig:
    d = _take(sec, "disturbance", {"wind", "drag", "coupling", "steady_wind", "stationary_start",
                                   "dryden", "drag_model"})
    kw: dict = {}
    for flag in ("wind", "drag", "stationary_start"):
        if flag in d:
            if not isinstance(d[flag], bool):
                raise ConfigError(f"disturbance.{flag} must be true or false")
            kw[flag] = d[flag]
    if "coupling" in d:
        try:
            kw["coupling"] = Coupling(d["coupling"])
        except ValueError as exc:
            raise ConfigError(f"unknown coupling {d['coupling']!r}") from exc
    if "steady_wind" in d:
        kw["steady_wind"] = Vector(*_floats(d["steady_wind"], 3, "disturbance.steady_wind"))
    if "dryden" in d:
        dd = _take(d["dryden"], "disturbance.dryden",
                   {"Lu", "Lv", "Lw", "su", "sv", "sw", "V", "seed", "altitude"})
        seed = dd.pop("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ConfigError("disturbance.dryden.seed must be an integer")
        kw["dryden"] = DrydenParams(seed=seed, **{k: _number(v, f"dryden.{k}") for k, v in dd.items()})
    if "drag_model" in d:
        dm = _take(d["drag_model"], "disturbance.drag_model", {"cd", "area", "rho"})
        kw["drag_params"] = DragParams(**{k: _number(v, f"drag_model.{k}") for k, v in dm.items()})
    return DisturbanceConfig(**kw)


def config_from_mapping(data: Mapping[str, Any], base: Union[str, Path] = ".") -> ScenarioConfig:
    """Build a ``ScenarioConfig`` from parsed TOML data."""
    d = _take(data, "top level", {"scenario", "dt", "t_end", "control_divisor", "output",
                                  "euler_sequence", "derivative_mode", "trajectory", "vehicle",
                                  "gains", "initial", "disturbance"})
    base = Path(base)
    kw: dict = {}
    try:
        kw["scenario"] = Scenario(d.get("scenario", "flip"))
    except ValueError as exc:
        raise ConfigError(f"unknown scenario {d.get('scenario')!r}") from exc
    for key in ("dt", "t_end"):
        if key in d:
            kw[key] = _number(d[key], key)
    if "control_divisor" in d:
        kw["control_divisor"] = d["control_divisor"]
    for key in ("output", "euler_sequence", "derivative_mode"):
        if key in d:
            kw[key] = str(d[key])
    if "trajectory" in d:
        kw["trajectory"] = _trajectory(d["trajectory"], base)
    elif kw["scenario"] is Scenario.RHODONEA:
        kw["trajectory"] = Rhodonea()
    elif kw["scenario"] is Scenario.CUSTOM:
        raise ConfigError("custom scenario needs a [trajectory] table with a file")
    if "vehicle" in d:
        kw["vehicle"] = _vehicle(d["vehicle"])
    if "gains" in d:
        kw["gains"] = _gains(d["gains"])
    if "initial" in d:
        kw["initial"] = _initial(d["initial"])
    if "disturbance" in d:
        kw["disturbance"] = _disturbance(d["disturbance"])
    return ScenarioConfig(**kw)


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_mapping(data, path.parent)


def load_preset(name: str) -> ScenarioConfig:
    """Load one of the shipped presets (``flip`` or ``rhodonea``)."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    text = resources.files("gatrack.presets").joinpath(f"{name}.toml").read_text()
    return config_from_mapping(tomllib.loads(text))
