"""Reference signals: desired position with four derivatives, preferred
attitude rotor with two derivatives, and the reference-copy thrust axis with
two derivatives."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np
from scipy.interpolate import make_interp_spline

from .errors import ConfigError
from .ga3 import E3, ONE, Even, Rotor, Vector

__all__ = [
    "Scenario", "ReferenceSample", "Hover", "Rhodonea", "Custom", "TrajectoryKind",
    "ReferenceRangeError", "sample", "preferred_rotor", "thrust_axis", "tilt_angle",
    "load_custom_csv",
]

ZERO = Vector(0.0, 0.0, 0.0)
EVEN_ZERO = Even(0.0, 0.0, 0.0, 0.0)


class Scenario(enum.Enum):
    FLIP = "flip"
    RHODONEA = "rhodonea"
    CUSTOM = "custom"


class ReferenceRangeError(ValueError):
    """Requested time lies outside a sampled trajectory table."""


@dataclass(frozen=True, slots=True)
class ReferenceSample:
    xi_d: Vector
    dxi_d: Vector
    ddxi_d: Vector
    dddxi_d: Vector
    ddddxi_d: Vector
    r_p: Rotor = ONE
    dr_p: Even = EVEN_ZERO
    ddr_p: Even = EVEN_ZERO
    t_ref: Vector = E3
    dt_ref: Vector = ZERO
    ddt_ref: Vector = ZERO


# --------------------------------------------------------------------------
# trajectories

@dataclass(frozen=True)
class Hover:
    point: Vector = field(default_factory=lambda: Vector(0.0, 0.0, -1.2))

    def derivatives(self, t: float) -> tuple:
        return (self.point, ZERO, ZERO, ZERO, ZERO)


@dataclass(frozen=True)
class Rhodonea:
    """Three-petal rose on a sinking helix.

    ``x = A cos(a t) cos(2 a t)``, ``y = A sin(a t) cos(2 a t)``,
    ``z = z0 - c t``. Product-to-sum turns the planar part into
    ``x = A/2 (cos 3at + cos at)`` and ``y = A/2 (sin 3at - sin at)``, whose
    derivatives are phase shifts of the same harmonics.
    """

    amplitude: float = 50.0
    a: float = 0.376
    z0: float = 35.0
    sink_rate: float = 3.75

    def derivatives(self, t: float) -> tuple:
        h = 0.5 * self.amplitude
        w1, w3 = self.a, 3.0 * self.a
        out = []
        for n in range(5):
            shift = 0.5 * math.pi * n
            k1, k3 = h * w1 ** n, h * w3 ** n
            x = k3 * math.cos(w3 * t + shift) + k1 * math.cos(w1 * t + shift)
            y = k3 * math.sin(w3 * t + shift) - k1 * math.sin(w1 * t + shift)
            if n == 0:
                z = self.z0 - self.sink_rate * t
            elif n == 1:
                z = -self.sink_rate
            else:
                z = 0.0
            out.append(Vector(x, y, z))
        return tuple(out)


class Custom:
    """Quintic spline through a ``t,x,y,z`` table.

    Ends are clamped with zero velocity and acceleration so that four
    continuous derivatives exist everywhere inside the table.
    """

    MIN_RATE = 5.0  # samples per second

    def __init__(self, t, xyz):
        t = np.asarray(t, dtype=float)
        xyz = np.asarray(xyz, dtype=float)
        if t.ndim != 1 or xyz.shape != (t.size, 3):
            raise ConfigError("custom trajectory needs N times and an N x 3 position table")
        if t.size < 6:
            raise ConfigError("custom trajectory needs at least 6 samples")
        if not np.all(np.diff(t) > 0):
            raise ConfigError("custom trajectory times must be strictly increasing")
        if not np.all(np.isfinite(xyz)):
            raise ConfigError("custom trajectory contains non-finite values")
        if (t.size - 1) / (t[-1] - t[0]) < self.MIN_RATE:
            raise ConfigError(f"custom trajectory must have at least {self.MIN_RATE:g} samples per second")
        bc = ([(1, np.zeros(3)), (2, np.zeros(3))], [(1, np.zeros(3)), (2, np.zeros(3))])
        spline = make_interp_spline(t, xyz, k=5, bc_type=bc)
        self.t0, self.t1 = float(t[0]), float(t[-1])
        self._splines = [spline] + [spline.derivative(n) for n in range(1, 5)]

    def derivatives(self, t: float) -> tuple:
        if not self.t0 <= t <= self.t1:
            raise ReferenceRangeError(f"t = {t!r} outside trajectory table [{self.t0}, {self.t1}]")
        return tuple(Vector(*map(float, s(t))) for s in self._splines)


TrajectoryKind = Union[Hover, Rhodonea, Custom]


def load_custom_csv(path: Union[str, Path]) -> Custom:
    """Read a ``t,x,y,z`` CSV file into a ``Custom`` trajectory."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["t", "x", "y", "z"]:
                raise ConfigError(f"{path}: expected header t,x,y,z")
            rows = [[float(r[k]) for k in reader.fieldnames] for r in reader]
    except OSError as exc:
        raise ConfigError(f"cannot read trajectory {path}: {exc.strerror or exc}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: non-numeric or missing value ({exc})") from exc
    if not rows:
        raise ConfigError(f"{path}: no samples")
    arr = np.array(rows)
    return Custom(arr[:, 0], arr[:, 1:])


# --------------------------------------------------------------------------
# attitude schedules

YAW_AMPLITUDE = 0.45
YAW_RATE = 0.1 * math.pi
TILT_FINAL = 0.25 * math.pi
TILT_STEEPNESS = 10.0
TILT_MIDPOINT = 10.5


def preferred_rotor(scenario: Scenario, t: float) -> tuple:
    """``(R_p, dR_p, ddR_p)``.

    For the rhodonea scenario ``R_p = exp(-e12 x)`` with
    ``x = 0.45 sin(0.1 pi t)``. The plane is fixed, so
    ``dR_p = -x' e12 R_p`` and ``ddR_p = -x'' e12 R_p - x'^2 R_p``.
    """
    if scenario is not Scenario.RHODONEA:
        return ONE, EVEN_ZERO, EVEN_ZERO
    x = YAW_AMPLITUDE * math.sin(YAW_RATE * t)
    dx = YAW_AMPLITUDE * YAW_RATE * math.cos(YAW_RATE * t)
    ddx = -YAW_RATE * YAW_RATE * x
    c, s = math.cos(x), math.sin(x)
    r = Rotor(c, -s, 0.0, 0.0)
    e12r = Even(s, c, 0.0, 0.0)  # e12 R_p
    dr = Even(-dx * e12r.s, -dx * e12r.b12, 0.0, 0.0)
    ddr = Even(-ddx * e12r.s - dx * dx * c, -ddx * e12r.b12 + dx * dx * s, 0.0, 0.0)
    return r, dr, ddr


def _logistic(u: float) -> float:
    if u >= 0.0:
        return 1.0 / (1.0 + math.exp(-u))
    e = math.exp(u)
    return e / (1.0 + e)


def tilt_angle(t: float) -> tuple:
    """Logistic tilt ``phi = (pi/4) / (1 + exp(-10 (t - 10.5)))`` and two derivatives."""
    sg = _logistic(TILT_STEEPNESS * (t - TILT_MIDPOINT))
    k = TILT_STEEPNESS
    d1 = sg * (1.0 - sg)
    return (TILT_FINAL * sg, TILT_FINAL * k * d1, TILT_FINAL * k * k * d1 * (1.0 - 2.0 * sg))


def thrust_axis(scenario: Scenario, t: float) -> tuple:
    """Reference-copy thrust axis and two derivatives.

    In the rhodonea scenario the axis tilts from ``e3`` toward ``e1`` in the
    ``e3 e1`` plane: ``t_ref = exp(-e31 phi/2) e3 exp(e31 phi/2)
    = cos(phi) e3 + sin(phi) e1``.
    """
    if scenario is not Scenario.RHODONEA:
        return E3, ZERO, ZERO
    phi, dphi, ddphi = tilt_angle(t)
    c, s = math.cos(phi), math.sin(phi)
    return (
        Vector(s, 0.0, c),
        Vector(dphi * c, 0.0, -dphi * s),
        Vector(ddphi * c - dphi * dphi * s, 0.0, -ddphi * s - dphi * dphi * c),
    )


def _default_scenario(kind) -> Scenario:
    if isinstance(kind, Rhodonea):
        return Scenario.RHODONEA
    if isinstance(kind, Custom):
        return Scenario.CUSTOM
    return Scenario.FLIP


def sample(kind: TrajectoryKind, t: float, scenario: Scenario | None = None) -> ReferenceSample:
    """Evaluate every reference signal at time ``t``."""
    if t < 0.0:
        raise ValueError("reference time must be non-negative")
    if scenario is None:
        scenario = _default_scenario(kind)
    xi, dxi, ddxi, dddxi, ddddxi = kind.derivatives(t)
    r_p, dr_p, ddr_p = preferred_rotor(scenario, t)
    t_ref, dt_ref, ddt_ref = thrust_axis(scenario, t)
    return ReferenceSample(xi, dxi, ddxi, dddxi, ddddxi, r_p, dr_p, ddr_p, t_ref, dt_ref, ddt_ref)
