"""Rigid-body plant: translational and rotational dynamics in G(3).

Conventions: inertial frame is NED, so gravity is ``+g e3``. The attitude
rotor ``R`` maps reference-copy (body) quantities into the inertial frame,
``x_inertial = R x_body R~``, and evolves as ``dR/dt = -R Omega_b / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

from .errors import ConfigError
from .ga3 import (
    E3, ONE, Bivector, Even, Rotor, Vector, commutator, exp_bivector, geometric_product,
    norm, rotate,
)

__all__ = [
    "VehicleParams", "RigidBodyState", "ForceTorque", "EulerAngles",
    "translational_accel", "inertia_map", "inertia_inverse", "gyroscopic_term",
    "rotational_accel", "state_derivative", "step", "euler_angles", "euler_to_rotor",
    "kinetic_energy", "angular_momentum",
]

DT_MAX = 0.01
EULER_DEGENERATE_TOL = 1e-9


@dataclass(frozen=True)
class VehicleParams:
    """Mass properties. Defaults are the small quadrotor used throughout the examples."""

    m: float = 0.025
    i12: float = 4.856e-3
    i23: float = 4.856e-3
    i31: float = 8.801e-3
    g: float = 9.81
    thrust_axis_ref: Vector = field(default_factory=lambda: E3)

    def __post_init__(self):
        for name in ("m", "i12", "i23", "i31", "g"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"vehicle parameter {name} must be positive, got {v!r}")
        if abs(norm(self.thrust_axis_ref) - 1.0) > 1e-9:
            raise ConfigError("thrust_axis_ref must be a unit vector")


@dataclass(frozen=True)
class RigidBodyState:
    xi: Vector = field(default_factory=Vector)
    dxi: Vector = field(default_factory=Vector)
    r: Rotor = ONE
    omega_b: Bivector = field(default_factory=Bivector)


@dataclass(frozen=True)
class ForceTorque:
    """Inputs held constant over one step.

    ``axis`` optionally overrides ``VehicleParams.thrust_axis_ref`` for
    vehicles whose thrust axis moves in the body frame (tilting rotors).
    """

    f: float = 0.0
    tau: Bivector = field(default_factory=Bivector)
    w: Vector = field(default_factory=Vector)
    axis: Optional[Vector] = None

    def __post_init__(self):
        if not self.f >= 0.0:
            raise ConfigError(f"thrust must be non-negative, got {self.f!r}")


def translational_accel(p: VehicleParams, st: RigidBodyState, ft: ForceTorque) -> Vector:
    axis = p.thrust_axis_ref if ft.axis is None else ft.axis
    t = rotate(st.r, axis)
    k = ft.f / p.m
    return Vector(ft.w.x1 / p.m - k * t.x1,
                  ft.w.x2 / p.m - k * t.x2,
                  p.g + ft.w.x3 / p.m - k * t.x3)


def inertia_map(p: VehicleParams, b: Bivector) -> Bivector:
    return Bivector(p.i12 * b.b12, p.i23 * b.b23, p.i31 * b.b31)


def inertia_inverse(p: VehicleParams, b: Bivector) -> Bivector:
    return Bivector(b.b12 / p.i12, b.b23 / p.i23, b.b31 / p.i31)


def gyroscopic_term(p: VehicleParams, omega: Bivector) -> Bivector:
    """``[Omega, I(Omega)]``: the gyroscopic coupling as a commutator."""
    c = commutator(omega, inertia_map(p, omega))
    return Bivector(c.b12, c.b23, c.b31)


def rotational_accel(p: VehicleParams, st: RigidBodyState, tau_body: Bivector) -> Bivector:
    return inertia_inverse(p, tau_body + gyroscopic_term(p, st.omega_b))


# Disturbance callback: (velocity, attitude even element) -> inertial force.
DisturbanceFn = Callable[[Vector, Even], Vector]


def state_derivative(p: VehicleParams, y: tuple, ft: ForceTorque,
                     disturbance: Optional[DisturbanceFn] = None) -> tuple:
    """Time derivative of the flat 13-tuple ``(xi, dxi, R, Omega_b)``.

    Inside integrator stages ``R`` is not exactly unit, so it is handled as
    a general even element here.
    """
    r = Even(y[6], y[7], y[8], y[9])
    dxi = Vector(y[3], y[4], y[5])
    om = Bivector(y[10], y[11], y[12])
    w = ft.w if disturbance is None else disturbance(dxi, r)
    axis = p.thrust_axis_ref if ft.axis is None else ft.axis
    t = rotate(r, axis)
    k = ft.f / p.m
    dr = geometric_product(r, om)
    dom = inertia_inverse(p, ft.tau + gyroscopic_term(p, om))
    return (
        y[3], y[4], y[5],
        w.x1 / p.m - k * t.x1, w.x2 / p.m - k * t.x2, p.g + w.x3 / p.m - k * t.x3,
        -0.5 * dr.s, -0.5 * dr.b12, -0.5 * dr.b23, -0.5 * dr.b31,
        dom.b12, dom.b23, dom.b31,
    )


def _pack(st: RigidBodyState) -> tuple:
    return (st.xi.x1, st.xi.x2, st.xi.x3, st.dxi.x1, st.dxi.x2, st.dxi.x3,
            st.r.s, st.r.b12, st.r.b23, st.r.b31,
            st.omega_b.b12, st.omega_b.b23, st.omega_b.b31)


def _unpack(y) -> RigidBodyState:
    return RigidBodyState(Vector(y[0], y[1], y[2]), Vector(y[3], y[4], y[5]),
                          Rotor(y[6], y[7], y[8], y[9]), Bivector(y[10], y[11], y[12]))


def step(p: VehicleParams, st: RigidBodyState, ft: ForceTorque, dt: float,
         disturbance: Optional[DisturbanceFn] = None) -> RigidBodyState:
    """Advance one classical RK4 step, then renormalize the rotor.

    ``disturbance``, when given, replaces ``ft.w`` and is evaluated at every
    stage so velocity-dependent forces such as drag see the stage velocity.
    """
    if not 0.0 < dt <= DT_MAX:
        raise ConfigError(f"time step must lie in (0, {DT_MAX}], got {dt!r}")
    y = _pack(st)
    h = 0.5 * dt
    k1 = state_derivative(p, y, ft, disturbance)
    k2 = state_derivative(p, tuple(a + h * b for a, b in zip(y, k1)), ft, disturbance)
    k3 = state_derivative(p, tuple(a + h * b for a, b in zip(y, k2)), ft, disturbance)
    k4 = state_derivative(p, tuple(a + dt * b for a, b in zip(y, k3)), ft, disturbance)
    c = dt / 6.0
    y = tuple(a + c * (b1 + 2.0 * b2 + 2.0 * b3 + b4) for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4))
    n = math.sqrt(y[6] * y[6] + y[7] * y[7] + y[8] * y[8] + y[9] * y[9])
    y = y[:6] + (y[6] / n, y[7] / n, y[8] / n, y[9] / n) + y[10:]
    return _unpack(y)


def kinetic_energy(p: VehicleParams, omega: Bivector) -> float:
    """Rotational kinetic energy ``(i12 w12^2 + i23 w23^2 + i31 w31^2) / 2``."""
    return 0.5 * (p.i12 * omega.b12 ** 2 + p.i23 * omega.b23 ** 2 + p.i31 * omega.b31 ** 2)


def angular_momentum(p: VehicleParams, st: RigidBodyState) -> Bivector:
    """Inertial-frame angular momentum bivector ``R I(Omega_b) R~``."""
    return rotate(st.r, inertia_map(p, st.omega_b))


# --------------------------------------------------------------------------
# Euler angles (reporting only)

class EulerAngles(NamedTuple):
    phi: float
    theta: float
    psi: float
    degenerate: bool = False


def _wrap(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.remainder(a, 2.0 * math.pi)
    return math.pi if a == -math.pi else a


def euler_to_rotor(phi: float, theta: float, psi: float, sequence: str = "zxz") -> Rotor:
    """Compose the rotor for the given angles.

    ``"zxz"``: ``exp(-e12 psi/2) exp(-e23 theta/2) exp(-e12 phi/2)``.
    ``"zyx"``: ``exp(-e12 psi/2) exp(-e31 theta/2) exp(-e23 phi/2)``, the
    aerospace yaw-pitch-roll sequence.
    """
    if sequence == "zxz":
        mid, inner = Bivector(0, 1, 0), Bivector(1, 0, 0)
    elif sequence == "zyx":
        mid, inner = Bivector(0, 0, 1), Bivector(0, 1, 0)
    else:
        raise ValueError(f"unknown Euler sequence {sequence!r}")
    a = exp_bivector(Bivector(-0.5 * psi, 0, 0))
    b = exp_bivector(mid.scaled(-0.5 * theta))
    c = exp_bivector(inner.scaled(-0.5 * phi))
    return a * b * c


def euler_angles(r: Even, sequence: str = "zxz") -> EulerAngles:
    """Extract Euler angles from a rotor.

    For ``"zxz"`` the rotor components read ``s = c cos(S)``,
    ``b12 = -c sin(S)``, ``b23 = -d cos(D)``, ``b31 = -d sin(D)`` with
    ``c = cos(theta/2)``, ``d = sin(theta/2)``, ``S = (psi+phi)/2`` and
    ``D = (psi-phi)/2``. When ``sin(theta)`` is tiny only one of ``S`` and
    ``D`` is defined; the result is flagged and ``phi`` is set to zero.
    """
    if sequence == "zyx":
        return _euler_zyx(r)
    if sequence != "zxz":
        raise ValueError(f"unknown Euler sequence {sequence!r}")
    s, b12, b23, b31 = r.s, r.b12, r.b23, r.b31
    c = math.hypot(s, b12)
    d = math.hypot(b23, b31)
    theta = 2.0 * math.atan2(d, c)
    if math.sin(theta) < EULER_DEGENERATE_TOL:
        if c >= d:
            psi = 2.0 * math.atan2(-b12, s)
        else:
            psi = 2.0 * math.atan2(-b31, -b23)
        return EulerAngles(0.0, theta, _wrap(psi), True)
    total = 2.0 * math.atan2(-b12, s)
    diff = 2.0 * math.atan2(-b31, -b23)
    return EulerAngles(_wrap(0.5 * (total - diff)), theta, _wrap(0.5 * (total + diff)), False)


def _euler_zyx(r: Even) -> EulerAngles:
    c1 = rotate(r, Vector(1, 0, 0))
    c2 = rotate(r, Vector(0, 1, 0))
    c3 = rotate(r, Vector(0, 0, 1))
    # matrix entries M[i][j] = component i of the rotated e_j
    m20 = max(-1.0, min(1.0, c1.x3))
    theta = -math.asin(m20)
    if math.cos(theta) < EULER_DEGENERATE_TOL:
        # yaw and roll share an axis; put everything into yaw
        psi = math.atan2(-c2.x1, c2.x2)
        return EulerAngles(0.0, theta, psi, True)
    psi = math.atan2(c1.x2, c1.x1)
    phi = math.atan2(c2.x3, c3.x3)
    return EulerAngles(phi, theta, psi, False)
