"""Cascaded tracking controller.

The outer loop turns position errors into a commanded acceleration ``u1``,
from which the thrust magnitude ``f_d`` and direction ``t_d`` follow. The
desired attitude ``R_d = R_a R_p`` aligns the thrust axis with ``t_d`` while
staying as close as possible to the preferred rotor ``R_p``. The inner loop
tracks ``R_d`` with a commanded angular acceleration ``u2`` and recovers the
body torque by cancelling the gyroscopic term.

Linear-algebra pieces (``K x``) use plain 3- and 6-tuples.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError
from .ga3 import (
    E1, E2, E3, AntipodalAlignmentError, Bivector, Even, Rotor, Vector,
    commutator, cross, dot, even_power, log_rotor, norm, norm2, reverse, rotate,
    rotor_between,
)
from .reference import ReferenceSample
from .rigid_body import VehicleParams, inertia_map

__all__ = [
    "F_MIN", "OMEGA_RESIDUAL_TOL", "ANTIPODAL_NUDGE",
    "ThrustSingularityError", "InconsistentDerivativeError",
    "Gains", "MeasuredState", "DesiredAttitude", "ControlCommand",
    "desired_thrust", "desired_thrust_dir", "thrust_dir_derivs", "error_rotor",
    "omega_desired", "omega_dot_desired", "gyroscopic_column", "control_step",
    "rotation_error_bound",
]

F_MIN = 1e-6
OMEGA_RESIDUAL_TOL = 1e-8
# Angle (rad) by which t_d is nudged off an antipodal configuration. It must
# satisfy 1 - cos(angle) > ANTIPODAL_TOL for the nudge to have any effect.
ANTIPODAL_NUDGE = 1e-3


class ThrustSingularityError(ValueError):
    """Commanded thrust too small to define a direction."""


class InconsistentDerivativeError(ValueError):
    """A rotor derivative is not tangent to the rotor manifold."""


# --------------------------------------------------------------------------
# gains

Matrix = tuple  # tuple of row tuples


def _block_gain(kp: float, kd: float) -> Matrix:
    return tuple(tuple((kp if j == i else 0.0) for j in range(3)) +
                 tuple((kd if j == i else 0.0) for j in range(3)) for i in range(3))


def _closed_loop(k: Matrix) -> np.ndarray:
    """``A - B K`` for the stacked double integrator ``[x; dx]``."""
    a = np.zeros((6, 6))
    a[:3, 3:] = np.eye(3)
    b = np.zeros((6, 3))
    b[3:, :] = np.eye(3)
    return a - b @ np.asarray(k, dtype=float)


@dataclass(frozen=True)
class Gains:
    """Feedback matrices acting on ``x1 = [xi_e; dxi_e]`` and ``x2 = [angle; rate]``."""

    k1: Matrix = field(default_factory=lambda: Gains.poles_to_matrix(-1.5, -2.5))
    k2: Matrix = field(default_factory=lambda: Gains.poles_to_matrix(-8.0, -12.0))

    def __post_init__(self):
        for name in ("k1", "k2"):
            k = getattr(self, name)
            arr = np.asarray(k, dtype=float)
            if arr.shape != (3, 6) or not np.all(np.isfinite(arr)):
                raise ConfigError(f"gain {name} must be a finite 3x6 matrix")
            object.__setattr__(self, name, tuple(tuple(float(v) for v in row) for row in arr))
            worst = float(np.max(self.eigenvalues(name).real))
            if not worst < 0.0:
                raise ConfigError(f"gain {name} is not stabilizing: max Re(eig) = {worst:g}")

    @staticmethod
    def poles_to_matrix(p1: float, p2: float) -> Matrix:
        """Block-diagonal gain placing each axis's poles at ``p1`` and ``p2``."""
        return _block_gain(p1 * p2, -(p1 + p2))

    @classmethod
    def from_poles(cls, translational: Sequence[float], rotational: Sequence[float]) -> "Gains":
        return cls(cls.poles_to_matrix(*translational), cls.poles_to_matrix(*rotational))

    @functools.cached_property
    def k1_norm(self) -> float:
        """Spectral norm of ``k1``."""
        return float(np.linalg.norm(np.asarray(self.k1), 2))

    def eigenvalues(self, which: str) -> np.ndarray:
        return np.linalg.eigvals(_closed_loop(getattr(self, which)))


def _kx(k: Matrix, a: Vector, b) -> Vector:
    """``K [a; b]`` with ``a`` and ``b`` three-component columns."""
    x0, x1, x2 = a
    x3, x4, x5 = b
    out = []
    for r in k:
        out.append(r[0] * x0 + r[1] * x1 + r[2] * x2 + r[3] * x3 + r[4] * x4 + r[5] * x5)
    return Vector(*out)


# --------------------------------------------------------------------------
# value types

@dataclass(frozen=True, slots=True)
class MeasuredState:
    xi: Vector
    dxi: Vector
    ddxi: Vector
    dddxi: Vector
    r: Rotor
    omega_b: Bivector


@dataclass(frozen=True, slots=True)
class DesiredAttitude:
    r_d: Rotor
    dr_d: Even
    ddr_d: Even
    r_e: Rotor
    j_e_theta_e: Bivector
    t_p: Vector
    antipodal_nudged: bool = False


@dataclass(frozen=True, slots=True)
class ControlCommand:
    f: float
    tau: Bivector
    f_d: float
    t_d: Vector
    r_d: Rotor
    omega_d: Bivector
    domega_d: Bivector
    j_e_theta_e: Bivector
    df_d: float = 0.0
    dt_d: Vector = E3 * 0.0
    ddt_d: Vector = E3 * 0.0
    dr_d: Even = Even()
    ddr_d: Even = Even()
    u1: Vector = E3 * 0.0
    x1_norm: float = 0.0
    x2_norm: float = 0.0
    thrust_fallback: bool = False
    antipodal_nudged: bool = False


# --------------------------------------------------------------------------
# thrust

def desired_thrust(params: VehicleParams, ddxi_v: Vector) -> float:
    """``f_d = m |ddxi_v - g e3|``."""
    return params.m * math.sqrt(ddxi_v.x1 ** 2 + ddxi_v.x2 ** 2 + (ddxi_v.x3 - params.g) ** 2)


def desired_thrust_dir(params: VehicleParams, ddxi_v: Vector, f_d: float) -> Vector:
    """``t_d = -(m / f_d) (ddxi_v - g e3)``, the unit axis along which thrust must act."""
    if not f_d > F_MIN:
        raise ThrustSingularityError(f"thrust {f_d!r} N is below {F_MIN} N")
    k = -params.m / f_d
    return Vector(k * ddxi_v.x1, k * ddxi_v.x2, k * (ddxi_v.x3 - params.g))


def thrust_dir_derivs(params: VehicleParams, du: Vector, ddu: Vector, u: Vector,
                      f_d: float, t_d: Vector) -> tuple:
    """First and second time derivatives of thrust direction and magnitude.

    ``du`` and ``ddu`` are the derivatives of the commanded acceleration
    ``u`` (the reference jerk and snap in open loop). With ``v = u - g e3``,
    ``f_d t_d = -m v`` differentiates into

        df  = m (v . dv) / |v|
        dt  = (-m dv - df t) / f
        ddf = m [(dv . dv + v . ddv) / |v| - (v . dv)^2 / |v|^3]
        ddt = (-m ddv - ddf t - 2 df dt) / f

    Returns ``(dt_d, ddt_d, df_d, ddf_d)``.
    """
    if not f_d > F_MIN:
        raise ThrustSingularityError(f"thrust {f_d!r} N is below {F_MIN} N")
    m = params.m
    v = Vector(u.x1, u.x2, u.x3 - params.g)
    nv = f_d / m
    vdv = dot(v, du)
    df = m * vdv / nv
    ddf = m * ((dot(du, du) + dot(v, ddu)) / nv - vdv * vdv / nv ** 3)
    dt = (du * (-m) - t_d * df) / f_d
    ddt = (ddu * (-m) - t_d * ddf - dt * (2.0 * df)) / f_d
    return dt, ddt, df, ddf


# --------------------------------------------------------------------------
# attitude references

def _sandwich_derivs(r, dr, ddr, v, dv, ddv):
    """Value and two derivatives of ``r v r~`` by the product rule."""
    x = rotate(r, v)
    if not (dr.s or dr.b12 or dr.b23 or dr.b31 or ddr.s or ddr.b12 or ddr.b23 or ddr.b31):
        return x, rotate(r, dv), rotate(r, ddv)
    rr, drr, ddrr = reverse(r), reverse(dr), reverse(ddr)
    dx = (dr * v * rr + r * dv * rr + r * v * drr).vector
    ddx = (ddr * v * rr + r * ddv * rr + r * v * ddrr
           + (dr * dv * rr + r * dv * drr + dr * v * drr) * 2.0).vector
    return x, dx, ddx


def _align_exact(t_p, dt_p, ddt_p, t_d, dt_d, ddt_d):
    """Derivatives of ``R_a = (1 + t_d t_p) / sqrt(2 (1 + t_d . t_p))``.

    This equals ``(t_p t_d)^(-1/2)`` and is differentiated without assuming
    that the factors commute.
    """
    n_ = 1.0 + t_d * t_p
    dn_ = dt_d * t_p + t_d * dt_p
    ddn_ = ddt_d * t_p + (dt_d * dt_p) * 2.0 + t_d * ddt_p
    n = math.sqrt(2.0 * n_.s)
    dc, ddc = dn_.s, ddn_.s
    dn = dc / n
    ddn = ddc / n - dc * dc / n ** 3
    dr = dn_ / n - n_ * (dn / n ** 2)
    ddr = ddn_ / n - dn_ * (2.0 * dn / n ** 2) - n_ * (ddn / n ** 2) + n_ * (2.0 * dn * dn / n ** 3)
    return dr, ddr


def _align_power_rule(t_p, dt_p, ddt_p, t_d, dt_d, ddt_d):
    """Derivatives of ``(t_p t_d)^(-1/2)`` by the scalar power rule.

    Exact only while the alignment plane is fixed; kept for comparison.
    """
    pr = t_p * t_d
    dp = dt_p * t_d + t_p * dt_d
    ddp = ddt_p * t_d + (dt_p * dt_d) * 2.0 + t_p * ddt_d
    p32 = even_power(pr, -1.5)
    p52 = even_power(pr, -2.5)
    dr = (dp * p32) * -0.5
    ddr = (ddp * p32) * -0.5 + (dp * dp * p52) * 0.75
    return dr, ddr


def _nudge(t_d: Vector) -> Vector:
    """Rotate ``t_d`` by ``ANTIPODAL_NUDGE`` toward a fixed horizontal axis."""
    ref = E1 if abs(t_d.x1) < 0.9 else E2
    side = cross(cross(t_d, ref), t_d)
    side = side / norm(side)
    c, s = math.cos(ANTIPODAL_NUDGE), math.sin(ANTIPODAL_NUDGE)
    return t_d * c + side * s


def error_rotor(r: Rotor, r_p_chain: tuple, t_d_chain: tuple, t_ref_chain: tuple,
                derivative_mode: str = "exact") -> DesiredAttitude:
    """Desired rotor with two derivatives, plus the attitude error.

    ``t_p = R_p t_ref R_p~`` is where the thrust axis would point at the
    preferred attitude. ``R_a`` rotates ``t_p`` onto ``t_d`` in their common
    plane, ``R_d = R_a R_p``, ``R_e = R~ R_d`` and ``j_e theta_e = log(R_e)``.

    ``derivative_mode`` selects ``"exact"`` derivatives of the alignment
    rotor or the scalar ``"power-rule"`` form.
    """
    r_p, dr_p, ddr_p = r_p_chain
    t_d, dt_d, ddt_d = t_d_chain
    t_p, dt_p, ddt_p = _sandwich_derivs(r_p, dr_p, ddr_p, *t_ref_chain)
    nudged = False
    try:
        r_a = rotor_between(t_p, t_d)
    except AntipodalAlignmentError:
        t_d = _nudge(t_d)
        r_a = rotor_between(t_p, t_d)
        nudged = True
    if nudged:
        dr_a = ddr_a = Even()
    elif derivative_mode == "exact":
        dr_a, ddr_a = _align_exact(t_p, dt_p, ddt_p, t_d, dt_d, ddt_d)
    elif derivative_mode == "power-rule":
        dr_a, ddr_a = _align_power_rule(t_p, dt_p, ddt_p, t_d, dt_d, ddt_d)
    else:
        raise ValueError(f"unknown derivative mode {derivative_mode!r}")
    r_d = r_a * r_p
    dr_d = dr_a * r_p + r_a * dr_p
    ddr_d = ddr_a * r_p + (dr_a * dr_p) * 2.0 + r_a * ddr_p
    r_e = reverse(r) * r_d
    return DesiredAttitude(r_d, dr_d, ddr_d, r_e, log_rotor(r_e), t_p, nudged)


def _bivector_part(m: Even, what: str, check: bool, scale: float = 1.0) -> Bivector:
    # the scalar part cancels analytically; rounding leaves about eps * scale
    if check and abs(m.s) >= OMEGA_RESIDUAL_TOL * max(1.0, scale):
        raise InconsistentDerivativeError(f"{what} has scalar residual {m.s!r}")
    return Bivector(m.b12, m.b23, m.b31)


def omega_desired(r_d: Even, dr_d: Even, check: bool = True) -> Bivector:
    """``Omega_d = -2 dR_d R_d~`` (inertial frame)."""
    return _bivector_part((dr_d * reverse(r_d)) * -2.0, "Omega_d", check, norm(dr_d))


def omega_dot_desired(r_d: Even, dr_d: Even, ddr_d: Even, check: bool = True) -> Bivector:
    """``dOmega_d = -2 ddR_d R_d~ - 2 dR_d dR_d~``."""
    m = (ddr_d * reverse(r_d) + dr_d * reverse(dr_d)) * -2.0
    return _bivector_part(m, "dOmega_d", check, norm(ddr_d) + norm2(dr_d))


# --------------------------------------------------------------------------
# torque recovery

def gyroscopic_column(params: VehicleParams, omega: Bivector) -> tuple:
    """Gyroscopic coupling ``[Omega, I(Omega)]`` as a column ``M(Omega) Omega``.

    Ordered ``(12, 23, 31)``.
    """
    w12, w23, w31 = omega.b12, omega.b23, omega.b31
    return (w23 * w31 * (params.i23 - params.i31),
            w12 * w31 * (params.i31 - params.i12),
            w12 * w23 * (params.i12 - params.i23))


def control_step(params: VehicleParams, gains: Gains, meas: MeasuredState, ref: ReferenceSample,
                 prev: Optional[ControlCommand] = None,
                 derivative_mode: str = "exact") -> ControlCommand:
    """One evaluation of the full control pipeline.

    The attitude feedback acts on ``x2 = [log(R_e~); Omega_b - W]`` with
    ``W = R~ Omega_d R`` the desired rate seen in the body frame. With that
    sign the error dynamics are a double integrator driven by ``u2``:

        u2  = -K2 x2 + R~ dOmega_d R + [Omega_b, W]
        tau = I(u2) - [Omega_b, I(Omega_b)]
    """
    # outer loop
    e = meas.xi - ref.xi_d
    de = meas.dxi - ref.dxi_d
    dde = meas.ddxi - ref.ddxi_d
    ddde = meas.dddxi - ref.dddxi_d
    k1 = gains.k1
    u1 = ref.ddxi_d - _kx(k1, e, de)
    du1 = ref.dddxi_d - _kx(k1, de, dde)
    ddu1 = ref.ddddxi_d - _kx(k1, dde, ddde)

    f_d = desired_thrust(params, u1)
    fallback = False
    try:
        t_d = desired_thrust_dir(params, u1, f_d)
        dt_d, ddt_d, df_d, _ = thrust_dir_derivs(params, du1, ddu1, u1, f_d, t_d)
    except ThrustSingularityError:
        fallback = True
        t_d = prev.t_d if prev is not None else rotate(ref.r_p, ref.t_ref)
        zero = Vector()
        dt_d, ddt_d, df_d = zero, zero, 0.0

    att = error_rotor(meas.r, (ref.r_p, ref.dr_p, ref.ddr_p), (t_d, dt_d, ddt_d),
                      (ref.t_ref, ref.dt_ref, ref.ddt_ref), derivative_mode)
    check = derivative_mode == "exact"
    om_d = omega_desired(att.r_d, att.dr_d, check)
    dom_d = omega_dot_desired(att.r_d, att.dr_d, att.ddr_d, check)

    # inner loop
    r = meas.r
    om = meas.omega_b
    w = rotate(reverse(r), om_d)
    angle = -att.j_e_theta_e
    rate = om - w
    ff = rotate(reverse(r), dom_d) + _bv(commutator(om, w))
    kx2 = _kx(gains.k2, (angle.b12, angle.b23, angle.b31), (rate.b12, rate.b23, rate.b31))
    u2 = Bivector(ff.b12 - kx2.x1, ff.b23 - kx2.x2, ff.b31 - kx2.x3)
    gyro = gyroscopic_column(params, om)
    iu2 = inertia_map(params, u2)
    tau = Bivector(iu2.b12 - gyro[0], iu2.b23 - gyro[1], iu2.b31 - gyro[2])

    x1n = math.sqrt(norm(e) ** 2 + norm(de) ** 2)
    x2n = math.sqrt(norm(angle) ** 2 + norm(rate) ** 2)
    return ControlCommand(
        f=max(f_d, 0.0), tau=tau, f_d=f_d, t_d=t_d, r_d=att.r_d, omega_d=om_d,
        domega_d=dom_d, j_e_theta_e=att.j_e_theta_e, df_d=df_d, dt_d=dt_d, ddt_d=ddt_d,
        dr_d=att.dr_d, ddr_d=att.ddr_d, u1=u1, x1_norm=x1n, x2_norm=x2n,
        thrust_fallback=fallback, antipodal_nudged=att.antipodal_nudged,
    )


def _bv(m) -> Bivector:
    return Bivector(m.b12, m.b23, m.b31)


def rotation_error_bound(t_d: Vector, t: Vector, j_e_theta_e: Bivector, t_ref: Vector,
                         slack: float = 1e-9) -> bool:
    """Check ``|t_d - t| <= 3 max_i |a_i| |j_e theta_e|`` with ``a_i`` the components of ``t_ref``."""
    a_m = max(abs(t_ref.x1), abs(t_ref.x2), abs(t_ref.x3))
    return norm(t_d - t) <= 3.0 * a_m * norm(j_e_theta_e) + slack


def interconnection_bound(params: VehicleParams, gains: Gains, cmd: ControlCommand,
                          t: Vector, t_ref: Vector, k_ref: float, slack: float = 1e-9) -> bool:
    """Check ``|(f/m)(t_d - t)| <= (|K1| |x1| + k_ref) 3 a_m |x2|``.

    ``k_ref`` bounds ``|g e3 - ddxi_d|`` over the run.
    """
    a_m = max(abs(t_ref.x1), abs(t_ref.x2), abs(t_ref.x3))
    lhs = cmd.f / params.m * norm(cmd.t_d - t)
    rhs = (gains.k1_norm * cmd.x1_norm + k_ref) * 3.0 * a_m * cmd.x2_norm
    return lhs <= rhs + slack
