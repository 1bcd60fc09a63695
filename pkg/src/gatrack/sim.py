"""Fixed-step closed-loop simulation, telemetry and metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, NamedTuple, Optional, Sequence, Union

from .config import ScenarioConfig
from .controller import (
    ControlCommand, InconsistentDerivativeError, MeasuredState, ThrustSingularityError,
    control_step, interconnection_bound,
)
from .disturbance import WindModel, dryden_step, initial_wind_state
from .errors import InvariantViolation, NumericFailure
from .ga3 import GAError, Even, Rotor, Vector, norm, rotate
from .reference import ReferenceRangeError, ReferenceSample, sample
from .rigid_body import ForceTorque, RigidBodyState, euler_angles, step

__all__ = ["TelemetryRow", "Metrics", "RunResult", "run_scenario", "metrics",
           "write_telemetry_csv", "emit_plots", "PLOT_FILES", "measured_state"]


class TelemetryRow(NamedTuple):
    t: float
    x: float
    y: float
    z: float
    vx: float
    vy: float
    vz: float
    r_s: float
    r_12: float
    r_23: float
    r_31: float
    w_12: float
    w_23: float
    w_31: float
    f: float
    tau_12: float
    tau_23: float
    tau_31: float
    xd: float
    yd: float
    zd: float
    vxd: float
    vyd: float
    vzd: float
    rd_s: float
    rd_12: float
    rd_23: float
    rd_31: float
    xi_err: float
    att_err: float
    wind_1: float
    wind_2: float
    wind_3: float
    phi: float
    theta: float
    psi: float
    tb_1: float
    tb_2: float
    tb_3: float
    t_1: float
    t_2: float
    t_3: float
    bound_margin: float


@dataclass(frozen=True)
class Metrics:
    rms_xi_err: float
    max_xi_err: float
    max_att_err: float
    settling_xi: float
    settling_att: float
    peak_f: float
    peak_tau: float
    bound_violations: int


@dataclass
class RunResult:
    rows: List[TelemetryRow]
    metrics: Metrics
    interconnection_violations: int = 0
    thrust_fallbacks: int = 0
    antipodal_nudges: int = 0


def _finite(*vals) -> bool:
    # a single sum is finite unless some term is inf/nan (or the sum overflows)
    return math.isfinite(sum(vals)) or all(math.isfinite(v) for v in vals)


def measured_state(cfg: ScenarioConfig, st: RigidBodyState, ref: ReferenceSample,
                   w: Vector, f: float, df: float) -> MeasuredState:
    """Plant-truth acceleration and jerk.

    ``ddxi = g e3 - (f/m) t + w/m`` and ``dddxi = -(df/m) t - (f/m) dt`` with
    the disturbance rate taken as zero. The thrust axis ``t = R t_ref R~``
    moves as ``dt = R (t_ref . Omega_b + dt_ref) R~``, where
    ``t_ref . Omega_b = (t_ref Omega_b - Omega_b t_ref) / 2``.
    """
    p = cfg.vehicle
    m = p.m
    t = rotate(st.r, ref.t_ref)
    om = st.omega_b
    tr = ref.t_ref
    # (t_ref Omega - Omega t_ref) / 2 for vector t_ref and bivector Omega
    inner = Vector(tr.x3 * om.b31 - tr.x2 * om.b12,
                   tr.x1 * om.b12 - tr.x3 * om.b23,
                   tr.x2 * om.b23 - tr.x1 * om.b31)
    dt_ = rotate(st.r, inner + ref.dt_ref)
    ddxi = Vector(w.x1 / m - f / m * t.x1, w.x2 / m - f / m * t.x2, p.g + w.x3 / m - f / m * t.x3)
    dddxi = t * (-df / m) - dt_ * (f / m)
    return MeasuredState(st.xi, st.dxi, ddxi, dddxi, st.r, st.omega_b)


def run_scenario(cfg: ScenarioConfig, strict: bool = True, initial_iterations: int = 3) -> RunResult:
    """Simulate ``cfg`` from ``t = 0`` to ``t_end``.

    One telemetry row is produced per plant step, including the final state.
    With ``strict`` a violated rotation-error bound raises
    ``InvariantViolation``; otherwise violations are only counted.
    """
    p = cfg.vehicle
    dist = cfg.disturbance
    n_steps = int(round(cfg.t_end / cfg.dt))
    model = WindModel(dist.drag_params if dist.drag else None, dist.coupling)
    gusts_on = dist.wind
    steady = dist.steady_wind if dist.wind else Vector()
    wind = initial_wind_state(dist.dryden, cfg.dt, steady, dist.stationary_start)
    if not gusts_on:
        wind = initial_wind_state(dist.dryden, cfg.dt, steady, stationary=False)

    st = cfg.initial
    rows: List[TelemetryRow] = []
    cmd: Optional[ControlCommand] = None
    f_applied, df_applied = p.m * p.g, 0.0
    k_ref = 0.0
    inter_bad = fallbacks = nudges = 0
    # interconnection checks are evaluated after the run, once k_ref is known
    pending: list = []

    for k in range(n_steps + 1):
        t = k * cfg.dt
        try:
            ref = sample(cfg.trajectory, t, cfg.scenario)
        except ReferenceRangeError as exc:
            raise InvariantViolation(str(exc), k, "reference") from exc
        gust_i = rotate(st.r, wind.gust_b) if gusts_on else Vector()
        wind_i = steady + gust_i
        w = model.force(st.dxi, wind_i)
        if k % cfg.control_divisor == 0:
            iters = initial_iterations if k == 0 else 1
            try:
                for _ in range(iters):
                    meas = measured_state(cfg, st, ref, w, f_applied, df_applied)
                    cmd = control_step(p, cfg.gains, meas, ref, cmd, cfg.derivative_mode)
                    f_applied, df_applied = cmd.f, cmd.df_d
            except (GAError, ThrustSingularityError, InconsistentDerivativeError) as exc:
                raise InvariantViolation(str(exc), k, type(exc).__name__) from exc
            fallbacks += cmd.thrust_fallback
            nudges += cmd.antipodal_nudged
        assert cmd is not None

        t_act = rotate(st.r, ref.t_ref)
        a_m = max(abs(ref.t_ref.x1), abs(ref.t_ref.x2), abs(ref.t_ref.x3))
        jn = norm(cmd.j_e_theta_e)
        margin = 3.0 * a_m * jn + 1e-9 - norm(cmd.t_d - t_act)
        if margin < 0.0 and strict:
            raise InvariantViolation("rotation error bound violated", k, "t_d - t")
        gv = ref.ddxi_d
        k_ref = max(k_ref, math.sqrt(gv.x1 ** 2 + gv.x2 ** 2 + (p.g - gv.x3) ** 2))
        pending.append((cmd, t_act, ref.t_ref))

        xi_err = norm(st.xi - ref.xi_d)
        eul = euler_angles(st.r, cfg.euler_sequence)
        row = TelemetryRow(
            t, st.xi.x1, st.xi.x2, st.xi.x3, st.dxi.x1, st.dxi.x2, st.dxi.x3,
            st.r.s, st.r.b12, st.r.b23, st.r.b31,
            st.omega_b.b12, st.omega_b.b23, st.omega_b.b31,
            cmd.f, cmd.tau.b12, cmd.tau.b23, cmd.tau.b31,
            ref.xi_d.x1, ref.xi_d.x2, ref.xi_d.x3, ref.dxi_d.x1, ref.dxi_d.x2, ref.dxi_d.x3,
            cmd.r_d.s, cmd.r_d.b12, cmd.r_d.b23, cmd.r_d.b31,
            xi_err, jn, wind_i.x1, wind_i.x2, wind_i.x3,
            eul.phi, eul.theta, eul.psi,
            ref.t_ref.x1, ref.t_ref.x2, ref.t_ref.x3, t_act.x1, t_act.x2, t_act.x3,
            margin,
        )
        if not _finite(*row):
            bad = next(n for n, v in zip(TelemetryRow._fields, row) if not math.isfinite(v))
            raise NumericFailure("non-finite telemetry", k, bad)
        rows.append(row)
        if k == n_steps:
            break

        ft = ForceTorque(cmd.f, cmd.tau, Vector(), ref.t_ref)
        if model.drag is not None:
            g_b = wind.gust_b if gusts_on else None

            def disturbance(dxi: Vector, r: Even, _g=g_b) -> Vector:
                wi = steady if _g is None else steady + rotate(r, _g)
                return model.force(dxi, wi)
        else:
            disturbance = None
        try:
            st = step(p, st, ft, cfg.dt, disturbance)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise NumericFailure(str(exc), k, "plant state") from exc
        if not _finite(st.xi.x1, st.xi.x2, st.xi.x3, st.dxi.x1, st.dxi.x2, st.dxi.x3,
                       st.omega_b.b12, st.omega_b.b23, st.omega_b.b31):
            raise NumericFailure("non-finite plant state", k + 1, "state")
        if abs(norm(st.r) - 1.0) > 1e-9:
            raise InvariantViolation("rotor left the unit sphere", k + 1, "R")
        if gusts_on:
            wind = dryden_step(dist.dryden, wind, cfg.dt)

    for c, t_act, t_ref in pending:
        if not interconnection_bound(p, cfg.gains, c, t_act, t_ref, k_ref):
            inter_bad += 1
    return RunResult(rows, metrics(rows), inter_bad, fallbacks, nudges)


def _settling(ts: Sequence[float], errs: Sequence[float], frac: float = 0.05) -> float:
    """Time after which the error stays within ``frac`` of its peak."""
    band = frac * max(errs)
    last_out = None
    for i, e in enumerate(errs):
        if e > band:
            last_out = i
    if last_out is None:
        return 0.0
    if last_out + 1 >= len(ts):
        return ts[-1] - ts[0]
    return ts[last_out + 1] - ts[0]


def metrics(rows: Sequence[TelemetryRow]) -> Metrics:
    """Summary statistics; the error window is the second half of the run."""
    if not rows:
        raise ValueError("metrics need at least one telemetry row")
    t0, t1 = rows[0].t, rows[-1].t
    mid = t0 + 0.5 * (t1 - t0)
    window = [r.xi_err for r in rows if r.t >= mid]
    ts = [r.t for r in rows]
    return Metrics(
        rms_xi_err=math.sqrt(math.fsum(e * e for e in window) / len(window)),
        max_xi_err=max(window),
        max_att_err=max(r.att_err for r in rows),
        settling_xi=_settling(ts, [r.xi_err for r in rows]),
        settling_att=_settling(ts, [r.att_err for r in rows]),
        peak_f=max(r.f for r in rows),
        peak_tau=max(math.sqrt(r.tau_12 ** 2 + r.tau_23 ** 2 + r.tau_31 ** 2) for r in rows),
        bound_violations=sum(1 for r in rows if r.bound_margin < 0.0),
    )


# --------------------------------------------------------------------------
# output

def _fmt(v: float) -> str:
    return format(v, ".17g")


def _write_csv(path: Path, header: Sequence[str], data: Iterable[Sequence[float]]) -> None:
    try:
        with path.open("w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in data:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def write_telemetry_csv(rows: Sequence[TelemetryRow], path: Union[str, Path]) -> Path:
    path = Path(path)
    _write_csv(path, TelemetryRow._fields, rows)
    return path


PLOT_FILES = {
    "position.csv": ("t", "x", "y", "z", "xd", "yd", "zd"),
    "velocity.csv": ("t", "vx", "vy", "vz", "vxd", "vyd", "vzd"),
    "euler.csv": ("t", "phi", "theta", "psi", "phi_d", "theta_d", "psi_d"),
    "thrust.csv": ("t", "f", "tb1", "tb2", "tb3", "t1", "t2", "t3"),
    "torque.csv": ("t", "tau12", "tau23", "tau31", "tau_norm"),
    "path3d.csv": ("t", "x", "y", "z", "xd", "yd", "zd", "t1", "t2", "t3"),
}


def emit_plots(rows: Sequence[TelemetryRow], out_dir: Union[str, Path],
               euler_sequence: str = "zxz") -> List[Path]:
    """Write one gnuplot-friendly CSV per figure group; returns the paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot create {out}: {exc.strerror}") from exc

    def euler_rows():
        for r in rows:
            d = euler_angles(Rotor(r.rd_s, r.rd_12, r.rd_23, r.rd_31), euler_sequence)
            yield (r.t, r.phi, r.theta, r.psi, d.phi, d.theta, d.psi)

    data = {
        "position.csv": ((r.t, r.x, r.y, r.z, r.xd, r.yd, r.zd) for r in rows),
        "velocity.csv": ((r.t, r.vx, r.vy, r.vz, r.vxd, r.vyd, r.vzd) for r in rows),
        "euler.csv": euler_rows(),
        "thrust.csv": ((r.t, r.f, r.tb_1, r.tb_2, r.tb_3, r.t_1, r.t_2, r.t_3) for r in rows),
        "torque.csv": ((r.t, r.tau_12, r.tau_23, r.tau_31,
                        math.sqrt(r.tau_12 ** 2 + r.tau_23 ** 2 + r.tau_31 ** 2)) for r in rows),
        "path3d.csv": ((r.t, r.x, r.y, r.z, r.xd, r.yd, r.zd, r.t_1, r.t_2, r.t_3) for r in rows),
    }
    paths = []
    for name, header in PLOT_FILES.items():
        path = out / name
        _write_csv(path, header, data[name])
        paths.append(path)
    return paths
