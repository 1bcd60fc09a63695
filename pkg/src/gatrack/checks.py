"""Headless invariant suite behind ``gatrack check``.

Each check is cheap (the whole suite runs in seconds) and reports a one-line
detail string. The pytest suite covers the same ground far more thoroughly;
this is the smoke test to run on an installed copy.
"""

from __future__ import annotations

import time
from typing import List, NamedTuple

import numpy as np

from .controller import Gains, rotation_error_bound
from .ga3 import (
    Bivector, Multivector, Rotor, Vector, exp_bivector, geometric_product, log_rotor,
    norm, reverse, rotate,
)
from .reference import Rhodonea, Scenario, sample
from .rigid_body import ForceTorque, RigidBodyState, VehicleParams, step

__all__ = ["CheckResult", "CHECKS", "run_checks"]


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str
    seconds: float


def _rng(seed: int = 1234) -> np.random.Generator:
    return np.random.default_rng(seed)


def _rand_mv(rng) -> Multivector:
    return Multivector(*rng.standard_normal(8).tolist())


def _rand_rotor(rng) -> Rotor:
    q = rng.standard_normal(4)
    return Rotor(*(q / np.linalg.norm(q)).tolist())


def check_algebra(n: int = 2000) -> str:
    rng = _rng()
    worst = 0.0
    for _ in range(n):
        a, b, c = _rand_mv(rng), _rand_mv(rng), _rand_mv(rng)
        lhs = geometric_product(geometric_product(a, b), c)
        rhs = geometric_product(a, geometric_product(b, c))
        worst = max(worst, norm(lhs - rhs))
        worst = max(worst, norm(reverse(geometric_product(a, b))
                                - geometric_product(reverse(b), reverse(a))))
    if worst > 1e-9:
        raise AssertionError(f"product identities off by {worst:.2e}")
    return f"{n} associativity/reversion cases, worst {worst:.1e}"


def check_rotors(n: int = 2000) -> str:
    rng = _rng(7)
    worst = 0.0
    for _ in range(n):
        r = _rand_rotor(rng)
        v = Vector(*rng.standard_normal(3).tolist())
        worst = max(worst, abs(norm(rotate(r, v)) - norm(v)))
        back = exp_bivector(log_rotor(r) * -0.5)
        worst = max(worst, min(norm(back - r), norm(back + r)))
    if worst > 1e-9:
        raise AssertionError(f"rotor identities off by {worst:.2e}")
    return f"{n} norm-preservation/exp-log cases, worst {worst:.1e}"


def check_integrator() -> str:
    p = VehicleParams()
    st = RigidBodyState(Vector(0.0, 0.0, 0.0), Vector(1.0, -2.0, 0.5))
    ft = ForceTorque(0.0, Bivector())
    dt, n = 1e-3, 1000
    for _ in range(n):
        st = step(p, st, ft, dt)
    t = n * dt
    exact = Vector(t, -2.0 * t, 0.5 * t + 0.5 * p.g * t * t)
    err = norm(st.xi - exact)
    if err > 1e-9:
        raise AssertionError(f"ballistic error {err:.2e}")
    return f"ballistic flight over 1 s, error {err:.1e} m"


def check_gains() -> str:
    g = Gains()
    worst = max(max(ev.real for ev in g.eigenvalues(w)) for w in ("k1", "k2"))
    if worst > -1.0:
        raise AssertionError(f"closed-loop eigenvalue with real part {worst}")
    return f"default gains Hurwitz, max real part {worst:.2f}"


def check_error_bound(n: int = 5000) -> str:
    rng = _rng(99)
    for _ in range(n):
        r, r_d = _rand_rotor(rng), _rand_rotor(rng)
        a = rng.standard_normal(3)
        t_ref = Vector(*(a / np.linalg.norm(a)).tolist())
        jt = log_rotor(reverse(r) * r_d)
        if not rotation_error_bound(rotate(r_d, t_ref), rotate(r, t_ref), jt, t_ref):
            raise AssertionError("rotation error bound violated")
    return f"{n} random rotor/axis pairs, no violations"


def check_reference() -> str:
    traj = Rhodonea()
    h = 1e-4
    worst = 0.0
    for t in np.linspace(1.0, 20.0, 20):
        lo, mid, hi = (sample(traj, t + d, Scenario.RHODONEA) for d in (-h, 0.0, h))
        fd = (hi.xi_d - lo.xi_d) / (2.0 * h)
        worst = max(worst, norm(fd - mid.dxi_d) / max(norm(mid.dxi_d), 1.0))
    if worst > 1e-6:
        raise AssertionError(f"reference velocity mismatch {worst:.2e}")
    return f"rhodonea velocity vs central differences, worst {worst:.1e}"


def check_closed_loop() -> str:
    from .config import load_preset
    from .sim import run_scenario

    cfg = load_preset("flip").replace(t_end=6.0).with_disturbance(wind=False, drag=False)
    res = run_scenario(cfg)
    final = res.rows[-1]
    if res.metrics.bound_violations or final.xi_err > 0.05:
        raise AssertionError(f"flip recovery final error {final.xi_err:.3g} m")
    return f"6 s flip recovery, final error {final.xi_err:.1e} m"


CHECKS: List[tuple] = [
    ("algebra", check_algebra),
    ("rotors", check_rotors),
    ("integrator", check_integrator),
    ("gains", check_gains),
    ("error-bound", check_error_bound),
    ("reference", check_reference),
    ("closed-loop", check_closed_loop),
]


def run_checks(checks=None) -> List[CheckResult]:
    out = []
    for name, fn in checks or CHECKS:
        t0 = time.perf_counter()
        try:
            detail, ok = fn(), True
        except Exception as exc:  # a failing check must not stop the suite
            detail, ok = f"{type(exc).__name__}: {exc}", False
        out.append(CheckResult(name, ok, detail, time.perf_counter() - t0))
    return out
