"""Wind and drag: Dryden gusts (body frame), steady wind (inertial frame)
and quadratic drag on the air-relative velocity."""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import expm, solve_discrete_lyapunov

from .errors import ConfigError
from .ga3 import Even, Vector, rotate

__all__ = [
    "DrydenParams", "DragParams", "WindState", "Coupling", "GaussianStream",
    "initial_wind_state", "dryden_step", "disturbance_force", "wind_inertial",
    "WindModel",
]


@dataclass(frozen=True)
class DrydenParams:
    """Low-altitude, light-turbulence defaults."""

    Lu: float = 200.0
    Lv: float = 200.0
    Lw: float = 50.0
    su: float = 1.06
    sv: float = 1.06
    sw: float = 0.7
    V: float = 15.0
    seed: int = 0
    altitude: float = 50.0  # recorded only; the fixed-parameter filters ignore it

    def __post_init__(self):
        for name in ("Lu", "Lv", "Lw", "V"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"Dryden {name} must be positive")
        for name in ("su", "sv", "sw"):
            if not getattr(self, name) >= 0:
                raise ConfigError(f"Dryden {name} must be non-negative")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64):
            raise ConfigError("Dryden seed must be an integer in [0, 2**64)")


@dataclass(frozen=True)
class DragParams:
    cd: float = 0.8
    area: float = 0.01425
    rho: float = 1.255

    @property
    def k(self) -> float:
        """Quadratic drag constant ``rho cd area / 2``."""
        return 0.5 * self.rho * self.cd * self.area


class Coupling(enum.Enum):
    DRAG = "drag"
    DIRECT_FORCE = "direct-force"


# --------------------------------------------------------------------------
# noise

class GaussianStream:
    """Standard normal triples indexed by step number.

    Triples are generated in blocks; block ``b`` comes from its own
    ``SeedSequence(seed, spawn_key=(0, b))`` so any step's value is a pure
    function of ``(seed, step)`` regardless of access order.
    """

    BLOCK = 4096

    def __init__(self, seed: int):
        self.seed = seed
        self._cache: dict[int, np.ndarray] = {}

    def _block(self, b: int) -> list:
        blk = self._cache.get(b)
        if blk is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=(0, b))
            arr = np.random.Generator(np.random.PCG64(ss)).standard_normal((self.BLOCK, 3))
            blk = arr.tolist()
            if len(self._cache) > 8:
                self._cache.clear()
            self._cache[b] = blk
        return blk

    def triple(self, k: int) -> list:
        return self._block(k // self.BLOCK)[k % self.BLOCK]

    def initial(self, n: int) -> np.ndarray:
        ss = np.random.SeedSequence(self.seed, spawn_key=(1,))
        return np.random.Generator(np.random.PCG64(ss)).standard_normal(n)


@functools.lru_cache(maxsize=16)
def _stream(seed: int) -> GaussianStream:
    return GaussianStream(seed)


# --------------------------------------------------------------------------
# shaping filters

@dataclass(frozen=True)
class _Axis:
    ad: tuple      # discrete transition, row-major
    bd: tuple      # discrete input column (already scaled by noise std)
    c: tuple       # output row
    chol: tuple    # Cholesky factor of the stationary state covariance, row-major
    n: int


def _axis(a: np.ndarray, b: np.ndarray, c: np.ndarray, dt: float) -> _Axis:
    """ZOH discretization driven by white noise of two-sided intensity pi.

    The intensity pi makes the stationary output variance equal the square
    of the intensity parameter folded into ``c``.
    """
    n = a.shape[0]
    big = np.zeros((n + 1, n + 1))
    big[:n, :n] = a * dt
    big[:n, n:] = b * dt
    e = expm(big)
    ad, gam = e[:n, :n], e[:n, n:]
    bd = gam * math.sqrt(math.pi / dt)
    p = solve_discrete_lyapunov(ad, bd @ bd.T)
    chol = np.linalg.cholesky(0.5 * (p + p.T))
    return _Axis(tuple(ad.ravel()), tuple(bd.ravel()), tuple(c.ravel()), tuple(chol.ravel()), n)


def _first_order(sigma: float, length: float, v: float):
    # sigma sqrt(2V/(pi L)) / (s + V/L), driven by intensity-pi noise
    a = v / length
    k = sigma * math.sqrt(2.0 * v / (math.pi * length))
    return np.array([[-a]]), np.array([[1.0]]), np.array([[k]])


def _second_order(sigma: float, length: float, v: float):
    # sigma sqrt(3V/(pi L)) (s + V/(sqrt(3) L)) / (s + V/L)^2
    a = v / length
    z = v / (math.sqrt(3.0) * length)
    k = sigma * math.sqrt(3.0 * v / (math.pi * length))
    A = np.array([[0.0, 1.0], [-a * a, -2.0 * a]])
    B = np.array([[0.0], [1.0]])
    C = np.array([[k * z, k]])
    return A, B, C


@functools.lru_cache(maxsize=32)
def _filters(p: DrydenParams, dt: float) -> tuple:
    return (
        _axis(*_first_order(p.su, p.Lu, p.V), dt),
        _axis(*_second_order(p.sv, p.Lv, p.V), dt),
        _axis(*_second_order(p.sw, p.Lw, p.V), dt),
    )


@dataclass(frozen=True)
class WindState:
    gust_b: Vector = field(default_factory=Vector)
    filter: tuple = ((0.0,), (0.0, 0.0), (0.0, 0.0))
    steady_i: Vector = field(default_factory=Vector)
    k: int = 0


def _output(ax: _Axis, x) -> float:
    return sum(ci * xi for ci, xi in zip(ax.c, x))


def initial_wind_state(p: DrydenParams, dt: float, steady_i: Optional[Vector] = None,
                       stationary: bool = True) -> WindState:
    """Filter memory drawn from the stationary distribution (or zero)."""
    axes = _filters(p, dt)
    steady_i = steady_i if steady_i is not None else Vector()
    if not stationary:
        return WindState(Vector(), ((0.0,), (0.0, 0.0), (0.0, 0.0)), steady_i, 0)
    z = _stream(p.seed).initial(5).tolist()
    states, pos = [], 0
    for ax in axes:
        n = ax.n
        zz = z[pos:pos + n]
        pos += n
        states.append(tuple(sum(ax.chol[i * n + j] * zz[j] for j in range(n)) for i in range(n)))
    gust = Vector(*(_output(ax, x) for ax, x in zip(axes, states)))
    return WindState(gust, tuple(states), steady_i, 0)


def dryden_step(p: DrydenParams, st: WindState, dt: float) -> WindState:
    """Advance the three shaping filters by one step of length ``dt``."""
    if not dt > 0:
        raise ConfigError("time step must be positive")
    axes = _filters(p, dt)
    noise = _stream(p.seed).triple(st.k)
    (xu,), (v1, v2), (w1, w2) = st.filter
    au, av, aw = axes
    nu, nv, nw = noise
    xu = au.ad[0] * xu + au.bd[0] * nu
    v1, v2 = (av.ad[0] * v1 + av.ad[1] * v2 + av.bd[0] * nv,
              av.ad[2] * v1 + av.ad[3] * v2 + av.bd[1] * nv)
    w1, w2 = (aw.ad[0] * w1 + aw.ad[1] * w2 + aw.bd[0] * nw,
              aw.ad[2] * w1 + aw.ad[3] * w2 + aw.bd[1] * nw)
    gust = Vector(au.c[0] * xu, av.c[0] * v1 + av.c[1] * v2, aw.c[0] * w1 + aw.c[1] * w2)
    return WindState(gust, ((xu,), (v1, v2), (w1, w2)), st.steady_i, st.k + 1)


# --------------------------------------------------------------------------
# forces

def disturbance_force(drag: DragParams, dxi: Vector, wind_i: Vector) -> Vector:
    """Quadratic drag ``-k |v_rel| v_rel`` on ``v_rel = dxi - wind_i``."""
    v = dxi - wind_i
    s = -drag.k * math.sqrt(v.x1 * v.x1 + v.x2 * v.x2 + v.x3 * v.x3)
    return Vector(s * v.x1, s * v.x2, s * v.x3)


def wind_inertial(st: WindState, r: Even) -> Vector:
    """Steady wind plus the body-frame gust rotated into the inertial frame."""
    return st.steady_i + rotate(r, st.gust_b)


@dataclass(frozen=True)
class WindModel:
    """Disturbance configuration used by the simulator.

    In ``DRAG`` coupling the wind enters only through the relative velocity.
    ``DIRECT_FORCE`` applies drag on the ground velocity and adds
    ``k |wind| wind`` as a separate push.
    """

    drag: Optional[DragParams] = field(default_factory=DragParams)
    coupling: Coupling = Coupling.DRAG

    def force(self, dxi: Vector, wind_i: Vector) -> Vector:
        if self.drag is None:
            return Vector()
        if self.coupling is Coupling.DRAG:
            return disturbance_force(self.drag, dxi, wind_i)
        push = disturbance_force(self.drag, Vector(), wind_i)
        return disturbance_force(self.drag, dxi, Vector()) + push
