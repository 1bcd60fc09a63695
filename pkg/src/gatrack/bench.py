"""Rotation throughput: rotor sandwich versus a 3x3 matrix.

Both paths are vectorized over chunks of vectors with numpy. The sandwich
path runs the same product kernels as ``ga3`` (they only use ``*`` and ``+``,
so they broadcast over arrays); the matrix path builds the rotation matrix
once and applies it entry by entry.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .ga3 import E1, E2, E3, Rotor, _eo, _oe, rotate

__all__ = ["BenchResult", "rotor_matrix", "sandwich_rotate", "matrix_rotate", "bench_rotate"]


@dataclass(frozen=True)
class BenchResult:
    n: int
    sandwich_ns: float
    matrix_ns: float
    max_abs_diff: float

    def report(self) -> str:
        return "\n".join([
            f"vectors rotated : {self.n}",
            f"rotor sandwich  : {self.sandwich_ns:8.2f} ns/op",
            f"3x3 matrix      : {self.matrix_ns:8.2f} ns/op",
            f"max |difference|: {self.max_abs_diff:.3e}",
        ])


def rotor_matrix(r: Rotor) -> np.ndarray:
    """Matrix whose columns are the rotated basis vectors."""
    cols = [rotate(r, e) for e in (E1, E2, E3)]
    return np.array([[c.x1 for c in cols], [c.x2 for c in cols], [c.x3 for c in cols]])


def sandwich_rotate(r: Rotor, x: np.ndarray, y: np.ndarray, z: np.ndarray) -> tuple:
    rq = (r.s, r.b12, r.b23, r.b31)
    rr = (r.s, -r.b12, -r.b23, -r.b31)
    q = _eo(rq, (x, y, z, 0.0))
    out = _oe(q, rr)
    return out[0], out[1], out[2]


def matrix_rotate(m: np.ndarray, x: np.ndarray, y: np.ndarray, z: np.ndarray) -> tuple:
    return (m[0, 0] * x + m[0, 1] * y + m[0, 2] * z,
            m[1, 0] * x + m[1, 1] * y + m[1, 2] * z,
            m[2, 0] * x + m[2, 1] * y + m[2, 2] * z)


def bench_rotate(n: int = 10_000_000, chunk: int = 1_000_000, seed: int = 0) -> BenchResult:
    """Rotate ``n`` random vectors by one random rotor with both methods."""
    if n <= 0 or chunk <= 0:
        raise ValueError("n and chunk must be positive")
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(4)
    r = Rotor(*(q / np.linalg.norm(q)).tolist())
    m = rotor_matrix(r)
    t_sandwich = t_matrix = 0.0
    worst = 0.0
    done = 0
    while done < n:
        k = min(chunk, n - done)
        x, y, z = rng.standard_normal((3, k))
        t0 = time.perf_counter()
        a = sandwich_rotate(r, x, y, z)
        t1 = time.perf_counter()
        b = matrix_rotate(m, x, y, z)
        t2 = time.perf_counter()
        t_sandwich += t1 - t0
        t_matrix += t2 - t1
        worst = max(worst, max(float(np.max(np.abs(u - v))) for u, v in zip(a, b)))
        done += k
    return BenchResult(n, 1e9 * t_sandwich / n, 1e9 * t_matrix / n, worst)
