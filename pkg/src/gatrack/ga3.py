"""Geometric algebra of 3D Euclidean space, G(3).

Basis ordering used for the 8-coefficient tuple of a general multivector::

    (s, v1, v2, v3, b12, b23, b31, t)

with ``b31`` the coefficient of ``e3 e1`` and ``t`` the coefficient of the
pseudoscalar ``e1 e2 e3``. Even elements (scalar plus bivector) and odd
elements (vector plus trivector) have dedicated 4-coefficient types with
their own product kernels. The kernels are generated by ``tools/gen_kernels.py``
and are term-for-term subsets of the full product, so both paths produce
bit-identical results.

Rotations follow ``M -> R M R~`` with ``R = exp(-B theta / 2)``; with this
convention ``exp(-e12 pi/4)`` turns ``e1`` into ``e2``.
"""

from __future__ import annotations

import math
from typing import Union

__all__ = [
    "ROTOR_NORM_TOL", "ROTOR_RENORM_LIMIT", "ANTIPODAL_TOL", "LOG_DEGENERATE_TOL",
    "SINGULAR_BLADE_TOL", "GAError", "NonUnitRotorError", "AntipodalAlignmentError",
    "BranchCutError", "SingularBladeError",
    "Multivector", "Even", "Rotor", "Odd", "Vector", "Bivector",
    "E1", "E2", "E3", "E12", "E23", "E31", "I3", "ONE",
    "geometric_product", "reverse", "norm", "norm2", "grade", "scalar_part",
    "commutator", "left_contraction", "inverse", "project", "dot", "cross",
    "exp_bivector", "log_rotor", "rotate", "rotor_between", "even_power",
    "normalize", "as_multivector", "allclose",
]

# Tolerances. Module-level constants, treat as read-only.
ROTOR_NORM_TOL = 1e-9
ROTOR_RENORM_LIMIT = 1e-6
ANTIPODAL_TOL = 1e-8
LOG_DEGENERATE_TOL = 1e-12
SINGULAR_BLADE_TOL = 1e-12


class GAError(ValueError):
    """Base class for algebra domain errors."""


class NonUnitRotorError(GAError):
    pass


class AntipodalAlignmentError(GAError):
    """Raised when two unit vectors are (numerically) opposite."""

    def __init__(self, a, b):
        super().__init__(f"antipodal alignment between {a!r} and {b!r}")
        self.pair = (a, b)


class BranchCutError(GAError):
    pass


class SingularBladeError(GAError):
    pass


# --------------------------------------------------------------------------
# product kernels (generated)

def _full(x, y):
    xs, xv1, xv2, xv3, xb12, xb23, xb31, xt = x
    ys, yv1, yv2, yv3, yb12, yb23, yb31, yt = y
    return (
        xs * ys + xv1 * yv1 + xv2 * yv2 + xv3 * yv3 - xb12 * yb12 - xb23 * yb23 - xb31 * yb31 - xt * yt,
        xs * yv1 + xv1 * ys - xv2 * yb12 + xv3 * yb31 + xb12 * yv2 - xb23 * yt - xb31 * yv3 - xt * yb23,
        xs * yv2 + xv1 * yb12 + xv2 * ys - xv3 * yb23 - xb12 * yv1 + xb23 * yv3 - xb31 * yt - xt * yb31,
        xs * yv3 - xv1 * yb31 + xv2 * yb23 + xv3 * ys - xb12 * yt - xb23 * yv2 + xb31 * yv1 - xt * yb12,
        xs * yb12 + xv1 * yv2 - xv2 * yv1 + xv3 * yt + xb12 * ys - xb23 * yb31 + xb31 * yb23 + xt * yv3,
        xs * yb23 + xv1 * yt + xv2 * yv3 - xv3 * yv2 + xb12 * yb31 + xb23 * ys - xb31 * yb12 + xt * yv1,
        xs * yb31 - xv1 * yv3 + xv2 * yt + xv3 * yv1 - xb12 * yb23 + xb23 * yb12 + xb31 * ys + xt * yv2,
        xs * yt + xv1 * yb23 + xv2 * yb31 + xv3 * yb12 + xb12 * yv3 + xb23 * yv1 + xb31 * yv2 + xt * ys,
    )


def _ee(x, y):
    xs, xb12, xb23, xb31 = x
    ys, yb12, yb23, yb31 = y
    return (
        xs * ys - xb12 * yb12 - xb23 * yb23 - xb31 * yb31,
        xs * yb12 + xb12 * ys - xb23 * yb31 + xb31 * yb23,
        xs * yb23 + xb12 * yb31 + xb23 * ys - xb31 * yb12,
        xs * yb31 - xb12 * yb23 + xb23 * yb12 + xb31 * ys,
    )


def _eo(x, y):
    xs, xb12, xb23, xb31 = x
    yv1, yv2, yv3, yt = y
    return (
        xs * yv1 + xb12 * yv2 - xb23 * yt - xb31 * yv3,
        xs * yv2 - xb12 * yv1 + xb23 * yv3 - xb31 * yt,
        xs * yv3 - xb12 * yt - xb23 * yv2 + xb31 * yv1,
        xs * yt + xb12 * yv3 + xb23 * yv1 + xb31 * yv2,
    )


def _oe(x, y):
    xv1, xv2, xv3, xt = x
    ys, yb12, yb23, yb31 = y
    return (
        xv1 * ys - xv2 * yb12 + xv3 * yb31 - xt * yb23,
        xv1 * yb12 + xv2 * ys - xv3 * yb23 - xt * yb31,
        -xv1 * yb31 + xv2 * yb23 + xv3 * ys - xt * yb12,
        xv1 * yb23 + xv2 * yb31 + xv3 * yb12 + xt * ys,
    )


def _oo(x, y):
    xv1, xv2, xv3, xt = x
    yv1, yv2, yv3, yt = y
    return (
        xv1 * yv1 + xv2 * yv2 + xv3 * yv3 - xt * yt,
        xv1 * yv2 - xv2 * yv1 + xv3 * yt + xt * yv3,
        xv1 * yt + xv2 * yv3 - xv3 * yv2 + xt * yv1,
        -xv1 * yv3 + xv2 * yt + xv3 * yv1 + xt * yv2,
    )


# --------------------------------------------------------------------------
# value types

Scalar = Union[int, float]


class _Blade:
    """Shared arithmetic for all algebra value types.

    Subclasses define ``GRADES``, ``_KIND`` ('e', 'o' or 'm'), ``coeffs()``
    returning the 8-tuple and ``_from8`` building an instance from one.
    Instances are treated as immutable values: no operation mutates its
    operands and callers must not assign to coefficients.
    """

    __slots__ = ()
    _FIELDS: tuple = ()
    GRADES: frozenset = frozenset()
    _KIND = "m"

    def coeffs(self) -> tuple:
        raise NotImplementedError

    def _norm2(self) -> float:
        return sum(c * c for c in self._own())

    @classmethod
    def _from8(cls, c):
        raise NotImplementedError

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = Even(float(other), 0.0, 0.0, 0.0)
        elif not isinstance(other, _Blade):
            return NotImplemented
        cls = _join(self.GRADES | other.GRADES)
        return cls._from8(tuple(a + b for a, b in zip(self.coeffs(), other.coeffs())))

    __radd__ = __add__

    def __neg__(self):
        cls = Even if type(self) is Rotor else type(self)
        return cls._from8(tuple(-a for a in self.coeffs()))

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = Even(float(other), 0.0, 0.0, 0.0)
        elif not isinstance(other, _Blade):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        entry = _DISPATCH.get((type(self), type(other)))
        if entry is not None:
            kernel, cls = entry
            return cls(*kernel(self._q(), other._q()))
        if isinstance(other, (int, float)):
            return self.scaled(other)
        if isinstance(other, _Blade):
            return geometric_product(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self.scaled(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return self.scaled(1.0 / other)
        return NotImplemented

    def scaled(self, k: float):
        cls = Even if type(self) is Rotor else type(self)
        return cls._from8(tuple(k * a for a in self.coeffs()))

    def __invert__(self):
        return reverse(self)

    def __eq__(self, other):
        if isinstance(other, (int, float)):
            other = Even(float(other), 0.0, 0.0, 0.0)
        if not isinstance(other, _Blade):
            return NotImplemented
        return self.coeffs() == other.coeffs()

    def __hash__(self):
        return hash(self.coeffs())

    def __iter__(self):
        return iter(self._own())

    def _own(self) -> tuple:
        return tuple(getattr(self, n) for n in self._FIELDS)

    def __repr__(self):
        body = ", ".join(f"{n}={getattr(self, n)!r}" for n in self._FIELDS)
        return f"{type(self).__name__}({body})"



class Multivector(_Blade):
    """General element of G(3) with all eight coefficients."""

    __slots__ = _FIELDS = ("s", "v1", "v2", "v3", "b12", "b23", "b31", "t")
    GRADES = frozenset((0, 1, 2, 3))
    _KIND = "m"

    def __init__(self, s=0.0, v1=0.0, v2=0.0, v3=0.0, b12=0.0, b23=0.0, b31=0.0, t=0.0):
        self.s, self.v1, self.v2, self.v3 = s, v1, v2, v3
        self.b12, self.b23, self.b31, self.t = b12, b23, b31, t

    def coeffs(self):
        return (self.s, self.v1, self.v2, self.v3, self.b12, self.b23, self.b31, self.t)

    @classmethod
    def _from8(cls, c):
        return cls(*c)


class Even(_Blade):
    """Scalar plus bivector: ``s + b12 e12 + b23 e23 + b31 e31``."""

    __slots__ = _FIELDS = ("s", "b12", "b23", "b31")
    GRADES = frozenset((0, 2))
    _KIND = "e"

    def __init__(self, s=0.0, b12=0.0, b23=0.0, b31=0.0):
        self.s, self.b12, self.b23, self.b31 = s, b12, b23, b31

    def _q(self):
        return (self.s, self.b12, self.b23, self.b31)

    def _norm2(self):
        return self.s * self.s + self.b12 * self.b12 + self.b23 * self.b23 + self.b31 * self.b31

    def coeffs(self):
        return (self.s, 0.0, 0.0, 0.0, self.b12, self.b23, self.b31, 0.0)

    @classmethod
    def _from8(cls, c):
        return cls(c[0], c[4], c[5], c[6])

    def __add__(self, other):
        if isinstance(other, Even):
            return Even(self.s + other.s, self.b12 + other.b12, self.b23 + other.b23, self.b31 + other.b31)
        return _Blade.__add__(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Even):
            return Even(self.s - other.s, self.b12 - other.b12, self.b23 - other.b23, self.b31 - other.b31)
        return _Blade.__sub__(self, other)

    def scaled(self, k):
        return Even(k * self.s, k * self.b12, k * self.b23, k * self.b31)

    def __neg__(self):
        return Even(-self.s, -self.b12, -self.b23, -self.b31)

    @property
    def bivector(self) -> "Bivector":
        return Bivector(self.b12, self.b23, self.b31)


class Rotor(Even):
    """Unit-norm even element.

    The constructor renormalizes inputs whose norm is within
    ``ROTOR_RENORM_LIMIT`` of one and raises ``NonUnitRotorError`` otherwise.
    """

    __slots__ = ()

    def __init__(self, s=1.0, b12=0.0, b23=0.0, b31=0.0):
        n2 = s * s + b12 * b12 + b23 * b23 + b31 * b31
        if n2 != 1.0:
            n = math.sqrt(n2)
            if not abs(n - 1.0) < ROTOR_RENORM_LIMIT:
                raise NonUnitRotorError(f"rotor norm {n!r} is not 1")
            s, b12, b23, b31 = s / n, b12 / n, b23 / n, b31 / n
        self.s, self.b12, self.b23, self.b31 = s, b12, b23, b31

    @classmethod
    def from_even(cls, m) -> "Rotor":
        if isinstance(m, Rotor):
            return m
        c = m.coeffs()
        return cls(c[0], c[4], c[5], c[6])


class Odd(_Blade):
    """Vector plus trivector."""

    __slots__ = _FIELDS = ("v1", "v2", "v3", "t")
    GRADES = frozenset((1, 3))
    _KIND = "o"

    def __init__(self, v1=0.0, v2=0.0, v3=0.0, t=0.0):
        self.v1, self.v2, self.v3, self.t = v1, v2, v3, t

    def _q(self):
        return (self.v1, self.v2, self.v3, self.t)

    def coeffs(self):
        return (0.0, self.v1, self.v2, self.v3, 0.0, 0.0, 0.0, self.t)

    @classmethod
    def _from8(cls, c):
        return cls(c[1], c[2], c[3], c[7])

    def __add__(self, other):
        if type(other) is Odd:
            return Odd(self.v1 + other.v1, self.v2 + other.v2, self.v3 + other.v3, self.t + other.t)
        return _Blade.__add__(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is Odd:
            return Odd(self.v1 - other.v1, self.v2 - other.v2, self.v3 - other.v3, self.t - other.t)
        return _Blade.__sub__(self, other)

    def scaled(self, k):
        return Odd(k * self.v1, k * self.v2, k * self.v3, k * self.t)

    def __neg__(self):
        return Odd(-self.v1, -self.v2, -self.v3, -self.t)

    @property
    def vector(self) -> "Vector":
        return Vector(self.v1, self.v2, self.v3)


class Vector(_Blade):
    """Grade-1 element ``x1 e1 + x2 e2 + x3 e3``."""

    __slots__ = _FIELDS = ("x1", "x2", "x3")
    GRADES = frozenset((1,))
    _KIND = "o"

    def __init__(self, x1=0.0, x2=0.0, x3=0.0):
        self.x1, self.x2, self.x3 = x1, x2, x3

    def _q(self):
        return (self.x1, self.x2, self.x3, 0.0)

    def _norm2(self):
        return self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3

    def coeffs(self):
        return (0.0, self.x1, self.x2, self.x3, 0.0, 0.0, 0.0, 0.0)

    @classmethod
    def _from8(cls, c):
        return cls(c[1], c[2], c[3])

    def __add__(self, other):
        if type(other) is Vector:
            return Vector(self.x1 + other.x1, self.x2 + other.x2, self.x3 + other.x3)
        return _Blade.__add__(self, other)

    def __sub__(self, other):
        if type(other) is Vector:
            return Vector(self.x1 - other.x1, self.x2 - other.x2, self.x3 - other.x3)
        return _Blade.__sub__(self, other)

    def scaled(self, k):
        return Vector(k * self.x1, k * self.x2, k * self.x3)

    def __neg__(self):
        return Vector(-self.x1, -self.x2, -self.x3)

    __radd__ = __add__


class Bivector(_Blade):
    """Grade-2 element ``b12 e12 + b23 e23 + b31 e31``."""

    __slots__ = _FIELDS = ("b12", "b23", "b31")
    GRADES = frozenset((2,))
    _KIND = "e"

    def __init__(self, b12=0.0, b23=0.0, b31=0.0):
        self.b12, self.b23, self.b31 = b12, b23, b31

    def _q(self):
        return (0.0, self.b12, self.b23, self.b31)

    def _norm2(self):
        return self.b12 * self.b12 + self.b23 * self.b23 + self.b31 * self.b31

    def coeffs(self):
        return (0.0, 0.0, 0.0, 0.0, self.b12, self.b23, self.b31, 0.0)

    @classmethod
    def _from8(cls, c):
        return cls(c[4], c[5], c[6])

    def __add__(self, other):
        if type(other) is Bivector:
            return Bivector(self.b12 + other.b12, self.b23 + other.b23, self.b31 + other.b31)
        return _Blade.__add__(self, other)

    def __sub__(self, other):
        if type(other) is Bivector:
            return Bivector(self.b12 - other.b12, self.b23 - other.b23, self.b31 - other.b31)
        return _Blade.__sub__(self, other)

    def scaled(self, k):
        return Bivector(k * self.b12, k * self.b23, k * self.b31)

    def __neg__(self):
        return Bivector(-self.b12, -self.b23, -self.b31)

    __radd__ = __add__


def _join(grades):
    if grades <= Vector.GRADES:
        return Vector
    if grades <= Bivector.GRADES:
        return Bivector
    if grades <= Even.GRADES:
        return Even
    if grades <= Odd.GRADES:
        return Odd
    return Multivector


E1 = Vector(1.0, 0.0, 0.0)
E2 = Vector(0.0, 1.0, 0.0)
E3 = Vector(0.0, 0.0, 1.0)
E12 = Bivector(1.0, 0.0, 0.0)
E23 = Bivector(0.0, 1.0, 0.0)
E31 = Bivector(0.0, 0.0, 1.0)
I3 = Odd(0.0, 0.0, 0.0, 1.0)
ONE = Rotor(1.0, 0.0, 0.0, 0.0)


def as_multivector(m) -> Multivector:
    if isinstance(m, (int, float)):
        return Multivector(float(m))
    return Multivector(*m.coeffs())


# --------------------------------------------------------------------------
# operations

def geometric_product(a, b):
    """Geometric product ``a b``.

    Even and odd operands use the split kernels; anything involving a general
    ``Multivector`` uses the full 8x8 product. ``Rotor * Rotor`` is a ``Rotor``.
    """
    entry = _DISPATCH.get((type(a), type(b)))
    if entry is not None:
        kernel, cls = entry
        return cls(*kernel(a._q(), b._q()))
    if isinstance(a, (int, float)):
        return b.scaled(a) if isinstance(b, _Blade) else a * b
    if isinstance(b, (int, float)):
        return a.scaled(b)
    return Multivector(*_full(a.coeffs(), b.coeffs()))


def _build_dispatch() -> dict:
    even, odd = (Even, Rotor, Bivector), (Odd, Vector)
    table = {}
    for ta in even:
        for tb in even:
            table[ta, tb] = (_ee, Even)
        for tb in odd:
            table[ta, tb] = (_eo, Odd)
    for ta in odd:
        for tb in even:
            table[ta, tb] = (_oe, Odd)
        for tb in odd:
            table[ta, tb] = (_oo, Even)
    table[Rotor, Rotor] = (_ee, Rotor)
    return table


_DISPATCH = _build_dispatch()


def reverse(m):
    """Reversion: negates the grade-2 and grade-3 parts."""
    if isinstance(m, (int, float)):
        return m
    tm = type(m)
    if tm is Vector:
        return m
    if tm is Bivector:
        return Bivector(-m.b12, -m.b23, -m.b31)
    if tm is Rotor:
        # a reversed unit rotor is unit: skip the renormalizing constructor
        r = object.__new__(Rotor)
        r.s, r.b12, r.b23, r.b31 = m.s, -m.b12, -m.b23, -m.b31
        return r
    if tm is Even:
        return Even(m.s, -m.b12, -m.b23, -m.b31)
    if tm is Odd:
        return Odd(m.v1, m.v2, m.v3, -m.t)
    c = m.coeffs()
    return Multivector(c[0], c[1], c[2], c[3], -c[4], -c[5], -c[6], -c[7])


def norm2(m) -> float:
    """Squared norm, the sum of squared coefficients."""
    if isinstance(m, (int, float)):
        return float(m) * float(m)
    return m._norm2()


def norm(m) -> float:
    """``sqrt(<m m~>_0)``, the Euclidean norm of the coefficient tuple in G(3)."""
    return math.sqrt(norm2(m))


def grade(m, k: int):
    """Grade-``k`` part of ``m`` as the narrowest matching type."""
    if not isinstance(k, int) or isinstance(k, bool) or not 0 <= k <= 3:
        raise ValueError(f"grade index must be an integer in 0..3, got {k!r}")
    c = as_multivector(m).coeffs() if isinstance(m, (int, float)) else m.coeffs()
    if k == 0:
        return Even(c[0], 0.0, 0.0, 0.0)
    if k == 1:
        return Vector(c[1], c[2], c[3])
    if k == 2:
        return Bivector(c[4], c[5], c[6])
    return Odd(0.0, 0.0, 0.0, c[7])


def scalar_part(m) -> float:
    if isinstance(m, (int, float)):
        return float(m)
    return m.coeffs()[0]


def commutator(a, b):
    """Commutator product ``(ab - ba) / 2``."""
    return (geometric_product(a, b) - geometric_product(b, a)).scaled(0.5)


def _grade_parts(m):
    c = m.coeffs() if isinstance(m, _Blade) else as_multivector(m).coeffs()
    return {
        0: Multivector(s=c[0]),
        1: Multivector(v1=c[1], v2=c[2], v3=c[3]),
        2: Multivector(b12=c[4], b23=c[5], b31=c[6]),
        3: Multivector(t=c[7]),
    }


def left_contraction(a, b) -> Multivector:
    """Left contraction ``a _| b``: sum of ``<<a>_j <b>_k>_(k-j)`` for ``k >= j``."""
    pa, pb = _grade_parts(a), _grade_parts(b)
    acc = Multivector()
    for j in range(4):
        for k in range(j, 4):
            acc = acc + as_multivector(grade(geometric_product(pa[j], pb[k]), k - j))
    return acc


def inverse(m):
    """Inverse of a blade or versor: ``m~ / <m m~>_0``."""
    d = scalar_part(geometric_product(m, reverse(m)))
    if math.sqrt(abs(d)) <= SINGULAR_BLADE_TOL:
        raise SingularBladeError("element is not invertible")
    return reverse(m).scaled(1.0 / d)


def project(m, blade) -> Multivector:
    """Projection ``(m _| B) B^-1`` of ``m`` onto the subspace of blade ``B``."""
    if norm(blade) <= SINGULAR_BLADE_TOL:
        raise SingularBladeError("cannot project onto a blade of zero norm")
    return as_multivector(geometric_product(left_contraction(m, blade), inverse(blade)))


def dot(a: Vector, b: Vector) -> float:
    return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3


def cross(a: Vector, b: Vector) -> Vector:
    return Vector(a.x2 * b.x3 - a.x3 * b.x2, a.x3 * b.x1 - a.x1 * b.x3, a.x1 * b.x2 - a.x2 * b.x1)


def normalize(m):
    n = norm(m)
    if n == 0.0:
        raise GAError("cannot normalize the zero element")
    if type(m) is Rotor:
        return m
    if isinstance(m, Even):
        return Rotor(m.s / n, m.b12 / n, m.b23 / n, m.b31 / n)
    return m.scaled(1.0 / n)


def exp_bivector(b: Bivector) -> Rotor:
    """``cos|b| + sin|b| b/|b|``; the identity for ``b = 0``."""
    theta = math.sqrt(b.b12 * b.b12 + b.b23 * b.b23 + b.b31 * b.b31)
    if theta < 1e-8:
        k = 1.0 - theta * theta / 6.0
    else:
        k = math.sin(theta) / theta
    return Rotor(math.cos(theta), k * b.b12, k * b.b23, k * b.b31)


def log_rotor(r) -> Bivector:
    """Bivector angle ``j theta`` with ``exp_bivector(-j theta / 2) = r``.

    The half angle is ``atan2(|<r>_2|, <r>_0)``, which equals ``acos(<r>_0)``
    for unit rotors but keeps full precision near the identity. Returns zero
    when ``|<r>_2| < LOG_DEGENERATE_TOL``.
    """
    nb = math.sqrt(r.b12 * r.b12 + r.b23 * r.b23 + r.b31 * r.b31)
    if nb < LOG_DEGENERATE_TOL:
        return Bivector(0.0, 0.0, 0.0)
    k = -2.0 * math.atan2(nb, r.s) / nb
    return Bivector(k * r.b12, k * r.b23, k * r.b31)


def rotate(r, m):
    """Sandwich ``r m r~``; the result has the same type as ``m``."""
    if isinstance(m, (int, float)):
        return m
    rq = r._q()
    rr = (rq[0], -rq[1], -rq[2], -rq[3])
    tm = type(m)
    if tm is Vector:
        q = _oe(_eo(rq, m._q()), rr)
        return Vector(q[0], q[1], q[2])
    if tm is Bivector:
        q = _ee(_ee(rq, m._q()), rr)
        return Bivector(q[1], q[2], q[3])
    if tm is Odd:
        return Odd(*_oe(_eo(rq, m._q()), rr))
    if tm is Even or tm is Rotor:
        return tm(*_ee(_ee(rq, m._q()), rr))
    rm = (rq[0], 0.0, 0.0, 0.0, rq[1], rq[2], rq[3], 0.0)
    rrm = (rr[0], 0.0, 0.0, 0.0, rr[1], rr[2], rr[3], 0.0)
    return Multivector(*_full(_full(rm, m.coeffs()), rrm))


def _check_unit(m, what="element"):
    n = norm(m)
    if abs(n - 1.0) > ROTOR_NORM_TOL:
        raise NonUnitRotorError(f"{what} has norm {n!r}, expected 1")


def even_power(m, p: float) -> Rotor:
    """Real power of a unit even element, ``exp(p log m)``.

    ``m = cos(a) + sin(a) B^`` with ``a`` in ``[0, pi]`` maps to
    ``cos(p a) + sin(p a) B^``. Elements within ``ANTIPODAL_TOL`` of -1 sit on
    the branch cut, where the plane ``B^`` is undefined.
    """
    _check_unit(m, "even_power base")
    s, b12, b23, b31 = m.s, m.b12, m.b23, m.b31
    nb = math.sqrt(b12 * b12 + b23 * b23 + b31 * b31)
    if 1.0 + s < ANTIPODAL_TOL:
        raise BranchCutError("even_power of an element at -1 is ambiguous")
    alpha = math.atan2(nb, s)
    k = math.sin(p * alpha) / nb if nb > 0.0 else 0.0
    return Rotor(math.cos(p * alpha), k * b12, k * b23, k * b31)


def rotor_between(a: Vector, b: Vector) -> Rotor:
    """Rotor ``R`` with ``R a R~ = b``, computed as ``(a b)^(-1/2)``."""
    _check_unit(a, "rotor_between input")
    _check_unit(b, "rotor_between input")
    if 1.0 + dot(a, b) < ANTIPODAL_TOL:
        raise AntipodalAlignmentError(a, b)
    return even_power(geometric_product(a, b), -0.5)


def allclose(a, b, atol: float = 1e-12, rtol: float = 0.0) -> bool:
    ca = as_multivector(a).coeffs() if isinstance(a, (int, float)) else a.coeffs()
    cb = as_multivector(b).coeffs() if isinstance(b, (int, float)) else b.coeffs()
    return all(abs(x - y) <= atol + rtol * abs(y) for x, y in zip(ca, cb))
