import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gatrack import ga3
from gatrack.ga3 import (
    E1, E2, E3, E12, E23, E31, I3, ONE, AntipodalAlignmentError, BranchCutError, Bivector,
    Even, Multivector, NonUnitRotorError, Odd, Rotor, SingularBladeError, Vector, allclose,
    commutator, even_power, exp_bivector, geometric_product, grade, inverse, log_rotor, norm,
    normalize, project, reverse, rotate, rotor_between, scalar_part,
)

from oracles import (
    cayley_abs_product, cayley_product, reverse8, rotation_matrix, sandwich8, series_exp,
)

EPS = np.finfo(float).eps
coef = st.floats(-1.0, 1.0, allow_nan=False)
mv_strategy = st.tuples(*[coef] * 8).map(lambda c: Multivector(*c))


def rand_mv(rng):
    return Multivector(*rng.uniform(-1, 1, 8).tolist())


def rand_rotor(rng):
    q = rng.standard_normal(4)
    return Rotor(*(q / np.linalg.norm(q)).tolist())


def rand_bivector(rng, scale=1.0):
    return Bivector(*(scale * rng.standard_normal(3)).tolist())


def c8(m):
    return list(m.coeffs())


# ---------------------------------------------------------------- products

class TestGeometricProduct:
    def test_basis_squares(self):
        # [TRIVIAL]
        for e in (E1, E2, E3):
            assert (e * e).coeffs() == Even(1.0).coeffs()

    def test_orthogonal_anticommute(self):
        # [TRIVIAL]
        assert (E1 * E2) == Even(0.0, 1.0, 0.0, 0.0)
        assert (E2 * E1) == Even(0.0, -1.0, 0.0, 0.0)

    def test_bivectors_square_to_minus_norm2(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            b = rand_bivector(rng)
            sq = b * b
            assert sq.s == pytest.approx(-norm(b) ** 2, rel=1e-14)
            assert max(abs(sq.b12), abs(sq.b23), abs(sq.b31)) < 1e-15

    def test_pseudoscalar_squares_to_minus_one(self):
        assert (I3 * I3) == Even(-1.0)

    def test_matches_cayley_oracle(self):
        # [DERIVED] independently built Cayley table, term by term
        rng = np.random.default_rng(11)
        for _ in range(2000):
            a, b = rand_mv(rng), rand_mv(rng)
            got = c8(geometric_product(a, b))
            want = cayley_product(c8(a), c8(b))
            bound = cayley_abs_product(c8(a), c8(b))
            for g, w, s in zip(got, want, bound):
                assert abs(g - w) <= 8 * EPS * s

    def test_vector_product_is_dot_plus_wedge(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            u = Vector(*rng.standard_normal(3).tolist())
            v = Vector(*rng.standard_normal(3).tolist())
            sym = (u * v + v * u).scaled(0.5)
            anti = (u * v - v * u).scaled(0.5)
            assert sym.s == pytest.approx(ga3.dot(u, v), abs=1e-13)
            assert norm(grade(sym, 2)) < 1e-14
            assert abs(anti.s) < 1e-14

    @pytest.mark.parametrize("ta,tb", [
        (Even, Even), (Even, Odd), (Odd, Even), (Odd, Odd),
        (Vector, Vector), (Bivector, Vector), (Rotor, Bivector), (Vector, Rotor),
    ])
    def test_split_kernels_bit_identical_to_full(self, ta, tb):
        rng = np.random.default_rng(17)

        def make(t):
            if t is Rotor:
                return rand_rotor(rng)
            return t(*rng.uniform(-1, 1, len(t._FIELDS)).tolist())

        for _ in range(500):
            a, b = make(ta), make(tb)
            fast = geometric_product(a, b).coeffs()
            full = ga3._full(a.coeffs(), b.coeffs())
            assert all(x == y for x, y in zip(fast, full))

    def test_rotor_times_rotor_stays_rotor(self):
        rng = np.random.default_rng(0)
        assert isinstance(rand_rotor(rng) * rand_rotor(rng), Rotor)

    @settings(max_examples=200, deadline=None)
    @given(mv_strategy, mv_strategy, mv_strategy, st.floats(-3, 3))
    def test_bilinear(self, a, b, c, k):
        lhs = geometric_product(a + b.scaled(k), c)
        rhs = geometric_product(a, c) + geometric_product(b, c).scaled(k)
        assert allclose(lhs, rhs, atol=1e-12)


# ---------------------------------------------------------------- reverse, norm, grade

class TestReverseNormGrade:
    def test_reverse_examples(self):
        # [TRIVIAL]
        m = Even(1.0) + E1
        assert reverse(m) == m
        assert reverse(E12) == Bivector(-1.0, 0.0, 0.0)
        assert reverse(I3) == Odd(0.0, 0.0, 0.0, -1.0)

    def test_reverse_of_product(self):
        rng = np.random.default_rng(2)
        for _ in range(500):
            a, b = rand_mv(rng), rand_mv(rng)
            assert allclose(reverse(a * b), reverse(b) * reverse(a), atol=1e-14)
            assert reverse(reverse(a)) == a

    def test_norm_examples(self):
        assert norm(Multivector()) == 0.0
        assert norm(E1.scaled(3.0) + E23.scaled(4.0)) == pytest.approx(5.0, rel=1e-15)
        assert norm(Rotor(0.6, 0.0, 0.8, 0.0)) == pytest.approx(1.0, abs=1e-15)

    def test_norm_matches_scalar_of_m_reverse_m(self):
        # [DERIVED] grade0(M M~) through the Cayley oracle
        rng = np.random.default_rng(8)
        for _ in range(500):
            m = rand_mv(rng)
            oracle = math.sqrt(cayley_product(c8(m), reverse8(c8(m)))[0])
            assert norm(m) == pytest.approx(oracle, rel=1e-14)

    def test_grade_examples(self):
        m = Even(1.0) + E1 + E12
        assert grade(m, 1) == E1
        r = Rotor(0.6, 0.0, 0.8, 0.0)
        assert grade(r, 2) == Bivector(0.0, 0.8, 0.0)

    def test_grade_partition(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            m = rand_mv(rng)
            total = grade(m, 0) + grade(m, 1) + grade(m, 2) + grade(m, 3)
            assert total == m

    @pytest.mark.parametrize("k", [-1, 4, 1.5, True])
    def test_grade_out_of_range(self, k):
        with pytest.raises(ValueError):
            grade(E1, k)


# ---------------------------------------------------------------- commutator, projection

class TestCommutatorProject:
    def test_examples(self):
        # [DERIVED] expanded by hand: e12 e23 = -e31, e23 e12 = e31
        assert commutator(E12, E23) == Bivector(0.0, 0.0, -1.0)
        rng = np.random.default_rng(1)
        m = rand_mv(rng)
        assert norm(commutator(m, m)) == 0.0
        assert norm(commutator(Even(2.5), m)) == 0.0

    def test_antisymmetric(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            a, b = rand_mv(rng), rand_mv(rng)
            assert allclose(commutator(a, b), -commutator(b, a), atol=1e-15)

    def test_project_examples(self):
        assert allclose(project(E1 + E2, E1), E1)
        assert norm(project(E3, E12)) == 0.0
        v = Vector(1.0, 2.0, 3.0)
        assert allclose(project(v, E12), Vector(1.0, 2.0, 0.0), atol=1e-15)

    def test_project_idempotent(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            m = rand_mv(rng)
            u = Vector(*rng.standard_normal(3).tolist())
            w = Vector(*rng.standard_normal(3).tolist())
            blade = grade(u * w, 2)
            once = project(m, blade)
            assert allclose(project(once, blade), once, atol=1e-12)

    def test_singular_blade(self):
        with pytest.raises(SingularBladeError):
            project(E1, Bivector(1e-13, 0.0, 0.0))
        with pytest.raises(SingularBladeError):
            inverse(Multivector())


# ---------------------------------------------------------------- exp / log

class TestExpLog:
    def test_exp_examples(self):
        assert exp_bivector(Bivector()) == ONE
        r = exp_bivector(E12.scaled(-math.pi / 4))
        assert allclose(r, Even(math.cos(math.pi / 4), -math.sin(math.pi / 4)), atol=1e-16)

    def test_exp_matches_power_series(self):
        # [DERIVED] series through order 24 with the Cayley product
        rng = np.random.default_rng(12)
        for _ in range(300):
            b = rand_bivector(rng)
            b = b.scaled(rng.uniform(0, math.pi) / norm(b))
            want = series_exp(c8(b))
            got = c8(exp_bivector(b))
            assert max(abs(x - y) for x, y in zip(got, want)) < 1e-12

    def test_exp_small_angle_branch(self):
        b = Bivector(3e-9, -1e-9, 2e-9)
        want = series_exp(c8(b), order=4)
        assert allclose(exp_bivector(b), Multivector(*want), atol=1e-18)

    def test_log_examples(self):
        assert log_rotor(ONE) == Bivector()
        e2e3 = Rotor(0.0, 0.0, 1.0, 0.0)
        jt = log_rotor(e2e3)
        assert allclose(jt, E23.scaled(-math.pi), atol=1e-15)
        assert allclose(exp_bivector(jt.scaled(-0.5)), e2e3, atol=1e-15)

    def test_log_exp_roundtrip(self):
        # [DERIVED] roundtrip oracle for |b| in (1e-6, 2 pi - 1e-2)
        rng = np.random.default_rng(13)
        for _ in range(2000):
            d = rand_bivector(rng)
            b = d.scaled(rng.uniform(1e-6, 2 * math.pi - 1e-2) / norm(d))
            back = log_rotor(exp_bivector(b.scaled(-0.5)))
            assert norm(back - b) < 1e-9

    def test_log_is_acos_form_for_unit_rotors(self):
        rng = np.random.default_rng(14)
        for _ in range(500):
            r = rand_rotor(rng)
            nb = math.sqrt(r.b12 ** 2 + r.b23 ** 2 + r.b31 ** 2)
            want = Bivector(r.b12, r.b23, r.b31).scaled(-2 * math.acos(r.s) / nb)
            assert allclose(log_rotor(r), want, atol=1e-9)


# ---------------------------------------------------------------- rotation

class TestRotate:
    def test_identity_and_quarter_turn(self):
        rng = np.random.default_rng(0)
        m = rand_mv(rng)
        assert rotate(ONE, m) == m
        assert allclose(rotate(exp_bivector(E12.scaled(-math.pi / 4)), E1), E2, atol=1e-15)

    def test_frame_is_orthonormal(self):
        # [DERIVED] orthonormality oracle, checked against the Cayley sandwich matrix
        rng = np.random.default_rng(15)
        for _ in range(300):
            r = rand_rotor(rng)
            cols = np.array([list(rotate(r, e)) for e in (E1, E2, E3)]).T
            assert np.allclose(cols.T @ cols, np.eye(3), atol=1e-14)
            assert np.allclose(cols, rotation_matrix(r), atol=1e-15)
            assert np.linalg.det(cols) == pytest.approx(1.0, abs=1e-14)

    def test_preserves_grade_and_norm(self):
        rng = np.random.default_rng(16)
        for _ in range(300):
            r = rand_rotor(rng)
            m = rand_mv(rng)
            out = rotate(r, m)
            assert norm(out) == pytest.approx(norm(m), rel=1e-12)
            for k in range(4):
                assert norm(grade(out, k)) == pytest.approx(norm(grade(m, k)), rel=1e-12, abs=1e-15)
            assert type(rotate(r, E1)) is Vector
            assert type(rotate(r, E12)) is Bivector

    def test_matches_cayley_sandwich(self):
        rng = np.random.default_rng(18)
        for _ in range(300):
            r = rand_rotor(rng)
            m = rand_mv(rng)
            want = sandwich8([r.s, 0, 0, 0, r.b12, r.b23, r.b31, 0], c8(m))
            assert np.allclose(c8(rotate(r, m)), want, atol=1e-14)

    def test_composition_and_linearity(self):
        rng = np.random.default_rng(19)
        for _ in range(300):
            r1, r2 = rand_rotor(rng), rand_rotor(rng)
            a, b = rand_mv(rng), rand_mv(rng)
            assert allclose(rotate(r1, rotate(r2, a)), rotate(r1 * r2, a), atol=1e-12)
            assert allclose(rotate(r1, a + b), rotate(r1, a) + rotate(r1, b), atol=1e-14)


# ---------------------------------------------------------------- rotors

class TestRotorConstruction:
    def test_renormalizes_small_drift(self):
        r = Rotor(1.0 + 5e-7, 0.0, 0.0, 0.0)
        assert norm(r) == pytest.approx(1.0, abs=1e-15)

    def test_rejects_gross_error(self):
        with pytest.raises(NonUnitRotorError):
            Rotor(1.1, 0.0, 0.0, 0.0)

    def test_rotor_times_reverse_is_one(self):
        rng = np.random.default_rng(20)
        for _ in range(200):
            r = rand_rotor(rng)
            assert allclose(r * reverse(r), ONE, atol=1e-15)

    def test_normalize(self):
        assert isinstance(normalize(Even(2.0, 0.0, 0.0, 0.0)), Rotor)
        assert allclose(normalize(Vector(3.0, 0.0, 4.0)), Vector(0.6, 0.0, 0.8), atol=1e-15)
        with pytest.raises(ga3.GAError):
            normalize(Vector())

    def test_tolerances_exposed(self):
        assert ga3.ROTOR_NORM_TOL == 1e-9
        assert ga3.ANTIPODAL_TOL == 1e-8
        assert ga3.LOG_DEGENERATE_TOL == 1e-12
        assert ga3.SINGULAR_BLADE_TOL == 1e-12


class TestRotorBetween:
    def test_examples(self):
        assert allclose(rotor_between(E3, E3), ONE, atol=1e-16)
        r = rotor_between(E3, E1)
        assert allclose(r, exp_bivector(E31.scaled(-math.pi / 4)), atol=1e-15)
        assert allclose(rotate(r, E3), E1, atol=1e-15)

    def test_antipodal(self):
        with pytest.raises(AntipodalAlignmentError) as info:
            rotor_between(E3, -E3)
        assert info.value.pair[0] == E3

    def test_rejects_non_unit(self):
        with pytest.raises(NonUnitRotorError):
            rotor_between(E3.scaled(1.01), E1)

    def test_random_pairs_against_shortcut(self):
        # [DERIVED] normalize(1 + b a) is the same rotor by a different route
        rng = np.random.default_rng(21)
        for _ in range(1000):
            a = Vector(*(v := rng.standard_normal(3) / 1.0) / np.linalg.norm(v))
            b = Vector(*(w := rng.standard_normal(3)) / np.linalg.norm(w))
            if 1 + ga3.dot(a, b) < 1e-3:
                continue
            r = rotor_between(a, b)
            assert norm(rotate(r, a) - b) < 1e-10
            shortcut = normalize(Even(1.0) + b * a)
            assert allclose(r, shortcut, atol=1e-12)


class TestEvenPower:
    def test_examples(self):
        for p in (-2.0, -0.5, 0.3, 7.0):
            assert allclose(even_power(ONE, p), ONE)
        e1e2 = Rotor(0.0, 1.0, 0.0, 0.0)
        assert allclose(even_power(e1e2, 2.0), Even(-1.0), atol=1e-15)

    def test_cube_root(self):
        # [DERIVED] repeated geometric products recover the base
        rng = np.random.default_rng(22)
        for _ in range(500):
            m = rand_rotor(rng)
            if 1.0 + m.s < 1e-3:
                continue
            c = even_power(m, 1.0 / 3.0)
            assert allclose(c * c * c, m, atol=1e-13)
            assert allclose(even_power(m, 1.0), m, atol=1e-15)
            h = even_power(m, -0.5)
            assert allclose(h * h * m, ONE, atol=1e-13)

    def test_errors(self):
        with pytest.raises(NonUnitRotorError):
            even_power(Even(2.0), 0.5)
        with pytest.raises(BranchCutError):
            even_power(Even(-1.0), 0.5)


def test_scalar_part_and_invert_operator():
    assert scalar_part(Even(2.0, 1.0)) == 2.0
    assert ~E12 == reverse(E12)
