from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from attractors.algebra import QuadNumber, det3, exact_array, is_positive_definite
from attractors.errors import AsymmetricCharge, NoAttractor
from attractors.torus import (
    Branch,
    KahlerTorusCharge,
    SiegelPoint,
    invariants,
    mirror_cover,
    mirror_real_part,
    p0_zero_system,
    residual,
    solve_complex_general,
    solve_complex_symmetric,
    solve_kahler,
    solve_p0_zero_float,
    to_complex,
)
from attractors.verify import random_admissible_symmetric, random_charge

from conftest import I3, Z3, charge

I = QuadNumber.i()


def iI(k=1):
    return exact_array(I3) * (k * I)


def same(A, B) -> bool:
    return bool(np.all(np.asarray(A) == np.asarray(B)))


# -- invariants ---------------------------------------------------------------------

@pytest.mark.parametrize(
    "c, R, M, D",
    [
        (charge(1, Z3, I3, 0), I3, 0, 4),
        (charge(1, I3, I3, -1), 2 * I3, 4, 16),
        (charge(1, Z3, Z3, 1), Z3, 1, -1),
    ],
)
def test_invariant_examples(c, R, M, D):
    inv = invariants(c)
    assert same(inv.R, R)
    assert inv.M == M and inv.D == D
    assert inv.rmd_defect(c.p0) == 0


def test_rmd_with_singular_p(rng):
    for k in range(300):
        c = random_charge(rng, singular_P=True)
        assert det3(c.P) == 0
        assert invariants(c).rmd_defect(c.p0) == 0


def test_invariants_match_sympy(rng):
    for _ in range(20):
        c = random_charge(rng, -4, 4)
        P = sp.Matrix(c.P.tolist())
        Q = sp.Matrix(c.Q.tolist())
        p0, q0 = sp.Integer(c.p0), sp.Integer(c.q0)
        t = (P.T * Q).trace()
        R = P.adjugate().T + p0 * Q
        M = 2 * P.det() + p0**2 * q0 + p0 * t
        D = 2 * (t**2 - ((P.T * Q) ** 2).trace()) - (p0 * q0 + t) ** 2 + 4 * (p0 * Q.det() - q0 * P.det())
        inv = invariants(c)
        assert same(inv.R, np.array(R.tolist(), dtype=object))
        assert inv.M == M and inv.D == D


# -- complex solvers ----------------------------------------------------------------

def test_general_unit_charge(unit_charge):
    plus, minus = solve_complex_general(unit_charge)
    assert plus.branch is Branch.PLUS_GENERAL and minus.branch is Branch.MINUS_GENERAL
    assert plus.C == 1 and minus.C == 1
    assert same(plus.A, iI(-1)) and same(minus.A, iI())
    for s in (plus, minus):
        assert residual(unit_charge, s.C, s.A) == (0, 0, 0, 0)


def test_general_p0_zero():
    c = charge(0, I3, Z3, -1)
    plus, minus = solve_complex_general(c)
    assert plus.C == I and same(plus.A, iI(-1))
    assert minus.C == -I and same(minus.A, iI())
    for s in (plus, minus):
        assert residual(c, s.C, s.A) == (0, 0, 0, 0)


def test_general_no_attractor():
    with pytest.raises(NoAttractor):
        solve_complex_general(charge(1, Z3, -I3, 0))


def test_symmetric_examples(unit_charge, moore_charge):
    s = solve_complex_symmetric(unit_charge)
    assert s.branch is Branch.SYMMETRIC and s.C == 1 and same(s.A, iI())
    s = solve_complex_symmetric(moore_charge)
    assert s.C == 1 - I and same(s.A, iI())
    assert residual(moore_charge, s.C, s.A) == (0, 0, 0, 0)


def test_symmetric_errors():
    with pytest.raises(NoAttractor):
        solve_complex_symmetric(charge(1, Z3, -I3, 0))
    P = np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0]])
    with pytest.raises(AsymmetricCharge):
        solve_complex_symmetric(charge(1, P, I3, 0))
    with pytest.raises(ValueError):
        solve_complex_symmetric(charge(0, Z3, Z3, 0))


def test_residual_detects_wrong_scale(unit_charge):
    # Re(2iI) = 0 = P and Re(det 2iI) = 0 = q0; only Re Cof(2iI) = -4I misses -Q
    assert residual(unit_charge, 1, iI(2)) == (0, 0, 3, 0)


def test_symmetric_output_in_siegel_space(rng):
    for _ in range(30):
        c = random_admissible_symmetric(rng)
        s = solve_complex_symmetric(c)
        SiegelPoint(s.A)  # raises unless symmetric with positive-definite imaginary part
        assert residual(c, s.C, s.A) == (0, 0, 0, 0)


def test_sign_flip_equivariance(rng):
    for _ in range(30):
        c = random_admissible_symmetric(rng)
        s = solve_complex_symmetric(c)
        t = solve_complex_symmetric(-c)
        assert same(s.A, t.A)
        assert t.C == -s.C


def test_float_backend_residual(rng):
    for _ in range(50):
        c = random_admissible_symmetric(rng)
        s = solve_complex_symmetric(c, exact=False)
        assert max(residual(c.as_float(), s.C, s.A)) < 1e-12
        ex = solve_complex_symmetric(c)
        assert np.allclose(s.A, to_complex(ex.A), atol=1e-12)


def test_general_pair_conjugate_when_m_vanishes(unit_charge):
    plus, minus = solve_complex_general(unit_charge)
    assert invariants(unit_charge).M == 0
    assert same(np.vectorize(lambda z: z.conjugate() if isinstance(z, QuadNumber) else z, otypes=[object])(plus.A), minus.A)


def test_general_branches_opposite_definiteness(rng):
    seen = 0
    for _ in range(400):
        c = random_charge(rng, -3, 3)
        inv = invariants(c)
        if c.is_zero() or not (det3(inv.R) > 0 and inv.D > 0):
            continue
        plus, minus = solve_complex_general(c, exact=False)
        ep = np.linalg.eigvals(plus.A.imag)
        em = np.linalg.eigvals(minus.A.imag)
        assert np.linalg.matrix_rank(plus.A.imag) == 3 and np.linalg.matrix_rank(minus.A.imag) == 3
        assert np.sign(np.prod(ep).real) == -np.sign(np.prod(em).real)
        seen += 1
    assert seen > 10


# -- p0 = 0 branch -------------------------------------------------------------------

def test_p0_zero_system_first_row():
    P = np.arange(1, 10).reshape(3, 3)
    K = p0_zero_system(exact_array(P))
    P22, P23, P32, P33 = P[1, 1], P[1, 2], P[2, 1], P[2, 2]
    assert list(K[0]) == [0, 0, 0, 0, P33, -P32, 0, -P23, P22]


def test_p0_zero_determinant_against_sympy(rng):
    Y = sp.Matrix(3, 3, sp.symbols("y0:9"))
    for _ in range(5):
        P = rng.integers(-4, 5, size=(3, 3))
        Ps = sp.Matrix(P.tolist())
        lhs = (Ps + Y).adjugate().T - Ps.adjugate().T - Y.adjugate().T
        K = sp.Matrix([[sp.diff(lhs[r // 3, r % 3], Y[c // 3, c % 3]) for c in range(9)] for r in range(9)])
        ours = p0_zero_system(exact_array(P))
        assert same(ours, np.array(K.tolist(), dtype=object))
        assert det3(exact_array(P)) ** 3 * -2 == K.det()


def test_p0_zero_determinant_identity(rng):
    for _ in range(200):
        P = exact_array(rng.integers(-9, 10, size=(3, 3)))
        K = sp.Matrix(p0_zero_system(P).tolist())
        assert K.det() == -2 * det3(P) ** 3


def test_p0_zero_float_matches_closed_form(rng):
    checked = 0
    for _ in range(400):
        c = random_charge(rng, -3, 3)
        c = charge(0, c.P, c.Q, c.q0)
        inv = invariants(c)
        if det3(c.P) == 0 or not (det3(inv.R) > 0 and inv.D > 0):
            continue
        closed = solve_complex_general(c, exact=False)
        linear = solve_p0_zero_float(c)
        for s in closed:
            assert any(abs(C - s.C) < 1e-9 and np.allclose(A, s.A, atol=1e-9) for C, A in linear)
        checked += 1
    assert checked > 5


# -- Kähler side and mirror ------------------------------------------------------------

@pytest.mark.parametrize("p", [(1, Z3, I3, 0), (1, I3, I3, -1)])
def test_kahler_examples(p):
    k = KahlerTorusCharge(*p)
    a = solve_kahler(k)
    assert same(a.omega, iI())


def test_kahler_no_attractor():
    with pytest.raises(NoAttractor):
        solve_kahler(KahlerTorusCharge(1, Z3, -I3, 0))


def test_kahler_equals_complex(rng):
    for _ in range(50):
        c = random_admissible_symmetric(rng)
        k = KahlerTorusCharge(c.p0, c.P, c.Q, c.q0)
        assert same(solve_kahler(k).omega, solve_complex_symmetric(c).A)


@pytest.mark.parametrize("p, D, imag", [((1, Z3, I3, 0), 4, 1), ((1, I3, I3, -1), 16, 2)])
def test_mirror_cover_examples(p, D, imag):
    k = KahlerTorusCharge(*p)
    cover = mirror_cover(k, solve_kahler(k).omega)
    assert cover.D == D
    assert same(cover.omega_prime, iI(imag))
    assert same(mirror_real_part(k), Z3)


def test_mirror_cover_errors():
    k = KahlerTorusCharge(Fraction(1, 2), I3, I3, -1)
    with pytest.raises(ValueError):
        mirror_cover(k, exact_array(I3))
    with pytest.raises(NoAttractor):
        mirror_cover(KahlerTorusCharge(1, Z3, Z3, 1), exact_array(I3))


def test_mirror_real_part_dual_route(rng):
    for _ in range(30):
        c = random_admissible_symmetric(rng)
        k = KahlerTorusCharge(c.p0, c.P, c.Q, c.q0)
        cover = mirror_cover(k, solve_kahler(k).omega)
        real = np.vectorize(lambda z: z.a if isinstance(z, QuadNumber) else z, otypes=[object])(cover.omega_prime)
        assert same(real, mirror_real_part(k))
        assert is_positive_definite(cover.scale, exact=True)
