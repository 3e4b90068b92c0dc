from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from attractors.algebra import GramLattice, QuadNumber
from attractors.errors import DegenerateCoefficients, DependentVectors, NoAttractor
from attractors.k3 import (
    MukaiVector,
    kahler_rigidity,
    mukai_pair,
    rank2_omega,
    solve_complex_exs,
    solve_kahler_exs,
)
from attractors.verify import random_mukai_pair, random_ns_lattice, random_pd_gram2

I = QuadNumber.i()


def rank1(n: int) -> GramLattice:
    return GramLattice([[2 * n]])


def mv(L, r, D, s) -> MukaiVector:
    return MukaiVector(r, tuple(D), s, L)


# -- Mukai pairing ------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3])
def test_mukai_examples(n):
    L = rank1(n)
    v = mv(L, 1, (0,), -n)
    w = mv(L, 0, (-1,), 0)
    assert mukai_pair(v, v) == 2 * n
    assert mukai_pair(mv(L, 0, (1,), 0), mv(L, 0, (1,), 0)) == 2 * n
    assert mukai_pair(v, w) == 0


def test_mukai_pair_symmetric_and_lattice_checked(rng):
    L = GramLattice([[2, 1], [1, -4]])
    for _ in range(50):
        a = MukaiVector.from_coords([int(x) for x in rng.integers(-5, 6, 4)], L)
        b = MukaiVector.from_coords([int(x) for x in rng.integers(-5, 6, 4)], L)
        assert mukai_pair(a, b) == mukai_pair(b, a)
    with pytest.raises(ValueError):
        mukai_pair(mv(L, 1, (0, 0), 0), mv(rank1(1), 1, (0,), 0))


def test_mukai_json_round_trip():
    L = rank1(2)
    v = mv(L, 1, (Fraction(1, 2),), -3)
    assert MukaiVector.from_json(v.to_json(), L) == v


# -- complex side -------------------------------------------------------------------

def test_complex_exs_square_lattice():
    a = solve_complex_exs(GramLattice([[2, 0], [0, 2]]), (1, 0), (0, 1))
    assert a.tau == I
    assert np.allclose(a.omega(), [-1, 1j])
    assert a.omega_square() == 0 and a.omega_norm() == 4


def test_complex_exs_hexagonal_lattice():
    a = solve_complex_exs(GramLattice([[2, 1], [1, 2]]), (1, 0), (0, 1))
    assert a.D == 3
    assert a.tau == (1 + QuadNumber.sqrt_neg(3)) / 2


def test_complex_exs_errors():
    with pytest.raises(NoAttractor):
        solve_complex_exs(GramLattice([[-2, 0], [0, -2]]), (1, 0), (0, 1))
    with pytest.raises(DependentVectors):
        solve_complex_exs(GramLattice([[2, 0], [0, 2]]), (1, 1), (2, 2))


def test_complex_exs_hodge_riemann(rng):
    for _ in range(100):
        L = random_pd_gram2(rng)
        a = solve_complex_exs(L, (1, 0), (0, 1))
        assert a.omega_square() == 0
        assert a.omega_norm() > 0
        assert a.tau.b > 0


def test_basis_change_moves_tau_and_keeps_line(rng):
    L = GramLattice([[4, 1], [1, 6]])
    u1, u2 = np.array([1, 0]), np.array([0, 1])
    a = solve_complex_exs(L, u1, u2)
    for a_, b_, c_, d_ in [(1, 1, 0, 1), (0, 1, -1, 0), (2, 1, 1, 1), (3, 2, 1, 1)]:
        b = solve_complex_exs(L, a_ * u1 + b_ * u2, c_ * u1 + d_ * u2)
        assert b.tau == (d_ * a.tau + c_) / (b_ * a.tau + a_)
        w, v = a.w, b.w
        assert w[0] * v[1] - w[1] * v[0] == 0


# -- rank-2 helper --------------------------------------------------------------------

def test_rank2_omega_examples():
    assert rank2_omega(1, I, (1, 0), (0, 1)) == [1, -I]
    with pytest.raises(DegenerateCoefficients):
        rank2_omega(1, 1, (1, 0), (0, 1))
    assert rank2_omega(3, 3 * I, (1, 0), (0, 1)) == [Fraction(1, 3), -I / 3]


def test_rank2_omega_solves_both_equations(rng):
    from attractors.algebra import re

    for _ in range(50):
        C1 = QuadNumber(int(rng.integers(-4, 5)), int(rng.integers(-4, 5)), 3)
        C2 = QuadNumber(int(rng.integers(-4, 5)), int(rng.integers(-4, 5)), 3)
        if (C1 * C2.conjugate()).b == 0:
            continue
        g1 = [int(x) for x in rng.integers(-5, 6, 3)]
        g2 = [int(x) for x in rng.integers(-5, 6, 3)]
        om = rank2_omega(C1, C2, g1, g2)
        assert [re(C1 * x) for x in om] == g1
        assert [re(C2 * x) for x in om] == g2


# -- Kähler side ----------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_rigid_kahler_example(n):
    L = rank1(n)
    v1, v2 = mv(L, 1, (0,), -n), mv(L, 0, (-1,), 0)
    k = solve_kahler_exs(v1, v2)
    assert k.omega_E == I
    assert k.omega_S == (I,)
    assert k.delta == mv(L, 1, (I,), -n)
    assert k.C == 1
    assert all(x == 0 for x in k.residual(v1, v2))


def test_anti_kahler_positive_square():
    L = rank1(1)
    k = solve_kahler_exs(mv(L, 1, (0,), -1), mv(L, 0, (1,), 0))
    assert k.omega_S == (-I,)
    assert k.imag_omega_S_square() == 2


def test_kahler_exs_errors():
    L = rank1(1)
    v = mv(L, 1, (0,), -1)
    with pytest.raises(DependentVectors):
        solve_kahler_exs(v, 2 * v)
    with pytest.raises(NoAttractor):
        solve_kahler_exs(mv(L, 1, (0,), 1), mv(L, 0, (1,), 0))
    P = GramLattice([[2, 0], [0, 2]])
    with pytest.raises(DegenerateCoefficients):
        solve_kahler_exs(mv(P, 0, (1, 0), 0), mv(P, 0, (0, 1), 0))


def test_delta_exponential_and_positive_cone(rng):
    for _ in range(100):
        v1, v2 = random_mukai_pair(rng, random_ns_lattice(rng))
        k = solve_kahler_exs(v1, v2)
        assert k.delta.r == 1
        assert k.delta_square() == 0
        assert k.exponential_defect() == 0
        assert k.imag_omega_S_square() > 0
        assert all(x == 0 for x in k.residual(v1, v2))


def test_positive_cone_proportionality(rng):
    for _ in range(100):
        L = random_ns_lattice(rng)
        v1, v2 = random_mukai_pair(rng, L)
        k = solve_kahler_exs(v1, v2)
        d = [v2.r * a - v1.r * b for a, b in zip(v1.D, v2.D)]
        ratio = Fraction(k.imag_omega_S_square()) / L.norm(d)
        assert ratio > 0


def test_positive_cone_normalization_example():
    L = rank1(1)
    k = solve_kahler_exs(mv(L, 2, (0,), -1), mv(L, 0, (1,), 0))
    assert k.imag_omega_S_square() == 1


# -- rigidity -------------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_rigidity_of_ih(n):
    L = rank1(n)
    r = kahler_rigidity(L, (0,), 1, (1,))
    assert r.rigid and r.m == 1 and r.n == 1
    assert r.generators == (mv(L, 1, (0,), -n), mv(L, 0, (1,), 0))


def test_rigidity_half_b():
    L = rank1(1)
    r = kahler_rigidity(L, (Fraction(1, 2),), 1, (1,))
    assert r.re_part == mv(L, 1, (Fraction(1, 2),), Fraction(-3, 4))
    assert r.im_part == mv(L, 0, (1,), 1)
    assert r.m == 4 and r.n == 1


def test_rigidity_irrational_cases():
    L = rank1(1)
    r = kahler_rigidity(L, (0,), 2 ** 0.5, (1,))
    assert not r.rigid and r.generators is None and r.witness
    assert not kahler_rigidity(L, (0.3,), 1, (1,)).rigid
    r = kahler_rigidity(L, (0,), 2, (1,))
    assert r.rigid and r.im_scale == "sqrt(2)"
    with pytest.raises(ValueError):
        kahler_rigidity(L, (0,), -1, (1,))
