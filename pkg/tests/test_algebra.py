from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from attractors.algebra import (
    GramLattice,
    QuadNumber,
    Surd,
    cofactor,
    det3,
    exact_array,
    exact_det,
    exact_inverse,
    i_over_imag,
    inverse3,
    is_positive_definite,
    lcm_denominator,
    pair_discriminant,
    squarefree_part,
    trace,
)

I = QuadNumber.i()


def test_cofactor_examples():
    eye = exact_array(np.eye(3, dtype=np.int64))
    assert np.all(cofactor(eye) == eye)
    assert np.all(cofactor(I * eye) == -eye)
    D = exact_array(np.diag([1, 2, 3]))
    assert np.all(cofactor(D) == exact_array(np.diag([6, 3, 2])))


def test_det_trace_examples():
    eye = exact_array(np.eye(3, dtype=np.int64))
    assert det3(eye) == 1
    assert det3(I * eye) == -I
    assert trace(exact_array(np.diag([1, 2, 3]))) == 6


def test_adjugate_identity_int64_batch():
    rng = np.random.default_rng(0)
    A = rng.integers(-9, 10, size=(10_000, 3, 3))
    lhs = A @ np.swapaxes(cofactor(A), -1, -2)
    rhs = det3(A)[:, None, None] * np.eye(3, dtype=np.int64)
    assert np.array_equal(lhs, rhs)


def test_cofactor_matches_sympy_adjugate():
    rng = np.random.default_rng(1)
    for _ in range(50):
        A = rng.integers(-9, 10, size=(3, 3))
        S = sp.Matrix(A.tolist())
        assert np.array_equal(cofactor(A), np.array(S.adjugate().T.tolist(), dtype=np.int64))
        assert det3(A) == S.det()


def test_exact_inverse_and_det_agree_with_sympy():
    rng = np.random.default_rng(2)
    for _ in range(20):
        A = rng.integers(-5, 6, size=(4, 4))
        S = sp.Matrix(A.tolist())
        if S.det() == 0:
            continue
        assert exact_det(exact_array(A)) == S.det()
        inv = exact_inverse(exact_array(A))
        assert [[Fraction(int(x.p), int(x.q)) for x in row] for row in S.inv().tolist()] == inv.tolist()


def test_inverse3_exact():
    A = exact_array([[2, 1, 0], [1, 2, 1], [0, 1, 2]])
    assert np.all(A @ inverse3(A) == exact_array(np.eye(3, dtype=np.int64)))


@pytest.mark.parametrize(
    "S, expected",
    [
        (np.eye(3, dtype=np.int64), True),
        (np.diag([1, -1, 1]), False),
        (np.array([[2, 1], [1, 2]]), True),
        (np.array([[1, 2], [2, 1]]), False),
    ],
)
def test_is_positive_definite_examples(S, expected):
    assert is_positive_definite(S, exact=True) is expected
    assert is_positive_definite(S.astype(float), exact=False) is expected


def test_is_positive_definite_rejects_asymmetric():
    with pytest.raises(ValueError):
        is_positive_definite(np.array([[1, 2], [0, 1]]))
    with pytest.raises(ValueError):
        is_positive_definite(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_is_positive_definite_matches_eigenvalues():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        A = rng.integers(-3, 4, size=(3, 3))
        S = A + A.T
        eig = np.linalg.eigvalsh(S.astype(float))
        if np.min(np.abs(eig)) < 1e-9:
            continue
        want = bool(eig.min() > 0)
        assert is_positive_definite(S, exact=True) is want
        assert is_positive_definite(S.astype(float)) is want


def test_float_pivot_threshold():
    assert not is_positive_definite(np.diag([1.0, 1.0, 1e-13]))


def test_squarefree_and_normalization():
    assert squarefree_part(12) == (2, 3)
    assert squarefree_part(16) == (4, 1)
    assert QuadNumber(0, 1, 16) == QuadNumber(0, 4, 1)
    assert QuadNumber(3, 0, 7).d == 0
    assert QuadNumber.sqrt_neg(4) * QuadNumber.sqrt_neg(4) == -4


def test_quad_number_mixed_fields_rejected():
    with pytest.raises(ValueError):
        QuadNumber(0, 1, 2) + QuadNumber(0, 1, 3)
    # rationals combine with any field
    assert QuadNumber(0, 1, 2) + 1 == QuadNumber(1, 1, 2)


def test_i_over_imag_exact():
    # Im z = (2/5) sqrt 7, so i / Im z = (5/14) sqrt(-7)
    z = QuadNumber(3, Fraction(2, 5), 7)
    assert i_over_imag(z) == QuadNumber(0, Fraction(5, 14), 7)
    assert complex(i_over_imag(z)) == pytest.approx(1j / complex(z).imag)


def test_surd_ordering():
    assert Surd(2, 3) > 0
    assert Surd(-1, 5) < 0
    assert Surd(0, 5) == 0
    assert float(Surd(Fraction(1, 2), 4)) == pytest.approx(1.0)


def test_json_round_trip():
    q = QuadNumber(Fraction(-3, 7), Fraction(5, 2), 12)
    assert QuadNumber.from_json(q.to_json()) == q
    assert q.to_json() == {"a": "-3/7", "b": "5/1", "D": 3}


def test_lcm_denominator():
    assert lcm_denominator([Fraction(1, 2), Fraction(1, 3), 4]) == 6


def test_pair_discriminant_examples():
    L = GramLattice([[2, 0], [0, 2]])
    assert pair_discriminant(L, (1, 0), (0, 1)) == 4
    assert pair_discriminant(L, (1, 1), (1, 1)) == 0
    assert pair_discriminant(GramLattice([[2, 1], [1, 2]]), (1, 0), (0, 1)) == 3


def test_gram_lattice_validation():
    with pytest.raises(ValueError):
        GramLattice([[2, 1], [0, 2]])
    L = GramLattice([[2, -1], [-1, 2]])
    assert L.even and L.rank == 2 and L.signature() == (2, 0)
    assert GramLattice.from_json(L.to_json()) == L
    with pytest.raises(ValueError):
        L.pair((1, 0, 0), (1, 0))


rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
fields = st.sampled_from([1, 2, 3, 5, 7, 12])


@st.composite
def quads(draw, d=None):
    return QuadNumber(draw(rationals), draw(rationals), d if d is not None else draw(fields))


@settings(max_examples=200, deadline=None)
@given(fields.flatmap(lambda d: st.tuples(quads(d), quads(d), quads(d))))
def test_quad_number_is_a_field(xyz):
    x, y, z = xyz
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x
    if x != 0:
        assert x * x.inverse() == 1
        assert (y / x) * x == y
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()
    assert complex(x * y) == pytest.approx(complex(x) * complex(y), rel=1e-12, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(quads())
def test_quad_norm_is_product_with_conjugate(x):
    assert x * x.conjugate() == x.norm()
    assert x.norm() >= 0
