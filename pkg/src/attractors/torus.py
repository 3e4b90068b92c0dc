"""Closed-form complex and Kähler attractors on the 6-torus.

A charge is ``(p0, P, Q, q0)`` with ``P, Q`` real 3x3 matrices.  We look for a
complex scalar ``C`` and a complex 3x3 matrix ``A`` with

    Re(C) = p0,  Re(C A) = P,  Re(C Cof(A)) = -Q,  Re(C det A) = q0.

Everything is driven by three invariants of the charge::

    R = Cof(P) + p0 Q
    M = 2 det P + p0**2 q0 + p0 tr(P^T Q)
    D = 2((tr P^T Q)**2 - tr((P^T Q)**2)) - (p0 q0 + tr P^T Q)**2
        + 4 (p0 det Q - q0 det P)

with ``4 det R - M**2 == p0**2 D``.  Solutions exist on the general branch iff
``det R > 0`` and ``D > 0``; they lie in the Siegel upper half-space iff in
addition ``P, Q`` are symmetric and ``R`` is positive definite.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import (
    QuadNumber,
    cofactor,
    det3,
    exact_array,
    imag_coefficients,
    inverse3,
    is_positive_definite,
    is_symmetric,
    lcm_denominator,
    re,
    real_part,
    to_exact,
    trace,
)
from .errors import AsymmetricCharge, DomainError, NoAttractor

__all__ = [
    "TorusCharge",
    "KahlerTorusCharge",
    "AttractorInvariants",
    "AttractorSolution",
    "Branch",
    "SiegelPoint",
    "KahlerAttractor",
    "MirrorCover",
    "invariants",
    "solve_complex_general",
    "solve_complex_symmetric",
    "solve_kahler",
    "mirror_cover",
    "residual",
    "sqrt_neg",
    "p0_zero_system",
    "solve_p0_zero_float",
]

I3 = np.eye(3, dtype=np.int64)


def _matrix(M, exact: bool) -> np.ndarray:
    if exact:
        A = exact_array(M)
    else:
        A = np.asarray(M, dtype=float)
    if A.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {A.shape}")
    return A


def _identity(exact: bool) -> np.ndarray:
    return exact_array(I3) if exact else np.eye(3)


def _all_exact(*xs) -> bool:
    for x in xs:
        arr = np.asarray(x, dtype=object).ravel()
        for v in arr:
            if isinstance(v, (float, complex, np.floating, np.complexfloating)):
                return False
    return True


@dataclass(frozen=True, eq=False)
class TorusCharge:
    """Integral or rational 3-cycle ``(p0, P, Q, q0)``.

    Entries are stored exactly (object arrays of int/Fraction) unless any
    input is a float, in which case the charge is a float charge.
    """

    p0: object
    P: np.ndarray
    Q: np.ndarray
    q0: object

    def __post_init__(self):
        exact = _all_exact(self.p0, self.P, self.Q, self.q0)
        object.__setattr__(self, "P", _matrix(self.P, exact))
        object.__setattr__(self, "Q", _matrix(self.Q, exact))
        if exact:
            object.__setattr__(self, "p0", to_exact(self.p0))
            object.__setattr__(self, "q0", to_exact(self.q0))
        else:
            object.__setattr__(self, "p0", float(self.p0))
            object.__setattr__(self, "q0", float(self.q0))

    @property
    def exact(self) -> bool:
        return self.P.dtype == object

    def is_zero(self) -> bool:
        return self.p0 == 0 and self.q0 == 0 and not np.any(self.P != 0) and not np.any(self.Q != 0)

    def is_symmetric(self) -> bool:
        return is_symmetric(self.P) and is_symmetric(self.Q)

    def is_integral(self) -> bool:
        if not self.exact:
            return False
        vals = [self.p0, self.q0, *self.P.ravel(), *self.Q.ravel()]
        return all(Fraction(v).denominator == 1 for v in vals)

    def __neg__(self) -> "TorusCharge":
        return TorusCharge(-self.p0, -self.P, -self.Q, -self.q0)

    def scaled(self, k) -> "TorusCharge":
        return TorusCharge(k * self.p0, k * self.P, k * self.Q, k * self.q0)

    def as_float(self) -> "TorusCharge":
        return TorusCharge(
            float(self.p0), self.P.astype(float), self.Q.astype(float), float(self.q0)
        )

    def __eq__(self, other):
        if not isinstance(other, TorusCharge):
            return NotImplemented
        return (
            self.p0 == other.p0
            and self.q0 == other.q0
            and bool(np.all(self.P == other.P))
            and bool(np.all(self.Q == other.Q))
        )

    def key(self) -> tuple:
        """Hashable exact key (used for deduplication)."""
        return (self.p0, tuple(self.P.ravel()), tuple(self.Q.ravel()), self.q0)

    def __repr__(self):
        return f"TorusCharge(p0={self.p0}, P={self.P.tolist()}, Q={self.Q.tolist()}, q0={self.q0})"


@dataclass(frozen=True, eq=False)
class KahlerTorusCharge:
    """Mukai-vector coefficients ``(v0, V, U, u0)`` of an object on the torus."""

    v0: object
    V: np.ndarray
    U: np.ndarray
    u0: object

    def __post_init__(self):
        exact = _all_exact(self.v0, self.V, self.U, self.u0)
        object.__setattr__(self, "V", _matrix(self.V, exact))
        object.__setattr__(self, "U", _matrix(self.U, exact))
        conv = to_exact if exact else float
        object.__setattr__(self, "v0", conv(self.v0))
        object.__setattr__(self, "u0", conv(self.u0))

    @property
    def exact(self) -> bool:
        return self.V.dtype == object

    def as_torus_charge(self, sign: int = 1) -> TorusCharge:
        return TorusCharge(sign * self.v0, sign * self.V, sign * self.U, sign * self.u0)

    def is_integral(self) -> bool:
        return self.as_torus_charge().is_integral()


@dataclass(frozen=True)
class AttractorInvariants:
    R: np.ndarray
    M: object
    D: object

    def rmd_defect(self, p0):
        """``4 det R - M**2 - p0**2 D`` (exactly zero for every charge)."""
        return 4 * det3(self.R) - self.M * self.M - p0 * p0 * self.D


class Branch(str, enum.Enum):
    PLUS_GENERAL = "PlusGeneral"
    MINUS_GENERAL = "MinusGeneral"
    SYMMETRIC = "SymmetricSiegel"


@dataclass(frozen=True, eq=False)
class AttractorSolution:
    C: object
    A: np.ndarray
    branch: Branch
    invariants: AttractorInvariants | None = field(default=None, repr=False)

    @property
    def exact(self) -> bool:
        return self.A.dtype == object


@dataclass(frozen=True, eq=False)
class SiegelPoint:
    """Symmetric 3x3 complex matrix with positive-definite imaginary part."""

    matrix: np.ndarray

    def __post_init__(self):
        T = np.asarray(self.matrix)
        if T.dtype != object:
            T = T.astype(complex)
        if T.shape != (3, 3):
            raise DomainError(f"expected a 3x3 matrix, got shape {T.shape}")
        if T.dtype == object:
            if not is_symmetric(T):
                raise DomainError("period matrix is not symmetric")
            B, _ = imag_coefficients(T)
            if not is_positive_definite(B, exact=True):
                raise DomainError("imaginary part is not positive definite")
        else:
            if not np.allclose(T, T.T, rtol=0, atol=1e-12 * max(1.0, np.abs(T).max())):
                raise DomainError("period matrix is not symmetric")
            Y = T.imag
            if not is_positive_definite((Y + Y.T) / 2):
                raise DomainError("imaginary part is not positive definite")
        object.__setattr__(self, "matrix", T)

    @property
    def exact(self) -> bool:
        return self.matrix.dtype == object

    def to_complex(self) -> np.ndarray:
        return to_complex(self.matrix)


def to_complex(A) -> np.ndarray:
    A = np.asarray(A)
    if A.dtype == object:
        return np.vectorize(complex, otypes=[complex])(A)
    return A.astype(complex)


def sqrt_neg(D):
    """Exact ``sqrt(-D)`` for rational ``D > 0`` as a QuadNumber."""
    D = Fraction(D)
    # sqrt(p/q) = sqrt(p q) / q
    return QuadNumber(0, Fraction(1, D.denominator), D.numerator * D.denominator)


def _tr_pt_q(P, Q):
    return (P * Q).sum()


def invariants(charge: TorusCharge) -> AttractorInvariants:
    """``R, M, D`` of a charge; exact for exact charges."""
    p0, P, Q, q0 = charge.p0, charge.P, charge.Q, charge.q0
    PtQ = P.T @ Q
    t = trace(PtQ)
    R = cofactor(P) + p0 * Q
    M = 2 * det3(P) + p0 * p0 * q0 + p0 * t
    D = 2 * (t * t - trace(PtQ @ PtQ)) - (p0 * q0 + t) ** 2 + 4 * (p0 * det3(Q) - q0 * det3(P))
    if charge.exact:
        R = exact_array(R)
        M, D = to_exact(M), to_exact(D)
    return AttractorInvariants(R, M, D)


def _check_nonzero(charge: TorusCharge) -> None:
    if charge.is_zero():
        raise ValueError("the zero charge has no attractor")


def _branch_data(charge: TorusCharge, inv: AttractorInvariants):
    """Common pieces ``(s, root, inv2R)`` where ``root = sqrt(-D)``."""
    p0, P, Q, q0 = charge.p0, charge.P, charge.Q, charge.q0
    s = p0 * q0 + _tr_pt_q(P, Q)
    if charge.exact:
        root = sqrt_neg(inv.D)
        inv2R = inverse3(2 * inv.R)
    else:
        root = 1j * np.sqrt(inv.D)
        inv2R = np.linalg.inv(2 * inv.R)
    return s, root, inv2R


def _c_value(p0, M, D, sign: int, exact: bool):
    # i M / sqrt(D) == (M / D) sqrt(-D)
    if exact:
        return QuadNumber(p0) + sign * (Fraction(M) / Fraction(D)) * sqrt_neg(D)
    return p0 + sign * 1j * M / np.sqrt(D)


def solve_complex_general(charge: TorusCharge, exact: bool | None = None) -> list[AttractorSolution]:
    """Both general-branch solutions, ``PlusGeneral`` first.

    Raises :class:`NoAttractor` when ``det R <= 0`` or ``D <= 0``.
    """
    charge = _backend(charge, exact)
    _check_nonzero(charge)
    inv = invariants(charge)
    if det3(inv.R) <= 0:
        raise NoAttractor("det(R) <= 0")
    if inv.D <= 0:
        raise NoAttractor("D <= 0")
    s, root, inv2R = _branch_data(charge, inv)
    I = _identity(charge.exact)
    base = 2 * charge.P @ charge.Q.T - s * I
    out = []
    for sign, branch in ((1, Branch.PLUS_GENERAL), (-1, Branch.MINUS_GENERAL)):
        C = _c_value(charge.p0, inv.M, inv.D, sign, charge.exact)
        A = (base - sign * root * I) @ inv2R.T
        out.append(AttractorSolution(_clean(C), _clean_matrix(A), branch, inv))
    return out


def solve_complex_symmetric(charge: TorusCharge, exact: bool | None = None) -> AttractorSolution:
    """The unique attractor in the Siegel upper half-space.

    ``C = p0 - i M / sqrt(D)`` and ``T = (2PQ - (p0 q0 + tr PQ) I + sqrt(-D)) (2R)^-1``.
    """
    charge = _backend(charge, exact)
    _check_nonzero(charge)
    if not charge.is_symmetric():
        raise AsymmetricCharge("P and Q must be symmetric")
    inv = invariants(charge)
    if not is_positive_definite(inv.R, exact=charge.exact):
        raise NoAttractor("R not positive definite")
    if inv.D <= 0:
        raise NoAttractor("D <= 0")
    s, root, inv2R = _branch_data(charge, inv)
    I = _identity(charge.exact)
    C = _c_value(charge.p0, inv.M, inv.D, -1, charge.exact)
    T = (2 * charge.P @ charge.Q - s * I + root * I) @ inv2R
    if not charge.exact:
        T = (T + T.T) / 2
    return AttractorSolution(_clean(C), _clean_matrix(T), Branch.SYMMETRIC, inv)


def _backend(charge: TorusCharge, exact: bool | None) -> TorusCharge:
    if exact is None or exact == charge.exact:
        return charge
    if exact:
        raise ValueError("cannot solve a float charge in exact arithmetic")
    return charge.as_float()


def _clean(x):
    if isinstance(x, QuadNumber) and x.b == 0:
        x = x.a
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _clean_matrix(A) -> np.ndarray:
    A = np.asarray(A)
    if A.dtype != object:
        return A.astype(complex)
    out = np.empty(A.shape, dtype=object)
    for idx, x in np.ndenumerate(A):
        out[idx] = _clean(x)
    return out


def residual(charge: TorusCharge, C, A) -> tuple:
    """Max-abs deviation of each of the four attractor equations.

    Exact inputs give exact rationals (zero for genuine solutions).
    """
    A = np.asarray(A)
    exact = A.dtype == object and charge.exact and not isinstance(C, (complex, float))
    if not exact:
        A = to_complex(A)
        C = complex(C)
        P = charge.P.astype(float)
        Q = charge.Q.astype(float)
        r1 = abs(C.real - float(charge.p0))
        r2 = float(np.max(np.abs((C * A).real - P)))
        r3 = float(np.max(np.abs((C * cofactor(A)).real + Q)))
        r4 = abs((C * det3(A)).real - float(charge.q0))
        return (r1, r2, r3, r4)
    r1 = abs(re(C) - charge.p0)
    r2 = max(abs(x) for x in (real_part(C * A) - charge.P).ravel())
    r3 = max(abs(x) for x in (real_part(C * cofactor(A)) + charge.Q).ravel())
    r4 = abs(re(C * det3(A)) - charge.q0)
    return tuple(_clean(Fraction(x)) for x in (r1, r2, r3, r4))


# -- p0 = 0 sub-branch -----------------------------------------------------------

def p0_zero_system(P) -> np.ndarray:
    """9x9 matrix ``K(P)`` with ``K(P) vec(Y) = vec(Cof(P+Y) - Cof(P) - Cof(Y))``.

    When ``p0 = 0`` the real part ``Y`` of ``A`` solves ``K(P) vec(Y) = -vec(Q)``;
    ``det K(P) = -2 det(P)**3``.  Rows and columns are row-major ``(i, j)``.
    """
    P = np.asarray(P)
    dtype = object if P.dtype == object else float
    K = np.empty((9, 9), dtype=dtype)
    zero = np.zeros((3, 3), dtype=dtype)
    if dtype == object:
        zero = exact_array(np.zeros((3, 3), dtype=np.int64))
    cofP = cofactor(P)
    for col in range(9):
        E = zero.copy()
        E[col // 3, col % 3] = 1
        B = cofactor(P + E) - cofP - cofactor(E)
        K[:, col] = B.ravel()
    return K


def solve_p0_zero_float(charge: TorusCharge) -> list[tuple[complex, np.ndarray]]:
    """Float solutions for ``p0 = 0`` from the linear system, independent of the closed form.

    With ``C = i z``: ``Im A = -P/z``, ``Re A = Y`` solves the 9x9 system and
    ``q0 = tr(P^T Cof Y) - det(P)/z**2`` fixes ``z`` up to sign.
    """
    if charge.p0 != 0:
        raise ValueError("expected p0 = 0")
    P = charge.P.astype(float)
    Q = charge.Q.astype(float)
    K = p0_zero_system(P)
    Y = np.linalg.solve(K, -Q.ravel()).reshape(3, 3)
    denom = float((P * cofactor(Y)).sum()) - float(charge.q0)
    z2 = np.linalg.det(P) / denom
    if z2 <= 0:
        raise NoAttractor("no real z solves the constant equation")
    z = float(np.sqrt(z2))
    return [(1j * zz, Y - 1j * P / zz) for zz in (z, -z)]


# -- Kähler side ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KahlerAttractor:
    C: object
    omega: np.ndarray
    invariants: AttractorInvariants | None = field(default=None, repr=False)


def solve_kahler(kcharge: KahlerTorusCharge, exact: bool | None = None) -> KahlerAttractor:
    """Unique complexified Kähler attractor ``(C, Omega)`` of a symmetric Mukai charge.

    Solved by feeding ``(-v0, -V, -U, -u0)`` to the symmetric complex solver.
    """
    sol = solve_complex_symmetric(kcharge.as_torus_charge(sign=-1), exact=exact)
    return KahlerAttractor(sol.C, sol.A, sol.invariants)


@dataclass(frozen=True, eq=False)
class MirrorCover:
    D: int
    scale: np.ndarray
    omega_prime: np.ndarray


def mirror_cover(kcharge: KahlerTorusCharge, omega) -> MirrorCover:
    """Integral rescaling of a Kähler attractor to a principal polarization.

    ``Re(Omega') = Re(Omega 2R) = 2VU - (v0 u0 + tr VU) I`` and
    ``Im(Omega') = (sqrt(D)/2) I``.
    """
    if not kcharge.is_integral():
        raise ValueError("mirror cover needs an integral charge")
    inv = invariants(kcharge.as_torus_charge())
    if inv.D <= 0:
        raise NoAttractor("D <= 0")
    if not is_positive_definite(inv.R, exact=True):
        raise NoAttractor("R not positive definite")
    scale = 2 * inv.R
    omega = np.asarray(omega)
    if omega.dtype == object:
        real = exact_array(real_part(omega @ scale))
        imag_unit = QuadNumber(0, Fraction(1, 2), int(inv.D))
        out = _clean_matrix(real + imag_unit * exact_array(I3))
    else:
        real = (omega @ scale.astype(float)).real
        out = real + 0.5j * np.sqrt(float(inv.D)) * np.eye(3)
    return MirrorCover(int(inv.D), scale, out)


def mirror_real_part(kcharge: KahlerTorusCharge) -> np.ndarray:
    """Closed form ``2VU - (v0 u0 + tr VU) I`` of the cover's real part."""
    V, U = kcharge.V, kcharge.U
    s = kcharge.v0 * kcharge.u0 + trace(V @ U)
    return exact_array(2 * V @ U - s * exact_array(I3))


def lcm_of_charge(charge: TorusCharge) -> int:
    return lcm_denominator([charge.p0, charge.q0, *charge.P.ravel(), *charge.Q.ravel()])
