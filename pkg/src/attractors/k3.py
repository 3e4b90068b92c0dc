"""Attractors on E x S with S a K3 surface.

Complex side: a pair ``u1, u2`` of lattice vectors spanning the Poincaré dual
of the charge.  Kähler side: Mukai vectors ``v1, v2`` in ``H^0 + NS + H^4``.
Both reduce to the same rank-2 problem: a positive-definite pair determines a
point of the upper half-plane through its discriminant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

from .algebra import (
    GramLattice,
    QuadNumber,
    conj,
    i_over_imag,
    lcm_denominator,
    pair_discriminant,
    to_exact,
)
from .errors import DegenerateCoefficients, DependentVectors, NoAttractor

__all__ = [
    "MukaiVector",
    "ComplexEXSAttractor",
    "KahlerEXSAttractor",
    "RigidityResult",
    "mukai_pair",
    "solve_complex_exs",
    "rank2_omega",
    "solve_kahler_exs",
    "kahler_rigidity",
    "independent",
]


def _as_quad(x) -> QuadNumber:
    return x if isinstance(x, QuadNumber) else QuadNumber(x)


def _simplify(x):
    if isinstance(x, QuadNumber) and x.b == 0:
        x = x.a
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def independent(u: Sequence, v: Sequence) -> bool:
    """Exact linear independence of two rational vectors (some 2x2 minor non-zero)."""
    n = len(u)
    return any(u[i] * v[j] - u[j] * v[i] != 0 for i in range(n) for j in range(i + 1, n))


@dataclass(frozen=True)
class MukaiVector:
    """``(r, D, s)`` in ``H^0 + NS(S) + H^4``; coefficients may be rational or quadratic."""

    r: object
    D: tuple
    s: object
    lattice: GramLattice

    def __post_init__(self):
        self.lattice.check(self.D)
        object.__setattr__(self, "D", tuple(_simplify(x) for x in self.D))
        object.__setattr__(self, "r", _simplify(self.r))
        object.__setattr__(self, "s", _simplify(self.s))

    def coords(self) -> tuple:
        return (self.r, *self.D, self.s)

    @classmethod
    def from_coords(cls, coords: Sequence, lattice: GramLattice) -> "MukaiVector":
        return cls(coords[0], tuple(coords[1:-1]), coords[-1], lattice)

    def __add__(self, other: "MukaiVector") -> "MukaiVector":
        _same(self, other)
        return MukaiVector.from_coords([a + b for a, b in zip(self.coords(), other.coords())], self.lattice)

    def __sub__(self, other: "MukaiVector") -> "MukaiVector":
        return self + (-1) * other

    def __rmul__(self, k) -> "MukaiVector":
        return MukaiVector.from_coords([k * a for a in self.coords()], self.lattice)

    def real(self) -> "MukaiVector":
        return MukaiVector.from_coords([_as_quad(a).a for a in self.coords()], self.lattice)

    def to_json(self) -> dict:
        from .codec import encode_scalar

        return {"r": encode_scalar(self.r), "D": [encode_scalar(x) for x in self.D], "s": encode_scalar(self.s)}

    @classmethod
    def from_json(cls, obj, lattice: GramLattice) -> "MukaiVector":
        from .codec import decode_scalar

        return cls(decode_scalar(obj["r"]), tuple(decode_scalar(x) for x in obj["D"]), decode_scalar(obj["s"]), lattice)


def _same(v: MukaiVector, w: MukaiVector) -> None:
    if v.lattice != w.lattice:
        raise ValueError("Mukai vectors live on different lattices")


def mukai_pair(v: MukaiVector, w: MukaiVector):
    """``(D, D') - r s' - r' s`` (bilinear, no conjugation)."""
    _same(v, w)
    return _simplify(v.lattice.pair(v.D, w.D) - v.r * w.s - w.r * v.s)


# -- complex side -----------------------------------------------------------------

@dataclass(frozen=True)
class ComplexEXSAttractor:
    """Attractor ``(tau, Omega_S)`` for ``gamma = dx (x) u1 + dy (x) u2``.

    ``Omega_S = -i * w`` with ``w = conj(tau) u1 - u2``; the factor ``-i`` is
    kept symbolic so every stored coefficient is exact in ``Q(sqrt(-D))``.
    """

    tau: QuadNumber
    u1: tuple
    u2: tuple
    D: int
    lattice: GramLattice

    @property
    def w_coords(self) -> tuple:
        """Coefficients of ``w`` on ``(u1, u2)``."""
        return (self.tau.conjugate(), QuadNumber(-1))

    @property
    def w(self) -> tuple:
        """``w`` in lattice coordinates."""
        tb = self.tau.conjugate()
        return tuple(_simplify(tb * a - b) for a, b in zip(self.u1, self.u2))

    def omega(self) -> list[complex]:
        """Float ``Omega_S = -i w`` in lattice coordinates."""
        return [-1j * complex(x) for x in self.w]

    def omega_square(self):
        """``(Omega, Omega) = -(w, w)``, exactly."""
        w = [_as_quad(x) for x in self.w]
        return _simplify(-self.lattice.pair(w, w))

    def omega_norm(self):
        """``(Omega, conj Omega) = (w, conj w)``, exactly (positive)."""
        w = [_as_quad(x) for x in self.w]
        return _simplify(self.lattice.pair(w, [x.conjugate() for x in w]))


def solve_complex_exs(L: GramLattice, u1: Sequence[int], u2: Sequence[int]) -> ComplexEXSAttractor:
    """``tau = ((u1, u2) + sqrt(-D)) / u1^2`` with ``D = u1^2 u2^2 - (u1, u2)^2``."""
    u1 = tuple(int(x) for x in u1)
    u2 = tuple(int(x) for x in u2)
    L.check(u1)
    L.check(u2)
    if not independent(u1, u2):
        raise DependentVectors("u1 and u2 are proportional")
    D = pair_discriminant(L, u1, u2)
    a = L.norm(u1)
    if a <= 0 or D <= 0:
        raise NoAttractor("pair lattice not positive definite")
    tau = (QuadNumber(L.pair(u1, u2)) + QuadNumber.sqrt_neg(D)) / a
    return ComplexEXSAttractor(tau, u1, u2, D, L)


def rank2_omega(C1, C2, g1: Sequence, g2: Sequence) -> list:
    """Solve ``Re(C1 Omega) = g1``, ``Re(C2 Omega) = g2`` componentwise.

    ``Omega = i / Im(C1 conj C2) * (conj(C1) g2 - conj(C2) g1)``; exact for
    QuadNumber coefficients.
    """
    z = C1 * conj(C2)
    try:
        factor = i_over_imag(z)
    except ZeroDivisionError:
        raise DegenerateCoefficients("Im(C1 conj C2) = 0") from None
    c1b, c2b = conj(C1), conj(C2)
    return [_simplify(factor * (c1b * b - c2b * a)) for a, b in zip(g1, g2)]


# -- Kähler side ------------------------------------------------------------------

@dataclass(frozen=True)
class KahlerEXSAttractor:
    omega_E: QuadNumber
    delta: MukaiVector
    C: QuadNumber
    D: int

    @property
    def omega_S(self) -> tuple:
        return self.delta.D

    def delta_square(self):
        return mukai_pair(self.delta, self.delta)

    def exponential_defect(self):
        """``deg4(delta) - omega_S^2 / 2`` (zero when ``delta = e^{omega_S}``)."""
        w = [_as_quad(x) for x in self.omega_S]
        return _simplify(_as_quad(self.delta.s) - self.delta.lattice.pair(w, w) / 2)

    def imag_omega_S(self) -> tuple[tuple, int]:
        """``Im(omega_S) = sqrt(d) * B``; returns ``(B, d)``."""
        d = 0
        B = []
        for x in self.omega_S:
            q = _as_quad(x)
            if q.b:
                d = q.d
            B.append(_simplify(q.b))
        return tuple(B), d

    def imag_omega_S_square(self):
        """``Im(omega_S)^2`` as ``d * (B, B)`` (exact rational)."""
        B, d = self.imag_omega_S()
        return _simplify(d * self.delta.lattice.norm(B))

    def residual(self, v1: MukaiVector, v2: MukaiVector) -> list:
        """Deviations of both equations against the standard basis of ``H^0 + NS + H^4``."""
        L = v1.lattice
        out = []
        for x in _basis(L):
            p = _as_quad(mukai_pair(self.delta, x))
            out.append(_simplify((self.C * p).a - mukai_pair(v1, x)))
            out.append(_simplify((self.C * self.omega_E * p).a - mukai_pair(v2, x)))
        return out


def _basis(L: GramLattice) -> list[MukaiVector]:
    n = L.rank + 2
    vs = []
    for k in range(n):
        c = [0] * n
        c[k] = 1
        vs.append(MukaiVector.from_coords(c, L))
    return vs


def solve_kahler_exs(v1: MukaiVector, v2: MukaiVector) -> KahlerEXSAttractor:
    """Unique ``(omega_E, delta)`` for a positive-definite pair of Mukai vectors."""
    _same(v1, v2)
    if not independent(v1.coords(), v2.coords()):
        raise DependentVectors("v1 and v2 are proportional")
    a = mukai_pair(v1, v1)
    b = mukai_pair(v1, v2)
    D = a * mukai_pair(v2, v2) - b * b
    if a <= 0 or D <= 0:
        raise NoAttractor("pair lattice not positive definite")
    root = QuadNumber.sqrt_neg(D)
    omega_E = (QuadNumber(b) + root) / a
    wb = omega_E.conjugate()
    den = v2.r - wb * v1.r
    # for a hyperbolic NS(S), positivity forces (r1, r2) != (0, 0)
    if v1.r == 0 and v2.r == 0:
        raise DegenerateCoefficients("both degree-0 parts vanish; NS(S) must be hyperbolic")
    C = -i_over_imag(omega_E) * den
    coords = [(y - wb * x) / den for x, y in zip(v1.coords(), v2.coords())]
    delta = MukaiVector.from_coords(coords, v1.lattice)
    return KahlerEXSAttractor(omega_E, delta, C, D)


# -- rigidity ---------------------------------------------------------------------

@dataclass(frozen=True)
class RigidityResult:
    rigid: bool
    re_part: MukaiVector | None = None
    im_part: MukaiVector | None = None
    m: int | None = None
    n: int | None = None
    im_scale: str | None = None
    witness: str | None = None

    @property
    def generators(self) -> tuple[MukaiVector, MukaiVector] | None:
        if not self.rigid:
            return None
        return (self.m * self.re_part, self.n * self.im_part)


def _rational_sqrt(x: Fraction) -> Fraction | None:
    from math import isqrt

    if x < 0:
        return None
    p, q = x.numerator, x.denominator
    a, b = isqrt(p), isqrt(q)
    if a * a == p and b * b == q:
        return Fraction(a, b)
    return None


def kahler_rigidity(L: GramLattice, B: Sequence, k2, H: Sequence[int]) -> RigidityResult:
    """Rank-2 integral lattice containing ``exp(B + i k H)`` when it exists.

    ``B`` must be rational and ``k2 = k**2`` rational; floats model irrational
    inputs and yield ``rigid = False`` with a witness.  The imaginary part is
    ``k * (0, H, (B, H))``; when ``k`` itself is irrational only its direction
    ``(0, H, (B, H))`` is used and ``im_scale`` records the factor.
    """
    H = tuple(int(h) for h in H)
    L.check(H)
    if L.norm(H) <= 0:
        raise ValueError("H must have positive square")
    if any(not isinstance(b, Rational) for b in B):
        return RigidityResult(False, witness="B is not rational")
    if not isinstance(k2, Rational):
        return RigidityResult(False, witness="kappa^2 is not rational")
    B = tuple(to_exact(b) for b in B)
    k2 = Fraction(k2)
    if k2 <= 0:
        raise ValueError("k2 must be positive")
    H2 = L.norm(H)
    BH = L.pair(B, H)
    re = MukaiVector(1, B, Fraction(L.norm(B) - k2 * H2, 2), L)
    k = _rational_sqrt(k2)
    if k is not None:
        im = MukaiVector(0, tuple(k * h for h in H), k * BH, L)
        scale = None
    else:
        im = MukaiVector(0, H, BH, L)
        scale = f"sqrt({k2})"
    m = lcm_denominator(re.coords())
    n = lcm_denominator(im.coords())
    return RigidityResult(True, re, im, m, n, im_scale=scale)
