"""Scalar and small-matrix arithmetic shared by every solver.

Two backends live side by side:

* exact -- Python ``int``/``Fraction`` and :class:`QuadNumber` entries held in
  ``dtype=object`` numpy arrays;
* float -- ordinary ``complex128``/``float64`` arrays.

The matrix helpers below index with ``A[..., i, j]`` so the same code serves
both backends and also batches of matrices (used by the optimizer).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Fraction",
    "QuadNumber",
    "Surd",
    "GramLattice",
    "squarefree_part",
    "to_exact",
    "exact_array",
    "is_exact",
    "re",
    "conj",
    "real_part",
    "imag_coefficients",
    "cofactor",
    "det3",
    "trace",
    "matmul",
    "inverse3",
    "exact_inverse",
    "exact_det",
    "is_positive_definite",
    "is_symmetric",
    "pair_discriminant",
    "lcm_denominator",
]


@lru_cache(maxsize=4096)
def squarefree_part(D: int) -> tuple[int, int]:
    """Split ``D >= 0`` as ``k**2 * d`` with ``d`` square-free; returns ``(k, d)``."""
    if D < 0:
        raise ValueError("expected a non-negative integer")
    if D == 0:
        return 0, 0
    k, d, p = 1, D, 2
    while p * p <= d:
        while d % (p * p) == 0:
            d //= p * p
            k *= p
        p += 1 if p == 2 else 2
    return k, d


def to_exact(x) -> int | Fraction:
    """Coerce an int/Fraction/'p/q' string into an exact rational."""
    if isinstance(x, bool):
        raise TypeError("booleans are not charges")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Rational):
        return to_exact(Fraction(x.numerator, x.denominator))
    if isinstance(x, str):
        return to_exact(Fraction(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class QuadNumber:
    """Exact element ``a + b*sqrt(-D)`` of an imaginary quadratic field.

    ``D`` is stored by its square-free kernel, so ``QuadNumber(0, 1, 16)`` and
    ``QuadNumber(0, 4, 1)`` are the same number ``4i``.  Numbers with ``b == 0``
    are plain rationals and combine freely with any field; two numbers with
    non-zero ``b`` must share the kernel.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, D: int = 0):
        a = to_exact(a)
        b = to_exact(b)
        D = int(D)
        k, d = squarefree_part(D)
        if d == 0 or b == 0:
            b, d = 0, 0
        else:
            b = b * k
        self.a = a
        self.b = b
        self.d = d

    @classmethod
    def _raw(cls, a, b, d) -> "QuadNumber":
        obj = cls.__new__(cls)
        if b == 0:
            d = 0
        obj.a, obj.b, obj.d = a, b, d
        return obj

    @classmethod
    def sqrt_neg(cls, D: int) -> "QuadNumber":
        """The root ``sqrt(-D) = i*sqrt(D)`` for integer ``D >= 0``."""
        return cls(0, 1, D)

    @classmethod
    def i(cls) -> "QuadNumber":
        return cls._raw(0, 1, 1)

    # -- coercion -----------------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, QuadNumber):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QuadNumber._raw(other, 0, 0)
        if isinstance(other, np.integer):
            return QuadNumber._raw(int(other), 0, 0)
        return None

    def _field(self, other: "QuadNumber") -> int:
        if self.d == other.d or other.d == 0:
            return self.d
        if self.d == 0:
            return other.d
        raise ValueError(f"incompatible quadratic fields Q(sqrt(-{self.d})) and Q(sqrt(-{other.d}))")

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadNumber._raw(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadNumber._raw(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadNumber._raw(self.a - o.a, self.b - o.b, self._field(o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self._field(o)
        return QuadNumber._raw(
            self.a * o.a - d * self.b * o.b,
            self.a * o.b + self.b * o.a,
            d,
        )

    __rmul__ = __mul__

    def norm(self) -> int | Fraction:
        """Field norm ``a**2 + d*b**2`` (equals ``|x|**2``)."""
        return self.a * self.a + self.d * self.b * self.b

    def inverse(self) -> "QuadNumber":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QuadNumber division by zero")
        return QuadNumber._raw(Fraction(self.a) / n, Fraction(-self.b) / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.b == 0:
            if o.a == 0:
                raise ZeroDivisionError("QuadNumber division by zero")
            return QuadNumber._raw(Fraction(self.a) / o.a, Fraction(self.b) / o.a, self.d)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadNumber._raw(1, 0, 0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self) -> "QuadNumber":
        return QuadNumber._raw(self.a, -self.b, self.d)

    # -- parts --------------------------------------------------------------
    @property
    def real(self):
        return self.a

    @property
    def imag(self) -> "Surd":
        """Imaginary part ``b*sqrt(d)`` as an exact real surd."""
        return Surd(self.b, self.d)

    def is_rational(self) -> bool:
        return self.b == 0

    # -- comparisons / conversion --------------------------------------------
    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, complex | float):
                return complex(self) == other
            return NotImplemented
        return self.a == o.a and self.b == o.b and (self.b == 0 or self.d == o.d)

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __complex__(self):
        return complex(float(self.a), float(self.b) * math.sqrt(self.d))

    def __abs__(self) -> float:
        return math.sqrt(float(self.norm()))

    def __repr__(self):
        if self.b == 0:
            return f"QuadNumber({self.a})"
        return f"QuadNumber({self.a}, {self.b}, {self.d})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        root = "i" if self.d == 1 else f"sqrt(-{self.d})"
        sign = "-" if self.b < 0 else "+"
        mag = abs(self.b)
        coeff = "" if mag == 1 else f"{mag}*"
        if self.a == 0:
            return f"{'-' if self.b < 0 else ''}{coeff}{root}"
        return f"{self.a} {sign} {coeff}{root}"

    def to_json(self) -> dict:
        return {"a": rational_to_json(self.a), "b": rational_to_json(self.b), "D": self.d}

    @classmethod
    def from_json(cls, obj) -> "QuadNumber":
        if isinstance(obj, dict):
            return cls(Fraction(str(obj["a"])), Fraction(str(obj.get("b", 0))), int(obj.get("D", 0)))
        return cls(to_exact(obj))


@dataclass(frozen=True)
class Surd:
    """The real number ``coeff * sqrt(radicand)`` (radicand square-free or 0)."""

    coeff: int | Fraction
    radicand: int

    def __float__(self):
        return float(self.coeff) * math.sqrt(self.radicand)

    def sign(self) -> int:
        if self.coeff == 0 or self.radicand == 0:
            return 0
        return 1 if self.coeff > 0 else -1

    def __gt__(self, other):
        if other != 0:
            return NotImplemented
        return self.sign() > 0

    def __lt__(self, other):
        if other != 0:
            return NotImplemented
        return self.sign() < 0

    def __eq__(self, other):
        if isinstance(other, Surd):
            if self.sign() == 0 or other.sign() == 0:
                return self.sign() == other.sign()
            return self.coeff == other.coeff and self.radicand == other.radicand
        if other == 0:
            return self.sign() == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.coeff, self.radicand))


def rational_to_json(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# -- scalar helpers -----------------------------------------------------------

def re(x):
    """Real part, exact when ``x`` is exact."""
    if isinstance(x, QuadNumber):
        return x.a
    if isinstance(x, (int, Fraction)):
        return x
    return x.real


def conj(x):
    if isinstance(x, QuadNumber):
        return x.conjugate()
    if isinstance(x, (int, Fraction)):
        return x
    return np.conj(x)


def i_over_imag(z):
    """``i / Im(z)``; exact for a QuadNumber ``z = a + b*sqrt(-d)``.

    With ``Im(z) = b*sqrt(d)`` one has ``i/Im(z) = sqrt(-d) / (b*d)``.
    """
    if isinstance(z, QuadNumber):
        if z.b == 0:
            raise ZeroDivisionError("Im(z) = 0")
        return QuadNumber._raw(0, Fraction(1) / (z.b * z.d), z.d)
    im = complex(z).imag
    if im == 0:
        raise ZeroDivisionError("Im(z) = 0")
    return 1j / im


def is_exact(A) -> bool:
    A = np.asarray(A)
    return A.dtype == object or np.issubdtype(A.dtype, np.integer)


def exact_array(rows) -> np.ndarray:
    """Object array of exact scalars (ints/Fractions/QuadNumbers kept as-is)."""
    A = np.asarray(rows, dtype=object)
    out = np.empty(A.shape, dtype=object)
    for idx, x in np.ndenumerate(A):
        out[idx] = x if isinstance(x, QuadNumber) else to_exact(x)
    return out


def real_part(A) -> np.ndarray:
    A = np.asarray(A)
    if A.dtype == object:
        out = np.empty(A.shape, dtype=object)
        for idx, x in np.ndenumerate(A):
            out[idx] = re(x)
        return out
    return A.real


def imag_coefficients(A) -> tuple[np.ndarray, int]:
    """Write ``Im(A) = sqrt(d) * B`` for an exact QuadNumber array; returns ``(B, d)``.

    All entries with non-zero imaginary part must share the same field.
    """
    A = np.asarray(A, dtype=object)
    d = 0
    B = np.empty(A.shape, dtype=object)
    for idx, x in np.ndenumerate(A):
        if isinstance(x, QuadNumber) and x.b != 0:
            if d and x.d != d:
                raise ValueError("entries live in different quadratic fields")
            d = x.d
            B[idx] = x.b
        else:
            B[idx] = 0
    return B, d


# -- 3x3 matrix helpers -------------------------------------------------------

_MINOR = ((1, 2), (0, 2), (0, 1))


def cofactor(A) -> np.ndarray:
    """Cofactor matrix ``(-1)**(i+j) * minor_ij``; works on stacks ``(..., 3, 3)``.

    Satisfies ``A @ cofactor(A).T == det(A) * I``.
    """
    A = np.asarray(A)
    C = np.empty(A.shape, dtype=A.dtype)
    for i in range(3):
        a, b = _MINOR[i]
        for j in range(3):
            c, d = _MINOR[j]
            m = A[..., a, c] * A[..., b, d] - A[..., a, d] * A[..., b, c]
            C[..., i, j] = m if (i + j) % 2 == 0 else -m
    return C


def det3(A):
    A = np.asarray(A)
    return (
        A[..., 0, 0] * (A[..., 1, 1] * A[..., 2, 2] - A[..., 1, 2] * A[..., 2, 1])
        - A[..., 0, 1] * (A[..., 1, 0] * A[..., 2, 2] - A[..., 1, 2] * A[..., 2, 0])
        + A[..., 0, 2] * (A[..., 1, 0] * A[..., 2, 1] - A[..., 1, 1] * A[..., 2, 0])
    )


def trace(A):
    A = np.asarray(A)
    return A[..., 0, 0] + A[..., 1, 1] + A[..., 2, 2]


def matmul(A, B) -> np.ndarray:
    return np.asarray(A) @ np.asarray(B)


def inverse3(A) -> np.ndarray:
    """Adjugate inverse; exact for object arrays."""
    A = np.asarray(A)
    d = det3(A)
    if A.dtype == object or np.issubdtype(A.dtype, np.integer):
        if d == 0:
            raise ZeroDivisionError("singular matrix")
        inv_d = QuadNumber._coerce(d).inverse() if isinstance(d, QuadNumber) else Fraction(1) / d
        out = np.empty((3, 3), dtype=object)
        C = cofactor(A.astype(object))
        for i in range(3):
            for j in range(3):
                out[i, j] = _simplify(C[j, i] * inv_d)
        return out
    return np.swapaxes(cofactor(A), -1, -2) / d[..., None, None]


def _simplify(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    if isinstance(x, QuadNumber) and x.b == 0:
        return _simplify(x.a)
    return x


def exact_inverse(M) -> np.ndarray:
    """Gauss-Jordan inverse of a square matrix over Q (or a quadratic field)."""
    M = np.asarray(M, dtype=object)
    n = M.shape[0]
    aug = [[Fraction(x) if not isinstance(x, QuadNumber) else x for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(M.tolist())]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = _simplify(aug[i][n + j])
    return out


def exact_det(M):
    """Determinant over Q by fraction-free Gaussian elimination."""
    rows = [[Fraction(x) for x in row] for row in np.asarray(M, dtype=object).tolist()]
    n = len(rows)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = -det
        p = rows[col][col]
        det *= p
        for r in range(col + 1, n):
            if rows[r][col] != 0:
                f = rows[r][col] / p
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return _simplify(det)


def is_symmetric(A, atol: float = 0.0) -> bool:
    A = np.asarray(A)
    if A.dtype == object or np.issubdtype(A.dtype, np.integer):
        n = A.shape[0]
        return all(A[i, j] == A[j, i] for i in range(n) for j in range(i + 1, n))
    return bool(np.allclose(A, A.T, rtol=0.0, atol=atol))


PIVOT_THRESHOLD = 1e-12


def is_positive_definite(S, exact: bool | None = None) -> bool:
    """Positive-definiteness of a real symmetric matrix.

    Exact inputs (ints/Fractions) use leading pivots of Gaussian elimination,
    which are ratios of consecutive leading principal minors.  Float inputs
    use Cholesky and require every squared pivot to exceed 1e-12.
    """
    S = np.asarray(S)
    if exact is None:
        exact = is_exact(S)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("expected a square matrix")
    if exact:
        if not is_symmetric(S):
            raise ValueError("matrix is not symmetric")
        n = S.shape[0]
        rows = [[Fraction(re(x)) for x in row] for row in S.tolist()]
        for k in range(n):
            p = rows[k][k]
            if p <= 0:
                return False
            for r in range(k + 1, n):
                f = rows[r][k] / p
                if f:
                    rows[r] = [x - f * y for x, y in zip(rows[r], rows[k])]
        return True
    S = np.asarray(S, dtype=float)
    if not np.allclose(S, S.T, rtol=1e-12, atol=1e-12 * max(1.0, float(np.abs(S).max(initial=0.0)))):
        raise ValueError("matrix is not symmetric")
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        return False
    return bool(np.all(np.diag(L) ** 2 > PIVOT_THRESHOLD))


def lcm_denominator(values: Iterable) -> int:
    k = 1
    for x in values:
        k = math.lcm(k, Fraction(x).denominator)
    return k


# -- lattices -----------------------------------------------------------------

@dataclass(frozen=True)
class GramLattice:
    """Integral lattice ``Z^rank`` with symmetric Gram form."""

    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        n = len(g)
        if n == 0 or any(len(row) != n for row in g):
            raise ValueError("Gram matrix must be square and non-empty")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise ValueError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)

    @classmethod
    def from_matrix(cls, M) -> "GramLattice":
        return cls(tuple(tuple(int(x) for x in row) for row in np.asarray(M).tolist()))

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.gram, dtype=np.int64)

    def check(self, u: Sequence) -> None:
        if len(u) != self.rank:
            raise ValueError(f"vector of length {len(u)} does not lie in a rank-{self.rank} lattice")

    def pair(self, u: Sequence, v: Sequence):
        """Bilinear form ``u^T G v`` with exact scalar arithmetic."""
        self.check(u)
        self.check(v)
        total = 0
        for i, ui in enumerate(u):
            if not ui:
                continue
            row = self.gram[i]
            s = 0
            for j, vj in enumerate(v):
                if row[j]:
                    s = s + row[j] * vj
            total = total + ui * s
        return total

    def norm(self, u: Sequence):
        return self.pair(u, u)

    def signature(self) -> tuple[int, int]:
        w = np.linalg.eigvalsh(self.matrix.astype(float))
        return int(np.sum(w > 1e-9)), int(np.sum(w < -1e-9))

    def to_json(self) -> dict:
        return {"gram": [list(r) for r in self.gram]}

    @classmethod
    def from_json(cls, obj) -> "GramLattice":
        return cls(tuple(tuple(r) for r in obj["gram"]))


def pair_discriminant(L: GramLattice, u1: Sequence, u2: Sequence) -> int:
    """``u1^2 u2^2 - (u1, u2)^2``: positive iff the pair spans a definite plane."""
    a = L.norm(u1)
    b = L.norm(u2)
    c = L.pair(u1, u2)
    return a * b - c * c
