"""From a Picard-number-9 period matrix back to a charge that attracts to it.

The period matrix is given exactly by integral data ``(R, D, N)``::

    T = N R^-1 + sqrt(-D) R^-1

with ``R`` symmetric positive definite and ``N R^-1`` symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import (
    cofactor,
    det3,
    exact_array,
    inverse3,
    is_positive_definite,
    is_symmetric,
    lcm_denominator,
    trace,
)
from .torus import TorusCharge, sqrt_neg

__all__ = ["Picard9Period", "charge_from_period", "clear_denominators", "period_matrix"]

_I3 = np.eye(3, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Picard9Period:
    R: np.ndarray
    D: int
    N: np.ndarray

    def __post_init__(self):
        R = exact_array(self.R)
        N = exact_array(self.N)
        if R.shape != (3, 3) or N.shape != (3, 3):
            raise ValueError("R and N must be 3x3")
        if any(Fraction(x).denominator != 1 for x in [*R.ravel(), *N.ravel()]):
            raise ValueError("R and N must be integral")
        if int(self.D) != self.D or self.D <= 0:
            raise ValueError("D must be a positive integer")
        if not is_symmetric(R) or not is_positive_definite(R, exact=True):
            raise ValueError("R must be symmetric positive definite")
        if not is_symmetric(N @ inverse3(R)):
            raise ValueError("N R^-1 must be symmetric")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "D", int(self.D))

    def to_json(self) -> dict:
        return {"R": self.R.tolist(), "D": self.D, "N": self.N.tolist()}

    @classmethod
    def from_json(cls, obj) -> "Picard9Period":
        return cls(np.array(obj["R"], dtype=object), int(obj["D"]), np.array(obj["N"], dtype=object))


def period_matrix(p: Picard9Period) -> np.ndarray:
    """Exact ``T = N R^-1 + sqrt(-D) R^-1``."""
    Rinv = inverse3(p.R)
    T = p.N @ Rinv + sqrt_neg(p.D) * Rinv
    return _simplify(T)


def _simplify(A):
    from .torus import _clean_matrix

    return _clean_matrix(A)


def charge_from_period(p: Picard9Period) -> TorusCharge:
    """Rational charge whose symmetric attractor is exactly ``period_matrix(p)``."""
    R = p.R
    detR = det3(R)
    n = (p.D + 1) * detR
    M = 2 * n * detR
    S = 2 * n * p.N
    p0 = detR
    I = exact_array(_I3)
    P = (p0 * S + M * I) @ inverse3(2 * n * R)
    Q = (n * R - cofactor(P)) * Fraction(1, p0)
    q0 = Fraction(2 * n * detR - 2 * det3(P) - p0 * trace(P @ Q), p0 * p0)
    return TorusCharge(p0, _simplify(P), _simplify(Q), q0)


def clear_denominators(charge: TorusCharge) -> tuple[int, TorusCharge]:
    """Smallest ``k`` with ``k * charge`` integral, and that integral charge."""
    if not charge.exact:
        raise ValueError("exact charge required")
    k = lcm_denominator([charge.p0, charge.q0, *charge.P.ravel(), *charge.Q.ravel()])
    scaled = charge.scaled(k)
    return k, TorusCharge(
        int(scaled.p0), _to_int(scaled.P), _to_int(scaled.Q), int(scaled.q0)
    )


def _to_int(A) -> np.ndarray:
    out = np.empty(A.shape, dtype=object)
    for idx, x in np.ndenumerate(A):
        out[idx] = int(x)
    return out
