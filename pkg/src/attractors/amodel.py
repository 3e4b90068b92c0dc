"""A-model Weil-Petersson geometry from central charges and Euler pairings.

The bilinear form on central charges is ``b(Z1, Z2) = sum chi^{ij} Z1(F_i) Z2(F_j)``
with ``(chi^{ij})`` the inverse of the Euler matrix ``chi(F_i, F_j)``, and the
potential of a charge vector on a Calabi-Yau ``n``-fold is
``K = -log(i**(-n) b(Z, conj Z))``.

Three concrete families live here: the elliptic curve, the quintic threefold
(with optional genus-0 Gromov-Witten corrections) and the 6-torus, whose even
cohomology carries the classical central charge ``Z(F) = -<e^omega, v(F)>``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .algebra import QuadNumber, cofactor, conj, det3, exact_array, exact_inverse, re, to_exact
from .errors import DomainError

__all__ = [
    "ZETA3",
    "LAMBDA_QUINTIC",
    "EulerMatrix",
    "ChernData",
    "GWTable",
    "HypersurfaceContext",
    "bform",
    "a_potential",
    "elliptic_charges",
    "elliptic_euler",
    "hypersurface_chern",
    "euler_pairing",
    "quintic_context",
    "quintic_basis",
    "quintic_euler_matrix",
    "quintic_classical_coefficients",
    "quintic_central_charge",
    "quintic_central_charge_derivative",
    "quintic_charges",
    "quintic_a_potential",
    "legendrian_residual",
    "kahler_attractor_residual",
    "torus_mukai_matrix",
    "torus_mukai_pair",
    "torus_exp",
    "torus_central_charges",
    "torus_charge_derivatives",
    "torus_vector",
    "torus_euler_matrix",
    "quantum_correction",
]

ZETA3 = 1.2020569031595942
LAMBDA_QUINTIC = ZETA3 / (2 * math.pi) ** 3


# -- bilinear form and potential ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class EulerMatrix:
    """Euler pairings ``chi(F_i, F_j)`` on a basis, with their exact inverse."""

    chi: np.ndarray

    def __post_init__(self):
        chi = exact_array(self.chi)
        if chi.ndim != 2 or chi.shape[0] != chi.shape[1]:
            raise ValueError("Euler matrix must be square")
        try:
            inv = exact_inverse(chi)
        except ZeroDivisionError:
            raise ValueError("Euler matrix is singular") from None
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "_inv", inv)

    @property
    def rank(self) -> int:
        return self.chi.shape[0]

    @property
    def inverse(self) -> np.ndarray:
        return self._inv

    def is_skew(self) -> bool:
        return bool(np.all(self.chi == -self.chi.T))

    def is_symmetric(self) -> bool:
        return bool(np.all(self.chi == self.chi.T))

    def changed_basis(self, G) -> "EulerMatrix":
        """Euler matrix on the basis ``F'_j = sum_i G_ij F_i``."""
        G = exact_array(G)
        return EulerMatrix(G.T @ self.chi @ G)


def _as_euler(chi) -> EulerMatrix:
    return chi if isinstance(chi, EulerMatrix) else EulerMatrix(chi)


def bform(Z1: Sequence, Z2: Sequence, chi) -> object:
    """``sum_ij chi^{ij} Z1_i Z2_j``; exact when the charges are exact."""
    E = _as_euler(chi)
    if len(Z1) != E.rank or len(Z2) != E.rank:
        raise ValueError("charge vectors must match the Euler matrix rank")
    inv = E.inverse
    exact = all(_is_exact_scalar(z) for z in (*Z1, *Z2))
    if exact:
        total = 0
        for i, a in enumerate(Z1):
            if not a:
                continue
            for j, b in enumerate(Z2):
                c = inv[i, j]
                if c and b:
                    total = total + c * a * b
        return total
    M = inv.astype(float)
    z1 = np.asarray(Z1, dtype=complex)
    z2 = np.asarray(Z2, dtype=complex)
    return complex(z1 @ M @ z2)


def _is_exact_scalar(x) -> bool:
    return isinstance(x, (int, Fraction, QuadNumber)) and not isinstance(x, bool)


def a_potential(Z: Sequence, chi, n: int) -> float:
    """``-log(i**(-n) b(Z, conj Z))``; raises :class:`DomainError` unless the argument is positive."""
    val = bform(Z, [conj(z) for z in Z], chi)
    val = complex(val)
    w = val * (1j) ** (-n)
    scale = max(1.0, abs(w))
    if abs(w.imag) > 1e-9 * scale or not w.real > 0:
        raise DomainError(f"i^-n b(Z, conj Z) = {w} is not a positive real")
    return -math.log(w.real)


# -- elliptic curve -----------------------------------------------------------------

def elliptic_euler() -> EulerMatrix:
    """Euler matrix on ``(O_X, O_p)``."""
    return EulerMatrix([[0, 1], [-1, 0]])


def elliptic_charges(tau) -> list:
    """``Z(F) = -deg F + tau rank F`` on ``(O_X, O_p)``."""
    return [tau, -1]


# -- hypersurfaces and HRR ------------------------------------------------------------

def hypersurface_chern(n: int, d: int) -> list[Fraction]:
    """Coefficients ``c_0, ..., c_{n-1}`` (times powers of ``H``) of a degree-``d`` hypersurface in ``P^n``.

    Truncation of ``(1 + H)**(n + 1) / (1 + d H)``.
    """
    if n < 1 or n > 5 or d < 1:
        raise ValueError("expected 1 <= n <= 5 and d >= 1")
    dim = n - 1
    num = [Fraction(math.comb(n + 1, k)) for k in range(dim + 1)]
    inv = [Fraction((-d) ** k) for k in range(dim + 1)]
    return [to_exact(sum(num[i] * inv[k - i] for i in range(k + 1))) for k in range(dim + 1)]


@dataclass(frozen=True)
class ChernData:
    """Chern character ``ch_0 + ch_1 H + ch_2 H^2 + ch_3 H^3`` (rational coefficients)."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(to_exact(Fraction(c)) for c in self.coeffs))

    def __getitem__(self, k):
        return self.coeffs[k] if k < len(self.coeffs) else 0

    def dual(self) -> "ChernData":
        return ChernData(tuple((-1) ** k * c for k, c in enumerate(self.coeffs)))


@dataclass(frozen=True)
class HypersurfaceContext:
    """Cohomology ring ``Q[H] / H^{dim+1}`` with ``int H^dim = degree`` and Chern classes."""

    n: int
    d: int

    @property
    def dim(self) -> int:
        return self.n - 1

    @property
    def degree(self) -> int:
        return self.d

    @property
    def chern(self) -> list[Fraction]:
        return hypersurface_chern(self.n, self.d)

    def mul(self, a: Sequence, b: Sequence) -> list:
        out = [0] * (self.dim + 1)
        for i, x in enumerate(a[: self.dim + 1]):
            if not x:
                continue
            for j, y in enumerate(b[: self.dim + 1 - i]):
                out[i + j] = out[i + j] + x * y
        return out

    def integrate(self, a: Sequence):
        return self.degree * (a[self.dim] if len(a) > self.dim else 0)

    def todd(self) -> list[Fraction]:
        c = [Fraction(x) for x in self.chern] + [Fraction(0)] * 4
        c1, c2 = c[1], c[2]
        td = [Fraction(1), c1 / 2, (c1 * c1 + c2) / 12, c1 * c2 / 24]
        return td[: self.dim + 1]

    def sqrt_todd(self) -> list[Fraction]:
        """``1 + c2/24`` in the Calabi-Yau case (series square root in general, to degree 3)."""
        td = self.todd() + [Fraction(0)] * 4
        # sqrt(1 + t) with t = td - 1, expanded to degree 3 in H
        t = [Fraction(0)] + td[1:4]
        s = [Fraction(1), t[1] / 2, t[2] / 2 - t[1] ** 2 / 8, t[3] / 2 - t[1] * t[2] / 4 + t[1] ** 3 / 16]
        return s[: self.dim + 1]


def euler_pairing(E: ChernData, F: ChernData, ctx: HypersurfaceContext):
    """``chi(E, F) = int ch(E^dual) ch(F) Td``, exact."""
    prod = ctx.mul(ctx.mul(E.dual().coeffs, F.coeffs), ctx.todd())
    return to_exact(Fraction(ctx.integrate(prod)))


def quintic_context() -> HypersurfaceContext:
    return HypersurfaceContext(4, 5)


def quintic_basis() -> list[ChernData]:
    """Chern characters ``1, H, H^2, pt`` (``pt = H^3 / 5``)."""
    return [
        ChernData((1, 0, 0, 0)),
        ChernData((0, 1, 0, 0)),
        ChernData((0, 0, 1, 0)),
        ChernData((0, 0, 0, Fraction(1, 5))),
    ]


def quintic_euler_matrix(basis: Sequence[ChernData] | None = None) -> EulerMatrix:
    ctx = quintic_context()
    basis = list(basis or quintic_basis())
    return EulerMatrix([[euler_pairing(a, b, ctx) for b in basis] for a in basis])


# -- quintic central charge -------------------------------------------------------------

@dataclass(frozen=True)
class GWTable:
    """Genus-0 Gromov-Witten counts ``d -> N_d`` (treated as input data)."""

    entries: tuple

    def __post_init__(self):
        items = tuple(sorted((int(d), to_exact(Fraction(n))) for d, n in dict(self.entries).items()))
        if any(d < 1 for d, _ in items):
            raise ValueError("degrees must be positive")
        if len(items) != len(dict(self.entries)):
            raise ValueError("degrees must be distinct")
        object.__setattr__(self, "entries", items)

    @classmethod
    def empty(cls) -> "GWTable":
        return cls(())

    @classmethod
    def from_mapping(cls, m: Mapping) -> "GWTable":
        return cls(tuple(m.items()))

    @classmethod
    def from_csv(cls, path) -> "GWTable":
        """Read a ``d,N_d`` CSV (``N_d`` an integer or ``p/q``)."""
        with open(Path(path), newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["d", "N_d"]:
                raise ValueError("GW table header must be 'd,N_d'")
            rows = [(r["d"].strip(), r["N_d"].strip()) for r in reader]
        seen = {}
        for d, n in rows:
            if int(d) in seen:
                raise ValueError(f"duplicate degree {d}")
            seen[int(d)] = Fraction(n)
        return cls(tuple(seen.items()))

    def scaled(self, k) -> "GWTable":
        return GWTable(tuple((d, k * n) for d, n in self.entries))

    def sums(self, tau: complex) -> tuple[complex, complex]:
        """``(sum N_d q^d, sum d N_d q^d)`` with ``q = exp(2 pi i tau)``."""
        s0 = 0j
        s1 = 0j
        for d, n in self.entries:
            qd = np.exp(2j * np.pi * d * complex(tau))
            s0 += float(n) * qd
            s1 += float(n) * d * qd
        return s0, s1


def _twisted_mukai(F: ChernData, ctx: HypersurfaceContext) -> tuple[list, list]:
    """``v = ch sqrt(Td) (1 + i Lambda)`` split as ``(rational part, coefficient of i*lambda)``.

    ``Lambda = -lambda c_3`` with ``lambda = zeta(3) / (2 pi)**3``.
    """
    rat = ctx.mul(F.coeffs, ctx.sqrt_todd())
    c3 = ctx.chern[3] if ctx.dim >= 3 else 0
    lam = [0] * (ctx.dim + 1)
    if ctx.dim >= 3:
        lam[3] = -F[0] * c3
    return rat, lam


def quintic_classical_coefficients(F: ChernData) -> list[tuple]:
    """Exact ``(a_k, b_k)`` with ``-int e^{-tau H} v(F) = sum_k tau**k (a_k + i lambda b_k)``."""
    ctx = quintic_context()
    rat, lam = _twisted_mukai(F, ctx)
    out = []
    for k in range(4):
        f = Fraction((-1) ** k, math.factorial(k))
        a = -ctx.degree * f * rat[3 - k]
        b = -ctx.degree * f * lam[3 - k]
        out.append((to_exact(a), to_exact(b)))
    return out


def quintic_central_charge(tau, F: ChernData, gw: GWTable | None = None, exact: bool = False):
    """Quantum central charge of ``F`` at ``tau H``.

    ``exact=True`` (only for an empty table) returns the classical part as an
    exact pair ``(rational part, coefficient of i*lambda)`` evaluated at an
    exact ``tau``.
    """
    coeffs = quintic_classical_coefficients(F)
    if exact:
        if gw is not None and gw.entries:
            raise ValueError("exact evaluation only covers the classical part")
        a = sum(c * tau**k for k, (c, _) in enumerate(coeffs))
        b = sum(c * tau**k for k, (_, c) in enumerate(coeffs))
        return _clean(a), _clean(b)
    t = complex(tau)
    if t.imag <= 0:
        raise DomainError("tau must lie in the upper half-plane")
    Z = sum((float(a) + 1j * LAMBDA_QUINTIC * float(b)) * t**k for k, (a, b) in enumerate(coeffs))
    if gw is not None and gw.entries:
        Z += quantum_correction(t, F, gw)
    return complex(Z)


def quantum_correction(tau: complex, F: ChernData, gw: GWTable) -> complex:
    """``2 ch_0 (pi i tau S1 + S0) + (1/5) S1 int ch_1 H^2``."""
    s0, s1 = gw.sums(tau)
    ch1_int = quintic_context().degree * float(F[1])
    return 2 * float(F[0]) * (np.pi * 1j * tau * s1 + s0) + s1 * ch1_int / 5


def quintic_central_charge_derivative(tau, F: ChernData):
    """Exact ``d/dtau`` of the classical central charge (independent of lambda)."""
    coeffs = quintic_classical_coefficients(F)
    total = 0
    for k in range(1, 4):
        a, b = coeffs[k]
        if b:
            raise AssertionError("lambda enters only the constant term")
        total = total + k * a * tau ** (k - 1)
    return _clean(total)


def quintic_charges(tau, gw: GWTable | None = None, basis: Sequence[ChernData] | None = None) -> list[complex]:
    return [quintic_central_charge(tau, F, gw) for F in (basis or quintic_basis())]


def quintic_a_potential(tau, gw: GWTable | None = None) -> float:
    """``K^A`` of the quintic at ``tau H`` over the basis ``1, H, H^2, pt``."""
    Z = quintic_charges(tau, gw)
    return a_potential(Z, quintic_euler_matrix(), 3)


def _clean(x):
    if isinstance(x, QuadNumber) and x.b == 0:
        x = x.a
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


# -- Legendrian and attractor residuals ----------------------------------------------

def legendrian_residual(derivatives: Sequence[Sequence], chi) -> np.ndarray:
    """Matrix ``b(d_i Z, d_j Z)`` over the supplied derivative charge vectors."""
    k = len(derivatives)
    out = np.empty((k, k), dtype=object)
    for i in range(k):
        for j in range(k):
            out[i, j] = _clean(bform(derivatives[i], derivatives[j], chi))
    if not all(_is_exact_scalar(x) for x in out.ravel()):
        return out.astype(complex)
    return out


def kahler_attractor_residual(chi_row: Sequence, C, charges: Sequence):
    """``max_j |chi(F, F_j) - Re(C Z(F_j))|``; exact when every input is exact."""
    devs = [chi_j - re(C * z) for chi_j, z in zip(chi_row, charges)]
    if all(_is_exact_scalar(d) for d in devs):
        return max(abs(Fraction(d)) for d in devs)
    return max(abs(complex(d)) for d in devs)


# -- torus even cohomology ------------------------------------------------------------
#
# Coordinates (v0, V, U, u0): v0 on 1, V_ij on dx_i ^ dy_j, U_ij on the dual
# 4-forms eps^ij and u0 on the volume form.  Flattened to 20 entries.

def torus_vector(v0, V, U, u0) -> list:
    return [v0, *np.asarray(V, dtype=object).ravel(), *np.asarray(U, dtype=object).ravel(), u0]


def torus_mukai_pair(a: Sequence, b: Sequence):
    """``<a, b> = a0 b_u0 - a_u0 b0 + sum A_V B_U - sum A_U B_V``."""
    s = a[0] * b[19] - a[19] * b[0]
    for k in range(9):
        s = s + a[1 + k] * b[10 + k] - a[10 + k] * b[1 + k]
    return _clean(s)


def torus_mukai_matrix() -> np.ndarray:
    M = np.zeros((20, 20), dtype=np.int64)
    M[0, 19], M[19, 0] = 1, -1
    for k in range(9):
        M[1 + k, 10 + k] = 1
        M[10 + k, 1 + k] = -1
    return M


def torus_exp(Omega) -> list:
    """``e^omega = (1, Omega, -Cof(Omega), det Omega)`` for ``omega = sum Omega_ij dx_i ^ dy_j``."""
    Omega = np.asarray(Omega)
    return torus_vector(1, Omega, -cofactor(Omega), det3(Omega))


def torus_central_charges(Omega) -> list:
    """``Z(F_j) = -<e^omega, e_j>`` for the 20 coordinate classes."""
    e = torus_exp(Omega)
    M = torus_mukai_matrix()
    return [_clean(-sum(e[i] * int(M[i, j]) for i in range(20) if M[i, j])) for j in range(20)]


def torus_charge_derivatives(Omega) -> list[list]:
    """``d Z / d Omega_ij`` for the nine directions, as charge vectors on the 20 classes.

    ``d/dt e^{omega + t delta_ij} = (0, E_ij, -(Cof(Omega + E_ij) - Cof(Omega)), Cof(Omega)_ij)``.
    """
    Omega = np.asarray(Omega)
    exact = Omega.dtype == object
    C = cofactor(Omega)
    M = torus_mukai_matrix()
    out = []
    for i in range(3):
        for j in range(3):
            E = np.zeros((3, 3), dtype=object if exact else complex)
            E[...] = 0
            E[i, j] = 1
            dcof = cofactor(Omega + E) - C
            d = torus_vector(0, E, -dcof, C[i, j])
            out.append([_clean(-sum(d[a] * int(M[a, b]) for a in range(20) if M[a, b])) for b in range(20)])
    return out


def torus_euler_matrix() -> EulerMatrix:
    """Euler pairing on the coordinate classes (no Todd or Gamma correction on a torus)."""
    return EulerMatrix(torus_mukai_matrix())
