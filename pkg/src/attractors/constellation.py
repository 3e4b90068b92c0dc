"""Enumerating attractor points and measuring how densely they fill a region.

For a rank-2 positive-definite even lattice every independent pair ``(u1, u2)``
gives ``tau = ((u1, u2) + sqrt(-D)) / u1^2`` in the upper half-plane.  The
point sets grow with the coordinate height of the pairs; the covering radius of
a fixed box measures how close they come to every point of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .algebra import GramLattice, QuadNumber, cofactor, det3, is_positive_definite
from .errors import NoAttractor
from .torus import TorusCharge, solve_complex_symmetric

__all__ = [
    "TauPoint",
    "pair_arrays",
    "tau_set",
    "tau_of",
    "tau_cloud",
    "check_identities",
    "covering_radius",
    "admissible_symmetric_charges",
    "admissible_mask",
    "row_to_charge",
    "torus_constellation",
    "ConstellationPoint",
]


@dataclass(frozen=True)
class TauPoint:
    tau: QuadNumber
    u1: tuple
    u2: tuple
    D: int

    def as_complex(self) -> complex:
        return complex(self.tau)


def _check_lattice(L: GramLattice) -> None:
    if L.rank != 2:
        raise ValueError("expected a rank-2 lattice")
    if not is_positive_definite(L.matrix, exact=True):
        raise ValueError("lattice must be positive definite")
    if not L.even:
        raise ValueError("lattice must be even")


def tau_of(L: GramLattice, u1: Sequence[int], u2: Sequence[int]) -> QuadNumber:
    """Exact ``tau`` of a pair (pair must be independent)."""
    a = L.norm(u1)
    b = L.pair(u1, u2)
    D = a * L.norm(u2) - b * b
    if D <= 0:
        raise ValueError("pair is dependent")
    return (QuadNumber(b) + QuadNumber.sqrt_neg(D)) / a


def _vectors(height: int) -> np.ndarray:
    r = np.arange(-height, height + 1)
    V = np.array(np.meshgrid(r, r, indexing="ij")).reshape(2, -1).T
    return V[np.any(V != 0, axis=1)]


def pair_arrays(L: GramLattice, height: int, primitive: bool = False):
    """All independent ordered pairs at sup-norm ``<= height`` with their ``a = u1^2``, ``b``, ``D``.

    Rows come in lexicographic order of ``(u1, u2)``.
    """
    _check_lattice(L)
    V = _vectors(height)
    if primitive:
        V = V[np.gcd(V[:, 0], V[:, 1]) == 1]
    G = L.matrix.astype(np.int64)
    norms = np.einsum("ni,ij,nj->n", V, G, V)
    cross = V @ G @ V.T
    n = len(V)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    i, j = i.ravel(), j.ravel()
    a = norms[i]
    b = cross[i, j]
    D = a * norms[j] - b * b
    keep = D > 0
    return V, i[keep], j[keep], a[keep], b[keep], D[keep]


def _reduced_keys(a, b, D) -> np.ndarray:
    """Exact canonical keys ``(b/a, D/a^2)`` as reduced integer pairs."""
    g1 = np.gcd(b, a)
    a2 = a * a
    g2 = np.gcd(D, a2)
    return np.stack([b // g1, a // g1, D // g2, a2 // g2], axis=1)


def tau_cloud(L: GramLattice, height: int, primitive: bool = False) -> np.ndarray:
    """Distinct ``tau`` values as a complex float array (same set as :func:`tau_set`)."""
    V, i, j, a, b, D = pair_arrays(L, height, primitive)
    keys = _reduced_keys(a, b, D)
    _, first = np.unique(keys, axis=0, return_index=True)
    first.sort()
    return (b[first] + 1j * np.sqrt(D[first].astype(float))) / a[first]


def tau_set(L: GramLattice, height: int, primitive: bool = False) -> list[TauPoint]:
    """Distinct exact ``tau`` over all independent pairs (first pair in lexicographic order kept)."""
    V, i, j, a, b, D = pair_arrays(L, height, primitive)
    keys = _reduced_keys(a, b, D)
    _, first = np.unique(keys, axis=0, return_index=True)
    first.sort()
    out = []
    for k in first:
        tau = (QuadNumber(int(b[k])) + QuadNumber.sqrt_neg(int(D[k]))) / int(a[k])
        out.append(TauPoint(tau, tuple(int(x) for x in V[i[k]]), tuple(int(x) for x in V[j[k]]), int(D[k])))
    return out


def check_identities(L: GramLattice, height: int, scales=(1, 2, 3), shifts=(-2, -1, 1, 2)) -> int:
    """Verify both elementary identities exactly for every pair up to ``height``.

    * ``tau(k u1, l u2) = (l / k) tau(u1, u2)`` for ``k, l`` in ``scales``;
    * ``tau(u1, k u1 + u2) = k + tau(u1, u2)`` for ``k`` in ``shifts``.

    Returns the number of identities checked; raises ``AssertionError`` on the first failure.
    """
    V, i, j, _, _, _ = pair_arrays(L, height)
    count = 0
    for a_idx, b_idx in zip(i, j):
        u1 = tuple(int(x) for x in V[a_idx])
        u2 = tuple(int(x) for x in V[b_idx])
        t = tau_of(L, u1, u2)
        for k in scales:
            for l in scales:
                lhs = tau_of(L, tuple(k * x for x in u1), tuple(l * x for x in u2))
                if lhs != t * Fraction(l, k):
                    raise AssertionError(f"scaling identity fails at {u1}, {u2}, k={k}, l={l}")
                count += 1
        for k in shifts:
            lhs = tau_of(L, u1, tuple(k * x + y for x, y in zip(u1, u2)))
            if lhs != t + k:
                raise AssertionError(f"translation identity fails at {u1}, {u2}, k={k}")
            count += 1
    return count


def covering_radius(points, box: Sequence[float], grid: int) -> float:
    """Largest Euclidean distance from a ``grid x grid`` lattice of the box to the point set."""
    a, b, c, d = (float(x) for x in box)
    if grid < 2:
        raise ValueError("grid must be at least 2")
    if c <= 0:
        raise ValueError("box must lie in the upper half-plane")
    pts = np.array([complex(p.tau) if isinstance(p, TauPoint) else complex(p) for p in points])
    if pts.size == 0:
        raise ValueError("empty point set")
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    gx, gy = np.meshgrid(np.linspace(a, b, grid), np.linspace(c, d, grid))
    dist, _ = tree.query(np.column_stack([gx.ravel(), gy.ravel()]))
    return float(dist.max())


# -- torus constellation -------------------------------------------------------------

_SYM = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


def _sym_batch(x: np.ndarray) -> np.ndarray:
    M = np.empty(x.shape[:-1] + (3, 3), dtype=np.int64)
    for k, (i, j) in enumerate(_SYM):
        M[..., i, j] = x[..., k]
        M[..., j, i] = x[..., k]
    return M


def admissible_mask(x: np.ndarray) -> np.ndarray:
    """Rows (in the 14-entry symmetric layout) with ``R`` positive definite and ``D > 0``."""
    x = np.asarray(x, dtype=np.int64)
    p0, q0 = x[:, 0], x[:, 13]
    P = _sym_batch(x[:, 1:7])
    Q = _sym_batch(x[:, 7:13])
    R = cofactor(P) + p0[:, None, None] * Q
    pd = (R[:, 0, 0] > 0) & (R[:, 0, 0] * R[:, 1, 1] - R[:, 0, 1] * R[:, 1, 0] > 0) & (det3(R) > 0)
    PQ = P @ Q
    t = np.trace(PQ, axis1=1, axis2=2)
    t2 = np.einsum("nij,nji->n", PQ, PQ)
    D = 2 * (t * t - t2) - (p0 * q0 + t) ** 2 + 4 * (p0 * det3(Q) - q0 * det3(P))
    return pd & (D > 0)


def admissible_symmetric_charges(height: int, chunk: int = 1 << 18) -> Iterator[np.ndarray]:
    """Chunks of symmetric integer charges with ``R`` positive definite and ``D > 0``.

    Each row is ``(p0, P11, P12, P13, P22, P23, P33, Q11, ..., Q33, q0)``; of
    each pair ``+-gamma`` only the one whose first non-zero entry is positive
    is kept.
    """
    base = 2 * height + 1
    total = base**14
    powers = base ** np.arange(13, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        x = (idx[:, None] // powers[None, :]) % base - height
        nz = x != 0
        first = np.argmax(nz, axis=1)
        lead = x[np.arange(len(x)), first]
        x = x[lead > 0]
        keep = admissible_mask(x)
        if keep.any():
            yield x[keep]


def row_to_charge(row) -> TorusCharge:
    row = [int(v) for v in row]
    P = _sym_batch(np.array(row[1:7]))
    Q = _sym_batch(np.array(row[7:13]))
    return TorusCharge(row[0], P.astype(object), Q.astype(object), row[13])


@dataclass(frozen=True, eq=False)
class ConstellationPoint:
    charge: TorusCharge
    T: np.ndarray
    D: int
    det_R: int


def torus_constellation(height: int, limit: int | None = None) -> Iterator[ConstellationPoint]:
    """Exact attractors of admissible symmetric charges, lazily, in enumeration order."""
    n = 0
    for block in admissible_symmetric_charges(height):
        for row in block:
            charge = row_to_charge(row)
            try:
                sol = solve_complex_symmetric(charge)
            except NoAttractor:  # pragma: no cover - prefilter guarantees existence
                continue
            inv = sol.invariants
            yield ConstellationPoint(charge, sol.A, int(inv.D), int(det3(inv.R)))
            n += 1
            if limit is not None and n >= limit:
                return
