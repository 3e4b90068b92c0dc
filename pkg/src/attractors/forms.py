"""A tiny exterior algebra on ``R^6`` with coordinates ``dx1, dx2, dx3, dy1, dy2, dy3``.

Forms are dicts ``{bitmask: coefficient}``; bit ``k`` is ``dx_{k+1}`` for
``k < 3`` and ``dy_{k-2}`` for ``k >= 3``.  Coefficients may be any ring
elements (floats, complex, Fractions, QuadNumbers).  Used as a direct,
formula-free route to top-degree integrals on the 6-torus.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

__all__ = [
    "dx",
    "dy",
    "wedge",
    "add",
    "scale",
    "conj_form",
    "top_coefficient",
    "VOLUME_ORDER",
    "holomorphic_form",
    "torus_basis_2",
    "torus_basis_4",
]

Form = dict


def _bit(k: int) -> int:
    return 1 << k


def dx(i: int) -> Form:
    """``dx_{i+1}`` for ``i`` in 0..2."""
    return {_bit(i): 1}


def dy(j: int) -> Form:
    return {_bit(3 + j): 1}


def _sign(a: int, b: int) -> int:
    """Sign of reordering ``e_a ^ e_b`` (increasing bit order) into sorted order."""
    s = 0
    bb = b
    while bb:
        low = bb & -bb
        # count generators of a above this generator of b
        s += bin(a & ~((low << 1) - 1)).count("1")
        bb ^= low
    return -1 if s & 1 else 1


def wedge(*forms: Form) -> Form:
    out: Form = {0: 1}
    for f in forms:
        nxt: Form = {}
        for a, ca in out.items():
            for b, cb in f.items():
                if a & b:
                    continue
                key = a | b
                term = ca * cb if _sign(a, b) > 0 else -(ca * cb)
                nxt[key] = nxt[key] + term if key in nxt else term
        out = nxt
    return out


def add(*forms: Form) -> Form:
    out: Form = {}
    for f in forms:
        for k, c in f.items():
            out[k] = out[k] + c if k in out else c
    return out


def scale(c, f: Form) -> Form:
    return {k: c * v for k, v in f.items()}


def conj_form(f: Form) -> Form:
    from .algebra import conj

    return {k: conj(v) for k, v in f.items()}


# dx1 dy1 dx2 dy2 dx3 dy3 -- the complex orientation
VOLUME_ORDER = (0, 3, 1, 4, 2, 5)


def top_coefficient(f: Form, order=VOLUME_ORDER):
    """Coefficient of ``f`` against the oriented volume form listed in ``order``."""
    full = (1 << 6) - 1
    c = f.get(full, 0)
    # sign of the permutation taking ``order`` to increasing order
    perm = list(order)
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return c if sign > 0 else -c


def holomorphic_form(T) -> Form:
    """``(dx1 + sum_j T[0,j] dy_j) ^ (dx2 + ...) ^ (dx3 + ...)``."""
    T = np.asarray(T)
    factors = []
    for i in range(3):
        f = dict(dx(i))
        for j in range(3):
            f[_bit(3 + j)] = T[i, j]
        factors.append(f)
    return wedge(*factors)


def torus_basis_2() -> dict[tuple[int, int], Form]:
    """``delta_ij = dx_i ^ dy_j``."""
    return {(i, j): wedge(dx(i), dy(j)) for i in range(3) for j in range(3)}


def torus_basis_4() -> dict[tuple[int, int], Form]:
    """``eps^ij = (-1)**(i+j) dx_a dx_b dy_c dy_d`` with ``{a,b}``, ``{c,d}`` complementary to ``i``, ``j``.

    With this choice ``omega^2/2 = -sum Cof(Omega)_ij eps^ij`` for ``omega = sum Omega_ij delta_ij``.
    """
    out = {}
    for i in range(3):
        a, b = (k for k in range(3) if k != i)
        for j in range(3):
            c, d = (k for k in range(3) if k != j)
            f = wedge(dx(a), dx(b), dy(c), dy(d))
            out[(i, j)] = f if (i + j) % 2 == 0 else scale(-1, f)
    return out


def all_masks(degree: int) -> list[int]:
    return [sum(1 << k for k in c) for c in combinations(range(6), degree)]
