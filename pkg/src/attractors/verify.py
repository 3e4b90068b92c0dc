"""Seeded invariant suites and the random generators they share with the tests.

Each suite draws its inputs from one ``numpy.random.Generator`` and returns a
:class:`SuiteResult`; a suite passes only if every check is exact (or within
its stated float tolerance).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .algebra import GramLattice, QuadNumber, det3, exact_array, is_positive_definite
from .errors import AttractorError, NoAttractor
from .inverse import Picard9Period, charge_from_period, period_matrix
from .k3 import MukaiVector, mukai_pair, solve_complex_exs, solve_kahler_exs
from .torus import (
    KahlerTorusCharge,
    TorusCharge,
    invariants,
    mirror_cover,
    residual,
    solve_complex_general,
    solve_complex_symmetric,
    solve_kahler,
)

__all__ = [
    "SuiteResult",
    "SUITES",
    "run_suite",
    "random_charge",
    "random_symmetric_charge",
    "random_admissible_symmetric",
    "random_period",
    "random_pd_gram2",
    "random_mukai_pair",
    "random_ns_lattice",
    "admissible",
    "rmd_suite",
    "residuals_suite",
    "roundtrip_suite",
    "exs_suite",
    "legendrian_suite",
    "density_suite",
]


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "failures": self.failures[:20],
            "details": self.details,
            "seconds": round(self.seconds, 3),
        }


# -- generators ----------------------------------------------------------------------

def _sym(rng: np.random.Generator, lo: int, hi: int) -> np.ndarray:
    A = rng.integers(lo, hi + 1, size=(3, 3))
    return np.triu(A) + np.triu(A, 1).T


def random_charge(rng: np.random.Generator, lo: int = -5, hi: int = 5, singular_P: bool = False) -> TorusCharge:
    """Random integer charge; ``singular_P`` forces ``det P = 0`` via a repeated row."""
    x = rng.integers(lo, hi + 1, size=20)
    P = x[1:10].reshape(3, 3)
    if singular_P:
        P[2] = P[int(rng.integers(0, 2))]
    return TorusCharge(int(x[0]), P, x[10:19].reshape(3, 3), int(x[19]))


def random_symmetric_charge(rng: np.random.Generator, lo: int = -3, hi: int = 3) -> TorusCharge:
    return TorusCharge(int(rng.integers(lo, hi + 1)), _sym(rng, lo, hi), _sym(rng, lo, hi), int(rng.integers(lo, hi + 1)))


def admissible(charge: TorusCharge) -> bool:
    inv = invariants(charge)
    return inv.D > 0 and is_positive_definite(inv.R, exact=True)


def random_admissible_symmetric(rng: np.random.Generator, lo: int = -3, hi: int = 3) -> TorusCharge:
    """Rejection-sample a symmetric integer charge with ``R`` positive definite and ``D > 0``.

    Candidates are drawn in blocks and screened with an int64 mask; the first
    admissible row is returned.
    """
    from .constellation import admissible_mask, row_to_charge

    while True:
        x = rng.integers(lo, hi + 1, size=(4096, 14))
        hit = np.flatnonzero(admissible_mask(x))
        if hit.size:
            return row_to_charge(x[hit[0]])


def random_period(rng: np.random.Generator, bound: int = 3, max_D: int = 9) -> Picard9Period:
    """Random ``(R, D, N)`` with entries in ``[-bound, bound]`` and ``N R^-1`` symmetric.

    ``N`` is a primitive multiple of ``S R`` with ``S`` symmetric, reduced by the
    gcd of its entries, so the symmetry condition holds by construction.
    """
    from math import gcd

    while True:
        R = _sym(rng, -bound, bound)
        if not is_positive_definite(exact_array(R), exact=True):
            continue
        for _ in range(20):
            N = _sym(rng, -1, 1) @ R
            g = 0
            for v in N.ravel():
                g = gcd(g, int(v))
            if g > 1:
                N = N // g
            if np.abs(N).max() <= bound:
                break
        else:
            N = np.zeros((3, 3), dtype=np.int64)
        return Picard9Period(R, int(rng.integers(1, max_D + 1)), N)


def random_pd_gram2(rng: np.random.Generator, bound: int = 6) -> GramLattice:
    """Random even positive-definite rank-2 Gram matrix."""
    while True:
        a = 2 * int(rng.integers(1, bound + 1))
        c = 2 * int(rng.integers(1, bound + 1))
        b = int(rng.integers(-bound, bound + 1))
        if a * c - b * b > 0:
            return GramLattice([[a, b], [b, c]])


def random_ns_lattice(rng: np.random.Generator, bound: int = 4) -> GramLattice:
    """Even lattice of signature ``(1, rho - 1)`` as for a projective K3: rank 1 or hyperbolic rank 2."""
    if rng.integers(0, 2) == 0:
        return GramLattice([[2 * int(rng.integers(1, bound + 1))]])
    while True:
        a = 2 * int(rng.integers(-bound, bound + 1))
        c = 2 * int(rng.integers(-bound, bound + 1))
        b = int(rng.integers(-bound, bound + 1))
        if a * c - b * b < 0:
            return GramLattice([[a, b], [b, c]])


def random_mukai_pair(rng: np.random.Generator, L: GramLattice, bound: int = 4) -> tuple[MukaiVector, MukaiVector]:
    """Independent Mukai vectors spanning a positive-definite rank-2 lattice."""
    n = L.rank
    while True:
        c1 = [int(x) for x in rng.integers(-bound, bound + 1, size=n + 2)]
        c2 = [int(x) for x in rng.integers(-bound, bound + 1, size=n + 2)]
        v1 = MukaiVector.from_coords(c1, L)
        v2 = MukaiVector.from_coords(c2, L)
        a = mukai_pair(v1, v1)
        b = mukai_pair(v1, v2)
        if a > 0 and a * mukai_pair(v2, v2) - b * b > 0:
            return v1, v2


# -- suites ---------------------------------------------------------------------------

def rmd_suite(rng: np.random.Generator, n: int = 10_000) -> SuiteResult:
    """``4 det R - M^2 = p0^2 D`` exactly; every fifth charge has ``det P = 0``."""
    fails = []
    singular = 0
    for k in range(n):
        c = random_charge(rng, singular_P=(k % 5 == 0))
        singular += det3(c.P) == 0
        d = invariants(c).rmd_defect(c.p0)
        if d != 0:
            fails.append({"charge": repr(c), "defect": str(d)})
    return SuiteResult("rmd", not fails, n, fails, {"singular_P": int(singular)})


def residuals_suite(rng: np.random.Generator, n: int = 1_000) -> SuiteResult:
    """Exact zero residuals on admissible symmetric charges and existence predicates on random ones."""
    fails = []
    for _ in range(n):
        c = random_admissible_symmetric(rng)
        sol = solve_complex_symmetric(c, exact=True)
        r = residual(c, sol.C, sol.A)
        if any(x != 0 for x in r):
            fails.append({"charge": repr(c), "residual": [str(x) for x in r]})
    predicate_checks = 0
    for _ in range(n):
        for c in (random_symmetric_charge(rng), random_charge(rng, -3, 3)):
            inv = invariants(c)
            if c.is_zero():
                continue
            expect_gen = det3(inv.R) > 0 and inv.D > 0
            try:
                sols = solve_complex_general(c, exact=True)
                got_gen = True
                for s in sols:
                    if any(x != 0 for x in residual(c, s.C, s.A)):
                        fails.append({"charge": repr(c), "branch": s.branch.value})
            except NoAttractor:
                got_gen = False
            if got_gen != expect_gen:
                fails.append({"charge": repr(c), "predicate": "general"})
            if c.is_symmetric():
                expect_sym = inv.D > 0 and is_positive_definite(inv.R, exact=True)
                try:
                    solve_complex_symmetric(c, exact=True)
                    got_sym = True
                except NoAttractor:
                    got_sym = False
                if got_sym != expect_sym:
                    fails.append({"charge": repr(c), "predicate": "symmetric"})
            predicate_checks += 1
    return SuiteResult("residuals", not fails, n + predicate_checks, fails)


def roundtrip_suite(rng: np.random.Generator, n: int = 1_000) -> SuiteResult:
    """Period data to charge and back, with the transported invariants."""
    fails = []
    for _ in range(n):
        p = random_period(rng)
        c = charge_from_period(p)
        sol = solve_complex_symmetric(c, exact=True)
        T = period_matrix(p)
        inv = sol.invariants
        detR = det3(p.R)
        nn = (p.D + 1) * detR
        ok = np.all(sol.A == T)
        ok = ok and np.all(inv.R == nn * p.R)
        ok = ok and inv.M == 2 * nn * detR
        ok = ok and inv.D == 4 * nn * nn * p.D
        if not ok:
            fails.append(p.to_json())
    return SuiteResult("roundtrip", not fails, n, fails)


def _mirror_checks(rng: np.random.Generator, n: int) -> list:
    fails = []
    for _ in range(n):
        c = random_admissible_symmetric(rng)
        k = KahlerTorusCharge(c.p0, c.P, c.Q, c.q0)
        ka = solve_kahler(k, exact=True)
        cs = solve_complex_symmetric(c, exact=True)
        if not np.all(ka.omega == cs.A):
            fails.append({"charge": repr(c), "check": "kahler == complex"})
            continue
        cover = mirror_cover(k, ka.omega)
        half = QuadNumber(0, Fraction(1, 2), int(cover.D))
        for i in range(3):
            for j in range(3):
                im = QuadNumber(0, 0, 1) if i != j else half
                z = cover.omega_prime[i, j]
                zq = z if isinstance(z, QuadNumber) else QuadNumber(z)
                if QuadNumber(0, zq.b, zq.d) != im:
                    fails.append({"charge": repr(c), "check": "Im(cover)"})
    return fails


def exs_suite(rng: np.random.Generator, n: int = 200) -> SuiteResult:
    """K3-side exactness: Hodge-Riemann relations and the delta-exponential invariants."""
    fails = []
    for _ in range(n):
        L = random_pd_gram2(rng)
        a = solve_complex_exs(L, (1, 0), (0, 1))
        sq, nm = a.omega_square(), a.omega_norm()
        if sq != 0 or not nm > 0 or not a.tau.b > 0:
            fails.append({"gram": L.to_json(), "check": "complex"})
        v1, v2 = random_mukai_pair(rng, random_ns_lattice(rng))
        k = solve_kahler_exs(v1, v2)
        if k.delta.r != 1 or k.delta_square() != 0 or k.exponential_defect() != 0:
            fails.append({"v1": v1.to_json(), "v2": v2.to_json(), "check": "exponential"})
        if not k.imag_omega_S_square() > 0:
            fails.append({"v1": v1.to_json(), "v2": v2.to_json(), "check": "positive cone"})
        if any(x != 0 for x in k.residual(v1, v2)):
            fails.append({"v1": v1.to_json(), "v2": v2.to_json(), "check": "residual"})
    fails += _mirror_checks(rng, max(1, n // 4))
    return SuiteResult("exs", not fails, n + max(1, n // 4), fails)


def legendrian_suite(rng: np.random.Generator, n: int = 20) -> SuiteResult:
    """Isotropy of derivative directions for the torus and the classical quintic."""
    from .amodel import (
        legendrian_residual,
        quintic_basis,
        quintic_central_charge_derivative,
        quintic_euler_matrix,
        torus_charge_derivatives,
        torus_euler_matrix,
    )

    fails = []
    chi_t = torus_euler_matrix()
    for _ in range(n):
        c = random_admissible_symmetric(rng)
        Omega = solve_complex_symmetric(c, exact=True).A
        res = legendrian_residual(torus_charge_derivatives(Omega), chi_t)
        if np.any(res != 0):
            fails.append({"family": "torus", "charge": repr(c)})
    chi_q = quintic_euler_matrix()
    basis = quintic_basis()
    for _ in range(n):
        tau = QuadNumber(Fraction(int(rng.integers(-20, 21)), 7), Fraction(int(rng.integers(1, 20)), 3), int(rng.integers(1, 8)))
        d = [quintic_central_charge_derivative(tau, F) for F in basis]
        if np.any(legendrian_residual([d], chi_q) != 0):
            fails.append({"family": "quintic", "tau": str(tau)})
    return SuiteResult("legendrian", not fails, 2 * n, fails)


def density_suite(rng: np.random.Generator, heights=(4, 8, 16), identity_height: int = 6, grid: int = 51) -> SuiteResult:
    """Exact tau identities and a strictly shrinking covering radius for ``diag(2, 2)``."""
    from .constellation import check_identities, covering_radius, tau_cloud

    L = GramLattice([[2, 0], [0, 2]])
    fails = []
    try:
        checked = check_identities(L, identity_height)
    except AssertionError as exc:
        checked = 0
        fails.append({"identity": str(exc)})
    radii = [covering_radius(tau_cloud(L, h), (0, 1, 1, 2), grid) for h in heights]
    if not all(b < a for a, b in zip(radii, radii[1:])):
        fails.append({"radii": radii})
    return SuiteResult("density", not fails, checked + len(radii), fails, {"heights": list(heights), "radii": radii})


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "rmd": rmd_suite,
    "residuals": residuals_suite,
    "roundtrip": roundtrip_suite,
    "exs": exs_suite,
    "legendrian": legendrian_suite,
    "density": density_suite,
}


def run_suite(name: str, seed: int = 0, **kwargs) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    try:
        res = SUITES[name](rng, **kwargs)
    except AttractorError as exc:
        res = SuiteResult(name, False, 0, [{"error": repr(exc)}])
    res.seconds = time.perf_counter() - t0
    return res
