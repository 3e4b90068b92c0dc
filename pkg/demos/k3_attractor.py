"""Attractors on E x S: the complex side on a rank-2 lattice and the rigid Kahler point e^{iH}."""

from __future__ import annotations

from attractors.algebra import GramLattice
from attractors.k3 import MukaiVector, kahler_rigidity, solve_complex_exs, solve_kahler_exs


def main() -> None:
    L = GramLattice([[2, 1], [1, 2]])
    a = solve_complex_exs(L, (1, 0), (0, 1))
    print(f"hexagonal lattice: tau = {a.tau}, (Omega, Omega) = {a.omega_square()}, (Omega, conj Omega) = {a.omega_norm()}")

    for n in (1, 2, 3):
        NS = GramLattice([[2 * n]])
        k = solve_kahler_exs(MukaiVector(1, (0,), -n, NS), MukaiVector(0, (-1,), 0, NS))
        r = kahler_rigidity(NS, (0,), 1, (1,))
        print(f"H^2 = {2 * n}: omega_E = {k.omega_E}, omega_S = {k.omega_S[0]} H, rigid = {r.rigid} (m = {r.m}, n = {r.n})")

    r = kahler_rigidity(GramLattice([[2]]), (0,), 2 ** 0.5, (1,))
    print(f"k^2 = sqrt(2): rigid = {r.rigid}")


if __name__ == "__main__":
    main()
