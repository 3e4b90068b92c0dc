"""Growth of the attractor tau set for diag(2, 2) and a few torus attractors at height 1."""

from __future__ import annotations

from attractors.algebra import GramLattice
from attractors.constellation import covering_radius, tau_cloud, torus_constellation


def main() -> None:
    L = GramLattice([[2, 0], [0, 2]])
    for h in (2, 4, 8, 16):
        cloud = tau_cloud(L, h)
        r = covering_radius(cloud, (0, 1, 1, 2), 51)
        print(f"height {h:2d}: {len(cloud):6d} points, covering radius on [0,1]x[1,2] = {r:.4f}")

    for p in torus_constellation(1, limit=5):
        print(f"p0 = {p.charge.p0}, q0 = {p.charge.q0}, D = {p.D}: T = {[[str(x) for x in row] for row in p.T]}")


if __name__ == "__main__":
    main()
