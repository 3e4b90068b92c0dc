"""Closed-form torus attractor, checked against the mass minimizer and inverted from period data."""

from __future__ import annotations

import numpy as np

from attractors.inverse import Picard9Period, charge_from_period, period_matrix
from attractors.mass import mass, minimize
from attractors.torus import TorusCharge, invariants, residual, solve_complex_symmetric, to_complex


def main() -> None:
    charge = TorusCharge(1, np.eye(3, dtype=np.int64), np.eye(3, dtype=np.int64), -1)
    inv = invariants(charge)
    print(f"charge (1, I, I, -1): D = {inv.D}, M = {inv.M}, det R = {np.linalg.det(inv.R.astype(float)):.0f}")

    sol = solve_complex_symmetric(charge)
    print(f"closed form: C = {sol.C}, T diagonal = {[str(sol.A[i, i]) for i in range(3)]}")
    print(f"exact residual: {residual(charge, sol.C, sol.A)}")

    T = to_complex(sol.A)
    res = minimize(charge)
    print(f"minimizer: {len(res.basins)} basin(s), |T - T_closed| = {np.linalg.norm(res.T - T):.2e}")
    print(f"mass at the attractor: {mass(T, charge):.12f} (minimized {res.value ** 0.5:.12f})")

    period = Picard9Period(np.array([[2, 1, 0], [1, 2, 0], [0, 0, 1]]), 3, np.zeros((3, 3), dtype=np.int64))
    c = charge_from_period(period)
    back = solve_complex_symmetric(c)
    print(f"period (R, D=3, N=0) -> charge p0 = {c.p0}, q0 = {c.q0}; T recovered exactly: {np.all(back.A == period_matrix(period))}")


if __name__ == "__main__":
    main()
