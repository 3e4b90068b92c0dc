"""Numerical oracle: the torus mass function and its minimization over the Siegel space.

None of this uses the closed-form attractor.  The central charge is the period
``Z(T) = q0 + sum Q_ij T_ij + sum P_ij Cof(T)_ij - p0 det T`` and the volume
``i int Omega ^ conj(Omega)`` is obtained by expanding the holomorphic 3-form
in the exterior algebra.  Minimization uses BFGS on an unconstrained chart.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .algebra import QuadNumber, Surd, cofactor, det3
from .errors import DomainError
from .forms import conj_form, holomorphic_form, top_coefficient, wedge
from .optimize import bfgs, fd_gradient, fd_hessian
from .torus import SiegelPoint, TorusCharge, to_complex

__all__ = [
    "MassConfig",
    "SiegelChart",
    "Basin",
    "MinimizeResult",
    "torus_volume_pairing",
    "volume_closed_form",
    "central_charge_torus",
    "mass",
    "mass_squared_chart",
    "minimize",
    "numeric_hessian",
    "chart_gradient",
    "QuadricResult",
    "line_distance",
    "quadric_objective",
    "quadric_domain_minimize",
]

HP = np.longdouble
CHP = np.clongdouble


@dataclass(frozen=True)
class MassConfig:
    grad_tol: float = 1e-10
    max_iters: int = 500
    fd_step: float = 1e-6
    n_starts: int = 20
    rng_seed: int = 0
    hess_step: float = 1e-4
    newton_polish: int = 6
    coarse_tol: float = 1e-6

    def __post_init__(self):
        for name in ("grad_tol", "max_iters", "fd_step", "n_starts", "hess_step", "coarse_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.rng_seed < 2**64:
            raise ValueError("rng_seed must be a 64-bit unsigned integer")


# -- volume and central charge -------------------------------------------------------

def torus_volume_pairing(T) -> float | Surd:
    """``i * int Omega ^ conj(Omega)`` for ``Omega = ^_i (dx_i + sum_j T_ij dy_j)``.

    Float input gives a float; exact input (QuadNumber entries) gives the exact
    real surd.
    """
    point = T if isinstance(T, SiegelPoint) else SiegelPoint(np.asarray(T))
    M = point.matrix
    omega = holomorphic_form(M)
    top = top_coefficient(wedge(omega, conj_form(omega)))
    if point.exact:
        # top = b sqrt(-d) is purely imaginary; i * b sqrt(-d) = -b sqrt(d)
        q = top if isinstance(top, QuadNumber) else QuadNumber(top)
        if q.a != 0:
            raise ArithmeticError("volume form coefficient is not purely imaginary")
        return Surd(-q.b, q.d)
    return float((1j * top).real)


def volume_closed_form(T) -> float:
    """``8 det Im(T)``; equal to :func:`torus_volume_pairing`."""
    return float(8.0 * np.linalg.det(to_complex(np.asarray(T)).imag))


def central_charge_torus(T, charge: TorusCharge):
    """Period of the holomorphic 3-form over the cycle; batches over leading axes of ``T``."""
    T = T.matrix if isinstance(T, SiegelPoint) else T
    T = np.asarray(T)
    if T.dtype != object:
        ct = T.dtype if T.dtype in (np.complex128, CHP) else np.complex128
        T = T.astype(ct)
        P = charge.P.astype(float).astype(T.real.dtype)
        Q = charge.Q.astype(float).astype(T.real.dtype)
        p0 = T.real.dtype.type(float(charge.p0))
        q0 = T.real.dtype.type(float(charge.q0))
    else:
        P, Q, p0, q0 = charge.P, charge.Q, charge.p0, charge.q0
    return (
        q0
        + (Q * T).sum(axis=(-2, -1))
        + (P * cofactor(T)).sum(axis=(-2, -1))
        - p0 * det3(T)
    )


def mass(T, charge: TorusCharge) -> float:
    """``|Z| / sqrt(volume)``."""
    point = T if isinstance(T, SiegelPoint) else SiegelPoint(np.asarray(T, dtype=complex))
    Tc = point.to_complex()
    Z = central_charge_torus(Tc, charge)
    return float(abs(Z) / np.sqrt(volume_closed_form(Tc)))


# -- chart ---------------------------------------------------------------------------

_UPPER = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
_LOWER = [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]
_DIAG = (0, 2, 5)


class SiegelChart:
    """Twelve real coordinates for the Siegel upper half-space of degree 3.

    ``x[:6]`` are the upper-triangular entries of ``Re T``; ``x[6:]`` fill a
    lower-triangular ``L`` (diagonal stored as logarithms) with ``Im T = L L^T``.
    """

    dim = 12

    @staticmethod
    def decode(x) -> np.ndarray:
        x = np.asarray(x)
        dt = x.dtype if x.dtype in (np.float64, HP) else np.float64
        x = x.astype(dt)
        shape = x.shape[:-1]
        X = np.zeros(shape + (3, 3), dtype=dt)
        L = np.zeros(shape + (3, 3), dtype=dt)
        for k, (i, j) in enumerate(_UPPER):
            X[..., i, j] = x[..., k]
            X[..., j, i] = x[..., k]
        for k, (i, j) in enumerate(_LOWER):
            v = x[..., 6 + k]
            L[..., i, j] = np.exp(v) if k in _DIAG else v
        Y = L @ np.swapaxes(L, -1, -2)
        ct = CHP if dt == HP else np.complex128
        return X.astype(ct) + 1j * Y.astype(ct)

    @staticmethod
    def encode(T) -> np.ndarray:
        T = T.to_complex() if isinstance(T, SiegelPoint) else np.asarray(T, dtype=complex)
        X = T.real
        Y = (T.imag + T.imag.T) / 2
        L = np.linalg.cholesky(Y)
        x = np.empty(12)
        for k, (i, j) in enumerate(_UPPER):
            x[k] = (X[i, j] + X[j, i]) / 2
        for k, (i, j) in enumerate(_LOWER):
            x[6 + k] = np.log(L[i, j]) if k in _DIAG else L[i, j]
        return x

    @staticmethod
    def log_det_imag(x) -> np.ndarray:
        x = np.asarray(x)
        return 2 * (x[..., 6] + x[..., 8] + x[..., 11])


def mass_squared_chart(x, charge: TorusCharge) -> np.ndarray:
    """``|Z|^2 / (8 det Im T)`` at chart coordinates (batched; keeps the input precision)."""
    x = np.asarray(x)
    T = SiegelChart.decode(x)
    Z = central_charge_torus(T, charge)
    absz2 = Z.real * Z.real + Z.imag * Z.imag
    return absz2 / (8 * np.exp(SiegelChart.log_det_imag(x)))


def chart_gradient(charge: TorusCharge, T, step: float = 1e-6) -> np.ndarray:
    """Finite-difference gradient of mass squared in chart coordinates at ``T``."""
    x = SiegelChart.encode(T).astype(HP)[None]
    return fd_gradient(lambda z: mass_squared_chart(z, charge), x, step)[0].astype(float)


def numeric_hessian(charge: TorusCharge, T, step: float = 1e-4) -> np.ndarray:
    """12x12 central-difference Hessian of mass squared in chart coordinates."""
    x = SiegelChart.encode(T).astype(HP)
    H = fd_hessian(lambda z: mass_squared_chart(z, charge), x, step)
    return H.astype(float)


# -- minimization --------------------------------------------------------------------

@dataclass
class Basin:
    T: np.ndarray
    value: float
    grad_norm: float
    converged: bool
    central_charge: complex
    starts: list[int] = field(default_factory=list)

    @property
    def vanishing(self) -> bool:
        """Converged onto the divisor ``Z = 0`` rather than an attractor."""
        return abs(self.central_charge) < 1e-6


@dataclass
class MinimizeResult:
    T: np.ndarray | None
    value: float
    grad_norm: float
    converged: bool
    basins: list[Basin]
    escaped: int
    iterations: list[int]

    def closest(self, target) -> Basin | None:
        target = np.asarray(target, dtype=complex)
        good = [b for b in self.basins if b.converged]
        if not good:
            return None
        return min(good, key=lambda b: np.linalg.norm(b.T - target))


def _starts(cfg: MassConfig) -> np.ndarray:
    rng = np.random.default_rng(cfg.rng_seed)
    x = np.empty((cfg.n_starts, 12))
    x[:, :6] = rng.uniform(-2, 2, size=(cfg.n_starts, 6))
    off = rng.uniform(-1, 1, size=(cfg.n_starts, 6))
    logd = rng.uniform(-1, 1, size=(cfg.n_starts, 6))
    for k in range(6):
        x[:, 6 + k] = logd[:, k] if k in _DIAG else off[:, k]
    return x


def _escaped(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return (np.abs(x[:, list(_DIAG_IDX)]) > 25).any(axis=1) | (np.abs(x) > 1e6).any(axis=1)


_DIAG_IDX = tuple(6 + k for k in _DIAG)


def _polish(fun, x, g, cfg: MassConfig):
    """A few Newton steps with a finite-difference Hessian; kept only when the gradient shrinks."""
    gn = float(np.linalg.norm(g.astype(float)))
    for _ in range(cfg.newton_polish):
        if gn < cfg.grad_tol:
            break
        H = fd_hessian(fun, x, cfg.hess_step).astype(float)
        try:
            w = np.linalg.eigvalsh(H)
            if w.min() <= 0:
                break
            step = np.linalg.solve(H, g.astype(float))
        except np.linalg.LinAlgError:
            break
        xn = x - step.astype(x.dtype)
        gnew = fd_gradient(fun, xn[None], cfg.fd_step)[0]
        gnn = float(np.linalg.norm(gnew.astype(float)))
        if not gnn < gn:
            break
        x, g, gn = xn, gnew, gnn
    return x, g, gn


def _run_chunks(fun, x0: np.ndarray, cfg: MassConfig, threads: int):
    """BFGS over contiguous start chunks; rows never interact, so the merge is exact."""
    # BFGS only brings each start into the quadratic basin; Newton finishes
    kw = dict(grad_tol=max(cfg.grad_tol, cfg.coarse_tol), max_iters=cfg.max_iters, fd_step=cfg.fd_step, escape=_escaped)
    threads = max(1, min(int(threads), len(x0)))
    if threads == 1:
        r = bfgs(fun, x0, **kw)
        return r.x, r.grad, r.escaped, r.iterations
    chunks = np.array_split(np.arange(len(x0)), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda idx: bfgs(fun, x0[idx], **kw), chunks))
    return (
        np.concatenate([p.x for p in parts]),
        np.concatenate([p.grad for p in parts]),
        np.concatenate([p.escaped for p in parts]),
        np.concatenate([p.iterations for p in parts]),
    )


def minimize(charge: TorusCharge, config: MassConfig | None = None, threads: int = 1) -> MinimizeResult:
    """Multi-start quasi-Newton minimization of mass squared over the Siegel space.

    Every distinct converged basin is reported.  Limits onto the divisor
    ``Z = 0`` have value zero but are not attractors, so the returned best
    point is the lowest converged basin with non-vanishing central charge.
    """
    cfg = config or MassConfig()
    if charge.is_zero():
        raise ValueError("the zero charge has mass identically zero")

    def fun(z):
        return mass_squared_chart(z, charge)

    x0 = _starts(cfg).astype(HP)
    xs, grads, escaped, iterations = _run_chunks(fun, x0, cfg, threads)
    finals = []
    for s in range(cfg.n_starts):
        x, g = xs[s], grads[s]
        gn = float(np.linalg.norm(g.astype(float)))
        if not escaped[s] and gn < 1e-4:
            x, g, gn = _polish(fun, x, g, cfg)
        conv = bool(gn < cfg.grad_tol) and not escaped[s]
        T = SiegelChart.decode(x).astype(complex)
        finals.append((float(fun(x[None])[0]), s, T, gn, conv))
    finals.sort(key=lambda t: (t[0], t[1]))
    basins: list[Basin] = []
    for value, s, T, gn, conv in finals:
        for b in basins:
            if b.converged == conv and np.linalg.norm(b.T - T) < 1e-5:
                b.starts.append(s)
                break
        else:
            Z = complex(central_charge_torus(T, charge))
            basins.append(Basin(T, value, gn, conv, Z, [s]))
    good = [b for b in basins if b.converged and not b.vanishing]
    best = good[0] if good else (basins[0] if basins else None)
    return MinimizeResult(
        T=None if best is None else best.T,
        value=float("nan") if best is None else best.value,
        grad_norm=float("nan") if best is None else best.grad_norm,
        converged=bool(good),
        basins=basins,
        escaped=int(escaped.sum()),
        iterations=[int(i) for i in iterations],
    )


# -- quadric period domain -----------------------------------------------------------

@dataclass
class QuadricResult:
    omega: np.ndarray
    tau: complex
    value: float
    quadric_defect: float
    converged: bool


def _signature_check(G: np.ndarray) -> None:
    w = np.linalg.eigvalsh(G.astype(float))
    if int(np.sum(w > 1e-9)) != 2:
        raise DomainError("lattice must have exactly two positive eigenvalues")


def line_distance(a, b) -> float:
    """``sqrt(1 - |<a, b>|^2 / (|a|^2 |b|^2))``: sine of the angle between complex lines."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    c = abs(np.vdot(a, b)) ** 2 / (np.vdot(a, a).real * np.vdot(b, b).real)
    return float(np.sqrt(max(0.0, 1.0 - c)))


def quadric_objective(z, G, u1, u2, mu) -> np.ndarray:
    """Penalized mass squared on ``(Re tau, log Im tau, Re Omega, Im Omega)`` (batched).

    For ``gamma = dx (x) u1 + dy (x) u2`` on ``E x S`` the period is
    ``tau (u1, Omega) - (u2, Omega)`` and the volume is ``2 Im(tau) (Omega, conj Omega)``.
    """
    z = np.asarray(z)
    n = G.shape[0]
    tau = z[:, 0] + 1j * np.exp(z[:, 1])
    om = z[:, 2 : 2 + n] + 1j * z[:, 2 + n : 2 + 2 * n]
    Gom = om @ G
    sq = (Gom * om).sum(axis=1)
    nrm = (Gom * np.conj(om)).sum(axis=1).real
    period = tau * (Gom @ u1) - Gom @ u2
    absp = period.real**2 + period.imag**2
    gauge = (om.real**2 + om.imag**2).sum(axis=1) - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        f = absp / (2 * tau.imag * nrm) + mu * (sq.real**2 + sq.imag**2) / nrm**2 + gauge**2
    return np.where(nrm > 0, f, np.inf)


def quadric_domain_minimize(L, gamma, config: MassConfig | None = None) -> QuadricResult:
    """Minimize the E x S mass over the quadric ``(Omega, Omega) = 0``, ``(Omega, conj Omega) > 0``.

    ``gamma`` is the pair ``(u1, u2)`` of lattice vectors; the elliptic modulus
    is minimized jointly.  The quadric is imposed by a penalty whose weight runs
    through ``10, 100, ..., 10**6``.
    """
    cfg = config or MassConfig(n_starts=12, grad_tol=1e-10, max_iters=300)
    G = np.asarray(L.matrix if hasattr(L, "matrix") else L, dtype=float)
    _signature_check(G)
    u1, u2 = (np.asarray(u, dtype=float) for u in gamma)
    if not (np.any(u1) or np.any(u2)):
        raise ValueError("gamma = 0 has identically vanishing mass")
    n = G.shape[0]
    Gh, u1h, u2h = G.astype(HP), u1.astype(HP), u2.astype(HP)
    rng = np.random.default_rng(cfg.rng_seed)
    w, V = np.linalg.eigh(G)
    pos = V[:, w > 0]
    starts = []
    while len(starts) < cfg.n_starts:
        # a point near the positive plane, on the quadric up to noise
        om = pos[:, 0] + 1j * pos[:, 1] + 0.3 * (rng.normal(size=n) + 1j * rng.normal(size=n))
        om = om / np.linalg.norm(om)
        if (om @ G @ np.conj(om)).real <= 0:
            continue
        starts.append(np.concatenate([[rng.uniform(-1, 1), rng.uniform(-1, 1)], om.real, om.imag]))
    x = np.array(starts, dtype=HP)
    for mu in (1e1, 1e2, 1e3, 1e4, 1e5, 1e6):
        res = bfgs(
            lambda z, mu=mu: quadric_objective(z, Gh, u1h, u2h, HP(mu)),
            x,
            grad_tol=cfg.grad_tol * mu,
            max_iters=cfg.max_iters,
            fd_step=cfg.fd_step,
            max_step=0.5,
        )
        x = res.x
    vals = np.asarray(res.f, dtype=float)
    results = []
    for k in range(len(vals)):
        z = x[k].astype(float)
        om = z[2 : 2 + n] + 1j * z[2 + n :]
        tau = complex(z[0], np.exp(z[1]))
        sq = om @ G @ om
        nrm = (om @ G @ np.conj(om)).real
        results.append(QuadricResult(om, tau, float(vals[k]), float(abs(sq) / nrm), bool(res.converged[k])))
    # limits onto the divisor where the period vanishes are not attractors
    good = [r for r in results if r.converged and r.value > 1e-10]
    pool = good or results
    return min(pool, key=lambda r: r.value)
