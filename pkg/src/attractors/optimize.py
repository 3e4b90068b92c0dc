"""Batched BFGS with finite-difference gradients.

All starts advance in lock step on a ``(starts, dim)`` array; every start has
its own inverse-Hessian estimate, step length and stopping state, so the rows
never influence each other.  Objectives take an ``(N, dim)`` array and return
``(N,)`` values, letting one call evaluate a whole finite-difference stencil.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["fd_gradient", "fd_hessian", "bfgs", "BFGSResult"]

Objective = Callable[[np.ndarray], np.ndarray]


def fd_gradient(fun: Objective, x: np.ndarray, h: float) -> np.ndarray:
    """Central differences for each row of ``x`` (shape ``(S, n)``)."""
    S, n = x.shape
    E = np.eye(n, dtype=x.dtype) * h
    pts = np.concatenate([x[:, None, :] + E[None], x[:, None, :] - E[None]], axis=1)
    vals = fun(pts.reshape(S * 2 * n, n)).reshape(S, 2 * n)
    return (vals[:, :n] - vals[:, n:]) / (2 * h)


def fd_hessian(fun: Objective, x: np.ndarray, h: float) -> np.ndarray:
    """Symmetrized four-point central-difference Hessian at a single point ``x``."""
    x = np.asarray(x)
    n = x.shape[0]
    E = np.eye(n, dtype=x.dtype) * h
    pp = x + E[:, None] + E[None, :]
    pm = x + E[:, None] - E[None, :]
    mp = x - E[:, None] + E[None, :]
    mm = x - E[:, None] - E[None, :]
    pts = np.stack([pp, pm, mp, mm]).reshape(4 * n * n, n)
    v = fun(pts).reshape(4, n, n)
    H = (v[0] - v[1] - v[2] + v[3]) / (4 * h * h)
    return (H + H.T) / 2


@dataclass
class BFGSResult:
    x: np.ndarray
    f: np.ndarray
    grad: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray
    escaped: np.ndarray


def bfgs(
    fun: Objective,
    x0: np.ndarray,
    *,
    grad_tol: float,
    max_iters: int,
    fd_step: float,
    max_step: float = 1.0,
    escape: Callable[[np.ndarray], np.ndarray] | None = None,
) -> BFGSResult:
    """Minimize ``fun`` from every row of ``x0``.

    ``escape(x)`` flags rows that have left the region of interest (e.g. run
    off toward the boundary); such rows stop and are reported as escaped.
    """
    x = np.array(x0, copy=True)
    S, n = x.shape
    f = fun(x)
    g = fd_gradient(fun, x, fd_step)
    Hinv = np.broadcast_to(np.eye(n, dtype=x.dtype), (S, n, n)).copy()
    done = ~np.isfinite(f)
    converged = np.zeros(S, dtype=bool)
    escaped = np.zeros(S, dtype=bool)
    iters = np.zeros(S, dtype=int)
    gnorm = np.linalg.norm(g.astype(float), axis=1)
    converged |= (gnorm < grad_tol) & ~done
    done |= converged
    c1 = 1e-4
    for _ in range(max_iters):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        xa, fa, ga, Ha = x[act], f[act], g[act], Hinv[act]
        p = -np.einsum("sij,sj->si", Ha, ga)
        slope = np.einsum("si,si->s", p, ga)
        bad = ~(slope < 0)
        if bad.any():
            Ha[bad] = np.eye(n, dtype=x.dtype)
            p[bad] = -ga[bad]
            slope[bad] = -np.einsum("si,si->s", ga[bad], ga[bad])
        pn = np.linalg.norm(p.astype(float), axis=1)
        shrink = np.where(pn > max_step, max_step / np.maximum(pn, 1e-300), 1.0).astype(x.dtype)
        p = p * shrink[:, None]
        slope = slope * shrink
        alpha = np.ones(act.size, dtype=x.dtype)
        ok = np.zeros(act.size, dtype=bool)
        fnew = np.array(fa, copy=True)
        for _ls in range(60):
            pend = np.flatnonzero(~ok)
            if pend.size == 0:
                break
            trial = xa[pend] + alpha[pend, None] * p[pend]
            ft = fun(trial)
            acc = np.isfinite(ft) & (ft <= fa[pend] + c1 * alpha[pend] * slope[pend])
            ok[pend[acc]] = True
            fnew[pend[acc]] = ft[acc]
            alpha[pend[~acc]] *= 0.5
        # rows whose line search failed cannot make progress
        stalled = ~ok
        s = alpha[:, None] * p
        xn = xa + s
        xn[stalled] = xa[stalled]
        fnew[stalled] = fa[stalled]
        gn = fd_gradient(fun, xn, fd_step)
        y = gn - ga
        sy = np.einsum("si,si->s", s, y)
        upd = (~stalled) & (sy > 1e-12 * np.linalg.norm(s.astype(float), axis=1) * np.linalg.norm(y.astype(float), axis=1))
        if upd.any():
            rho = 1.0 / sy[upd]
            Hs = Ha[upd]
            ss, ys = s[upd], y[upd]
            I = np.eye(n, dtype=x.dtype)
            V = I[None] - rho[:, None, None] * ys[:, None, :] * ss[:, :, None]
            Ha[upd] = V @ Hs @ np.swapaxes(V, 1, 2) + rho[:, None, None] * ss[:, :, None] * ss[:, None, :]
        x[act], f[act], g[act], Hinv[act] = xn, fnew, gn, Ha
        iters[act] += 1
        gnorm = np.linalg.norm(gn.astype(float), axis=1)
        conv = gnorm < grad_tol
        converged[act[conv]] = True
        done[act[conv | stalled]] = True
        if escape is not None:
            esc = escape(xn) & ~conv
            escaped[act[esc]] = True
            done[act[esc]] = True
    return BFGSResult(x, f, g, converged, iters, escaped)
