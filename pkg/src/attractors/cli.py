"""``attractors`` command-line interface.

Every subcommand writes one JSON run report to stdout (pretty on a terminal,
compact when piped).  Exit codes: 0 success, 2 malformed input, 3 no
attractor, 4 verification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import GramLattice, det3
from .codec import (
    charge_to_json,
    decode_matrix,
    decode_scalar,
    encode_matrix,
    encode_scalar,
    kcharge_from_json,
)
from .errors import AsymmetricCharge, AttractorError, DegenerateCoefficients, DependentVectors, DomainError, NoAttractor

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_ATTRACTOR = 3
EXIT_SUITE = 4

SUSPECT_THRESHOLD = 1e-9


class InputError(Exception):
    pass


@dataclass
class RunReport:
    command: list
    inputs_digest: str
    seed: int | None = None
    outputs: dict = field(default_factory=dict)
    residuals: list = field(default_factory=list)
    suspect: bool = False
    timing: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "seed": self.seed,
            "outputs": self.outputs,
            "residuals": self.residuals,
            "suspect": self.suspect,
            "timing": self.timing,
        }


# -- input helpers ---------------------------------------------------------------------

def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def _digest(args: argparse.Namespace) -> str:
    """SHA-256 over the parsed arguments and the bytes of every input file."""
    h = hashlib.sha256()
    for key in sorted(vars(args)):
        if key in ("func", "threads", "out", "pretty"):
            continue
        val = getattr(args, key)
        h.update(f"{key}={val!r};".encode())
        if key in _FILE_ARGS and val:
            try:
                h.update(Path(val).read_bytes())
            except OSError:
                pass
    return h.hexdigest()


_FILE_ARGS = {"charge", "period", "lattice", "vectors", "B", "kappa", "gw", "config", "T"}


def parse_complex(text: str) -> complex:
    """``"a+bi"`` (also ``"bi"``, ``"a"``, ``j`` instead of ``i``)."""
    s = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise InputError(f"cannot parse complex number {text!r}") from None


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return int(args.threads)
    env = os.environ.get("ATTRACTOR_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"ATTRACTOR_THREADS must be an integer, got {env!r}") from None
    return 1


def _load_charge(path: str):
    from .codec import charge_from_json

    return charge_from_json(_read_json(path))


def _float_residuals(res) -> list[float]:
    return [float(x) for x in res]


def _res_json(res) -> list:
    return [encode_scalar(x) for x in res]


# -- subcommands -------------------------------------------------------------------------

def cmd_solve_torus(args, report: RunReport) -> int:
    from .torus import (
        invariants,
        mirror_cover,
        residual,
        solve_complex_general,
        solve_complex_symmetric,
        solve_kahler,
    )

    exact = not args.float
    raw = _read_json(args.charge)
    if args.mode == "kahler":
        k = kcharge_from_json(raw)
        sol = solve_kahler(k, exact=exact)
        charge = k.as_torus_charge(sign=-1)
        res = residual(charge, sol.C, sol.omega)
        out = {
            "mode": "kahler",
            "C": encode_scalar(sol.C),
            "Omega": encode_matrix(sol.omega),
            "invariants": _inv_json(invariants(k.as_torus_charge())),
        }
        if exact and k.is_integral():
            cover = mirror_cover(k, sol.omega)
            out["mirror_cover"] = {
                "D": cover.D,
                "scale": encode_matrix(cover.scale),
                "Omega_prime": encode_matrix(cover.omega_prime),
            }
        report.outputs = out
        report.residuals = [_res_json(res)]
        report.suspect = not exact and max(_float_residuals(res)) > SUSPECT_THRESHOLD
        return EXIT_OK
    from .codec import charge_from_json

    charge = charge_from_json(raw)
    if args.branch == "symmetric":
        sols = [solve_complex_symmetric(charge, exact=exact)]
    else:
        sols = solve_complex_general(charge, exact=exact)
    report.outputs = {
        "mode": "complex",
        "branch": args.branch,
        "charge": charge_to_json(charge),
        "invariants": _inv_json(invariants(charge)),
        "solutions": [
            {"branch": s.branch.value, "C": encode_scalar(s.C), "A": encode_matrix(s.A)} for s in sols
        ],
    }
    resids = [residual(charge, s.C, s.A) for s in sols]
    report.residuals = [_res_json(r) for r in resids]
    report.suspect = (not exact) and any(max(_float_residuals(r)) > SUSPECT_THRESHOLD for r in resids)
    return EXIT_OK


def _inv_json(inv) -> dict:
    return {"R": encode_matrix(inv.R), "M": encode_scalar(inv.M), "D": encode_scalar(inv.D)}


def cmd_invert_picard9(args, report: RunReport) -> int:
    from .inverse import Picard9Period, charge_from_period, clear_denominators, period_matrix
    from .torus import residual, solve_complex_symmetric

    try:
        p = Picard9Period.from_json(_read_json(args.period))
    except KeyError as exc:
        raise InputError(f"period JSON missing field {exc}") from None
    charge = charge_from_period(p)
    k, integral = clear_denominators(charge)
    T = period_matrix(p)
    sol = solve_complex_symmetric(charge, exact=True)
    sol_int = solve_complex_symmetric(integral, exact=True)
    inv = sol.invariants
    n = (p.D + 1) * det3(p.R)
    report.outputs = {
        "period": p.to_json(),
        "T": encode_matrix(T),
        "charge": charge_to_json(charge),
        "k": k,
        "integral_charge": charge_to_json(integral),
        "forward": {
            "T_matches": bool(np.all(sol.A == T)),
            "integral_T_matches": bool(np.all(sol_int.A == T)),
            "R_tilde_is_nR": bool(np.all(inv.R == n * p.R)),
            "M_tilde": encode_scalar(inv.M),
            "D_tilde": encode_scalar(inv.D),
            "D_tilde_is_4n2D": inv.D == 4 * n * n * p.D,
            "n": n,
        },
    }
    report.residuals = [_res_json(residual(charge, sol.C, sol.A)), _res_json(residual(integral, sol_int.C, sol_int.A))]
    return EXIT_OK


def _load_lattice(path: str) -> GramLattice:
    try:
        return GramLattice.from_json(_read_json(path))
    except KeyError:
        raise InputError("lattice JSON needs a 'gram' field") from None


def cmd_solve_exs(args, report: RunReport) -> int:
    from .k3 import MukaiVector, solve_complex_exs, solve_kahler_exs

    L = _load_lattice(args.lattice)
    vec = _read_json(args.vectors)
    if args.mode == "complex":
        try:
            u1, u2 = vec["u1"], vec["u2"]
        except (KeyError, TypeError):
            raise InputError("vectors JSON needs 'u1' and 'u2'") from None
        a = solve_complex_exs(L, u1, u2)
        report.outputs = {
            "mode": "complex",
            "tau": encode_scalar(a.tau),
            "D": a.D,
            "omega_S": [encode_scalar(x) for x in a.w_coords],
            "omega_square": encode_scalar(a.omega_square()),
            "omega_norm": encode_scalar(a.omega_norm()),
        }
        report.residuals = [[encode_scalar(a.omega_square())]]
        return EXIT_OK
    try:
        v1 = MukaiVector.from_json(vec["v1"], L)
        v2 = MukaiVector.from_json(vec["v2"], L)
    except (KeyError, TypeError):
        raise InputError("vectors JSON needs 'v1' and 'v2' Mukai vectors") from None
    k = solve_kahler_exs(v1, v2)
    B, d = k.imag_omega_S()
    report.outputs = {
        "mode": "kahler",
        "omega_E": encode_scalar(k.omega_E),
        "C": encode_scalar(k.C),
        "D": k.D,
        "delta": k.delta.to_json(),
        "omega_S": [encode_scalar(x) for x in k.omega_S],
        "imag_omega_S": {"B": [encode_scalar(x) for x in B], "sqrt": d},
        "imag_omega_S_square": encode_scalar(k.imag_omega_S_square()),
        "delta_square": encode_scalar(k.delta_square()),
        "exponential_defect": encode_scalar(k.exponential_defect()),
    }
    report.residuals = [[encode_scalar(x) for x in k.residual(v1, v2)]]
    return EXIT_OK


def cmd_rigidity(args, report: RunReport) -> int:
    from .k3 import kahler_rigidity

    L = _load_lattice(args.lattice)
    b = _read_json(args.B)
    kap = _read_json(args.kappa)
    try:
        B = [decode_scalar(x) for x in (b["B"] if isinstance(b, dict) else b)]
        H = kap["H"]
        k2 = decode_scalar(kap["k2"])
    except (KeyError, TypeError):
        raise InputError("expected B as a list (or {'B': [...]}) and kappa as {'H': [...], 'k2': ...}") from None
    r = kahler_rigidity(L, B, k2, H)
    out = {"rigid": r.rigid}
    if r.rigid:
        g1, g2 = r.generators
        out.update(
            {
                "m": r.m,
                "n": r.n,
                "re_part": r.re_part.to_json(),
                "im_part": r.im_part.to_json(),
                "im_scale": r.im_scale,
                "generators": [g1.to_json(), g2.to_json()],
            }
        )
    else:
        out["witness"] = r.witness
    report.outputs = out
    return EXIT_OK


def cmd_minimize(args, report: RunReport) -> int:
    from .mass import MassConfig, mass, minimize, numeric_hessian
    from .torus import solve_complex_symmetric

    charge = _load_charge(args.charge)
    cfg_kw = {}
    if args.config:
        cfg_kw.update(_read_json(args.config))
    if args.seed is not None:
        cfg_kw["rng_seed"] = args.seed
    if args.starts is not None:
        cfg_kw["n_starts"] = args.starts
    try:
        cfg = MassConfig(**cfg_kw)
    except TypeError as exc:
        raise InputError(f"bad config: {exc}") from None
    report.seed = cfg.rng_seed
    res = minimize(charge, cfg, threads=_threads(args))
    out = {
        "converged": res.converged,
        "value": res.value,
        "grad_norm": res.grad_norm,
        "T": encode_matrix(res.T) if res.T is not None else None,
        "escaped": res.escaped,
        "n_basins": len(res.basins),
    }
    if res.converged:
        H = numeric_hessian(charge, res.T, cfg.hess_step)
        eig = np.linalg.eigvalsh(H)
        out["hessian_min_eigenvalue"] = float(eig.min())
        out["mass"] = float(mass(res.T, charge))
        try:
            closed = solve_complex_symmetric(charge, exact=False)
            out["closed_form_distance"] = float(np.linalg.norm(res.T - closed.A))
        except AttractorError:
            out["closed_form_distance"] = None
    if args.verbose:
        out["config"] = {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}
        out["iterations"] = res.iterations
        out["basins"] = [
            {
                "T": encode_matrix(b.T),
                "value": b.value,
                "grad_norm": b.grad_norm,
                "converged": b.converged,
                "central_charge": encode_scalar(complex(b.central_charge)),
                "starts": b.starts,
            }
            for b in res.basins
        ]
    report.outputs = out
    if res.converged:
        report.residuals = [[res.grad_norm]]
        report.suspect = res.grad_norm > SUSPECT_THRESHOLD
    return EXIT_OK


def cmd_wp(args, report: RunReport) -> int:
    from .amodel import GWTable, a_potential, elliptic_charges, elliptic_euler, quintic_a_potential

    if args.family == "torus":
        from .mass import torus_volume_pairing

        from .torus import SiegelPoint

        if not args.T:
            raise InputError("wp torus needs --T FILE")
        T = SiegelPoint(decode_matrix(_read_json(args.T))).matrix
        vol = torus_volume_pairing(T)
        report.outputs = {"family": "torus", "volume": encode_scalar(vol) if not isinstance(vol, float) else vol,
                          "K": -math.log(float(vol))}
        return EXIT_OK
    if args.tau is None:
        raise InputError("--tau is required")
    tau = parse_complex(args.tau)
    if tau.imag <= 0:
        raise DomainError("tau must lie in the upper half-plane")
    if args.family == "elliptic":
        K = a_potential(elliptic_charges(tau), elliptic_euler(), 1)
        report.outputs = {"family": "elliptic", "tau": encode_scalar(tau), "K": K, "closed_form": -math.log(2 * tau.imag)}
        report.residuals = [[abs(K + math.log(2 * tau.imag))]]
        return EXIT_OK
    gw = GWTable.from_csv(args.gw) if args.gw else GWTable.empty()
    K = quintic_a_potential(tau, gw)
    ratio = math.exp(-K) / ((20 / 3) * tau.imag**3)
    report.outputs = {"family": "quintic", "tau": encode_scalar(tau), "K": K, "ratio_to_leading": ratio,
                      "gw_degrees": [d for d, _ in gw.entries]}
    return EXIT_OK


def cmd_constellation(args, report: RunReport) -> int:
    from .constellation import covering_radius, tau_cloud, tau_set, torus_constellation

    if args.torus:
        pts = []
        for p in torus_constellation(args.height[0], limit=args.limit):
            pts.append({"charge": charge_to_json(p.charge), "T": encode_matrix(p.T), "D": p.D, "det_R": p.det_R})
        report.outputs = {"height": args.height[0], "count": len(pts), "points": pts}
        return EXIT_OK
    if not args.lattice:
        raise InputError("constellation needs --lattice FILE (or --torus)")
    L = _load_lattice(args.lattice)
    try:
        box = [float(x) for x in args.box.split(",")]
    except ValueError:
        raise InputError("--box must be a,b,c,d") from None
    if len(box) != 4:
        raise InputError("--box must be a,b,c,d")
    summary = []
    for h in args.height:
        cloud = tau_cloud(L, h, primitive=args.primitive)
        summary.append({"height": h, "points": int(cloud.size), "covering_radius": covering_radius(cloud, box, args.grid)})
    report.outputs = {"gram": L.to_json()["gram"], "box": box, "grid": args.grid, "primitive": args.primitive,
                      "summary": summary}
    if args.csv:
        pts = tau_set(L, args.height[-1], primitive=args.primitive)
        with open(args.csv, "w") as fh:
            fh.write("re_tau,im_tau,u1,u2,D\n")
            for p in pts:
                z = complex(p.tau)
                u1 = " ".join(str(x) for x in p.u1)
                u2 = " ".join(str(x) for x in p.u2)
                fh.write(f"{z.real!r},{z.imag!r},{u1},{u2},{p.D}\n")
        report.outputs["csv"] = args.csv
    return EXIT_OK


def cmd_verify(args, report: RunReport) -> int:
    from .verify import SUITES, run_suite

    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    report.seed = args.seed
    results = []
    for name in names:
        kw = {"n": args.n} if args.n is not None and name != "density" else {}
        results.append(run_suite(name, seed=args.seed, **kw))
    report.outputs = {"suites": [{k: v for k, v in r.to_json().items() if k != "seconds"} for r in results]}
    report.timing["suites"] = {r.name: round(r.seconds, 3) for r in results}
    return EXIT_OK if all(r.passed for r in results) else EXIT_SUITE


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="attractors", description="Attractor points of torus and E x K3 moduli.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $ATTRACTOR_THREADS or 1)")
    p.add_argument("--out", help="write the report to this file instead of stdout")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--pretty", dest="pretty", action="store_true", default=None)
    fmt.add_argument("--compact", dest="pretty", action="store_false")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve-torus", help="closed-form torus attractor")
    s.add_argument("--charge", required=True)
    s.add_argument("--mode", choices=["complex", "kahler"], default="complex")
    num = s.add_mutually_exclusive_group()
    num.add_argument("--exact", dest="float", action="store_false", default=False)
    num.add_argument("--float", dest="float", action="store_true")
    s.add_argument("--branch", choices=["general", "symmetric"], default="symmetric")
    s.set_defaults(func=cmd_solve_torus)

    s = sub.add_parser("invert-picard9", help="charge attracted to a Picard-number-9 period matrix")
    s.add_argument("--period", required=True)
    s.set_defaults(func=cmd_invert_picard9)

    s = sub.add_parser("solve-exs", help="E x K3 attractor")
    s.add_argument("--lattice", required=True)
    s.add_argument("--mode", choices=["complex", "kahler"], default="complex")
    s.add_argument("--vectors", required=True)
    s.set_defaults(func=cmd_solve_exs)

    s = sub.add_parser("rigidity", help="Kahler rigidity of B + i k H")
    s.add_argument("--lattice", required=True)
    s.add_argument("--B", required=True)
    s.add_argument("--kappa", required=True)
    s.set_defaults(func=cmd_rigidity)

    s = sub.add_parser("minimize", help="numerical mass minimization over the Siegel space")
    s.add_argument("--charge", required=True)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--starts", type=int, default=None)
    s.add_argument("--config", help="JSON with MassConfig fields")
    s.add_argument("--verbose", action="store_true")
    s.set_defaults(func=cmd_minimize)

    s = sub.add_parser("wp", help="Weil-Petersson potentials")
    s.add_argument("family", choices=["elliptic", "quintic", "torus"])
    s.add_argument("--tau")
    s.add_argument("--gw", help="GW table CSV with header d,N_d")
    s.add_argument("--T", help="Siegel period matrix JSON (torus)")
    s.set_defaults(func=cmd_wp)

    s = sub.add_parser("constellation", help="tau point clouds and covering radii")
    s.add_argument("--lattice")
    s.add_argument("--height", type=lambda t: [int(x) for x in t.split(",")], required=True,
                   help="one height or a comma list")
    s.add_argument("--box", default="0,1,1,2")
    s.add_argument("--grid", type=int, default=51)
    s.add_argument("--primitive", action="store_true")
    s.add_argument("--csv", help="write the largest-height point cloud here")
    s.add_argument("--torus", action="store_true", help="enumerate torus attractors instead")
    s.add_argument("--limit", type=int, default=None)
    s.set_defaults(func=cmd_constellation)

    s = sub.add_parser("verify", help="run an invariant suite")
    s.add_argument("--suite", required=True, choices=["rmd", "residuals", "roundtrip", "exs", "legendrian", "density", "all"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=int, default=None, help="override the suite size")
    s.set_defaults(func=cmd_verify)
    return p


def _emit(report: RunReport, args) -> None:
    pretty = args.pretty if args.pretty is not None else sys.stdout.isatty()
    text = json.dumps(report.to_json(), indent=2 if pretty else None, separators=None if pretty else (",", ":"))
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    report = RunReport(command=["attractors", *argv], inputs_digest=_digest(args))
    t0 = time.perf_counter()
    try:
        code = args.func(args, report)
    except NoAttractor as exc:
        report.outputs = {"error": "no_attractor", "reason": exc.reason}
        code = EXIT_NO_ATTRACTOR
    except (InputError, ValueError, KeyError, AsymmetricCharge, DependentVectors,
            DegenerateCoefficients, DomainError) as exc:
        report.outputs = {"error": "input", "message": str(exc)}
        code = EXIT_INPUT
    report.timing["seconds"] = round(time.perf_counter() - t0, 6)
    _emit(report, args)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
