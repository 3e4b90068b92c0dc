"""JSON encodings for exact and float scalars, matrices and charges.

* rational -> ``"p/q"``
* QuadNumber ``a + b sqrt(-D)`` -> ``{"a": "p/q", "b": "r/s", "D": n}``
* complex float -> ``{"re": x, "im": y}``
* Surd ``c sqrt(r)`` -> ``{"coeff": "p/q", "sqrt": r}`` (decodes to float)
* matrices -> row-major nested lists of the above
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import numpy as np

from .algebra import QuadNumber, Surd, rational_to_json, to_exact

__all__ = [
    "encode_scalar",
    "decode_scalar",
    "encode_matrix",
    "decode_matrix",
    "charge_to_json",
    "charge_from_json",
    "kcharge_to_json",
    "kcharge_from_json",
]


def encode_scalar(x):
    if isinstance(x, QuadNumber):
        if x.b == 0:
            return rational_to_json(x.a)
        return x.to_json()
    if isinstance(x, Surd):
        return {"coeff": rational_to_json(x.coeff), "sqrt": x.radicand}
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer, Fraction)) or isinstance(x, Rational):
        return rational_to_json(Fraction(int(x)) if isinstance(x, np.integer) else x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, (float, np.floating)):
        return float(x)
    raise TypeError(f"cannot encode {type(x).__name__}")


def decode_scalar(obj):
    """Inverse of :func:`encode_scalar`; plain JSON integers decode to ``int``."""
    if isinstance(obj, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, str):
        return to_exact(Fraction(obj))
    if isinstance(obj, dict):
        if "D" in obj:
            q = QuadNumber.from_json(obj)
            return q if q.b else to_exact(q.a)
        if "re" in obj:
            return complex(float(obj["re"]), float(obj.get("im", 0.0)))
        if "sqrt" in obj:
            return float(Surd(Fraction(obj["coeff"]), int(obj["sqrt"])))
    raise ValueError(f"cannot decode scalar from {obj!r}")


def encode_matrix(A) -> list:
    A = np.asarray(A)
    return [[encode_scalar(x) for x in row] for row in A.tolist()] if A.dtype != object else [
        [encode_scalar(x) for x in row] for row in A
    ]


def decode_matrix(rows) -> np.ndarray:
    vals = [[decode_scalar(x) for x in row] for row in rows]
    if any(isinstance(x, (float, complex)) for row in vals for x in row):
        return np.array(vals, dtype=complex if any(isinstance(x, complex) for r in vals for x in r) else float)
    out = np.empty((len(vals), len(vals[0]) if vals else 0), dtype=object)
    for i, row in enumerate(vals):
        for j, x in enumerate(row):
            out[i, j] = x
    return out


def charge_to_json(charge) -> dict:
    return {
        "p0": encode_scalar(charge.p0),
        "P": encode_matrix(charge.P),
        "Q": encode_matrix(charge.Q),
        "q0": encode_scalar(charge.q0),
    }


def charge_from_json(obj):
    from .torus import TorusCharge

    try:
        return TorusCharge(
            decode_scalar(obj["p0"]), decode_matrix(obj["P"]), decode_matrix(obj["Q"]), decode_scalar(obj["q0"])
        )
    except KeyError as e:
        raise ValueError(f"charge JSON missing field {e}") from None


def kcharge_to_json(kcharge) -> dict:
    return {
        "v0": encode_scalar(kcharge.v0),
        "V": encode_matrix(kcharge.V),
        "U": encode_matrix(kcharge.U),
        "u0": encode_scalar(kcharge.u0),
    }


def kcharge_from_json(obj):
    """Accepts either ``v0/V/U/u0`` keys or the complex-side ``p0/P/Q/q0`` keys."""
    from .torus import KahlerTorusCharge

    if "v0" not in obj:
        obj = {"v0": obj["p0"], "V": obj["P"], "U": obj["Q"], "u0": obj["q0"]}
    try:
        return KahlerTorusCharge(
            decode_scalar(obj["v0"]), decode_matrix(obj["V"]), decode_matrix(obj["U"]), decode_scalar(obj["u0"])
        )
    except KeyError as e:
        raise ValueError(f"charge JSON missing field {e}") from None
