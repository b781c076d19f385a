"""Canonical, self-describing scheme files and their digest.

The file is JSON with sorted keys and no insignificant whitespace, so the
byte string is a function of the scheme alone.  Field elements are stored
as their integer indices; matrices are row-major nested lists.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .curve import CurvePoint, RationalFunctionRep, make_curve
from .gf import FieldParams
from .poly import Poly
from .scheme import SchemeParams, SchemeSpec

FORMAT_VERSION = 1
HASH_NAME = "sha256"


class SchemeFormatError(ValueError):
    pass


def to_dict(scheme: SchemeSpec) -> dict:
    enc = lambda fns: [f.encode() for f in fns]  # noqa: E731
    return {
        "format_version": FORMAT_VERSION,
        "hash": HASH_NAME,
        "params": scheme.params.describe(),
        "field": scheme.field.describe(),
        "f_list": [f.encode() for f in scheme.f_list],
        "h_fns": enc(scheme.h_fns),
        "sec_basis": [enc(b) for b in scheme.sec_basis],
        "priv_basis": enc(scheme.priv_basis),
        "points": [[P.x, P.y] for P in scheme.points],
        "H": scheme.H.tolist(),
        "Gsec": scheme.Gsec.tolist(),
        "Gpriv": scheme.Gpriv.tolist(),
        "W": scheme.W.tolist(),
        "deg_dfull": scheme.deg_dfull,
        "N": scheme.N,
    }


def dumps(scheme: SchemeSpec) -> bytes:
    return json.dumps(to_dict(scheme), sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")


def from_dict(data: dict) -> SchemeSpec:
    if data.get("format_version") != FORMAT_VERSION:
        raise SchemeFormatError(f"unsupported format_version {data.get('format_version')!r}")
    try:
        p = data["params"]
        params = SchemeParams(p["kind"], p["q"], p["X"], p["T"], p["L"], p["m"])
        field = FieldParams.from_description(data["field"])
        curve = make_curve(params.kind, params.q)
        if curve.field != field:
            raise SchemeFormatError("field description does not match the curve")
        dec = lambda fns: [RationalFunctionRep.decode(curve, f) for f in fns]  # noqa: E731
        N = int(data["N"])
        spec = SchemeSpec(
            params=params,
            field=field,
            curve=curve,
            f_list=[Poly.decode(field, f) for f in data["f_list"]],
            h_fns=dec(data["h_fns"]),
            sec_basis=[dec(b) for b in data["sec_basis"]],
            priv_basis=dec(data["priv_basis"]),
            points=[CurvePoint(int(x), int(y)) for x, y in data["points"]],
            H=np.array(data["H"], dtype=np.int64).reshape(params.L, N),
            Gsec=np.array(data["Gsec"], dtype=np.int64).reshape(params.L, -1, N),
            Gpriv=np.array(data["Gpriv"], dtype=np.int64).reshape(-1, N),
            W=np.array(data["W"], dtype=np.int64).reshape(-1, N),
            deg_dfull=int(data["deg_dfull"]),
        )
    except (KeyError, TypeError) as exc:
        raise SchemeFormatError(f"malformed scheme file: {exc}") from exc
    if spec.N != N:
        raise SchemeFormatError(f"point count {spec.N} differs from N={N}")
    return spec


def loads(raw: bytes | str) -> SchemeSpec:
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemeFormatError(str(exc)) from exc
    return from_dict(data)


def digest(scheme: SchemeSpec) -> bytes:
    """32-byte hash of the canonical serialization."""
    return hashlib.new(HASH_NAME, dumps(scheme)).digest()


def save(scheme: SchemeSpec, path) -> None:
    Path(path).write_bytes(dumps(scheme))


def load(path) -> SchemeSpec:
    return loads(Path(path).read_bytes())
