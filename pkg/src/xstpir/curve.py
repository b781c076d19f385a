"""Rational and Hermitian curves: points, functions, one-point bases.

Functions are kept as fractions of bivariate polynomials and are never
reduced modulo the curve equation.  All dimension arguments are made on
evaluation vectors at the admissible points instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import NamedTuple

import numpy as np

from .gf import FieldParams, gf, prime_power
from .poly import Poly

RATIONAL = "rational"
HERMITIAN = "hermitian"


class PoleAtPointError(ValueError):
    pass


@dataclass(frozen=True)
class CurveKind:
    """Either the projective line over F_q or the Hermitian curve over F_{q^2}."""

    kind: str
    q: int
    field: FieldParams = dc_field(compare=False, repr=False)

    @property
    def genus(self) -> int:
        if self.kind == RATIONAL:
            return 0
        return self.q * (self.q - 1) // 2

    @property
    def is_hermitian(self) -> bool:
        return self.kind == HERMITIAN


def rational_curve(q: int) -> CurveKind:
    return CurveKind(RATIONAL, q, gf(q))


def hermitian_curve(q: int) -> CurveKind:
    p, k = prime_power(q)
    return CurveKind(HERMITIAN, q, gf(q * q))


def make_curve(kind: str, q: int) -> CurveKind:
    if kind == RATIONAL:
        return rational_curve(q)
    if kind == HERMITIAN:
        return hermitian_curve(q)
    raise ValueError(f"unknown curve kind {kind!r}")


class CurvePoint(NamedTuple):
    x: int
    y: int = 0


# ----------------------------------------------------------------------
# bivariate polynomials as {(i, j): coeff} dicts


def _biv_mul(F: FieldParams, a: dict, b: dict) -> dict:
    out: dict = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            key = (i1 + i2, j1 + j2)
            out[key] = F.add(out.get(key, 0), F.mul(c1, c2))
    return {k: v for k, v in out.items() if v}


def _biv_eval(F: FieldParams, a: dict, x: int, y: int) -> int:
    acc = 0
    for (i, j), c in a.items():
        acc = F.add(acc, F.mul(c, F.mul(F.pow(x, i), F.pow(y, j))))
    return acc


def poly_to_biv(f: Poly, ydeg: int = 0) -> dict:
    return {(i, ydeg): c for i, c in enumerate(f.coeffs) if c}


@dataclass(frozen=True)
class RationalFunctionRep:
    """``num / den`` with sparse bivariate numerator and denominator.

    Keys are exponent pairs ``(i, j)`` meaning ``x^i y^j``.
    """

    num: dict
    den: dict
    curve: CurveKind

    def __post_init__(self):
        if not self.den:
            raise ValueError("denominator must be nonzero")
        if not self.curve.is_hermitian:
            if any(j for (_, j) in self.num) or any(j for (_, j) in self.den):
                raise ValueError("rational-curve functions cannot involve y")

    @classmethod
    def monomial(cls, curve: CurveKind, i: int, j: int = 0) -> "RationalFunctionRep":
        return cls({(i, j): 1}, {(0, 0): 1}, curve)

    @classmethod
    def from_polys(cls, curve: CurveKind, num: Poly, den: Poly | None = None,
                   ydeg: int = 0) -> "RationalFunctionRep":
        """``y^ydeg * num(x) / den(x)``."""
        d = poly_to_biv(den) if den is not None else {(0, 0): 1}
        return cls(poly_to_biv(num, ydeg), d, curve)

    def __mul__(self, other: "RationalFunctionRep") -> "RationalFunctionRep":
        F = self.curve.field
        return RationalFunctionRep(_biv_mul(F, self.num, other.num),
                                   _biv_mul(F, self.den, other.den), self.curve)

    def reciprocal(self) -> "RationalFunctionRep":
        if not self.num:
            raise ZeroDivisionError("reciprocal of the zero function")
        return RationalFunctionRep(self.den, self.num, self.curve)

    def encode(self) -> dict:
        def terms(d):
            return [[i, j, c] for (i, j), c in sorted(d.items())]

        return {"num": terms(self.num), "den": terms(self.den)}

    @classmethod
    def decode(cls, curve: CurveKind, data: dict) -> "RationalFunctionRep":
        def parse(ts):
            return {(int(i), int(j)): int(c) for i, j, c in ts}

        return cls(parse(data["num"]), parse(data["den"]), curve)


def eval_fn(f: RationalFunctionRep, P: CurvePoint) -> int:
    F = f.curve.field
    d = _biv_eval(F, f.den, P.x, P.y)
    if d == 0:
        raise PoleAtPointError(f"denominator vanishes at {P}")
    return F.mul(_biv_eval(F, f.num, P.x, P.y), F.inv(d))


def monomial_values(F: FieldParams, points, monos) -> np.ndarray:
    """Matrix of ``x^i y^j`` at each point; rows follow ``monos``."""
    xs = np.array([P.x for P in points], dtype=np.int64)
    ys = np.array([P.y for P in points], dtype=np.int64)
    imax = max((i for i, _ in monos), default=0)
    jmax = max((j for _, j in monos), default=0)
    xp = [np.ones_like(xs)]
    for _ in range(imax):
        xp.append(F.vmul(xp[-1], xs))
    yp = [np.ones_like(ys)]
    for _ in range(jmax):
        yp.append(F.vmul(yp[-1], ys))
    if not monos:
        return np.zeros((0, len(points)), dtype=np.int64)
    return np.stack([F.vmul(xp[i], yp[j]) for i, j in monos])


def evaluate(fns, points) -> np.ndarray:
    """Evaluation matrix ``E[r, n] = fns[r](points[n])``."""
    fns = list(fns)
    if not fns:
        return np.zeros((0, len(points)), dtype=np.int64)
    F = fns[0].curve.field
    monos = sorted({k for f in fns for k in f.num} | {k for f in fns for k in f.den})
    col = {k: t for t, k in enumerate(monos)}
    mv = monomial_values(F, points, monos)
    cn = np.zeros((len(fns), len(monos)), dtype=np.int64)
    cd = np.zeros((len(fns), len(monos)), dtype=np.int64)
    for r, f in enumerate(fns):
        for k, c in f.num.items():
            cn[r, col[k]] = c
        for k, c in f.den.items():
            cd[r, col[k]] = c
    num = F.matmul(cn, mv)
    den = F.matmul(cd, mv)
    bad = np.argwhere(den == 0)
    if bad.size:
        r, n = bad[0]
        raise PoleAtPointError(f"function {r} has a pole at {points[n]}")
    return F.vmul(num, F.vinv(den))


# ----------------------------------------------------------------------
# points


def enumerate_points(curve: CurveKind) -> list[CurvePoint]:
    """All affine rational points, ordered by (x index, y index)."""
    F = curve.field
    if not curve.is_hermitian:
        return [CurvePoint(a, 0) for a in F.elements()]
    q = curve.q
    elems = np.arange(F.order, dtype=np.int64)
    trace = F.vadd(F.vpow(elems, q), elems)
    norm = F.vpow(elems, q + 1)
    by_trace: dict[int, list[int]] = {}
    for b, t in enumerate(trace.tolist()):
        by_trace.setdefault(t, []).append(b)
    return [CurvePoint(a, b) for a in range(F.order) for b in by_trace.get(int(norm[a]), [])]


def admissible_points(curve: CurveKind) -> list[CurvePoint]:
    """Affine points with x != 0 (the only y = 0 point also has x = 0)."""
    return [P for P in enumerate_points(curve) if P.x != 0]


def on_curve(curve: CurveKind, P: CurvePoint) -> bool:
    if not curve.is_hermitian:
        return P.y == 0
    F, q = curve.field, curve.q
    return F.pow(P.x, q + 1) == F.add(F.pow(P.y, q), P.y)


# ----------------------------------------------------------------------
# one-point Riemann-Roch bases


def rr_exponents(curve: CurveKind, m: int) -> list[tuple[int, int]]:
    """Exponents (i, j) of the monomial basis of L(m P_inf), by pole order."""
    if m < 0:
        return []
    if not curve.is_hermitian:
        return [(i, 0) for i in range(m + 1)]
    q = curve.q
    pairs = [(i, j) for j in range(q) for i in range((m - (q + 1) * j) // q + 1)
             if q * i + (q + 1) * j <= m]
    return sorted(pairs, key=lambda ij: q * ij[0] + (q + 1) * ij[1])


def one_point_rr_basis(curve: CurveKind, m: int) -> list[RationalFunctionRep]:
    return [RationalFunctionRep.monomial(curve, i, j) for i, j in rr_exponents(curve, m)]
