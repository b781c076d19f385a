"""Scheme construction for the rational-curve and Hermitian-curve XSTPIR codes.

A :class:`SchemeSpec` holds everything the protocol needs: the query
functions ``h_l`` evaluated at the server points (``H``), the secrecy and
privacy noise generators (``Gsec``, ``Gpriv``) and a row basis ``W`` of the
evaluated noise space.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .curve import (
    HERMITIAN,
    RATIONAL,
    CurveKind,
    CurvePoint,
    RationalFunctionRep,
    admissible_points,
    evaluate,
    hermitian_curve,
    monomial_values,
    one_point_rr_basis,
    rational_curve,
    rr_exponents,
)
from .gf import FieldParams, NotPrimeError, prime_power
from .linalg import rref, row_basis
from .poly import Poly, is_irreducible, product, quadratic_irreducibles


class ParamViolation(ValueError):
    """Raised when scheme parameters break a required inequality."""


class InformationSetNotFound(RuntimeError):
    pass


class DuplicateFactorError(ValueError):
    pass


class ReducibleFactorError(ValueError):
    pass


# ----------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class SchemeParams:
    kind: str
    q: int
    X: int
    T: int
    L: int
    m: int | None = None

    @classmethod
    def rational(cls, q: int, L: int, X: int, T: int) -> "SchemeParams":
        return cls(RATIONAL, q, X, T, L)

    @classmethod
    def hermitian(cls, q: int, m: int, X: int, T: int) -> "SchemeParams":
        return cls(HERMITIAN, q, X, T, m * q - q * (q - 1) // 2, m)

    @property
    def genus(self) -> int:
        return 0 if self.kind == RATIONAL else self.q * (self.q - 1) // 2

    @property
    def field_size(self) -> int:
        return self.q if self.kind == RATIONAL else self.q * self.q

    @property
    def N(self) -> int:
        if self.kind == RATIONAL:
            return self.L + self.X + self.T + 2
        q = self.q
        return self.L + self.X + self.T + 3 * q * q + 2 * q - 2

    @property
    def deg_dfull(self) -> int:
        if self.kind == RATIONAL:
            return self.L + self.X + self.T + 1
        q = self.q
        return self.L + self.X + self.T + (7 * q * q + 3 * q - 6) // 2

    @property
    def rate(self) -> Fraction:
        return Fraction(self.L, self.N)

    def conditions(self) -> list[tuple[str, bool]]:
        """Every precondition of the construction with its verdict."""
        q, X, T, L, m = self.q, self.X, self.T, self.L, self.m
        try:
            prime_power(q)
            pp = True
        except NotPrimeError:
            pp = False
        out = [("q is a prime power", pp), ("X ≥ 1", X >= 1), ("T ≥ 1", T >= 1)]
        if self.kind == RATIONAL:
            out += [
                ("L ≥ 2", L >= 2),
                ("2∣L", L % 2 == 0),
                ("q ≥ L+X+T+3", q >= L + X + T + 3),
            ]
        elif self.kind == HERMITIAN:
            if m is None:
                return out + [("m given", False)]
            g = q * (q - 1) // 2
            out += [
                ("2∣m", m % 2 == 0),
                ("m ∈ [q−1, q²−1]", q - 1 <= m <= q * q - 1),
                ("L=mq−q(q−1)/2", L == m * q - g),
                ("L ≥ 1", L >= 1),
                ("q³+1−(q+1) ≥ L+X+T+(7q²+3q−6)/2+1",
                 q**3 + 1 - (q + 1) >= L + X + T + (7 * q * q + 3 * q - 6) // 2 + 1),
            ]
        else:
            out.append((f"known curve kind ({self.kind})", False))
        return out

    def violations(self) -> list[str]:
        return [name for name, ok in self.conditions() if not ok]

    def require(self) -> None:
        bad = self.violations()
        if bad:
            raise ParamViolation("violated: " + "; ".join(bad))

    def describe(self) -> dict:
        return {"kind": self.kind, "q": self.q, "X": self.X, "T": self.T, "L": self.L, "m": self.m}


# ----------------------------------------------------------------------
# the polynomial basis B(f_1, ..., f_n)


def basis_B(f_list: list[Poly]) -> list[Poly]:
    """``x^j * prod(f) / f_i`` for each i and ``0 <= j < deg f_i``."""
    if not f_list:
        return []
    field = f_list[0].field
    seen = set()
    for f in f_list:
        key = f.monic().coeffs
        if key in seen:
            raise DuplicateFactorError(f"{f} appears twice")
        seen.add(key)
        if f.degree < 1 or not is_irreducible(f):
            raise ReducibleFactorError(f"{f} is not irreducible")
    out = []
    for i, f in enumerate(f_list):
        rest = product((g for k, g in enumerate(f_list) if k != i), field)
        out += [rest.shift(j) for j in range(f.degree)]
    return out


def coefficient_matrix(polys: list[Poly], width: int) -> np.ndarray:
    M = np.zeros((len(polys), width), dtype=np.int64)
    for r, f in enumerate(polys):
        M[r, : len(f.coeffs)] = f.coeffs
    return M


def h_count_check(q: int, m: int) -> tuple[list[int], int]:
    """Number of query functions contributed by each power y^(z-1)."""
    if m < q - 1:
        raise ParamViolation("m ≥ q−1")
    counts = [m - z + 1 for z in range(1, q + 1)]
    return counts, sum(counts)


# ----------------------------------------------------------------------
# built schemes


@dataclass(frozen=True, eq=False)
class SchemeSpec:
    params: SchemeParams
    field: FieldParams
    curve: CurveKind
    f_list: list[Poly]
    h_fns: list[RationalFunctionRep]
    sec_basis: list[list[RationalFunctionRep]]
    priv_basis: list[RationalFunctionRep]
    points: list[CurvePoint]
    H: np.ndarray
    Gsec: np.ndarray  # (L, dim_sec, N)
    Gpriv: np.ndarray  # (dim_priv, N)
    W: np.ndarray  # (noise_dim, N)
    deg_dfull: int
    meta: dict = dc_field(default_factory=dict)

    @property
    def N(self) -> int:
        return len(self.points)

    @property
    def L(self) -> int:
        return self.params.L

    @property
    def X(self) -> int:
        return self.params.X

    @property
    def T(self) -> int:
        return self.params.T

    @property
    def dim_sec(self) -> int:
        return self.Gsec.shape[1]

    @property
    def dim_priv(self) -> int:
        return self.Gpriv.shape[0]

    @property
    def noise_dim(self) -> int:
        return self.W.shape[0]

    @property
    def rate(self) -> Fraction:
        return Fraction(self.L, self.N)

    def stacked(self) -> np.ndarray:
        """``[H; W]``, the matrix the client decodes against."""
        return np.vstack([self.H, self.W])

    def __repr__(self) -> str:
        p = self.params
        return (f"SchemeSpec({p.kind}, q={p.q}, L={p.L}, X={p.X}, T={p.T}, "
                f"N={self.N}, noise_dim={self.noise_dim})")


def _noise_rows(F: FieldParams, inv_h_vals: np.ndarray, cross: np.ndarray,
                extra: list[np.ndarray]) -> np.ndarray:
    """Evaluated spanning set of the noise space.

    ``(1/h_l) * mono`` is evaluated as a pointwise product, so the large
    spanning set is never materialized as function objects.
    """
    prods = F.vmul(inv_h_vals[:, None, :], cross[None, :, :]).reshape(-1, inv_h_vals.shape[1])
    return np.vstack(extra + [prods])


def _sec_basis(curve, inv_h, exps):
    monos = [RationalFunctionRep.monomial(curve, i, j) for i, j in exps]
    return [[ih * mono for mono in monos] for ih in inv_h]


def _assemble(params, curve, f_list, h_fns, inv_h, all_pts, sel, W_all, H_all, inv_h_all):
    F = curve.field
    g = curve.genus
    pts = [all_pts[i] for i in sel]
    sec_exps = rr_exponents(curve, params.X + 2 * g - 1)
    priv_exps = rr_exponents(curve, params.T + 2 * g - 1)
    sec_monos = monomial_values(F, pts, sec_exps)
    Gsec = F.vmul(inv_h_all[:, sel][:, None, :], sec_monos[None, :, :])
    Gpriv = monomial_values(F, pts, priv_exps)
    return SchemeSpec(
        params=params,
        field=F,
        curve=curve,
        f_list=f_list,
        h_fns=h_fns,
        sec_basis=_sec_basis(curve, inv_h, sec_exps),
        priv_basis=one_point_rr_basis(curve, params.T + 2 * g - 1),
        points=pts,
        H=H_all[:, sel],
        Gsec=Gsec,
        Gpriv=Gpriv,
        W=W_all[:, sel],
        deg_dfull=params.deg_dfull,
        meta={"admissible": len(all_pts), "selected": list(sel)},
    )


def build_rational(q: int, L: int, X: int, T: int) -> SchemeSpec:
    """Genus-0 scheme with ``N = L+X+T+2`` servers over F_q."""
    params = SchemeParams.rational(q, L, X, T)
    params.require()
    curve = rational_curve(q)
    F = curve.field
    f_list = quadratic_irreducibles(F, L // 2)
    one, x = Poly.const(F, 1), Poly.x(F)

    h_fns, inv_h = [], []
    for f in f_list:
        h_fns += [RationalFunctionRep.from_polys(curve, one, f),
                  RationalFunctionRep.from_polys(curve, x, f)]
        inv_h += [RationalFunctionRep.from_polys(curve, f),
                  RationalFunctionRep.from_polys(curve, f, x)]

    all_pts = admissible_points(curve)
    H_all = evaluate(h_fns, all_pts)
    inv_h_all = evaluate(inv_h, all_pts)
    cross = monomial_values(F, all_pts, rr_exponents(curve, X + T - 2))
    span = _noise_rows(F, inv_h_all, cross, [
        monomial_values(F, all_pts, rr_exponents(curve, T - 1)),
        monomial_values(F, all_pts, rr_exponents(curve, X - 1)),
    ])
    W_all, _ = row_basis(F, span)
    # deg D^full = N - 1, so any N admissible points are injective on L(D^full)
    sel = list(range(params.N))
    return _assemble(params, curve, f_list, h_fns, inv_h, all_pts, sel, W_all, H_all, inv_h_all)


def hermitian_h_numerators(F: FieldParams, q: int, m: int, f_list: list[Poly]):
    """Yield ``(z, b)`` so that ``y^(z-1) * b(x)`` runs over the query numerators."""
    x = Poly.x(F)
    for z in range(1, q + 1):
        n = m - z + 1
        if n % 2 == 0:
            factors = f_list[: n // 2]
        else:
            factors = [x] + f_list[: (m - z) // 2]
        for b in basis_B(factors):
            yield z, b


def build_hermitian(q: int, m: int, X: int, T: int) -> SchemeSpec:
    """Hermitian-curve scheme with ``N = L+X+T+3q^2+2q-2`` servers over F_{q^2}."""
    params = SchemeParams.hermitian(q, m, X, T)
    params.require()
    curve = hermitian_curve(q)
    F = curve.field
    g = curve.genus
    f_list = quadratic_irreducibles(F, m // 2)
    den = product(f_list, F)

    h_fns, inv_h = [], []
    for z, b in hermitian_h_numerators(F, q, m, f_list):
        h = RationalFunctionRep.from_polys(curve, b, den, ydeg=z - 1)
        h_fns.append(h)
        inv_h.append(h.reciprocal())
    if len(h_fns) != params.L:
        raise AssertionError("query function count differs from L")

    all_pts = admissible_points(curve)
    H_all = evaluate(h_fns, all_pts)
    inv_h_all = evaluate(inv_h, all_pts)
    cross = monomial_values(F, all_pts, rr_exponents(curve, X + T + 4 * g - 2))
    span = _noise_rows(F, inv_h_all, cross, [
        monomial_values(F, all_pts, rr_exponents(curve, T + 2 * g - 1)),
        monomial_values(F, all_pts, rr_exponents(curve, X + 2 * g - 1)),
    ])
    W_all, _ = row_basis(F, span)

    stacked = np.vstack([H_all, W_all])
    _, pivots = rref(F, stacked)
    if len(pivots) != stacked.shape[0] or len(pivots) > params.N:
        raise InformationSetNotFound(
            f"[H; W] has rank {len(pivots)} over {len(all_pts)} points, "
            f"need {stacked.shape[0]} ≤ N = {params.N}")
    chosen = set(pivots)
    for i in range(len(all_pts)):
        if len(chosen) == params.N:
            break
        chosen.add(i)
    sel = sorted(chosen)
    return _assemble(params, curve, f_list, h_fns, inv_h, all_pts, sel, W_all, H_all, inv_h_all)


def build(params: SchemeParams) -> SchemeSpec:
    if params.kind == RATIONAL:
        return build_rational(params.q, params.L, params.X, params.T)
    if params.kind == HERMITIAN:
        if params.m is None:
            raise ParamViolation("m given")
        return build_hermitian(params.q, params.m, params.X, params.T)
    raise ParamViolation(f"known curve kind ({params.kind})")
