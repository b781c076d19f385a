"""Closed-form maximum PIR rates for fixed field size and X, T.

All values are exact :class:`fractions.Fraction`.  A formula whose
feasibility condition fails returns :data:`INFEASIBLE`.

The ``q`` argument means the field size for the rational and hyperelliptic
formulas, and the Hermitian curve parameter (field size ``q**2``) for the
two Hermitian formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class _Infeasible:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "INFEASIBLE"

    def __bool__(self) -> bool:
        return False


INFEASIBLE = _Infeasible()

NEW_RATIONAL = "new_rational"
NEW_HERMITIAN = "new_hermitian"
OLD_RATIONAL = "old_rational"
HYPERELLIPTIC_BOUND = "hyperelliptic_bound"
OLD_HERMITIAN = "old_hermitian"

FORMULAS = (NEW_RATIONAL, NEW_HERMITIAN, OLD_RATIONAL, HYPERELLIPTIC_BOUND, OLD_HERMITIAN)


def new_rational(q: int, X: int, T: int):
    k = (q - X - T - 3) // 2
    if k < 1:
        return INFEASIBLE
    L = 2 * k
    return Fraction(L, L + X + T + 2)


def new_hermitian(q: int, X: int, T: int):
    k = (q**3 - 3 * q**2 - 3 * q + 2 - X - T) // (2 * q)
    if 2 * k < q - 1:
        return INFEASIBLE
    L = 2 * q * k - q * (q - 1) // 2
    return Fraction(L, L + X + T + 3 * q**2 + 2 * q - 2)


def old_rational(q: int, X: int, T: int):
    k = (q - X - T) // 2
    if k < 1:
        return INFEASIBLE
    return Fraction(k, k + X + T)


def hyperelliptic_bound(q: int, X: int, T: int, g: int = 1):
    num = 2 * q - (X + T + 8 * g + 2)
    if num < 0:
        return INFEASIBLE
    return Fraction(num, 2 * q + X + T + 4 * g + 2)


def old_hermitian(q: int, X: int, T: int):
    m = (q**3 - 3 * q**2 + q + 1 - X - T) // (2 * q)
    if m < q - 1:
        return INFEASIBLE
    L = m * q - q * (q - 1) // 2
    return Fraction(L, L + X + T + 3 * q**2 - q - 2)


_DISPATCH = {
    NEW_RATIONAL: new_rational,
    NEW_HERMITIAN: new_hermitian,
    OLD_RATIONAL: old_rational,
    OLD_HERMITIAN: old_hermitian,
}


def max_rate(formula: str, q: int, X: int, T: int, g: int = 1):
    if formula == HYPERELLIPTIC_BOUND:
        return hyperelliptic_bound(q, X, T, g)
    try:
        fn = _DISPATCH[formula]
    except KeyError:
        raise ValueError(f"unknown formula {formula!r}") from None
    return fn(q, X, T)


def as_value(rate) -> Fraction:
    """Infeasible counts as rate 0."""
    return Fraction(0) if rate is INFEASIBLE else rate


def split_xt(xt: int) -> tuple[int, int]:
    return (xt + 1) // 2, xt // 2


COLUMNS = ("new_rational", "old_rational", "hyper_bound_g1", "old_hermitian", "new_hermitian")


@dataclass(frozen=True)
class SweepRow:
    xt: int
    new_rational: Fraction
    old_rational: Fraction
    hyper_bound_g1: Fraction
    old_hermitian: Fraction
    new_hermitian: Fraction

    def values(self) -> dict[str, Fraction]:
        return {c: getattr(self, c) for c in COLUMNS}

    @property
    def best_new(self) -> Fraction:
        return max(self.new_rational, self.new_hermitian)

    @property
    def best_old(self) -> Fraction:
        return max(self.old_rational, self.hyper_bound_g1, self.old_hermitian)


def compare_sweep(q: int, xt_min: int, xt_max: int, same_field: bool = False) -> list[SweepRow]:
    """One row of the five maximum rates per value of X+T.

    By default the rational and hyperelliptic columns use field size ``q``.
    With ``same_field=True`` every column is taken over F_{q^2}, so all five
    schemes compete at the same field size.
    """
    if xt_min < 2:
        raise ValueError("X+T must be at least 2")
    small = q * q if same_field else q
    rows = []
    for xt in range(xt_min, xt_max + 1):
        X, T = split_xt(xt)
        rows.append(SweepRow(
            xt=xt,
            new_rational=as_value(new_rational(small, X, T)),
            old_rational=as_value(old_rational(small, X, T)),
            hyper_bound_g1=as_value(hyperelliptic_bound(small, X, T, 1)),
            old_hermitian=as_value(old_hermitian(q, X, T)),
            new_hermitian=as_value(new_hermitian(q, X, T)),
        ))
    return rows


def new_hermitian_feasible_xt_max(q: int) -> int:
    """Largest X+T for which the new Hermitian condition still holds (1 if none)."""
    xt = 1
    while new_hermitian(q, *split_xt(xt + 1)) is not INFEASIBLE:
        xt += 1
    return xt
