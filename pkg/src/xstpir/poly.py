"""Univariate polynomials over a finite field."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .gf import DivisionByZeroError, FieldMismatchError, FieldParams, prime_factors


class ZeroPolynomialError(ValueError):
    pass


class NotEnoughIrreduciblesError(ValueError):
    pass


def _trim(coeffs) -> tuple[int, ...]:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(int(c) for c in coeffs)


@dataclass(frozen=True)
class Poly:
    """Polynomial with coefficients in ``field``, constant term first."""

    field: FieldParams
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def x(cls, field: FieldParams) -> "Poly":
        return cls(field, (0, 1))

    @classmethod
    def const(cls, field: FieldParams, c: int) -> "Poly":
        return cls(field, (c,))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}*x^{i}" if i else f"{c}")
        return "Poly(" + " + ".join(terms) + ")"

    def _same(self, other: "Poly") -> None:
        if self.field != other.field:
            raise FieldMismatchError("polynomials over different fields")

    def __add__(self, other: "Poly") -> "Poly":
        self._same(other)
        F = self.field
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        a = a + (0,) * (n - len(a))
        b = b + (0,) * (n - len(b))
        return Poly(F, [F.add(x, y) for x, y in zip(a, b)])

    def __neg__(self) -> "Poly":
        return Poly(self.field, [self.field.neg(c) for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        self._same(other)
        F = self.field
        if self.is_zero() or other.is_zero():
            return Poly(F, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = F.add(out[i + j], F.mul(a, b))
        return Poly(F, out)

    def scale(self, c: int) -> "Poly":
        return Poly(self.field, [self.field.mul(c, a) for a in self.coeffs])

    def shift(self, k: int) -> "Poly":
        """Multiply by x^k."""
        if self.is_zero():
            return self
        return Poly(self.field, (0,) * k + self.coeffs)

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        self._same(other)
        if other.is_zero():
            raise DivisionByZeroError("polynomial division by zero")
        F = self.field
        rem = list(self.coeffs)
        dq = other.degree
        inv_lead = F.inv(other.lead)
        quot = [0] * max(0, len(rem) - dq)
        for d in range(len(rem) - 1, dq - 1, -1):
            c = rem[d]
            if c == 0:
                continue
            t = F.mul(c, inv_lead)
            quot[d - dq] = t
            for k, b in enumerate(other.coeffs):
                rem[d - dq + k] = F.sub(rem[d - dq + k], F.mul(t, b))
        return Poly(F, quot), Poly(F, rem[:dq] if dq > 0 else ())

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self.scale(self.field.inv(self.lead))

    def eval(self, a: int) -> int:
        """Horner evaluation at ``a``."""
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, a), c)
        return acc

    __call__ = eval

    def powmod(self, e: int, mod: "Poly") -> "Poly":
        result = Poly.const(self.field, 1) % mod
        base = self % mod
        while e:
            if e & 1:
                result = (result * base) % mod
            base = (base * base) % mod
            e >>= 1
        return result

    def encode(self) -> list[int]:
        """File encoding: degree followed by coefficient indices."""
        return [self.degree, *self.coeffs]

    @classmethod
    def decode(cls, field: FieldParams, data) -> "Poly":
        deg, *coeffs = data
        if len(coeffs) != deg + 1 and not (deg == -1 and not coeffs):
            raise ValueError("polynomial encoding has wrong length")
        return cls(field, coeffs)


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def is_irreducible(f: Poly) -> bool:
    """Irreducibility over ``f.field``.

    Degree <= 3 is decided by root absence; higher degrees by Rabin's test.
    """
    if f.is_zero():
        raise ZeroPolynomialError("zero polynomial")
    n = f.degree
    if n < 1:
        raise ZeroPolynomialError("irreducibility needs degree >= 1")
    F = f.field
    if n == 1:
        return True
    if n <= 3:
        return all(f.eval(a) != 0 for a in range(F.order))
    x = Poly.x(F)
    Q = F.order
    for k in prime_factors(n):
        h = x.powmod(Q ** (n // k), f) - x
        if gcd(f, h).degree != 0:
            return False
    return (x.powmod(Q**n, f) - x) % f == Poly(F, ())


def monic_quadratics(field: FieldParams):
    """Monic quadratics in lex order on (constant, linear) coefficient."""
    for c0, c1 in itertools.product(range(field.order), repeat=2):
        yield Poly(field, (c0, c1, 1))


def quadratic_irreducibles(field: FieldParams, count: int | None = None) -> list[Poly]:
    """The ``count`` lexicographically smallest monic irreducible quadratics.

    ``count=None`` returns all (|F|^2 - |F|)/2 of them.
    """
    total = (field.order**2 - field.order) // 2
    if count is None:
        count = total
    if count > total:
        raise NotEnoughIrreduciblesError(
            f"requested {count} quadratic irreducibles but {field!r} has only {total}"
        )
    out: list[Poly] = []
    if count <= 0:
        return out
    for f in monic_quadratics(field):
        if is_irreducible(f):
            out.append(f)
            if len(out) == count:
                break
    return out


def product(polys, field: FieldParams) -> Poly:
    out = Poly.const(field, 1)
    for f in polys:
        out = out * f
    return out
