"""Finite fields F_p and F_{p^m}.

Elements are plain integers: the element with power-basis coefficients
``(c_0, ..., c_{m-1})`` is stored as ``sum(c_i * p**i)``.  This is also the
wire encoding, so matrices of elements are just ``int64`` numpy arrays.
A :class:`FieldParams` instance supplies all arithmetic; elements carry no
reference to their field.
"""

from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

MAX_ORDER = 2**32
# log/exp tables are built only up to this order
_TABLE_LIMIT = 2**16
# float64 holds integers exactly below this bound
_EXACT = 2**53


class FieldError(ValueError):
    pass


class NotPrimeError(FieldError):
    pass


class DegreeZeroError(FieldError):
    pass


class TooLargeError(FieldError):
    pass


class FieldMismatchError(FieldError):
    pass


class DivisionByZeroError(ZeroDivisionError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n`` by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, k)`` with ``q == p**k``; raise NotPrimeError otherwise."""
    if q < 2:
        raise NotPrimeError(f"{q} is not a prime power")
    factors = prime_factors(q)
    if len(factors) != 1:
        raise NotPrimeError(f"{q} is not a prime power")
    p = factors[0]
    k = 0
    while q > 1:
        q //= p
        k += 1
    return p, k


@dataclass(frozen=True)
class FieldParams:
    """The field F_p[u]/(modulus).

    ``modulus`` is the full monic coefficient list, constant term first,
    so its length is ``m + 1``.
    """

    p: int
    m: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrimeError(f"{self.p} is not prime")
        if self.m < 1:
            raise DegreeZeroError("extension degree must be at least 1")
        if self.p**self.m > MAX_ORDER:
            raise TooLargeError(f"p^m = {self.p}^{self.m} exceeds 2^32")
        if len(self.modulus) != self.m + 1 or self.modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree m")
        if any(not 0 <= c < self.p for c in self.modulus):
            raise FieldError("modulus coefficients must lie in [0, p-1]")

    # ------------------------------------------------------------------
    # basic facts

    @property
    def order(self) -> int:
        return self.p**self.m

    cardinality = order

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    @property
    def is_prime_field(self) -> bool:
        return self.m == 1

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m})"

    def elements(self) -> list[int]:
        """All elements in index order (0, 1, ..., p-1 come first)."""
        return list(range(self.order))

    def coeffs(self, a: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.m):
            a, r = divmod(a, self.p)
            out.append(r)
        return tuple(out)

    def from_coeffs(self, coeffs) -> int:
        coeffs = list(coeffs)
        if len(coeffs) > self.m:
            raise FieldMismatchError("too many coefficients for this field")
        idx = 0
        for c in reversed(coeffs):
            idx = idx * self.p + (int(c) % self.p)
        return idx

    def check(self, *elems: int) -> None:
        for a in elems:
            if not 0 <= a < self.order:
                raise FieldMismatchError(f"{a} is not an element of {self!r}")

    def element(self, n: int) -> int:
        """Image of the integer ``n`` under Z -> F."""
        return n % self.p

    # ------------------------------------------------------------------
    # scalar arithmetic

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        return self.from_coeffs(x + y for x, y in zip(self.coeffs(a), self.coeffs(b)))

    def neg(self, a: int) -> int:
        if self.m == 1:
            return -a % self.p
        return self.from_coeffs(-x for x in self.coeffs(a))

    def sub(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a - b) % self.p
        return self.from_coeffs(x - y for x, y in zip(self.coeffs(a), self.coeffs(b)))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        if self._tables is not None:
            log, exp = self._tables
            return int(exp[(log[a] + log[b]) % (self.order - 1)])
        return self._poly_mulmod(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZeroError(f"0 has no inverse in {self!r}")
        if self.m == 1:
            return pow(a, -1, self.p)
        if self._tables is not None:
            log, exp = self._tables
            return int(exp[(-log[a]) % (self.order - 1)])
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.m == 1:
            return pow(a, e, self.p)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def _poly_mulmod(self, a: int, b: int) -> int:
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * self.m - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] += x * y
        mod = self.modulus
        for d in range(2 * self.m - 2, self.m - 1, -1):
            t = prod[d] % self.p
            if t:
                for k in range(self.m):
                    prod[d - self.m + k] -= t * mod[k]
        return self.from_coeffs(prod[: self.m])

    @cached_property
    def _tables(self):
        """(log, exp) arrays for extension fields of moderate size."""
        if self.m == 1 or self.order > _TABLE_LIMIT:
            return None
        n = self.order - 1
        factors = prime_factors(n)
        for g in range(2, self.order):
            if all(self._slow_pow(g, n // f) != 1 for f in factors):
                break
        exp = np.zeros(n, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(n):
            exp[i] = x
            log[x] = i
            x = self._poly_mulmod(x, g)
        return log, exp

    def _slow_pow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._poly_mulmod(result, base)
            base = self._poly_mulmod(base, base)
            e >>= 1
        return result

    # ------------------------------------------------------------------
    # vectorized arithmetic on int64 arrays of element indices

    @cached_property
    def _powers(self) -> np.ndarray:
        return self.p ** np.arange(self.m, dtype=np.int64)

    def to_digits(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._powers) % self.p

    def from_digits(self, d) -> np.ndarray:
        return (np.asarray(d, dtype=np.int64) % self.p) @ self._powers

    def asarray(self, a) -> np.ndarray:
        return np.asarray(a, dtype=np.int64)

    def vadd(self, a, b) -> np.ndarray:
        a, b = self.asarray(a), self.asarray(b)
        if self.m == 1:
            return (a + b) % self.p
        return self.from_digits(self.to_digits(a) + self.to_digits(b))

    def vsub(self, a, b) -> np.ndarray:
        a, b = self.asarray(a), self.asarray(b)
        if self.m == 1:
            return (a - b) % self.p
        return self.from_digits(self.to_digits(a) - self.to_digits(b))

    def vneg(self, a) -> np.ndarray:
        a = self.asarray(a)
        if self.m == 1:
            return -a % self.p
        return self.from_digits(-self.to_digits(a))

    def vmul(self, a, b) -> np.ndarray:
        a, b = self.asarray(a), self.asarray(b)
        if self.m == 1:
            if self.p < 2**31:
                return (a * b) % self.p
            return (a.astype(object) * b % self.p).astype(np.int64)
        if self._tables is not None:
            log, exp = self._tables
            a, b = np.broadcast_arrays(a, b)
            out = exp[(log[a] + log[b]) % (self.order - 1)]
            return np.where((a == 0) | (b == 0), 0, out)
        return self.from_digits(self._digit_mulmod(self.to_digits(a), self.to_digits(b)))

    def _digit_mulmod(self, da: np.ndarray, db: np.ndarray) -> np.ndarray:
        m = self.m
        shape = np.broadcast_shapes(da.shape[:-1], db.shape[:-1])
        prod = [np.zeros(shape, dtype=np.int64) for _ in range(2 * m - 1)]
        for i in range(m):
            for j in range(m):
                prod[i + j] = (prod[i + j] + da[..., i] * db[..., j]) % self.p
        return np.stack(self._reduce(prod), axis=-1)

    def _reduce(self, prod: list) -> list:
        """Reduce a digit-list polynomial in u modulo the field modulus."""
        m, mod = self.m, self.modulus
        prod = [x % self.p for x in prod]
        for d in range(len(prod) - 1, m - 1, -1):
            t = prod[d]
            for k in range(m):
                if mod[k]:
                    prod[d - m + k] = (prod[d - m + k] - t * mod[k]) % self.p
        return prod[:m]

    def vinv(self, a) -> np.ndarray:
        a = self.asarray(a)
        if np.any(a == 0):
            raise DivisionByZeroError("0 has no inverse")
        if self.m == 1 and self.p < 2**31:
            return self.vpow(a, self.p - 2)
        if self._tables is not None:
            log, exp = self._tables
            return exp[(-log[a]) % (self.order - 1)]
        return self.vpow(a, self.order - 2)

    def vpow(self, a, e: int) -> np.ndarray:
        a = self.asarray(a)
        result = np.ones_like(a)
        base = a.copy()
        while e:
            if e & 1:
                result = self.vmul(result, base)
            base = self.vmul(base, base)
            e >>= 1
        return result

    def vsum(self, a, axis=None) -> np.ndarray:
        a = self.asarray(a)
        if self.m == 1:
            if self.p < 2**31:
                return np.sum(a % self.p, axis=axis) % self.p
            return (np.sum(a.astype(object), axis=axis) % self.p).astype(np.int64)
        d = self.to_digits(a)
        if axis is None:
            d = d.reshape(-1, self.m)
            return self.from_digits(d.sum(axis=0))
        axis = axis % a.ndim
        return self.from_digits(d.sum(axis=axis) % self.p)

    def matmul(self, a, b) -> np.ndarray:
        """Matrix product over the field (exact, via float64 BLAS on digits)."""
        a, b = self.asarray(a), self.asarray(b)
        if a.ndim == 1 or b.ndim == 1:
            out = self.matmul(np.atleast_2d(a), b.reshape(b.shape[0], -1) if b.ndim == 1 else b)
            if a.ndim == 1:
                out = out[0]
            if b.ndim == 1:
                out = out[..., 0]
            return out
        k = a.shape[-1]
        if b.shape[0] != k:
            raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
        if k == 0:
            return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        bound = self.m * (self.p - 1) ** 2
        if bound >= _EXACT:
            return self._matmul_slow(a, b)
        step = max(1, (_EXACT - 1) // bound)
        if self.m == 1:
            out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
            for s in range(0, k, step):
                part = a[:, s : s + step].astype(np.float64) @ b[s : s + step].astype(np.float64)
                out = (out + (part.astype(np.int64) % self.p)) % self.p
            return out
        da = self.to_digits(a).astype(np.float64)
        db = self.to_digits(b).astype(np.float64)
        m = self.m
        prod = [np.zeros((a.shape[0], b.shape[1]), dtype=np.int64) for _ in range(2 * m - 1)]
        for s in range(0, k, step):
            for i in range(m):
                for j in range(m):
                    part = da[:, s : s + step, i] @ db[s : s + step, :, j]
                    prod[i + j] = (prod[i + j] + part.astype(np.int64)) % self.p
        return self.from_digits(np.stack(self._reduce(prod), axis=-1))

    def _matmul_slow(self, a, b) -> np.ndarray:
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for i in range(a.shape[0]):
            for j in range(b.shape[1]):
                acc = 0
                for t in range(a.shape[1]):
                    acc = self.add(acc, self.mul(int(a[i, t]), int(b[t, j])))
                out[i, j] = acc
        return out

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        return rng.integers(0, self.order, size=shape, dtype=np.int64)

    # ------------------------------------------------------------------
    # encodings

    def encode_element(self, a: int) -> bytes:
        return struct.pack("<Q", a)

    def decode_element(self, data: bytes) -> int:
        (a,) = struct.unpack("<Q", data)
        self.check(a)
        return a

    def describe(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}

    @classmethod
    def from_description(cls, desc: dict) -> "FieldParams":
        return cls(int(desc["p"]), int(desc["m"]), tuple(int(c) for c in desc["modulus"]))


@lru_cache(maxsize=None)
def field_new(p: int, m: int = 1) -> FieldParams:
    """Build F_{p^m} with the lexicographically smallest monic irreducible modulus."""
    if not is_prime(p):
        raise NotPrimeError(f"{p} is not prime")
    if m < 1:
        raise DegreeZeroError("extension degree must be at least 1")
    if p**m > MAX_ORDER:
        raise TooLargeError(f"p^m = {p}^{m} exceeds 2^32")
    if m == 1:
        return FieldParams(p, 1, (0, 1))
    from .poly import Poly, is_irreducible

    base = FieldParams(p, 1, (0, 1))
    # itertools.product varies the last slot fastest, i.e. the constant
    # term is the most significant key: lex order on (c_0, ..., c_{m-1}).
    for low in itertools.product(range(p), repeat=m):
        if low[0] == 0:
            continue
        if is_irreducible(Poly(base, low + (1,))):
            return FieldParams(p, m, low + (1,))
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def gf(q: int) -> FieldParams:
    """The field with ``q`` elements, ``q`` a prime power."""
    p, k = prime_power(q)
    return field_new(p, k)
