"""Storage encoding, query generation, answers and decoding.

Servers are indexed ``0 .. N-1`` (the columns of the scheme matrices).
File indices ``theta`` are 1-based, ``1 .. K``.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np

from .gf import FieldParams
from .linalg import inverse, nullspace, rref
from .scheme import SchemeSpec


class ProtocolError(ValueError):
    pass


class DimensionMismatch(ProtocolError):
    pass


class IndexOutOfRange(ProtocolError):
    pass


class ServerMismatch(ProtocolError):
    pass


class InconsistentAnswers(ProtocolError):
    pass


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass
class Database:
    """``K`` files of ``L`` symbols each; row ``k-1`` is file ``k``."""

    symbols: np.ndarray

    def __post_init__(self):
        self.symbols = np.asarray(self.symbols, dtype=np.int64)
        if self.symbols.ndim != 2:
            raise DimensionMismatch("database must be a K x L matrix")

    @property
    def K(self) -> int:
        return self.symbols.shape[0]

    @property
    def L(self) -> int:
        return self.symbols.shape[1]

    def file(self, theta: int) -> np.ndarray:
        return self.symbols[theta - 1]

    @classmethod
    def random(cls, field: FieldParams, K: int, L: int, seed=None) -> "Database":
        return cls(field.random(make_rng(seed), (K, L)))

    @classmethod
    def zeros(cls, K: int, L: int) -> "Database":
        return cls(np.zeros((K, L), dtype=np.int64))


@dataclass
class StorageShare:
    server_index: int
    Y: np.ndarray  # (K, L)
    field: FieldParams


@dataclass
class Query:
    server_index: int
    D: np.ndarray  # (K, L)


@dataclass
class Answer:
    server_index: int
    value: int


def encode_storage(scheme: SchemeSpec, db: Database, rng=None,
                   zero_randomness: bool = False) -> list[StorageShare]:
    """Secret-share every file symbol with X-secure noise from ``Gsec``."""
    if db.L != scheme.L:
        raise DimensionMismatch(f"database has L={db.L}, scheme expects {scheme.L}")
    F, K, L, N = scheme.field, db.K, scheme.L, scheme.N
    if K == 0:
        return []
    if zero_randomness:
        Z = np.zeros((K, L, scheme.dim_sec), dtype=np.int64)
    else:
        Z = F.random(make_rng(rng), (K, L, scheme.dim_sec))
    noise = np.stack([F.matmul(Z[:, l, :], scheme.Gsec[l]) for l in range(L)], axis=1)
    Y = F.vadd(db.symbols[:, :, None], noise)  # (K, L, N)
    return [StorageShare(n, Y[:, :, n].copy(), F) for n in range(N)]


def gen_queries(scheme: SchemeSpec, theta: int, K: int, rng=None,
                zero_randomness: bool = False) -> list[Query]:
    """Queries for file ``theta`` with T-private noise from ``Gpriv``."""
    if not 1 <= theta <= K:
        raise IndexOutOfRange(f"theta={theta} not in [1, {K}]")
    F, L, N = scheme.field, scheme.L, scheme.N
    if zero_randomness:
        R = np.zeros((K * L, scheme.dim_priv), dtype=np.int64)
    else:
        R = F.random(make_rng(rng), (K * L, scheme.dim_priv))
    D = F.matmul(R, scheme.Gpriv).reshape(K, L, N)
    D[theta - 1] = F.vadd(D[theta - 1], scheme.H)
    return [Query(n, D[:, :, n].copy()) for n in range(N)]


def server_answer(share: StorageShare, query: Query) -> Answer:
    if share.server_index != query.server_index:
        raise ServerMismatch(f"share for server {share.server_index}, "
                             f"query for server {query.server_index}")
    if share.Y.shape != query.D.shape:
        raise DimensionMismatch(f"share {share.Y.shape} vs query {query.D.shape}")
    F = share.field
    value = F.matmul(share.Y.reshape(-1), query.D.reshape(-1))
    return Answer(share.server_index, int(value))


class Decoder:
    """Precomputed left inverse and parity checks of ``[H; W]``."""

    def __init__(self, scheme: SchemeSpec):
        F = scheme.field
        M = scheme.stacked()
        _, pivots = rref(F, M)
        if len(pivots) != M.shape[0]:
            raise InconsistentAnswers("[H; W] is not of full row rank")
        self.field = F
        self.L = scheme.L
        self.N = scheme.N
        self.pivots = np.array(pivots, dtype=np.int64)
        self.left_inv = inverse(F, M[:, pivots])[:, : scheme.L]
        self.checks = nullspace(F, M)

    def decode(self, values: np.ndarray) -> np.ndarray:
        F = self.field
        if self.checks.shape[1] and np.any(F.matmul(values, self.checks)):
            raise InconsistentAnswers("answer vector is outside the row space of [H; W]")
        return F.matmul(values[self.pivots], self.left_inv)


_decoders: "weakref.WeakKeyDictionary[SchemeSpec, Decoder]" = weakref.WeakKeyDictionary()


def decoder_for(scheme: SchemeSpec) -> Decoder:
    dec = _decoders.get(scheme)
    if dec is None:
        dec = _decoders[scheme] = Decoder(scheme)
    return dec


def decode(scheme: SchemeSpec, answers: list[Answer]) -> np.ndarray:
    """Recover the requested file from all ``N`` answers."""
    if len(answers) != scheme.N:
        raise DimensionMismatch(f"need {scheme.N} answers, got {len(answers)}")
    for n, a in enumerate(answers):
        if a.server_index != n:
            raise ServerMismatch(f"answer {n} comes from server {a.server_index}")
    values = np.array([a.value for a in answers], dtype=np.int64)
    return decoder_for(scheme).decode(values)


@dataclass
class Retrieval:
    shares: list[StorageShare]
    queries: list[Query]
    answers: list[Answer]
    decoded: np.ndarray


def run_pipeline(scheme: SchemeSpec, db: Database, theta: int, seed=None) -> Retrieval:
    """Encode, query, answer and decode in-process.

    Storage randomness and query randomness come from one generator seeded
    with ``seed``, drawn in that order.
    """
    rng = make_rng(seed)
    shares = encode_storage(scheme, db, rng)
    queries = gen_queries(scheme, theta, db.K, rng)
    answers = [server_answer(s, q) for s, q in zip(shares, queries)]
    return Retrieval(shares, queries, answers, decode(scheme, answers))
