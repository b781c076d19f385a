"""Gaussian elimination over a finite field on int64 index matrices."""

from __future__ import annotations

import numpy as np

from .gf import FieldParams


class SingularMatrixError(ValueError):
    pass


def rref(F: FieldParams, A) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    A = np.array(A, dtype=np.int64, copy=True)
    if A.ndim != 2:
        raise ValueError("rref needs a matrix")
    rows, cols = A.shape
    r = 0
    pivots: list[int] = []
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        lead = int(A[r, c])
        if lead != 1:
            A[r] = F.vmul(A[r], F.inv(lead))
        col = A[:, c].copy()
        col[r] = 0
        idx = np.flatnonzero(col)
        if idx.size:
            A[idx] = F.vsub(A[idx], F.vmul(col[idx, None], A[r][None, :]))
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(F: FieldParams, A) -> int:
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return 0
    return len(rref(F, A)[1])


def row_basis(F: FieldParams, A, block: int = 128) -> tuple[np.ndarray, list[int]]:
    """RREF basis of the row space of a (possibly very tall) matrix.

    Rows are consumed in blocks; each block is first reduced against the
    basis found so far with one field matrix product.
    """
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1]
    basis = np.zeros((0, n), dtype=np.int64)
    pivots: list[int] = []
    for s in range(0, A.shape[0], block):
        chunk = A[s : s + block]
        if pivots:
            chunk = F.vsub(chunk, F.matmul(chunk[:, pivots], basis))
        new, new_piv = rref(F, chunk)
        if not new_piv:
            continue
        if pivots:
            basis = F.vsub(basis, F.matmul(basis[:, new_piv], new))
        basis = np.vstack([basis, new])
        pivots = pivots + new_piv
        if len(pivots) == n:
            break
    order = np.argsort(pivots, kind="stable")
    return basis[order], [pivots[i] for i in order]


def nullspace(F: FieldParams, A) -> np.ndarray:
    """Columns spanning the right null space: ``A @ K == 0``."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1]
    R, piv = rref(F, A) if A.shape[0] else (np.zeros((0, n), dtype=np.int64), [])
    free = [c for c in range(n) if c not in set(piv)]
    K = np.zeros((n, len(free)), dtype=np.int64)
    for t, c in enumerate(free):
        K[c, t] = 1
        if piv:
            K[piv, t] = F.vneg(R[:, c])
    return K


def inverse(F: FieldParams, A) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    k = A.shape[0]
    if A.shape != (k, k):
        raise ValueError("inverse needs a square matrix")
    R, piv = rref(F, np.hstack([A, np.eye(k, dtype=np.int64)]))
    if piv[:k] != list(range(k)) or len(piv) < k:
        raise SingularMatrixError("matrix is singular")
    return R[:, k:]


def solve_left(F: FieldParams, M, b) -> np.ndarray | None:
    """One solution ``c`` of ``c @ M == b`` or None if inconsistent."""
    M = np.asarray(M, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    aug = np.hstack([M.T, b[:, None]])
    R, piv = rref(F, aug)
    r = M.shape[0]
    if piv and piv[-1] == r:
        return None
    c = np.zeros(r, dtype=np.int64)
    for row, p in enumerate(piv):
        c[p] = R[row, r]
    return c
