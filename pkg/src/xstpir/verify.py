"""Computational checks of decodability, security and privacy.

Security and privacy are checked as rank conditions: every X-subset of
server columns of a secrecy generator must have rank X.  That makes the
storage view of any X servers a one-time pad.  ``dual_distance_exact`` is
an independent brute-force oracle for the same property.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import time
from collections import Counter
from dataclasses import dataclass, field as dc_field
from math import comb

import numpy as np

from .curve import CurveKind, admissible_points, evaluate, one_point_rr_basis
from .gf import FieldParams
from .linalg import nullspace, rank, rref
from .scheme import SchemeSpec

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"

DEFAULT_SUBSET_CAP = 10**6
ENUMERATION_LIMIT = 10**7


class EnumerationTooLarge(ValueError):
    pass


class PreconditionOutOfRange(ValueError):
    pass


class TooLarge(ValueError):
    pass


@dataclass
class CheckResult:
    name: str
    status: str
    witness: object = None
    params: dict = dc_field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == PASS


@dataclass
class VerificationReport:
    scheme: str
    checks: list[CheckResult] = dc_field(default_factory=list)
    limits: dict = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "status", "params", "elapsed_s", "witness"])
        for c in self.checks:
            params = ";".join(f"{k}={v}" for k, v in c.params.items())
            w.writerow([c.name, c.status, params, f"{c.elapsed:.4f}",
                        "" if c.witness is None else repr(c.witness)])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"scheme: {self.scheme}"]
        for c in self.checks:
            extra = f"  witness={c.witness!r}" if c.status == FAIL else ""
            lines.append(f"  {c.status.upper():8s} {c.name} ({c.elapsed:.3f}s){extra}")
        if self.limits:
            lines.append("  limits: " + ", ".join(f"{k}={v}" for k, v in self.limits.items()))
        lines.append("RESULT: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines)


def _timed(name, fn, **params) -> CheckResult:
    t0 = time.perf_counter()
    status, witness = fn()
    return CheckResult(name, status, witness, params, time.perf_counter() - t0)


# ----------------------------------------------------------------------
# direct sum


def check_direct_sum(scheme: SchemeSpec) -> CheckResult:
    """``rank([H; W]) == L + rows(W)`` on the selected points."""

    def run():
        F = scheme.field
        M = scheme.stacked()
        r = rank(F, M)
        if r == M.shape[0]:
            return PASS, None
        # a nonzero c with c @ M == 0 names the dependency
        dep = nullspace(F, M.T)[:, 0]
        return FAIL, {"rank": r, "expected": M.shape[0], "dependency": dep.tolist()}

    return _timed("direct_sum", run, L=scheme.L, noise_dim=scheme.noise_dim)


# ----------------------------------------------------------------------
# subset-rank checks


def batched_independent(F: FieldParams, vecs: np.ndarray) -> np.ndarray:
    """For a stack ``(B, t, d)`` tell which stacks have ``t`` independent rows."""
    vecs = np.array(vecs, dtype=np.int64, copy=True)
    B, t, d = vecs.shape
    ok = np.ones(B, dtype=bool)
    if t > d:
        return np.zeros(B, dtype=bool)
    rows_b = np.arange(B)
    pivots = []
    for i in range(t):
        row = vecs[:, i, :]
        for j, pj in enumerate(pivots):
            coef = row[rows_b, pj]
            row = F.vsub(row, F.vmul(coef[:, None], vecs[:, j, :]))
        nz = row != 0
        alive = nz.any(axis=1)
        ok &= alive
        p = np.argmax(nz, axis=1)
        lead = row[rows_b, p]
        lead = np.where(lead == 0, 1, lead)
        row = F.vmul(row, F.vinv(lead)[:, None])
        vecs[:, i, :] = row
        pivots.append(p)
    return ok


def first_dependent_subset(F: FieldParams, G: np.ndarray, t: int, batch: int = 20000):
    """First ``t``-subset of columns of ``G`` with rank below ``t``, else None."""
    G = np.asarray(G, dtype=np.int64)
    N = G.shape[1]
    if t <= 0:
        return None
    cols = G.T  # (N, d)
    combos = itertools.combinations(range(N), t)
    while True:
        chunk = list(itertools.islice(combos, batch))
        if not chunk:
            return None
        idx = np.array(chunk, dtype=np.int64)
        ok = batched_independent(F, cols[idx])
        if not ok.all():
            return tuple(int(c) for c in idx[np.argmin(ok)])


def _subset_check(name, scheme, gens, t, subset_cap, per_row):
    N = scheme.N
    n_subsets = comb(N, t)

    def run():
        if n_subsets > subset_cap:
            return SKIPPED, {"subsets": n_subsets, "cap": subset_cap}
        for label, G in gens:
            bad = first_dependent_subset(scheme.field, G, t)
            if bad is not None:
                return FAIL, {per_row: label, "subset": bad}
        return PASS, None

    return _timed(name, run, t=t, subsets=n_subsets, cap=subset_cap)


def check_security(scheme: SchemeSpec, subset_cap: int = DEFAULT_SUBSET_CAP) -> CheckResult:
    """Every X columns of every ``Gsec[l]`` are independent."""
    gens = [(l, scheme.Gsec[l]) for l in range(scheme.L)]
    return _subset_check("security", scheme, gens, scheme.X, subset_cap, "l")


def check_privacy(scheme: SchemeSpec, subset_cap: int = DEFAULT_SUBSET_CAP) -> CheckResult:
    """Every T columns of ``Gpriv`` are independent (shared by all l)."""
    return _subset_check("privacy", scheme, [("all", scheme.Gpriv)], scheme.T, subset_cap, "l")


# ----------------------------------------------------------------------
# exhaustive privacy


def _all_tuples(F: FieldParams, length: int) -> np.ndarray:
    idx = np.arange(F.order**length, dtype=np.int64)
    return (idx[:, None] // (F.order ** np.arange(length, dtype=np.int64))) % F.order


def coalition_view_counts(scheme: SchemeSpec, K: int, coalition, theta: int) -> Counter:
    """Exact distribution of the coalition's queries for one file index."""
    F, L = scheme.field, scheme.L
    cols = list(coalition)
    R = _all_tuples(F, K * L * scheme.dim_priv).reshape(-1, K * L, scheme.dim_priv)
    G = scheme.Gpriv[:, cols]  # (dim_priv, c)
    views = F.matmul(R.reshape(-1, scheme.dim_priv), G).reshape(-1, K, L, len(cols))
    views[:, theta - 1] = F.vadd(views[:, theta - 1], scheme.H[:, cols][None])
    flat = views.reshape(views.shape[0], -1)
    uniq, counts = np.unique(flat, axis=0, return_counts=True)
    return Counter({tuple(u.tolist()): int(c) for u, c in zip(uniq, counts)})


def exhaustive_privacy_distribution(scheme: SchemeSpec, K: int, coalition) -> CheckResult:
    coalition = sorted(set(coalition))
    if len(coalition) > scheme.T:
        raise PreconditionOutOfRange(f"coalition of {len(coalition)} exceeds T={scheme.T}")
    total = scheme.field.order ** (scheme.dim_priv * K * scheme.L)
    if total > ENUMERATION_LIMIT:
        raise EnumerationTooLarge(f"{total} randomness tuples exceed {ENUMERATION_LIMIT}")

    def run():
        if not coalition:
            return PASS, None
        ref = coalition_view_counts(scheme, K, coalition, 1)
        for theta in range(2, K + 1):
            other = coalition_view_counts(scheme, K, coalition, theta)
            if other != ref:
                diff = next(v for v in set(ref) | set(other) if ref[v] != other[v])
                return FAIL, {"theta": theta, "view": diff,
                              "count_theta1": ref[diff], "count": other[diff]}
        return PASS, None

    return _timed("exhaustive_privacy", run, K=K, coalition=tuple(coalition), tuples=total)


# ----------------------------------------------------------------------
# Riemann-Roch dimension


def check_rr_dimension(curve: CurveKind, m: int) -> CheckResult:
    g = curve.genus
    pts = admissible_points(curve)
    if not (m > 2 * g - 2 and m < len(pts)):
        raise PreconditionOutOfRange(f"need 2g-2 < m < {len(pts)}, got m={m}")

    def run():
        r = rank(curve.field, evaluate(one_point_rr_basis(curve, m), pts))
        if r == m + 1 - g:
            return PASS, None
        return FAIL, {"rank": r, "expected": m + 1 - g}

    return _timed("rr_dimension", run, q=curve.q, m=m)


# ----------------------------------------------------------------------
# dual distance oracle


def _krawtchouk(w: int, i: int, n: int, q: int) -> int:
    return sum((-1) ** j * (q - 1) ** (w - j) * comb(i, j) * comb(n - i, w - j)
               for j in range(w + 1))


def weight_distribution(F: FieldParams, G: np.ndarray) -> list[int]:
    """Number of codewords of each Hamming weight in the row space of ``G``."""
    G = np.asarray(G, dtype=np.int64)
    basis, _ = rref(F, G) if G.shape[0] else (G, [])
    k, n = basis.shape
    if F.order**k > ENUMERATION_LIMIT:
        raise TooLarge(f"{F.order}^{k} codewords")
    counts = [0] * (n + 1)
    msgs = _all_tuples(F, k) if k else np.zeros((1, 0), dtype=np.int64)
    for s in range(0, msgs.shape[0], 100000):
        words = F.matmul(msgs[s : s + 100000], basis) if k else np.zeros((1, n), dtype=np.int64)
        for wt, c in zip(*np.unique((words != 0).sum(axis=1), return_counts=True)):
            counts[int(wt)] += int(c)
    return counts


def dual_distance_exact(F: FieldParams, G) -> float:
    """Minimum weight of the dual of the row space of ``G``; ``inf`` if trivial.

    Whichever of the code and its dual has fewer words is enumerated.  The
    dual directly, or the code followed by the MacWilliams identity.
    """
    G = np.asarray(G, dtype=np.int64)
    n = G.shape[1]
    H = nullspace(F, G).T  # rows span the dual
    r = H.shape[0]
    if r == 0:
        return math.inf
    if F.order**r <= min(ENUMERATION_LIMIT, F.order ** (n - r)):
        best = math.inf
        total = F.order**r
        for s in range(1, total, 200000):
            idx = np.arange(s, min(total, s + 200000), dtype=np.int64)
            coeffs = (idx[:, None] // (F.order ** np.arange(r, dtype=np.int64))) % F.order
            words = F.matmul(coeffs, H)
            best = min(best, int((words != 0).sum(axis=1).min()))
        return best
    k = n - r
    if F.order**k > ENUMERATION_LIMIT:
        raise TooLarge("neither the code nor its dual is small enough to enumerate")
    A = weight_distribution(F, G)
    size = F.order**k
    for w in range(1, n + 1):
        total = sum(A[i] * _krawtchouk(w, i, n, F.order) for i in range(n + 1))
        if total % size:
            raise AssertionError("MacWilliams transform is not integral")
        if total:
            return w
    return math.inf  # pragma: no cover - r > 0 means some dual word exists


# ----------------------------------------------------------------------
# full report


def verify_scheme(scheme: SchemeSpec, subset_cap: int = DEFAULT_SUBSET_CAP,
                  privacy_K: int | None = None) -> VerificationReport:
    """Run every structural check on a built scheme."""
    p = scheme.params
    g = scheme.curve.genus
    report = VerificationReport(repr(scheme), limits={"subset_cap": subset_cap})

    def simple(name, cond, witness):
        report.checks.append(CheckResult(name, PASS if cond else FAIL, None if cond else witness))

    simple("server_count", scheme.N == p.N, {"N": scheme.N, "expected": p.N})
    simple("deg_dfull", scheme.deg_dfull == p.deg_dfull,
           {"deg": scheme.deg_dfull, "expected": p.deg_dfull})
    simple("dim_sec", scheme.dim_sec == p.X + g, {"dim": scheme.dim_sec, "expected": p.X + g})
    simple("dim_priv", scheme.dim_priv == p.T + g, {"dim": scheme.dim_priv, "expected": p.T + g})
    h_rank = rank(scheme.field, scheme.H)
    simple("h_independent", h_rank == p.L, {"rank": h_rank, "expected": p.L})
    w_rank = rank(scheme.field, scheme.W)
    simple("noise_basis_independent", w_rank == scheme.noise_dim,
           {"rank": w_rank, "rows": scheme.noise_dim})
    if p.kind == "rational":
        simple("noise_dim_bound", scheme.noise_dim <= p.X + p.T + 2,
               {"noise_dim": scheme.noise_dim, "bound": p.X + p.T + 2})
    report.checks.append(check_direct_sum(scheme))
    report.checks.append(check_security(scheme, subset_cap))
    report.checks.append(check_privacy(scheme, subset_cap))
    if privacy_K:
        for n in range(scheme.N):
            try:
                report.checks.append(exhaustive_privacy_distribution(scheme, privacy_K, [n]))
            except EnumerationTooLarge as exc:
                report.checks.append(CheckResult("exhaustive_privacy", SKIPPED, str(exc)))
                break
    return report
