import pytest
from hypothesis import given, settings, strategies as st

from xstpir.curve import (CurvePoint, PoleAtPointError, RationalFunctionRep, admissible_points,
                          enumerate_points, eval_fn, evaluate, hermitian_curve, make_curve,
                          on_curve, one_point_rr_basis, rational_curve, rr_exponents)
from xstpir.linalg import rank
from xstpir.poly import Poly

from oracles import ref_add, ref_mul


def _ref_pow(a, e, p, mod):
    r = 1
    for _ in range(e):
        r = ref_mul(r, a, p, mod)
    return r


@pytest.mark.parametrize("q", [2, 3, 4])
def test_hermitian_points_brute_force(q):
    C = hermitian_curve(q)
    F = C.field
    ref = []
    for a in range(F.order):
        for b in range(F.order):
            lhs = _ref_pow(a, q + 1, F.p, F.modulus)
            rhs = ref_add(_ref_pow(b, q, F.p, F.modulus), b, F.p, F.m)
            if lhs == rhs:
                ref.append((a, b))
    assert [tuple(P) for P in enumerate_points(C)] == ref
    assert len(ref) == q**3


def test_hermitian_q2_points_over_x0():
    pts = enumerate_points(hermitian_curve(2))
    assert len(pts) == 8
    assert [P for P in pts if P.x == 0] == [CurvePoint(0, 0), CurvePoint(0, 1)]


def test_point_counts():
    assert len(enumerate_points(rational_curve(5))) == 5
    assert len(admissible_points(rational_curve(7))) == 6
    assert len(admissible_points(hermitian_curve(2))) == 6
    assert len(admissible_points(hermitian_curve(5))) == 120


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
def test_every_point_on_curve(q):
    C = hermitian_curve(q)
    pts = enumerate_points(C)
    assert len(pts) == q**3 and len(set(pts)) == q**3
    assert all(on_curve(C, P) for P in pts)


def test_genus_and_field():
    assert rational_curve(11).genus == 0
    C = hermitian_curve(5)
    assert C.genus == 10 and C.field.order == 25
    assert make_curve("hermitian", 3) == hermitian_curve(3)
    with pytest.raises(ValueError):
        make_curve("elliptic", 3)


def test_eval_examples():
    C = rational_curve(3)
    f = RationalFunctionRep.from_polys(C, Poly.const(C.field, 1), Poly(C.field, (1, 0, 1)))
    assert eval_fn(f, CurvePoint(1)) == 2
    x = RationalFunctionRep.monomial(C, 1)
    assert eval_fn(x, CurvePoint(2)) == 2
    g = RationalFunctionRep.from_polys(C, Poly.const(C.field, 1), Poly.x(C.field))
    with pytest.raises(PoleAtPointError):
        eval_fn(g, CurvePoint(0))
    with pytest.raises(PoleAtPointError):
        evaluate([g], enumerate_points(C))


def test_rational_functions_reject_y():
    with pytest.raises(ValueError):
        RationalFunctionRep.monomial(rational_curve(5), 0, 1)


def test_rr_basis_examples():
    assert set(rr_exponents(hermitian_curve(2), 6)) == {(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (1, 1)}
    assert len(one_point_rr_basis(hermitian_curve(5), 20)) == 11
    assert rr_exponents(rational_curve(7), 0) == [(0, 0)]


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_rr_sizes_follow_riemann_roch(q):
    C = hermitian_curve(q)
    g = C.genus
    for m in range(2 * g - 1, 3 * q * q):
        ex = rr_exponents(C, m)
        assert len(ex) == m + 1 - g
        orders = [q * i + (q + 1) * j for i, j in ex]
        assert orders == sorted(orders) and len(set(orders)) == len(orders)


def test_x_cubed_minus_one_vanishes_on_q2_admissible_points():
    # why m=6 is out of range for q=2: a nonzero function in L(6P) kills all 6 points
    C = hermitian_curve(2)
    pts = admissible_points(C)
    E = evaluate(one_point_rr_basis(C, 6), pts)
    assert rank(C.field, E) == 5
    assert all(C.field.pow(P.x, 3) == 1 for P in pts)


def test_evaluate_matches_eval_fn():
    C = hermitian_curve(3)
    pts = admissible_points(C)[:15]
    # denominator 3x has no zero on admissible points
    f = RationalFunctionRep({(2, 1): 5, (0, 0): 1, (0, 2): 7}, {(1, 0): 3}, C)
    ref = [eval_fn(f, P) for P in pts]
    assert evaluate([f], pts)[0].tolist() == ref


def test_function_encoding_round_trip():
    C = hermitian_curve(3)
    f = RationalFunctionRep({(2, 1): 5, (0, 0): 1}, {(1, 0): 3}, C)
    assert RationalFunctionRep.decode(C, f.encode()) == f


term_st = st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 2)), st.integers(1, 8),
                          min_size=1, max_size=4)


@settings(max_examples=100, deadline=None)
@given(term_st, term_st, term_st, term_st, st.integers(0, 26))
def test_product_evaluates_pointwise(n1, d1, n2, d2, k):
    C = hermitian_curve(3)
    pts = admissible_points(C)
    P = pts[k % len(pts)]
    f, g = RationalFunctionRep(n1, d1, C), RationalFunctionRep(n2, d2, C)
    try:
        a, b = eval_fn(f, P), eval_fn(g, P)
    except PoleAtPointError:
        return
    assert eval_fn(f * g, P) == C.field.mul(a, b)
    if a:
        assert eval_fn(f.reciprocal(), P) == C.field.inv(a)
