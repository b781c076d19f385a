from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from xstpir.rates import (COLUMNS, INFEASIBLE, as_value, compare_sweep, hyperelliptic_bound,
                          max_rate, new_hermitian, new_hermitian_feasible_xt_max, new_rational,
                          old_hermitian, old_rational, split_xt)
from xstpir.scheme import SchemeParams


def test_spot_values():
    assert new_rational(29, 2, 2) == Fraction(22, 28)
    assert old_rational(29, 2, 2) == Fraction(12, 16)
    assert old_hermitian(7, 2, 2) == Fraction(77, 219)
    assert new_hermitian(7, 2, 2) == Fraction(147, 310)


def test_infeasible_is_falsy_singleton():
    assert new_rational(5, 100, 100) is INFEASIBLE
    assert not INFEASIBLE and repr(INFEASIBLE) == "INFEASIBLE"
    assert as_value(INFEASIBLE) == 0


def test_dispatch():
    assert max_rate("new_rational", 29, 2, 2) == Fraction(11, 14)
    assert max_rate("hyperelliptic_bound", 29, 2, 2) == hyperelliptic_bound(29, 2, 2, 1)
    assert max_rate("hyperelliptic_bound", 29, 2, 2, g=2) == Fraction(36, 72)
    with pytest.raises(ValueError):
        max_rate("elliptic", 29, 2, 2)


def _brute_rational(q, X, T):
    best = INFEASIBLE
    for L in range(2, q + 1, 2):
        p = SchemeParams.rational(q, L, X, T)
        if not p.violations():
            best = p.rate if best is INFEASIBLE else max(best, p.rate)
    return best


def _brute_hermitian(q, X, T):
    best = INFEASIBLE
    for m in range(q - 1, q * q):
        p = SchemeParams.hermitian(q, m, X, T)
        if not p.violations():
            best = p.rate if best is INFEASIBLE else max(best, p.rate)
    return best


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([11, 13, 16, 17, 23, 25, 29, 31]), st.integers(1, 20), st.integers(1, 20))
def test_new_rational_is_best_feasible_construction(q, X, T):
    assert new_rational(q, X, T) == _brute_rational(q, X, T)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([3, 4, 5, 7, 8, 9]), st.integers(1, 200), st.integers(1, 200))
def test_new_hermitian_is_best_feasible_construction(q, X, T):
    assert new_hermitian(q, X, T) == _brute_hermitian(q, X, T)


@pytest.mark.parametrize("q", [16, 17, 29, 31])
def test_new_rational_nonincreasing_in_xt(q):
    vals = [as_value(new_rational(q, *split_xt(xt))) for xt in range(2, 3 * q)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([7, 11, 17, 29]), st.integers(2, 120), st.integers(0, 119))
def test_formulas_depend_on_sum_only(q, xt, shift):
    X = 1 + shift % (xt - 1)
    T = xt - X
    a, b = split_xt(xt)
    for f in (new_rational, old_rational, old_hermitian, new_hermitian):
        assert f(q, X, T) == f(q, a, b)
    assert hyperelliptic_bound(q, X, T) == hyperelliptic_bound(q, a, b)


def test_split_convention():
    assert split_xt(5) == (3, 2) and split_xt(4) == (2, 2)


def test_sweep_rows():
    rows = compare_sweep(29, 2, 60)
    assert [r.xt for r in rows] == list(range(2, 61))
    r4 = rows[2]
    assert r4.new_rational == Fraction(11, 14) and r4.old_rational == Fraction(3, 4)
    assert set(r4.values()) == set(COLUMNS)
    assert all(v == 0 for v in compare_sweep(5, 200, 200)[0].values().values())
    with pytest.raises(ValueError):
        compare_sweep(29, 1, 3)


def test_same_field_sweep_uses_q_squared():
    r = compare_sweep(17, 10, 10, same_field=True)[0]
    assert r.new_rational == as_value(new_rational(289, 5, 5))
    assert r.old_hermitian == as_value(old_hermitian(17, 5, 5))


def test_feasible_xt_max():
    q = 17
    top = new_hermitian_feasible_xt_max(q)
    assert new_hermitian(q, *split_xt(top)) is not INFEASIBLE
    assert new_hermitian(q, *split_xt(top + 1)) is INFEASIBLE
    assert new_hermitian_feasible_xt_max(2) == 1
