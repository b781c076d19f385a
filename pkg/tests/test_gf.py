from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xstpir.gf import (DegreeZeroError, DivisionByZeroError, FieldMismatchError, NotPrimeError,
                       TooLargeError, field_new, gf, prime_power)

from oracles import ref_add, ref_mul, has_root

FIELDS = [(2, 1), (3, 1), (3, 2), (5, 2), (7, 2), (11, 2), (2, 4), (29, 2)]


def test_prime_field_construction():
    F = field_new(2, 1)
    assert F.order == 2 and F.modulus == (0, 1)
    assert field_new(5, 2).cardinality == 25


def test_f9_modulus_is_x2_plus_1():
    assert field_new(3, 2).modulus == (1, 0, 1)


@pytest.mark.parametrize("p,m", [(2, 2), (3, 2), (5, 2), (2, 3), (3, 3), (7, 2), (29, 2)])
def test_modulus_is_lex_smallest_irreducible(p, m):
    # degree <= 3: irreducible iff rootless, which a brute-force scan decides
    first = next(
        tuple(low) + (1,)
        for low in product(range(p), repeat=m)
        if not has_root(list(low) + [1], p, (0, 1))
    )
    assert field_new(p, m).modulus == first


def test_field_new_errors():
    with pytest.raises(NotPrimeError):
        field_new(4, 1)
    with pytest.raises(DegreeZeroError):
        field_new(3, 0)
    with pytest.raises(TooLargeError):
        field_new(2, 33)
    with pytest.raises(ValueError):
        prime_power(10)


def test_gf_of_prime_power():
    assert gf(25) is field_new(5, 2)
    assert gf(841).order == 841


def test_char_two():
    F = field_new(2, 1)
    assert F.add(1, 1) == 0


def test_f9_inverse_of_u():
    F = field_new(3, 2)
    u = F.from_coeffs([0, 1])
    assert F.inv(u) == F.from_coeffs([0, 2])
    # brute-force check: the only y with u*y = 1
    assert [y for y in F.elements() if F.mul(u, y) == 1] == [F.from_coeffs([0, 2])]


def test_inverse_of_zero():
    with pytest.raises(DivisionByZeroError):
        field_new(5, 2).inv(0)
    with pytest.raises(DivisionByZeroError):
        field_new(7, 1).inv(0)


def test_membership_check():
    F = field_new(3, 2)
    with pytest.raises(FieldMismatchError):
        F.check(9)


def test_enumeration_order():
    assert field_new(2, 1).elements() == [0, 1]
    assert field_new(3, 1).elements() == [0, 1, 2]
    E = field_new(3, 2).elements()
    assert len(set(E)) == 9 and E[:3] == [0, 1, 2]


@pytest.mark.parametrize("p,m", [(2, 1), (3, 1), (3, 2), (5, 2), (7, 2), (11, 2), (2, 3)])
def test_fermat_exhaustive(p, m):
    F = field_new(p, m)
    q = F.order
    a = np.arange(1, q)
    assert np.all(F.vpow(a, q - 1) == 1)
    assert all(F.pow(int(x), q - 1) == 1 for x in a)


@pytest.mark.parametrize("p,m", [(3, 2), (5, 2), (2, 4), (7, 2)])
def test_mul_table_matches_reference(p, m):
    F = field_new(p, m)
    q = F.order
    a, b = np.meshgrid(np.arange(q), np.arange(q), indexing="ij")
    got = F.vmul(a, b)
    for x in range(q):
        for y in range(q):
            assert got[x, y] == ref_mul(x, y, p, F.modulus)
            assert F.add(x, y) == ref_add(x, y, p, m)


def test_large_extension_without_tables():
    # 3^11 > 2^16 so multiplication takes the digit-polynomial route
    F = field_new(3, 11)
    rng = np.random.default_rng(1)
    a, b = F.random(rng, 50), F.random(rng, 50)
    for x, y, z in zip(a, b, F.vmul(a, b)):
        assert z == ref_mul(int(x), int(y), 3, F.modulus) == F.mul(int(x), int(y))
    nz = a[a != 0]
    assert np.all(F.vmul(nz, F.vinv(nz)) == 1)


@pytest.mark.parametrize("q", [2, 3, 9, 25, 49, 121])
def test_vectorized_axioms_many_samples(q):
    F = gf(q)
    rng = np.random.default_rng(q)
    a, b, c = (F.random(rng, 10_000) for _ in range(3))
    assert np.array_equal(F.vadd(F.vadd(a, b), c), F.vadd(a, F.vadd(b, c)))
    assert np.array_equal(F.vmul(a, F.vadd(b, c)), F.vadd(F.vmul(a, b), F.vmul(a, c)))
    nz = a[a != 0]
    assert np.all(F.vmul(nz, F.vinv(nz)) == 1)
    assert np.all(F.vadd(a, F.vneg(a)) == 0)
    assert np.array_equal(F.vsub(a, b), F.vadd(a, F.vneg(b)))


@pytest.mark.parametrize("q", [2, 9, 25, 121, 841])
def test_matmul_matches_elementwise(q):
    F = gf(q)
    rng = np.random.default_rng(0)
    A, B = F.random(rng, (7, 13)), F.random(rng, (13, 5))
    ref = np.zeros((7, 5), dtype=np.int64)
    for k in range(13):
        ref = F.vadd(ref, F.vmul(A[:, k, None], B[None, k, :]))
    assert np.array_equal(F.matmul(A, B), ref)
    assert np.array_equal(F.matmul(A[0], B), ref[0])


def test_matmul_long_inner_dimension():
    F = gf(841)
    rng = np.random.default_rng(3)
    A, B = F.random(rng, (3, 5000)), F.random(rng, (5000, 2))
    ref = F.vsum(F.vmul(A[:, :, None], B[None, :, :]), axis=1)
    assert np.array_equal(F.matmul(A, B), ref)


def test_element_wire_encoding():
    F = gf(25)
    assert F.encode_element(7) == (7).to_bytes(8, "little")
    assert F.decode_element(F.encode_element(24)) == 24
    with pytest.raises(FieldMismatchError):
        F.decode_element((25).to_bytes(8, "little"))


def test_description_round_trip():
    F = gf(49)
    assert type(F).from_description(F.describe()) == F


field_st = st.sampled_from([2, 3, 9, 25, 49, 121, 8, 16]).map(gf)


@settings(max_examples=200, deadline=None)
@given(field_st, st.data())
def test_scalar_field_axioms(F, data):
    el = st.integers(0, F.order - 1)
    a, b, c = data.draw(el), data.draw(el), data.draw(el)
    assert F.mul(a, b) == F.mul(b, a)
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.sub(F.add(a, b), b) == a
    if a:
        assert F.mul(a, F.inv(a)) == 1
        assert F.div(F.mul(a, b), a) == b
        assert F.pow(a, -1) == F.inv(a)


@settings(max_examples=100, deadline=None)
@given(field_st, st.data())
def test_scalar_agrees_with_vector(F, data):
    el = st.integers(0, F.order - 1)
    a, b = data.draw(el), data.draw(el)
    e = data.draw(st.integers(0, 50))
    assert F.vmul(np.array([a]), np.array([b]))[0] == F.mul(a, b)
    assert F.vpow(np.array([a]), e)[0] == F.pow(a, e)
    assert F.from_digits(F.to_digits(np.array([a])))[0] == a
    assert F.from_coeffs(F.coeffs(a)) == a
