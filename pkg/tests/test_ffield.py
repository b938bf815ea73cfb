import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from geomforge.ffield import FieldError, field_of_order, frobenius, make_field, prime_power

SMALL_ORDERS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27]


def _brute_irreducible_quadratics(p):
    # monic x^2 + b x + c is irreducible iff it has no root in GF(p)
    out = []
    for c, b in itertools.product(range(p), repeat=2):
        if all((x * x + b * x + c) % p for x in range(p)):
            out.append((c, b, 1))
    return out


def test_prime_field_modulus():
    assert make_field(2, 1).modulus == (0, 1)


def test_gf4_modulus():
    assert make_field(2, 2).modulus == (1, 1, 1)


def test_gf9_modulus_is_least_irreducible():
    cands = _brute_irreducible_quadratics(3)
    least = min(cands, key=lambda m: tuple(m[:2]))
    assert make_field(3, 2).modulus == least == (1, 0, 1)


@pytest.mark.parametrize("p", [4, 6, 1, 0])
def test_rejects_non_prime(p):
    with pytest.raises(FieldError):
        make_field(p, 1)


def test_prime_power():
    assert prime_power(81) == (3, 4)
    with pytest.raises(FieldError):
        prime_power(12)


def test_gf4_generator_square():
    F = make_field(2, 2)
    g = F.gen
    assert g * g == g + 1
    assert frobenius(g, 1) == g + 1


def test_inverse_of_zero_raises():
    F = field_of_order(9)
    with pytest.raises(ZeroDivisionError):
        F.zero.inv()


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64, 81])
def test_field_axioms_exhaustive(q):
    F = field_of_order(q)
    A, M, N, I = F.add_table, F.mul_table, F.neg_table, F.inv_table
    r = np.arange(q)
    assert (A == A.T).all() and (M == M.T).all()
    assert (A[:, 0] == r).all() and (M[:, 1] == r).all()
    assert (A[r, N] == 0).all()
    assert (M[r[1:], I[1:]] == 1).all()
    # every row of the additive / multiplicative group is a permutation
    assert all(len(set(row)) == q for row in A)
    assert all(len(set(row[1:])) == q - 1 for row in M[1:])
    # associativity and distributivity over all triples
    assert (A[A[:, :, None], r[None, None, :]] == A[r[:, None, None], A[None, :, :]]).all()
    assert (M[M[:, :, None], r[None, None, :]] == M[r[:, None, None], M[None, :, :]]).all()
    lhs = M[r[:, None, None], A[None, :, :]]
    rhs = A[M[:, :, None], M[:, None, :]]
    assert (lhs == rhs).all()


def test_gf9_frobenius_additive_exhaustive():
    F = field_of_order(9)
    for a in F.elements():
        for b in F.elements():
            assert (a + b) ** 3 == a ** 3 + b ** 3


def test_gf16_frobenius_composition():
    F = field_of_order(16)
    for a in F.elements():
        assert frobenius(frobenius(a, 1), 1) == frobenius(a, 2)
        assert frobenius(a, 4) == a


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_frobenius_is_automorphism(q):
    F = field_of_order(q)
    fr = F.frob_table(1)
    r = np.arange(q)
    assert sorted(fr) == list(r)
    assert (fr[F.add_table] == F.add_table[fr[:, None], fr[None, :]]).all()
    assert (fr[F.mul_table] == F.mul_table[fr[:, None], fr[None, :]]).all()
    t = r
    for _ in range(F.e):
        t = fr[t]
    assert (t == r).all()


def test_conjugation_fixes_subfield():
    F = field_of_order(9)
    conj = F.conj_table()
    fixed = [i for i in range(9) if conj[i] == i]
    assert len(fixed) == 3
    with pytest.raises(FieldError):
        field_of_order(8).conj_table()


@given(st.sampled_from(SMALL_ORDERS), st.data())
def test_element_index_roundtrip(q, data):
    F = field_of_order(q)
    i = data.draw(st.integers(0, q - 1))
    j = data.draw(st.integers(1, q - 1))
    a, b = F(i), F(j)
    assert int(F(int(a))) == i
    assert a / b * b == a
    assert int(a * b) == F.mul_table[i, j]
    assert a ** (q - 1) == (F.one if i else F.zero)
