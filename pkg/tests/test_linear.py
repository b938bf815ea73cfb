import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geomforge.ffield import field_of_order
from geomforge.linear import (DimensionError, all_subspaces, enumerate_points, full_space,
                              gaussian_binomial, mat_inverse, mat_mul, projective_space, rref,
                              span, zero_subspace)

GF2, GF3, GF4 = field_of_order(2), field_of_order(3), field_of_order(4)


def test_identity_rref():
    assert rref(GF2, np.eye(3, dtype=int).tolist()).dim == 3


def test_dependent_rows():
    assert rref(GF2, [(1, 1, 0), (0, 1, 1), (1, 0, 1)]).dim == 2


def test_zero_matrix():
    assert rref(GF3, [(0, 0, 0)]).dim == 0


@given(st.lists(st.lists(st.integers(0, 2), min_size=6, max_size=6), min_size=4, max_size=4))
def test_rref_idempotent(rows):
    s = rref(GF3, rows)
    assert rref(GF3, s.basis, 6) == s


@settings(max_examples=50)
@given(st.lists(st.lists(st.integers(0, 3), min_size=5, max_size=5), min_size=1, max_size=4),
       st.lists(st.integers(1, 3), min_size=4, max_size=4))
def test_canonical_under_row_operations(rows, scales):
    s = rref(GF4, rows)
    # rescale and add rows: same subspace, same representation
    mixed = [[int(GF4.mul_table[scales[i % 4], x]) for x in r] for i, r in enumerate(rows)]
    mixed = mixed + [[int(GF4.add_table[a, b]) for a, b in zip(rows[0], rows[-1])]]
    assert rref(GF4, mixed) == s


def test_lattice_identities():
    a = span(GF2, 4, [(1, 0, 0, 0), (0, 1, 1, 0)])
    assert a & a == a and a + a == a
    p, q_ = span(GF2, 4, [(1, 0, 0, 0)]), span(GF2, 4, [(0, 1, 0, 0)])
    line = p + q_
    assert line.dim == 2 and len(enumerate_points(line)) == 3


def test_ambient_mismatch():
    with pytest.raises(DimensionError):
        span(GF2, 3, [(1, 0, 0)]) + span(GF2, 4, [(1, 0, 0, 0)])


def test_modular_law_exhaustive_gf2_4():
    subs = all_subspaces(GF2, 4)
    assert len(subs) == 67
    for a, b in itertools.product(subs, repeat=2):
        assert a.dim + b.dim == (a + b).dim + (a & b).dim
        assert (a & b).contains(a & b) and a.contains(a & b) and (a + b).contains(b)


@pytest.mark.parametrize("dim,q,count", [(3, 2, 7), (2, 4, 5), (4, 2, 15)])
def test_point_counts(dim, q, count):
    f = field_of_order(q)
    pts = enumerate_points(full_space(f, dim))
    assert len(pts) == count == len(set(pts))
    assert pts == sorted(pts)


@pytest.mark.parametrize("n,q", [(n, q) for n in range(1, 7) for q in (2, 3, 4) if q ** n <= 4096])
def test_projective_space_complete(n, q):
    sp = projective_space(field_of_order(q), n)
    pts = sp.points
    assert len(pts) == (q ** n - 1) // (q - 1)
    assert len({tuple(p) for p in pts.tolist()}) == len(pts)
    assert (sp.ids(pts) == np.arange(len(pts))).all()
    assert [tuple(p) for p in pts.tolist()] == enumerate_points(full_space(field_of_order(q), n))


@pytest.mark.parametrize("n,q,count", [(4, 2, 120), (3, 2, 28), (2, 3, 12)])
def test_antiflags(n, q, count):
    sp = projective_space(field_of_order(q), n)
    af = sp.antiflags()
    assert len(af) == count == sp.num_points * q ** (n - 1)
    # n = 2: each point misses q hyperplanes
    if n == 2:
        assert all((af[:, 0] == x).sum() == q for x in range(sp.num_points))


def test_hyperplanes_through():
    sp = projective_space(GF2, 4)
    for x in range(sp.num_points):
        hs = sp.hyperplanes_through(x)
        assert len(hs) == 7
        assert all(sp.hyperplane(h).contains_vector(sp.points[x]) for h in hs)


def test_subspace_ids_scaling():
    sp = projective_space(GF3, 3)
    s = span(GF3, 3, [(1, 2, 0), (0, 1, 1)])
    ids = sp.subspace_ids(s)
    assert len(ids) == 4
    assert set(sp.ids(mat_mul(GF3, s.vectors()[1:], np.eye(3, dtype=int)))) == set(ids)


def test_mat_inverse():
    m = np.array([[1, 2, 0], [0, 1, 3], [2, 0, 1]])
    inv = mat_inverse(GF4, m)
    assert (mat_mul(GF4, m, inv) == np.eye(3, dtype=int)).all()
    with pytest.raises(ZeroDivisionError):
        mat_inverse(GF2, [[1, 1], [1, 1]])


def test_gaussian_binomial_matches_enumeration():
    subs = all_subspaces(GF3, 3)
    for k in range(4):
        assert sum(s.dim == k for s in subs) == gaussian_binomial(3, k, 3)


def test_image_under_frobenius():
    s = span(GF4, 2, [(1, 2)])
    t = s.image(np.eye(2, dtype=int), k=1)
    assert t == span(GF4, 2, [(1, int(GF4.frob_table(1)[2]))])
    assert zero_subspace(GF4, 2).image(np.eye(2, dtype=int)) == zero_subspace(GF4, 2)
