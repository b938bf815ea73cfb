import itertools

import numpy as np
import pytest

from geomforge.ffield import field_of_order
from geomforge.linear import all_subspaces, mat_mul, span, zero_subspace
from geomforge.polar import (Form, FormError, HypothesisViolation, expected_point_count,
                             grid_sets, least_anisotropic_constant, nonsingular_points,
                             predicted_difference, solid_families, sp_o_bijection,
                             standard_space, symplectic_basis, theorem_10_3_check, verify_9_2)


def _oracle_singular_count(kind, n, q):
    """Count singular points by evaluating the form with Fe arithmetic."""
    f = field_of_order(q * q if kind == "U" else q)
    els = f.elements()
    total = 0
    for coords in itertools.product(els, repeat=n):
        if not any(coords):
            continue
        x = list(coords)
        if kind == "Sp":
            val = f.zero  # every vector is isotropic
        elif kind == "U":
            val = sum((c * c ** q for c in x), f.zero)
        else:
            pairs = {"O+": range(0, n, 2), "O": range(1, n, 2), "O-": range(0, n - 2, 2)}[kind]
            val = sum((x[i] * x[i + 1] for i in pairs), f.zero)
            if kind == "O":
                val = val + x[0] * x[0]
            if kind == "O-":
                a = f(least_anisotropic_constant(f))
                val = val + x[-2] * x[-2] + x[-2] * x[-1] + a * x[-1] * x[-1]
        total += not val
    return total // (f.q - 1)


CASES = [("Sp", 4, 2), ("Sp", 6, 2), ("Sp", 4, 3), ("O+", 6, 2), ("O+", 4, 3), ("O", 5, 2),
         ("O", 5, 3), ("O-", 6, 2), ("O-", 6, 3), ("U", 3, 2), ("U", 4, 2), ("U", 3, 3)]


@pytest.mark.parametrize("kind,n,q", CASES)
def test_point_counts_against_oracle(kind, n, q):
    ps = standard_space(kind, n, q)
    assert ps.num_points == _oracle_singular_count(kind, n, q) == expected_point_count(kind, n, q)


@pytest.mark.parametrize("kind,n,q,points,rank,c", [
    ("Sp", 6, 2, 63, 3, 0), ("O+", 8, 2, 135, 4, -1), ("O-", 8, 2, 119, 3, 1),
    ("O", 7, 3, 364, 3, 0), ("U", 4, 2, 45, 2, -0.5), ("U", 5, 2, 165, 2, 0.5)])
def test_standard_spaces(kind, n, q, points, rank, c):
    ps = standard_space(kind, n, q)
    assert (ps.num_points, ps.rank, float(ps.type_constant)) == (points, rank, c)


def test_inconsistent_parameters():
    with pytest.raises(FormError):
        standard_space("Sp", 5, 2)
    with pytest.raises(FormError):
        standard_space("O", 6, 2)
    with pytest.raises(FormError):
        standard_space("spin", 6, 2)


def test_anisotropic_constant():
    assert least_anisotropic_constant(field_of_order(2)) == 1
    assert least_anisotropic_constant(field_of_order(3)) == 2
    f = field_of_order(4)
    a = least_anisotropic_constant(f)
    assert all(f(t) * f(t) + f(t) + f(a) for t in range(4))


def test_perp_of_zero_is_everything():
    ps = standard_space("Sp", 6, 2)
    assert ps.perp(zero_subspace(ps.field, 6)).dim == 6


def test_point_perp_dimension():
    ps = standard_space("Sp", 6, 2)
    for v in ps.vectors.tolist():
        assert ps.perp(span(ps.field, 6, [v])).dim == 5


def test_double_perp_exhaustive_sp43():
    ps = standard_space("Sp", 4, 3)
    subs = all_subspaces(ps.field, 4)
    assert len(subs) == 1 + 40 + 130 + 40 + 1
    for s in subs:
        p = ps.perp(s)
        assert s.dim + p.dim == 4
        assert ps.perp(p) == s


def test_double_perp_hermitian():
    ps = standard_space("U", 3, 2)
    for s in all_subspaces(ps.field, 3)[:40]:
        assert ps.perp(ps.perp(s)) == s


def test_is_singular_examples():
    ps = standard_space("O+", 4, 2)
    f = ps.field
    assert ps.is_singular(zero_subspace(f, 4))
    assert ps.is_singular(span(f, 4, [(1, 0, 1, 0)]))
    assert not ps.is_singular(span(f, 4, [(1, 1, 0, 0)]))


def test_char2_singular_requires_quadratic_form():
    # in O(5,2) every vector is isotropic for the polarized form, not singular
    ps = standard_space("O", 5, 2)
    assert not ps.is_singular(span(ps.field, 5, [(1, 0, 0, 0, 0)]))


@pytest.mark.parametrize("kind,n,q,k,count", [
    ("O+", 8, 2, 4, 270), ("Sp", 4, 2, 2, 15), ("O+", 4, 2, 2, 6), ("Sp", 6, 2, 2, 315),
    ("Sp", 6, 2, 3, 135), ("O+", 6, 2, 3, 30)])
def test_ts_subspace_counts(kind, n, q, k, count):
    ps = standard_space(kind, n, q)
    subs = ps.ts_subspaces(k)
    assert len(subs) == count == len(set(subs))
    assert all(s.dim == k and ps.is_singular(s) for s in subs)


def test_maximal_ts_dimension_o8():
    ps = standard_space("O+", 8, 2)
    solids = ps.max_ts_subspaces()
    assert {s.dim for s in solids} == {4}
    # none extends: the perp of a solid is the solid itself
    assert all(ps.perp(s) == s for s in solids[:20])


@pytest.mark.parametrize("n,half", [(6, 15), (8, 135), (4, 3)])
def test_solid_families(n, half):
    ps = standard_space("O+", n, 2)
    fam = solid_families(ps)
    assert len(fam.members(0)) == len(fam.members(1)) == half
    r = ps.rank
    # each maximal-minus-one t.s. subspace lies in one solid of each family
    for s in ps.ts_subspaces(r - 1):
        idx = ps.indices(s)
        holders = np.nonzero(fam.incidence[:, idx].all(axis=1))[0]
        assert sorted(fam.family[holders].tolist()) == [0, 1]


def test_disjoint_same_family_count():
    ps = standard_space("O+", 8, 2)
    fam = solid_families(ps)
    a = fam.members(0)
    disjoint = fam.meet_dims[np.ix_(a, a)] == 0
    assert (disjoint.sum(axis=1) == 64).all()


def test_families_need_hyperbolic_space():
    with pytest.raises(FormError):
        solid_families(standard_space("Sp", 4, 2))


@pytest.mark.parametrize("kind,n,i,count", [("Sp", 6, 1, 32), ("O+", 6, 1, 16), ("O-", 6, 1, 16)])
def test_counting_lemma_examples(kind, n, i, count):
    ps = standard_space(kind, n, 2)
    res = verify_9_2(ps, i)
    assert all(c.count == c.expected == count for c in res)


def test_counting_lemma_unitary_exponent():
    ps = standard_space("U", 5, 2)
    # q = 4, r = 2, c = 1/2, i = 1: 4^(7/2) = 2^7
    assert predicted_difference(ps, 1) == 128


def test_counting_lemma_range():
    with pytest.raises(FormError):
        verify_9_2(standard_space("Sp", 4, 2), 3)


@pytest.mark.parametrize("m,q,points,lines", [(2, 2, 15, 15), (3, 2, 63, 315), (2, 4, 85, 85)])
def test_sp_o_bijection(m, q, points, lines):
    rq, rep = sp_o_bijection(m, q)
    assert rep.ok
    assert rep.orthogonal_points == rep.symplectic_points == points
    assert rep.orthogonal_lines == rep.symplectic_lines == lines


def test_sp_o_bijection_rejects_odd_q():
    with pytest.raises(FormError):
        sp_o_bijection(2, 3)


def test_symplectic_basis_random_form():
    f = field_of_order(3)
    rng = np.random.default_rng(5)
    for _ in range(5):
        m = rng.integers(0, 3, size=(4, 4))
        g = (m - m.T) % 3
        if np.linalg.matrix_rank(g) < 4 or round(np.linalg.det(g)) % 3 == 0:
            continue
        b = symplectic_basis(f, g)
        chk = mat_mul(f, mat_mul(f, b, g), b.T)
        assert (chk == standard_space("Sp", 4, 3).form.gram).all()


def test_preserved_by():
    form = standard_space("Sp", 4, 2).form
    assert form.preserved_by(np.eye(4, dtype=int))
    swap = np.array([[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]])
    assert form.preserved_by(swap)
    assert not form.preserved_by(np.array([[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))


def test_hermitian_form_must_be_conjugate_symmetric():
    f = field_of_order(4)
    with pytest.raises(FormError):
        Form("hermitian", f, [[2, 0], [0, 1]])


@pytest.mark.parametrize("n", [6, 8])
def test_section_theorem_recovers_pole(n):
    ps = standard_space("O+", n, 2)
    for v in nonsingular_points(ps):
        phi = np.nonzero(ps.form.bilinear(ps.space.points[[v]], ps.vectors)[0] == 0)[0]
        assert theorem_10_3_check(ps, phi) == [int(v)]


def test_section_theorem_rejects_bad_set():
    ps = standard_space("O+", 6, 2)
    with pytest.raises(HypothesisViolation):
        theorem_10_3_check(ps, range(1, ps.num_points))


def test_grid_remark_q4():
    rem = grid_sets(4)
    assert (rem.hypothesis_sets, rem.conics) == (120, 60)
