import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geomforge.ffield import field_of_order
from geomforge.grouporb import (ActionError, GroupError, GroupPresentation, MatrixEnumeration, PairAction,
                                PointAction, SemilinearMap, SetAction, antiflag_transitive,
                                antiflag_transitive_polar, block_is_subspace, closure, dickson_in_omega,
                                imprimitivity_blocks, invariant_chain, invert, line_criterion_4_1, orbit,
                                orbit_partition, orbit_transversal, preserves_form, preset_group,
                                projective_lines, rank, restrict_to_prime_field, schreier_generators)
from geomforge.linear import projective_space
from geomforge.polar import standard_form, standard_space


def _perms(name):
    g = preset_group(name)
    return g, g.point_perms()


def test_semilinear_composition_and_inverse():
    f = field_of_order(4)
    rng = np.random.default_rng(1)
    vecs = rng.integers(0, 4, size=(20, 3))
    a = SemilinearMap(f, [[1, 2, 0], [0, 1, 3], [2, 0, 1]], 1)
    b = SemilinearMap(f, [[0, 1, 0], [1, 0, 0], [0, 0, 2]], 0)
    assert (a.then(b).apply(vecs) == b.apply(a.apply(vecs))).all()
    assert (a.then(a.inverse()).apply(vecs) == vecs).all()
    assert (a.inverse().then(a).apply(vecs) == vecs).all()


def test_singular_matrix_rejected():
    with pytest.raises(GroupError):
        SemilinearMap(field_of_order(2), [[1, 1], [1, 1]])


def test_scalar_group_has_singleton_orbits():
    f = field_of_order(4)
    g = GroupPresentation(f, 3, [SemilinearMap(f, np.eye(3, dtype=np.int64) * 2)])
    orbs = orbit_partition(PointAction(21), g.point_perms())
    assert [len(o) for o in orbs] == [1] * 21


def test_action_leaving_domain_reports_witness():
    g = preset_group("SL(3,2)")
    with pytest.raises(ActionError) as exc:
        g.point_perms(np.array([0, 1, 2]))
    assert exc.value.generator is not None and exc.value.state is not None


def test_form_checked_at_construction():
    form = standard_form("Sp", 4, 2)
    f = form.field
    bad = SemilinearMap(f, [[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    with pytest.raises(GroupError):
        GroupPresentation(f, 4, [bad], form)


def test_similitude_accepted():
    form = standard_form("Sp", 4, 3)
    f = form.field
    m = np.diag([2, 1, 2, 1])  # scales the form by 2
    assert preserves_form(form, SemilinearMap(f, m))
    assert not preserves_form(form, SemilinearMap(f, m), similitude=False)


def test_sp62_one_orbit_rank3():
    _, p = _perms("Sp(6,2)")
    assert len(orbit(PointAction(63), p, 0)) == 63
    r = rank(p)
    assert (r.rank, r.subdegrees) == (3, [1, 30, 32])


def test_sl42_rank2():
    _, p = _perms("SL(4,2)")
    assert len(orbit(PointAction(15), p, 0)) == 15
    assert rank(p).rank == 2


def test_rank_rejects_intransitive():
    _, p = _perms("reducible_PG3_2")
    assert not rank(p).transitive


def test_transversal_maps_seed():
    _, p = _perms("Sp(4,3)")
    orb, trans, pos = orbit_transversal(PointAction(p.shape[1]), p, 0)
    assert (trans[:, 0] == orb).all()
    assert (pos[orb] == np.arange(len(orb))).all()


@pytest.mark.parametrize("name, order", [("SL(3,2)", 168), ("Sp(4,2)", 720), ("SL2_4", 60),
                                         ("SL2_4_semilinear", 120)])
def test_orbit_stabilizer_on_known_orders(name, order):
    _, p = _perms(name)
    assert len(closure(p)) == order
    stab = schreier_generators(PointAction(p.shape[1]), p, 0)
    assert (stab[:, 0] == 0).all()
    assert len(orbit(PointAction(p.shape[1]), p, 0)) * len(closure(stab)) == order


def test_sp62_stabilizer_orbits():
    _, p = _perms("Sp(6,2)")
    stab = schreier_generators(PointAction(63), p, 0)
    sizes = sorted(len(o) for o in orbit_partition(PointAction(63), stab))
    assert sizes == [1, 30, 32]
    assert sum(sizes) == 63


def test_sp62_enumeration_matches_order():
    g = preset_group("Sp(6,2)")
    assert len(MatrixEnumeration(g.field, 6, g.gens)) == 1451520


def test_enumeration_limit():
    g = preset_group("SL(4,2)")
    with pytest.raises(GroupError):
        MatrixEnumeration(g.field, 4, g.gens, limit=1000)


def test_antiflags_semilinear_example():
    g, p = _perms("SL2_4")
    assert antiflag_transitive(p, g.space).orbit_size == 60
    g, p = _perms("SL2_4_semilinear")
    res = antiflag_transitive(p, g.space)
    assert res.transitive and res.total == 120 == len(closure(p))


def test_sp62_transitive_on_nonperpendicular_pairs():
    ps = standard_space("Sp", 6, 2)
    g = preset_group("Sp(6,2)")
    assert antiflag_transitive_polar(g.point_perms(ps.omega), ps).transitive


LEMMA_GROUPS = ["SL(3,2)", "SL(4,2)", "Sp(4,2)", "Sp(6,2)", "SL(3,3)", "SL2_4", "SL2_4_semilinear",
                "reducible_PG3_2", "SL3_4_in_GL6_2"]


@pytest.mark.parametrize("name", LEMMA_GROUPS)
def test_line_criterion_matches_antiflag(name):
    g, p = _perms(name)
    assert line_criterion_4_1(p, g.space).holds == antiflag_transitive(p, g.space).transitive


def test_line_criterion_examples():
    g, p = _perms("SL(4,2)")
    lc = line_criterion_4_1(p, g.space)
    assert lc.holds and lc.line_orbits == 1
    g, p = _perms("reducible_PG3_2")
    assert not line_criterion_4_1(p, g.space).holds


def test_projective_lines_count():
    assert len(projective_lines(projective_space(field_of_order(2), 4))) == 35
    assert len(projective_lines(projective_space(field_of_order(3), 3))) == 13


def test_blocks():
    g, p = _perms("SL3_4_in_GL6_2")
    blk = imprimitivity_blocks(p)
    assert len(blk) == 3 and block_is_subspace(g.space, np.arange(63), blk)
    assert imprimitivity_blocks(_perms("Sp(6,2)")[1]) is None
    assert imprimitivity_blocks(_perms("SL(4,2)")[1]) is None


def test_invariant_chain_sp62():
    ps = standard_space("Sp", 6, 2)
    g = preset_group("Sp(6,2)")
    ch = invariant_chain(g.point_perms(ps.omega), ps.space, ps.omega, polar=ps)
    assert ch.dims == [1, 5, 6] and ch.is_chain and ch.perp_ok and ch.hyperplane_ok


def test_invariant_chain_two_transitive():
    g, p = _perms("SL(4,2)")
    ch = invariant_chain(p, g.space, np.arange(15))
    assert ch.dims == [1, 4] and ch.is_chain


def test_dickson():
    form = standard_form("O+", 4, 2)
    f = form.field
    assert dickson_in_omega(np.eye(4, dtype=np.int64), form)
    # swapping the two vectors of a hyperbolic pair is an orthogonal transvection
    t = np.array([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    t2 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert not dickson_in_omega(t, form)
    assert dickson_in_omega(t @ t2 % 2, form)
    with pytest.raises(GroupError):
        dickson_in_omega(np.eye(4, dtype=np.int64), standard_form("O+", 4, 3))


@pytest.mark.parametrize("name", ["Omega+(8,2)", "Omega-(6,2)", "Omega+(6,2)"])
def test_omega_generators_dickson_zero(name):
    g = preset_group(name)
    assert all(dickson_in_omega(x, g.form) for x in g.gens)


def test_omega_plus_orbits():
    g = preset_group("Omega+(8,2)")
    ps = standard_space("O+", 8, 2)
    p = g.point_perms()
    sizes = sorted(len(o) for o in orbit_partition(PointAction(255), p))
    assert sizes == [120, 135]
    assert len(orbit(PointAction(135), g.point_perms(ps.omega), 0)) == 135


def test_su_preset_preserves_form():
    g = preset_group("SU(3,2)")
    ps = standard_space("U", 3, 2)
    assert len(orbit(PointAction(ps.num_points), g.point_perms(ps.omega), 0)) == ps.num_points == 9


def test_unknown_preset():
    with pytest.raises(GroupError):
        preset_group("Spin(7,2)")


def test_restriction_to_prime_field_is_faithful():
    f4 = field_of_order(4)
    g = SemilinearMap(f4, [[1, 2], [0, 1]], 1)
    h = restrict_to_prime_field(g)
    assert h.n == 4 and h.field.q == 2
    assert restrict_to_prime_field(g.then(g)).matrix.tolist() == h.then(h).matrix.tolist()


def test_set_action_rejects_non_member():
    act = SetAction(np.array([[0, 1], [2, 3]]))
    assert act.lookup(np.array([[1, 0], [0, 2]])).tolist() == [0, -1]
    with pytest.raises(ActionError):
        act.image(np.array([0, 2, 1, 3]), np.array([0, 1]))


@settings(max_examples=30, deadline=None)
@given(st.permutations(list(range(7))))
def test_invert_roundtrip(p):
    p = np.array(p)
    assert (p[invert(p)] == np.arange(7)).all()


def test_pair_action_encoding():
    pa = PairAction(PointAction(5))
    a, b = pa.decode(pa.encode(np.array([1, 4]), np.array([3, 0])))
    assert a.tolist() == [1, 4] and b.tolist() == [3, 0]
