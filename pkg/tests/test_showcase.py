import numpy as np
import pytest

from geomforge.grouporb import dickson_in_omega
from geomforge.showcase import (A9_ORDER, build_a9, permutation_matrix, verify_a9_antiflag_via_solids,
                                verify_gamma_examples, verify_omega7_example)


def test_a9_module():
    m = build_a9()
    assert m.polar.num_points == 135
    assert len(m.weight8) == 9 and (m.weight8 >= 0).all()
    assert all(dickson_in_omega(g, m.polar.form) for g in m.group.gens)


@pytest.mark.parametrize("perm, even", [([1, 2, 0, 3, 4, 5, 6, 7, 8], True),
                                        ([1, 0, 2, 3, 4, 5, 6, 7, 8], False),
                                        ([1, 0, 3, 2, 4, 5, 6, 7, 8], True)])
def test_dickson_matches_sign(perm, even):
    form = build_a9().polar.form
    assert dickson_in_omega(permutation_matrix(perm), form) == even


def test_a9_report():
    rep = verify_a9_antiflag_via_solids()
    assert rep.ok
    assert (rep.disjoint_pairs, rep.orbit_size, rep.pair_stabilizer_order) == (8640, 8640, 21)
    assert rep.orbit_size * rep.pair_stabilizer_order == A9_ORDER
    assert rep.transposition_swaps and rep.families_preserved
    assert rep.omega_orbit_size == 8640


def test_omega7_report():
    rep = verify_omega7_example()
    assert rep.ok
    assert rep.nonsingular_orbit == 120
    assert rep.singular_orbits == [63, 72]
    assert (rep.pair_orbit, rep.pair_stabilizer_order, rep.stabilizer_order) == (8640, 168, 1451520)
    assert (rep.rank, rep.subdegrees) == (4, [1, 14, 56, 64])
    assert rep.srg == (64, 70, 28, 32)
    assert (rep.j, rep.jt) == (14, 8)
    assert rep.verdict.passing_side == "s"


def test_gamma_examples():
    lin, semi = verify_gamma_examples()
    assert lin.antiflag.orbit_size == 60 and not lin.antiflag.transitive
    assert semi.antiflag.transitive and semi.regular and semi.order == 120
    for r in (lin, semi):
        assert (r.block_size, r.blocks, r.block_is_subspace) == (3, 5, True)
