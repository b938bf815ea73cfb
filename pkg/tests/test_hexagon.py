import numpy as np
import pytest

from geomforge.grouporb import antiflag_transitive, invariant_chain, line_criterion_4_1, rank
from geomforge.hexagon import (ConstructionError, build_split_cayley, cayley_form, hexagon_count,
                               hexagon_in_sp6, hexagon_line_plane_orbit_counts, hexagon_stabilizer_q2,
                               k_generators, ordered_hexagon_orbit, ordered_hexagons,
                               verify_construction_steps, w2_sizes)
from geomforge.incidence import IncidenceGeometry, check_generalized_ngon, levi_girth
from geomforge.polar import FormError


@pytest.fixture(scope="module")
def hex2():
    return build_split_cayley(2)


@pytest.fixture(scope="module")
def stab():
    return hexagon_stabilizer_q2()


@pytest.mark.parametrize("q, n", [(2, 63), (3, 364), (4, 1365)])
def test_counts(q, n):
    m = build_split_cayley(q)
    assert hexagon_count(q) == n
    assert m.num_points == m.num_lines == n
    assert (m.geometry.line_sizes() == q + 1).all()
    assert (m.geometry.point_degrees() == q + 1).all()


def test_form_and_k(hex2):
    form = cayley_form(3)
    assert form.radical().dim == 0
    assert all(form.preserved_by(g.matrix) for g in k_generators(3))
    assert len(hex2.orbit_u) == 7 * 3 * 1


@pytest.mark.parametrize("q", [2, 3])
def test_all_steps_pass(q):
    steps = verify_construction_steps(build_split_cayley(q))
    assert [s.step for s in steps] == ["1", "2", "3", "4", "5", "6", "7"]
    assert all(s.ok for s in steps), [s.detail for s in steps if not s.ok]


def test_w2_and_girth(hex2):
    assert set(w2_sizes(hex2).tolist()) == {31}
    assert levi_girth(hex2.geometry) == 12
    res = check_generalized_ngon(hex2.geometry)
    assert (res.n, res.s, res.t) == (6, 2, 2)


def test_verify_flag_raises_on_broken_model(hex2):
    broken = build_split_cayley(2)
    broken.geometry = IncidenceGeometry(63, hex2.geometry.lines[:-1], 2)
    bad = [s.step for s in verify_construction_steps(broken) if not s.ok]
    assert "3" in bad
    # the verify path raises with the step id
    assert build_split_cayley(2, verify=True).num_points == 63


def test_construction_error_carries_step():
    err = ConstructionError("4", "W(a) = W(b)", (1, 2))
    assert err.step == "4" and err.witness == (1, 2)


@pytest.mark.parametrize("q", [2, 4])
def test_symplectic_model(q):
    h = hexagon_in_sp6(build_split_cayley(q))
    assert h.lines_ti and h.polarity
    assert h.geometry.num_points == hexagon_count(q)


def test_symplectic_model_needs_even_q():
    with pytest.raises(FormError):
        hexagon_in_sp6(build_split_cayley(3))


def test_json_roundtrip(hex2, tmp_path):
    path = tmp_path / "hex.json"
    hex2.geometry.dump(path)
    back = IncidenceGeometry.load(path)
    assert back.lines == hex2.geometry.lines and (back.coords == hex2.geometry.coords).all()


def test_stabilizer_order(stab):
    assert stab.sp_order == 1451520
    assert stab.order == 12096 == (2 ** 6 - 1) * 2 ** 6 * (2 ** 2 - 1)
    assert stab.group.order == 12096


def test_stabilizer_generators_preserve_hexagon(stab):
    lines = {tuple(l) for l in stab.hexagon.geometry.lines}
    for p in stab.gen_perms:
        assert {tuple(sorted(p[list(l)].tolist())) for l in lines} == lines


def test_ordered_hexagons_regular(stab):
    hexes = ordered_hexagons(stab.hexagon.geometry)
    assert len(hexes) == 12096 == 63 * 3 * 2 * 2 * 2 * 2 * 2 * 2
    assert ordered_hexagon_orbit(stab, hexes) == 12096


def test_stabilizer_rank_and_chain(stab):
    r = rank(stab.gen_perms)
    assert (r.rank, r.subdegrees) == (4, [1, 6, 24, 32])
    sp = stab.hexagon.sp
    ch = invariant_chain(stab.gen_perms, sp.space, sp.omega, polar=sp)
    assert ch.dims == [1, 3, 5, 6] and ch.is_chain and ch.perp_ok and ch.hyperplane_ok


def test_stabilizer_antiflag_and_lemma(stab):
    sp = stab.hexagon.sp
    assert antiflag_transitive(stab.gen_perms, sp.space).transitive
    assert line_criterion_4_1(stab.gen_perms, sp.space).holds


def test_line_plane_orbits(stab):
    c = hexagon_line_plane_orbit_counts(stab.hexagon.sp, stab.gen_perms)
    assert c.lines == [63, 252] and c.total_lines == 315
    assert c.planes == [63, 72] and c.total_planes == 135 == 9 * 5 * 3
