import json

import numpy as np
import pytest

from geomforge.incidence import (GeometryError, IncidenceGeometry, check_embedding_axioms,
                                 check_generalized_ngon, check_metrically_regular, levi_diameter,
                                 levi_girth, point_graph, polar_geometry, projective_geometry)
from geomforge.polar import standard_space


def test_single_line_is_triangle():
    g = IncidenceGeometry(3, [(0, 1, 2)])
    pg = point_graph(g)
    assert pg.adjacency.sum() == 6 and pg.diameter == 1


def test_two_lines_sharing_two_points_rejected():
    with pytest.raises(GeometryError):
        IncidenceGeometry(4, [(0, 1, 2), (0, 1, 3)])


def test_sp42_point_graph():
    pg = point_graph(polar_geometry(standard_space("Sp", 4, 2)))
    assert pg.diameter == 2 and set(pg.degrees.tolist()) == {6}


def test_complete_graph_regular():
    adj = ~np.eye(5, dtype=bool)
    prof = check_metrically_regular(adj)
    assert prof.diameter == 1 and prof.sizes == [1, 4]


def test_path_graph_not_regular():
    adj = np.zeros((4, 4), dtype=bool)
    for i in range(3):
        adj[i, i + 1] = adj[i + 1, i] = True
    res = check_metrically_regular(adj)
    assert not hasattr(res, "diameter")
    assert (res.x, res.y, res.quantity) == (1, 1, "b_0")


def test_disconnected_graph_reported():
    adj = np.zeros((4, 4), dtype=bool)
    adj[0, 1] = adj[1, 0] = adj[2, 3] = adj[3, 2] = True
    assert check_metrically_regular(adj).quantity == "connectivity"


def test_fano_plane():
    g = projective_geometry(3, 2)
    res = check_generalized_ngon(g)
    assert (res.ok, res.n, res.s, res.t) == (True, 3, 2, 2)
    assert levi_girth(g) == 6 and levi_diameter(g) == 3


@pytest.mark.parametrize("kind,n,q,s,t", [("Sp", 4, 2, 2, 2), ("Sp", 4, 3, 3, 3), ("O-", 6, 2, 2, 4),
                                          ("O", 5, 3, 3, 3), ("U", 4, 2, 4, 2)])
def test_quadrangles(kind, n, q, s, t):
    g = polar_geometry(standard_space(kind, n, q))
    res = check_generalized_ngon(g)
    assert (res.ok, res.n, res.s, res.t) == (True, 4, s, t)
    assert levi_girth(g) == 8 and levi_diameter(g) == 4


def test_grid_is_thin():
    # O+(4,2): the 3x3 grid, a quadrangle with t = 1
    g = polar_geometry(standard_space("O+", 4, 2))
    assert not check_generalized_ngon(g).ok
    res = check_generalized_ngon(g, allow_thin=True)
    assert res.ok and (res.n, res.s, res.t) == (4, 2, 1)


def test_pg32_is_not_a_polygon():
    res = check_generalized_ngon(projective_geometry(4, 2))
    assert not res.ok and "shortest paths" in res.failures[0]


def test_polar_sp62_not_a_polygon():
    # rank 3 polar space: two points at distance 2 have many common neighbours
    g = polar_geometry(standard_space("Sp", 6, 2))
    assert not check_generalized_ngon(g).ok


def test_sp62_regularity():
    prof = check_metrically_regular(point_graph(polar_geometry(standard_space("Sp", 6, 2))).adjacency)
    assert prof.sizes == [1, 30, 32]
    assert prof.c[1:] == [1, 15] and prof.a[1] == 13


def test_embedding_symplectic_case():
    rep = check_embedding_axioms(polar_geometry(standard_space("Sp", 6, 2)))
    assert rep.ok, rep.failures
    assert (rep.case, rep.diameter, rep.m, rep.h, rep.polarity) == ("i", 2, 5, 6, True)


def test_embedding_rejects_short_line():
    g = polar_geometry(standard_space("Sp", 4, 2))
    lines = [l[:2] if i == 0 else l for i, l in enumerate(g.lines)]
    bad = IncidenceGeometry(g.num_points, lines, 2, g.coords)
    rep = check_embedding_axioms(bad)
    assert not rep.ok and rep.failures[0].startswith("(b)")


def test_embedding_needs_coordinates():
    with pytest.raises(GeometryError):
        check_embedding_axioms(IncidenceGeometry(3, [(0, 1, 2)]))


def test_json_roundtrip(tmp_path):
    g = polar_geometry(standard_space("Sp", 4, 2))
    path = tmp_path / "g.json"
    g.dump(path)
    data = json.loads(path.read_text())
    assert set(data) == {"q", "points", "lines"}
    h = IncidenceGeometry.load(path)
    assert h.lines == g.lines and (h.coords == g.coords).all() and h.q == 2
