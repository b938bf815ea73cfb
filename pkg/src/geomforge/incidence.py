"""Point-line geometries and their graphs.

A geometry is a number of points plus a list of lines, each line a sorted
tuple of point indices.  Optionally the points carry coordinates in a
projective space, which is what the embedding checks need.

Distances use the bipartite incidence (Levi) graph for polygon checks and
the collinearity (point) graph for metric regularity.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .ffield import field_of_order
from .linear import projective_space, rref


class GeometryError(ValueError):
    pass


@dataclass(eq=False)
class IncidenceGeometry:
    num_points: int
    lines: list[tuple[int, ...]]
    q: int | None = None
    coords: np.ndarray | None = None  # (num_points, n) normalized vectors

    def __post_init__(self):
        self.lines = [tuple(sorted(int(p) for p in l)) for l in self.lines]
        for l in self.lines:
            if len(set(l)) != len(l):
                raise GeometryError(f"line {l} repeats a point")
            if l and not 0 <= l[0] <= l[-1] < self.num_points:
                raise GeometryError(f"line {l} has a point index out of range")
        if self.coords is not None:
            self.coords = np.asarray(self.coords, dtype=np.int64)
            if len(self.coords) != self.num_points:
                raise GeometryError("coordinate count differs from point count")
        # two points on at most one line
        pair_lines = self.incidence.T @ self.incidence
        pair_lines.setdiag(0)
        if pair_lines.nnz and pair_lines.max() > 1:
            a, b = (int(v[0]) for v in np.nonzero(pair_lines > 1))
            raise GeometryError(f"points {min(a, b)} and {max(a, b)} share two lines")

    @property
    def num_lines(self) -> int:
        return len(self.lines)

    @cached_property
    def incidence(self) -> sparse.csr_matrix:
        """Sparse [line, point] 0/1 matrix."""
        rows = np.repeat(np.arange(len(self.lines)), [len(l) for l in self.lines])
        cols = np.fromiter((p for l in self.lines for p in l), dtype=np.int64, count=len(rows))
        data = np.ones(len(rows), dtype=np.int64)
        return sparse.csr_matrix((data, (rows, cols)), shape=(len(self.lines), self.num_points))

    def line_sizes(self) -> np.ndarray:
        return np.asarray(self.incidence.sum(axis=1)).ravel()

    def point_degrees(self) -> np.ndarray:
        return np.asarray(self.incidence.sum(axis=0)).ravel()

    def lines_on(self, p: int) -> list[int]:
        return [int(i) for i in self.incidence[:, p].nonzero()[0]]

    @cached_property
    def levi(self) -> sparse.csr_matrix:
        """Adjacency of the incidence graph: points first, then lines."""
        n = self.incidence.T.tocsr()
        return sparse.bmat([[None, n], [n.T, None]], format="csr")

    # -- io --

    def to_json(self) -> dict:
        out = {"q": self.q, "points": None, "lines": [list(l) for l in self.lines]}
        if self.coords is not None:
            out["points"] = self.coords.tolist()
        else:
            out["points"] = self.num_points
        return out

    @classmethod
    def from_json(cls, data: dict) -> IncidenceGeometry:
        pts = data["points"]
        if isinstance(pts, int):
            return cls(pts, data["lines"], data.get("q"))
        coords = np.array(pts, dtype=np.int64) if pts else None
        return cls(len(pts), data["lines"], data.get("q"), coords)

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, sort_keys=True)

    @classmethod
    def load(cls, path) -> IncidenceGeometry:
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def geometry_from_subspaces(space_points: np.ndarray, point_ids: np.ndarray,
                            line_ids: Sequence[Sequence[int]], q: int) -> IncidenceGeometry:
    """Geometry whose points are the given ambient points; lines as ambient-id lists."""
    point_ids = np.asarray(point_ids)
    local = {int(a): i for i, a in enumerate(point_ids)}
    lines = [tuple(local[int(a)] for a in l) for l in line_ids]
    return IncidenceGeometry(len(point_ids), lines, q, space_points[point_ids])


# -- point graph -------------------------------------------------------------------

@dataclass
class PointGraph:
    adjacency: np.ndarray  # dense bool
    distances: np.ndarray  # int, -1 for unreachable
    components: int

    @property
    def diameter(self) -> int:
        return int(self.distances.max())

    @property
    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)


def _distance_matrix(adj) -> tuple[np.ndarray, int]:
    g = sparse.csr_matrix(adj)
    ncomp, _ = csgraph.connected_components(g, directed=False)
    d = csgraph.shortest_path(g, method="D", unweighted=True, directed=False)
    d[np.isinf(d)] = -1
    return d.astype(np.int64), ncomp


def collinearity(g: IncidenceGeometry) -> np.ndarray:
    m = (g.incidence.T @ g.incidence).toarray() > 0
    np.fill_diagonal(m, False)
    return m


def point_graph(g: IncidenceGeometry) -> PointGraph:
    adj = collinearity(g)
    d, ncomp = _distance_matrix(adj)
    return PointGraph(adj, d, ncomp)


# -- metric regularity -------------------------------------------------------------

@dataclass
class RegularityProfile:
    diameter: int
    sizes: list[int]  # |Gamma_i(x)|, i = 0..d
    c: list[int]  # neighbours of y at distance i-1 from x
    a: list[int]  # ... at distance i
    b: list[int]  # ... at distance i+1

    def to_json(self):
        return {"diameter": self.diameter, "sizes": self.sizes, "c": self.c, "a": self.a, "b": self.b}


@dataclass
class RegularityViolation:
    x: int
    y: int
    quantity: str
    detail: str

    def __str__(self):
        return f"pair ({self.x}, {self.y}): {self.quantity} {self.detail}"


def check_metrically_regular(adj) -> RegularityProfile | RegularityViolation:
    """Intersection numbers of a connected graph, or the first pair where they vary."""
    adj = np.asarray(adj, dtype=bool)
    d, ncomp = _distance_matrix(adj)
    if ncomp != 1:
        bad = int(np.nonzero(d[0] < 0)[0][0])
        return RegularityViolation(0, bad, "connectivity", "points lie in different components")
    diam = int(d.max())
    a_f = adj.astype(np.float32)
    layers = [(d == j).astype(np.float32) for j in range(diam + 1)]
    # counts[j][x, y] = |{z : d(x, z) = j, z ~ y}|
    counts = [np.rint(layer @ a_f).astype(np.int64) for layer in layers]
    prof = RegularityProfile(diam, [], [], [], [])
    for i in range(diam + 1):
        row_sizes = (d == i).sum(axis=1)
        if (row_sizes != row_sizes[0]).any():
            x = int(np.nonzero(row_sizes != row_sizes[0])[0][0])
            return RegularityViolation(0, x, f"|Gamma_{i}|", f"{row_sizes[0]} vs {row_sizes[x]}")
        prof.sizes.append(int(row_sizes[0]))
        mask = d == i
        for name, j, store in (("c", i - 1, prof.c), ("a", i, prof.a), ("b", i + 1, prof.b)):
            if 0 <= j <= diam:
                vals = counts[j][mask]
            else:
                vals = np.zeros(int(mask.sum()), dtype=np.int64)
            if (vals != vals[0]).any():
                xs, ys = np.nonzero(mask)
                k = int(np.nonzero(vals != vals[0])[0][0])
                return RegularityViolation(int(xs[k]), int(ys[k]), f"{name}_{i}",
                                           f"{vals[k]} differs from {vals[0]}")
            store.append(int(vals[0]))
    return prof


# -- generalized polygons ----------------------------------------------------------

FEIT_HIGMAN = {3, 4, 6, 8}


def ngon_point_count(n: int, s: int, t: int) -> int | None:
    if n == 3:
        return s * s + s + 1
    if n == 4:
        return (1 + s) * (1 + s * t)
    if n == 6:
        return (1 + s) * (1 + s * t + s * s * t * t)
    if n == 8:
        return (1 + s) * (1 + s * t) * (1 + s * s * t * t)
    return None


@dataclass
class NgonResult:
    n: int | None
    s: int | None
    t: int | None
    ok: bool
    failures: list[str] = field(default_factory=list)

    def to_json(self):
        return {"n": self.n, "s": self.s, "t": self.t, "ok": self.ok, "failures": self.failures}


def _element(g: IncidenceGeometry, v: int) -> str:
    return f"point {v}" if v < g.num_points else f"line {v - g.num_points}"


def levi_path_counts(g: IncidenceGeometry):
    """Distance matrix and shortest-path counts on the incidence graph."""
    a = g.levi.astype(np.float64)
    d, ncomp = _distance_matrix(g.levi)
    counts = np.eye(a.shape[0])
    total = counts.copy()
    for k in range(1, int(d.max()) + 1):
        counts = (a @ counts) * (d == k)
        total += counts
    return d, ncomp, total


def check_generalized_ngon(g: IncidenceGeometry, allow_thin: bool = False) -> NgonResult:
    """Check the generalized polygon axioms on the incidence graph.

    Unique shortest paths between elements at distance below n, maximum
    distance n, then parameters and the Feit-Higman gate for thick cases.
    """
    fails = []
    d, ncomp, paths = levi_path_counts(g)
    if ncomp != 1:
        return NgonResult(None, None, None, False, ["incidence graph is disconnected"])
    n = int(d.max())
    bad = (d < n) & (paths != 1)
    if bad.any():
        u, v = (int(x[0]) for x in np.nonzero(bad))
        fails.append(f"{int(paths[u, v])} shortest paths between {_element(g, u)} and "
                     f"{_element(g, v)} at distance {int(d[u, v])} < {n}")
    sizes, degs = g.line_sizes(), g.point_degrees()
    s = int(sizes[0]) - 1 if (sizes == sizes[0]).all() else None
    t = int(degs[0]) - 1 if (degs == degs[0]).all() else None
    thick = s is not None and t is not None and s >= 2 and t >= 2
    if not thick and not allow_thin:
        fails.append(f"not thick: line sizes {sorted(set(sizes.tolist()))}, "
                     f"point degrees {sorted(set(degs.tolist()))}")
    if thick:
        if n not in FEIT_HIGMAN:
            fails.append(f"n = {n} excluded by Feit-Higman")
        elif n == 8 and s == t:
            fails.append("n = 8 with s = t excluded by Feit-Higman")
        else:
            want = ngon_point_count(n, s, t)
            if want != g.num_points:
                fails.append(f"{g.num_points} points, closed form gives {want}")
    return NgonResult(n, s, t, not fails, fails)


def levi_girth(g: IncidenceGeometry) -> int:
    """Girth of the incidence graph by breadth-first search from every vertex."""
    adj = g.levi
    nbrs = [adj.indices[adj.indptr[v]:adj.indptr[v + 1]].tolist() for v in range(adj.shape[0])]
    best = 10 ** 9
    for src in range(len(nbrs)):
        dist = {src: 0}
        parent = {src: -1}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in nbrs[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


def levi_diameter(g: IncidenceGeometry) -> int:
    d, _ = _distance_matrix(g.levi)
    return int(d.max())


# -- embedding axioms ----------------------------------------------------------------

@dataclass
class EmbeddingReport:
    ok: bool
    failures: list[str]
    n: int | None = None
    diameter: int | None = None
    m: int | None = None
    h: int | None = None
    e: dict = field(default_factory=dict)
    f: dict = field(default_factory=dict)
    case: str | None = None
    polarity: bool | None = None  # x <-> W_1(x) (case i) or W_2(x) (case ii)

    def to_json(self):
        return {"ok": self.ok, "failures": self.failures, "n": self.n, "diameter": self.diameter,
                "m": self.m, "h": self.h, "e": {str(k): v for k, v in self.e.items()},
                "f": {str(k): v for k, v in self.f.items()}, "case": self.case,
                "polarity": self.polarity}


def _gauss_dim(count: int, q: int) -> int | None:
    k, size = 0, 0
    while size < count:
        k += 1
        size = (q ** k - 1) // (q - 1)
    return k if size == count else None


def check_embedding_axioms(g: IncidenceGeometry) -> EmbeddingReport:
    """Check embedding axioms (a)-(g) and classify the resulting case."""
    from .constraints import classify_31_case

    if g.coords is None or g.q is None:
        raise GeometryError("embedding checks need coordinates and q")
    q = g.q
    field_ = field_of_order(q)
    n = g.coords.shape[1]
    space = projective_space(field_, n)
    amb = space.ids(g.coords)
    omega_mask = np.zeros(space.num_points, dtype=bool)
    omega_mask[amb] = True
    rep = EmbeddingReport(True, [], n=n)

    def fail(axiom, msg):
        rep.ok = False
        rep.failures.append(f"({axiom}) {msg}")

    # (a)
    if rref(field_, g.coords.tolist(), n).dim != n:
        fail("a", "points do not span the ambient space")
    # (b)
    for li, line in enumerate(g.lines):
        sub = rref(field_, g.coords[list(line)].tolist(), n)
        if sub.dim != 2 or len(line) != q + 1:
            fail("b", f"line {li} is not a full projective line")
            break
    # (c)
    if (g.point_degrees() == 0).any():
        fail("c", f"point {int(np.nonzero(g.point_degrees() == 0)[0][0])} is on no line")
    # (d)
    pg = point_graph(g)
    prof = check_metrically_regular(pg.adjacency)
    if isinstance(prof, RegularityViolation):
        fail("d", str(prof))
        return rep
    d = prof.diameter
    rep.diameter = d
    if d < 2:
        fail("d", f"diameter {d} < 2")
        return rep
    dist = pg.distances
    # (e), (f), (g): W_i(x) = points within distance i
    dims = {}
    for x in range(g.num_points):
        for i in range(1, d + 1):
            members = np.nonzero(dist[x] <= i)[0]
            sub = rref(field_, g.coords[members].tolist(), n)
            in_span = omega_mask[space.subspace_ids(sub)]
            if in_span.sum() != len(members):
                fail("f", f"W_{i}({x}) is not cut out by a subspace")
                return rep
            if i == 1 and len(space.subspace_ids(sub)) != len(members):
                fail("e", f"W_1({x}) is not a subspace")
                return rep
            dims.setdefault(i, set()).add(len(members))
    w1 = dims[1]
    rep.m = _gauss_dim(next(iter(w1)), q) if len(w1) == 1 else None
    w2 = dims.get(2, set())
    h = _gauss_dim(next(iter(w2)), q) if len(w2) == 1 else None
    if h is None:
        fail("g", f"|W_2(x)| values {sorted(w2)} are not a single (q^h-1)/(q-1)")
        return rep
    rep.h = h
    # e_i, f_i from pair counts: |W_1(x) meet W_j(y)| for d(x, y) = i
    near = [(dist <= j).astype(np.float32) for j in range(d + 1)]
    meets = [np.rint(near[1] @ near[j].T).astype(np.int64) for j in range(d + 1)]
    for i in range(1, d + 1):
        mask = dist == i
        for name, j, store in (("e", i - 1, rep.e), ("f", i, rep.f)):
            vals = np.unique(meets[j][mask])
            dimv = _gauss_dim(int(vals[0]), q) if len(vals) == 1 else None
            if dimv is None:
                fail("d", f"{name}_{i} is not well defined")
                return rep
            store[i] = dimv
    verdict = classify_31_case(q, rep.m, rep.h, rep.f[1], rep.e[2])
    rep.case = verdict.case
    # polarity: W_k(x) is a hyperplane through x for k = d - 1
    k = d - 1
    hyper = True
    for x in range(g.num_points):
        sub = rref(field_, g.coords[dist[x] <= k].tolist(), n)
        hyper &= sub.dim == n - 1
    rep.polarity = bool(hyper and (dist == dist.T).all())
    return rep


# -- standard fixtures ----------------------------------------------------------------

def projective_geometry(n: int, q: int) -> IncidenceGeometry:
    """Points and lines of PG(n-1, q)."""
    f = field_of_order(q)
    space = projective_space(f, n)
    pts = space.points
    seen = set()
    lines = []
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            if (a, b) in seen:
                continue
            ids = tuple(sorted(space.subspace_ids(rref(f, [pts[a].tolist(), pts[b].tolist()], n)).tolist()))
            for i in range(len(ids)):
                for j in range(i + 1, len(ids)):
                    seen.add((ids[i], ids[j]))
            lines.append(ids)
    return IncidenceGeometry(len(pts), lines, q, pts)


def polar_geometry(ps) -> IncidenceGeometry:
    """Singular points and totally singular lines of a polar space."""
    lines = [tuple(ps.indices(l).tolist()) for l in ps.ts_subspaces(2)]
    return IncidenceGeometry(ps.num_points, lines, ps.field.q, ps.vectors)
