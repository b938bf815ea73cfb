"""The split Cayley hexagon inside the parabolic quadric O(7, q).

Basis e1, e2, e3, f1, f2, f3, d with phi(x) = sum a_i b_i - c^2, so
E = <e_i> and F = <f_i> are totally singular planes in duality and
H = <E, F> has perp <d>.  Hexagon points are all singular points.  Lines
are the E|F-lines <e, f> with e in E and f in e^perp meet F, together with
the lines through y inside W(y) = W(u)^g for y = u^g in the K-orbit of
u = <e1 + f2>, where K is SL(3, q) acting block-wise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .ffield import field_of_order, prime_power
from .grouporb import (GroupPresentation, MatrixEnumeration, PointAction, SemilinearMap, SetAction,
                       closure, invariant_chain, orbit, orbit_partition, preset_group, rank,
                       unique_rows, _row_keys)
from .incidence import (IncidenceGeometry, NgonResult, check_generalized_ngon, geometry_from_subspaces,
                        levi_girth, point_graph)
from .linear import Subspace, encode, mat_inverse, span
from .polar import Form, FormError, PolarSpace, RadicalQuotient, radical_quotient


class ConstructionError(RuntimeError):
    def __init__(self, step: str, detail: str, witness=None):
        super().__init__(f"step {step}: {detail}")
        self.step = step
        self.witness = witness


def hexagon_count(q: int) -> int:
    return (q ** 6 - 1) // (q - 1)


def cayley_form(q: int) -> Form:
    f = field_of_order(q)
    quad = np.zeros((7, 7), dtype=np.int64)
    for i in range(3):
        quad[i, 3 + i] = 1
    quad[6, 6] = int(f.neg_table[1])
    return Form.quadratic(f, quad)


def k_generators(q: int) -> list[SemilinearMap]:
    """SL(3, q) elementary generators as A on E, A^-T on F, 1 on d."""
    f = field_of_order(q)
    form = cayley_form(q)
    gens = []
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            for t in f.prime_basis():
                a = np.eye(3, dtype=np.int64)
                a[i, j] = t
                m = np.eye(7, dtype=np.int64)
                m[:3, :3] = a
                m[3:6, 3:6] = mat_inverse(f, a).T
                if not form.preserved_by(m):
                    raise ConstructionError("K", f"generator E_{i}{j}({t}) does not preserve phi")
                gens.append(SemilinearMap(f, m))
    return gens


def _subspace_key(s: Subspace) -> tuple:
    return tuple(map(tuple, s.basis))


@dataclass(eq=False)
class HexagonModel:
    q: int
    polar: PolarSpace
    E: Subspace
    F: Subspace
    K: list[SemilinearMap]
    u: np.ndarray
    Wu: Subspace
    orbit_u: np.ndarray  # ambient ids of the K-orbit of u
    transversal: list[SemilinearMap]
    lines: list[tuple[int, ...]]  # ambient point ids
    geometry: IncidenceGeometry  # points are polar indices of the quadric

    @property
    def num_points(self) -> int:
        return self.geometry.num_points

    @property
    def num_lines(self) -> int:
        return self.geometry.num_lines

    def w_plane(self, x: int) -> Subspace:
        """Span of polar point x and its hexagon neighbours."""
        ps = self.polar
        nbrs = np.nonzero(self.adjacency[x])[0]
        return span(ps.field, 7, ps.vectors[np.concatenate([[x], nbrs])].tolist())

    @property
    def adjacency(self) -> np.ndarray:
        return self.pointgraph.adjacency

    @property
    def pointgraph(self):
        if not hasattr(self, "_pg"):
            self._pg = point_graph(self.geometry)
        return self._pg


def build_split_cayley(q: int, verify: bool = False) -> HexagonModel:
    p, e = prime_power(q)
    f = field_of_order(q)
    form = cayley_form(q)
    ps = PolarSpace(form, "O", q)
    sp = ps.space
    eye = np.eye(7, dtype=np.int64)
    E = span(f, 7, eye[:3].tolist())
    F = span(f, 7, eye[3:6].tolist())
    for name, s in (("E", E), ("F", F)):
        if not ps.is_singular(s):
            raise ConstructionError("setup", f"{name} is not totally singular")
    H = E + F
    if H.dim != 6 or not PolarSpace(form).perp(H).dim == 1:
        raise ConstructionError("setup", "H is not a nondegenerate 6-space")
    K = k_generators(q)
    u = eye[0] + eye[4]
    Wu = span(f, 7, [eye[0].tolist(), eye[4].tolist(), (eye[2] + eye[5] + eye[6]).tolist()])
    if not ps.is_singular(Wu) or Wu.dim != 3:
        raise ConstructionError("setup", "W(u) is not a totally singular plane")

    # orbit of u under K with a transversal of semilinear maps
    uid = int(sp.ids(u[None, :])[0])
    ident = SemilinearMap(f, eye, check=False)
    where = {uid: 0}
    orb, trans = [uid], [ident]
    i = 0
    while i < len(orb):
        for g in K:
            t = trans[i].then(g)
            img = int(sp.ids(t.apply(u))[0])
            if img not in where:
                where[img] = len(orb)
                orb.append(img)
                trans.append(t)
        i += 1
    expected = (q * q + q + 1) * (q + 1) * (q - 1)
    if len(orb) != expected:
        raise ConstructionError("K", f"orbit of u has {len(orb)} points, expected {expected}")

    lines = set()
    # E|F-lines
    fset = sp.subspace_ids(F)
    for e_vec in E.point_vectors():
        fe = ps.perp(span(f, 7, [e_vec.tolist()])) & F
        for f_vec in fe.point_vectors():
            lines.add(tuple(sorted(sp.subspace_ids(span(f, 7, [e_vec.tolist(), f_vec.tolist()])).tolist())))
    # lines of W(y) through y
    for y, t in zip(orb, trans):
        w = Wu.image(t.matrix, t.k)
        yv = sp.points[y]
        for z in sp.subspace_ids(w):
            if z == y:
                continue
            lines.add(tuple(sorted(sp.subspace_ids(span(f, 7, [yv.tolist(), sp.points[z].tolist()])).tolist())))
    del fset
    lines = sorted(lines)
    geom = geometry_from_subspaces(sp.points, ps.omega, lines, q)
    model = HexagonModel(q, ps, E, F, K, u, Wu, np.array(orb), trans, lines, geom)
    if verify:
        for v in verify_construction_steps(model):
            if not v.ok:
                raise ConstructionError(v.step, v.detail, v.witness)
    return model


@dataclass
class StepVerdict:
    step: str
    ok: bool
    detail: str
    witness: object = None

    def to_json(self):
        return {"step": self.step, "ok": self.ok, "detail": self.detail,
                "witness": None if self.witness is None else str(self.witness)}


def _orbit_size(K, seed_key, act):
    seen = {seed_key}
    frontier = [seed_key]
    while frontier:
        nxt = []
        for s in frontier:
            for g in K:
                img = act(s, g)
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    return len(seen)


def verify_construction_steps(m: HexagonModel) -> list[StepVerdict]:
    q, ps, sp = m.q, m.polar, m.polar.space
    out = []
    uid = int(sp.ids(m.u[None, :])[0])

    def act_point(s, g):
        return int(sp.ids(g.apply(sp.points[s]))[0])

    def act_plane(s, g):
        return _subspace_key(Subspace(ps.field, 7, s).image(g.matrix, g.k))

    wkey = _subspace_key(m.Wu)
    n_u = _orbit_size(m.K, uid, act_point)
    n_pair = _orbit_size(m.K, (uid, wkey), lambda s, g: (act_point(s[0], g), act_plane(s[1], g)))
    n_w = _orbit_size(m.K, wkey, act_plane)
    # (1) K_u fixes W(u): the flag orbit is no larger than the point orbit
    out.append(StepVerdict("1", n_pair == n_u, f"|u^K| = {n_u}, |(u, W(u))^K| = {n_pair}"))
    # (2) K_W(u) fixes u
    out.append(StepVerdict("2", n_w == n_pair, f"|W(u)^K| = {n_w}, |(u, W(u))^K| = {n_pair}"))

    g = m.geometry
    want = hexagon_count(q)
    sizes, degs = g.line_sizes(), g.point_degrees()
    ok3 = g.num_points == want and g.num_lines == want and (sizes == q + 1).all() and (degs == q + 1).all()
    out.append(StepVerdict("3", bool(ok3), f"{g.num_points} points, {g.num_lines} lines, "
                           f"line sizes {sorted(set(sizes.tolist()))}, degrees {sorted(set(degs.tolist()))}"))

    # (4) x -> W(x) is an injective map to t.s. planes, agreeing with the transport on u^K
    planes = {}
    bad = None
    for x in range(g.num_points):
        w = m.w_plane(x)
        if w.dim != 3 or not ps.is_singular(w):
            bad = bad or (x, "W(x) is not a t.s. plane")
        key = _subspace_key(w)
        if key in planes:
            bad = bad or ((planes[key], x), "W(a) = W(b)")
        planes[key] = x
    local = ps.index_of(sp.points[m.orbit_u])
    for y, t in zip(local, m.transversal):
        if _subspace_key(m.Wu.image(t.matrix, t.k)) != _subspace_key(m.w_plane(int(y))):
            bad = bad or (int(y), "transported W differs from the neighbour span")
    out.append(StepVerdict("4", bad is None, "W injective on all points" if bad is None else bad[1],
                           None if bad is None else bad[0]))

    # (5) perpendicular iff distance at most 2
    dist = m.pointgraph.distances
    perp = ps.form.bilinear(ps.vectors, ps.vectors) == 0
    mismatch = perp != ((dist >= 0) & (dist <= 2))
    wit = None
    if mismatch.any():
        wit = tuple(int(v[0]) for v in np.nonzero(mismatch))
    out.append(StepVerdict("5", wit is None, "perpendicularity matches distance <= 2", wit))

    # (6) no k-gons for k <= 5
    girth = levi_girth(g)
    out.append(StepVerdict("6", girth >= 12, f"Levi girth {girth}"))

    # (7) generalized hexagon
    res = check_generalized_ngon(g)
    ok7 = res.ok and res.n == 6 and res.s == q and res.t == q
    out.append(StepVerdict("7", bool(ok7), f"n={res.n}, s={res.s}, t={res.t}",
                           None if ok7 else "; ".join(res.failures)))
    return out


def w2_sizes(m: HexagonModel) -> np.ndarray:
    """|W_2(x)|: points at distance at most 2, for every x."""
    d = m.pointgraph.distances
    return ((d >= 0) & (d <= 2)).sum(axis=1)


# -- symplectic model for even q ------------------------------------------------------------

@dataclass(eq=False)
class SymplecticHexagon:
    q: int
    quotient: RadicalQuotient
    geometry: IncidenceGeometry  # points are polar indices of the standard Sp(6, q) space
    lines_ti: bool
    polarity: bool

    @property
    def sp(self) -> PolarSpace:
        return self.quotient.target


def hexagon_in_sp6(m: HexagonModel) -> SymplecticHexagon:
    if m.q % 2:
        raise FormError("the symplectic model needs even q")
    rq = radical_quotient(m.polar)
    sp = rq.target
    pm = rq.point_map
    if (pm < 0).any() or len(np.unique(pm)) != sp.num_points:
        raise FormError("radical quotient is not a bijection on points")
    # relabel geometry points by symplectic polar index
    lines = [tuple(sorted(int(pm[p]) for p in l)) for l in m.geometry.lines]
    geom = IncidenceGeometry(sp.num_points, lines, m.q, sp.vectors)
    ti = True
    for l in lines:
        s = span(sp.field, 6, sp.vectors[list(l)].tolist())
        ti &= s.dim == 2 and sp.is_singular(s)
    d = point_graph(geom).distances
    near = (d >= 0) & (d <= 2)
    perp = sp.form.bilinear(sp.vectors, sp.vectors) == 0
    return SymplecticHexagon(m.q, rq, geom, bool(ti), bool((near == perp).all()))


# -- stabilizer at q = 2 ----------------------------------------------------------------------

@dataclass(eq=False)
class HexagonStabilizer:
    hexagon: SymplecticHexagon
    order: int
    perms: np.ndarray  # all elements as permutations of the 63 symplectic points
    group: GroupPresentation  # small generating set
    gen_perms: np.ndarray
    sp_order: int


def _filter_stabilizer(enum: MatrixEnumeration, hexg: SymplecticHexagon) -> np.ndarray:
    """Keys of Sp(6, 2) elements mapping hexagon lines to hexagon lines."""
    sp = hexg.sp
    q = sp.field.q
    if q != 2:
        raise ValueError("filtration is implemented for q = 2")
    pts = sp.vectors
    code_to_pt = np.full(q ** 6, -1, dtype=np.int64)
    code_to_pt[encode(q, pts)] = np.arange(len(pts))
    collinear = point_graph(hexg.geometry).adjacency
    keys = enum.keys
    for l in hexg.geometry.lines:
        if not len(keys):
            break
        imgs = enum.unpack(keys)
        pair = []
        for p in l[:2]:
            code = np.zeros(len(keys), dtype=np.int64)
            for i in np.nonzero(pts[p])[0]:
                code ^= imgs[:, i]
            pair.append(code_to_pt[code])
        keys = keys[collinear[pair[0], pair[1]]]
    return keys


def _perms_from_keys(enum: MatrixEnumeration, keys: np.ndarray, sp: PolarSpace) -> np.ndarray:
    mats = enum.matrices(keys)  # rows are basis images
    f = sp.field
    out = np.empty((len(keys), sp.num_points), dtype=np.int32)
    for i, mm in enumerate(mats):
        out[i] = sp.index_of(SemilinearMap(f, mm, check=False).apply(sp.vectors))
    return out


@lru_cache(maxsize=1)
def hexagon_stabilizer_q2() -> HexagonStabilizer:
    model = build_split_cayley(2)
    hexg = hexagon_in_sp6(model)
    sp = hexg.sp
    spgroup = preset_group("Sp(6,2)")
    enum = MatrixEnumeration(sp.field, 6, spgroup.gens)
    keys = _filter_stabilizer(enum, hexg)
    perms = _perms_from_keys(enum, keys, sp)
    # greedy generating set over a seeded ordering
    rng = np.random.default_rng(0)
    order = rng.permutation(len(keys))
    ident = np.arange(sp.num_points, dtype=np.int32)
    chosen = []
    members = _row_keys(ident[None, :]).copy()
    for i in order:
        if np.isin(_row_keys(perms[i:i + 1]), members)[0]:
            continue
        chosen.append(int(i))
        elems = closure(perms[chosen], limit=len(keys))
        members = _row_keys(elems).copy()
        if len(elems) == len(keys):
            break
    mats = enum.matrices(keys[chosen])
    group = GroupPresentation(sp.field, 6, [SemilinearMap(sp.field, mm) for mm in mats], sp.form,
                              "hexagon_stabilizer_q2", order=len(keys))
    return HexagonStabilizer(hexg, len(keys), perms, group, perms[chosen], len(enum))


def ordered_hexagons(geom: IncidenceGeometry) -> np.ndarray:
    """Ordered ordinary hexagons x1..x6 as rows of point indices."""
    d = point_graph(geom).distances
    adj = d == 1
    paths = np.arange(geom.num_points)[:, None]
    for k in range(1, 6):
        last = paths[:, -1]
        rows, nbr = np.nonzero(adj[last])
        cand = np.concatenate([paths[rows], nbr[:, None]], axis=1)
        keep = np.ones(len(cand), dtype=bool)
        # in an ordinary hexagon, vertices j and k are at distance min(k - j, 6 - k + j)
        for j in range(k):
            keep &= d[cand[:, j], cand[:, k]] == min(k - j, 6 - k + j)
        paths = cand[keep]
    return paths


def ordered_hexagon_orbit(stab: HexagonStabilizer, hexes: np.ndarray) -> int:
    """Size of the stabilizer orbit of the first ordered hexagon."""
    n = stab.hexagon.sp.num_points
    codes = np.zeros(len(hexes), dtype=np.int64)
    for i in range(6):
        codes = codes * n + hexes[:, i]
    order = np.argsort(codes)
    sorted_codes = codes[order]

    class _HexAction:
        size = len(hexes)

        def image(self, perm, states):
            imgs = perm[hexes[states]]
            c = np.zeros(len(states), dtype=np.int64)
            for i in range(6):
                c = c * n + imgs[:, i]
            pos = np.searchsorted(sorted_codes, c)
            return order[pos]

    return len(orbit(_HexAction(), stab.gen_perms, 0))


@dataclass
class OrbitCounts:
    lines: list[int]
    planes: list[int]
    total_lines: int
    total_planes: int

    def to_json(self):
        return {"lines": self.lines, "planes": self.planes, "total_lines": self.total_lines,
                "total_planes": self.total_planes}


def hexagon_line_plane_orbit_counts(sp: PolarSpace, gen_perms: np.ndarray) -> OrbitCounts:
    """Orbit sizes of the group on t.i. lines and t.i. planes of the symplectic space."""
    res = []
    totals = []
    for k in (2, 3):
        subs = sp.ts_subspaces(k)
        members = np.array([sp.indices(s) for s in subs])
        act = SetAction(members)
        res.append(sorted(len(o) for o in orbit_partition(act, gen_perms)))
        totals.append(len(subs))
    return OrbitCounts(res[0], res[1], totals[0], totals[1])
