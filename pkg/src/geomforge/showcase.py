"""End-to-end examples: A9 in O+(8,2), the nonsingular-point stabilizer of
O+(8,2) acting on a solid family, and semilinear groups on PG(3,2).

Claims phrased through triality are checked on solid families: points of
one family stand in for points, and disjointness for nonperpendicularity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .constraints import Rank3Params, Rank4Verdict, rank3_from_graph, rank4_feasible, srg_parameters
from .ffield import field_of_order
from .grouporb import (AntiflagResult, GroupPresentation, PairAction, PointAction, SemilinearMap,
                       SetAction, antiflag_transitive, block_is_subspace, closure, dickson_in_omega,
                       imprimitivity_blocks, orbit, orbit_partition, preset_group, rank, schreier_generators)
from .polar import Form, PolarSpace, SolidFamilies, nonsingular_points, solid_families

A9_ORDER = 181440
OMEGA_PLUS_8_2_ORDER = 174182400


# -- A9 --------------------------------------------------------------------------------------

def _even_weight_coords(v9: np.ndarray) -> np.ndarray:
    """Coordinates in the basis b_i = e_i + e_9 (i < 9): the first eight entries."""
    return np.asarray(v9)[..., :8]


def _from_coords(x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    return np.concatenate([x, x.sum(axis=1, keepdims=True) % 2], axis=1)


def permutation_matrix(perm: list[int]) -> np.ndarray:
    """Matrix on the even-weight module of the coordinate permutation i -> perm[i]."""
    rows = []
    for i in range(8):
        img = np.zeros(9, dtype=np.int64)
        img[perm[i]] ^= 1
        img[perm[8]] ^= 1
        rows.append(_even_weight_coords(img))
    return np.array(rows, dtype=np.int64)


@dataclass(eq=False)
class A9Model:
    polar: PolarSpace
    group: GroupPresentation
    perms: np.ndarray  # generators on the 135 singular points
    weight8: np.ndarray  # polar indices of the nine weight-8 points
    families: SolidFamilies


@lru_cache(maxsize=1)
def build_a9() -> A9Model:
    f = field_of_order(2)
    # phi(b_i) = 1 and B(b_i, b_j) = 1 for i != j
    quad = np.triu(np.ones((8, 8), dtype=np.int64))
    form = Form.quadratic(f, quad)
    from .linear import all_vectors
    coords = all_vectors(2, 8)
    wt = _from_coords(coords).sum(axis=1)
    if (form.values(coords) != (wt // 2) % 2).any():
        raise AssertionError("quadratic form differs from half the weight mod 2")  # pragma: no cover
    ps = PolarSpace(form, "O+", 2)
    three_cycle = [1, 2, 0, 3, 4, 5, 6, 7, 8]
    nine_cycle = [1, 2, 3, 4, 5, 6, 7, 8, 0]
    gens = [SemilinearMap(f, permutation_matrix(p)) for p in (three_cycle, nine_cycle)]
    for g in gens:
        if not form.preserved_by(g.matrix):
            raise AssertionError("permutation does not preserve phi")  # pragma: no cover
    group = GroupPresentation(f, 8, gens, form, "A9_O8plus", order=A9_ORDER)
    perms = group.point_perms(ps.omega)
    w8 = 1 - np.eye(9, dtype=np.int64)
    weight8 = ps.index_of(_even_weight_coords(w8))
    return A9Model(ps, group, perms, weight8, solid_families(ps))


def family_action(fams: SolidFamilies, ps: PolarSpace, fam: int) -> tuple[SetAction, np.ndarray]:
    ids = np.array(fams.members(fam))
    members = np.array([ps.indices(fams.solids[i]) for i in ids])
    return SetAction(members), ids


def disjoint_pairs(fams: SolidFamilies, ids: np.ndarray) -> np.ndarray:
    """Ordered pairs (local indices) of disjoint solids within one family."""
    meet = fams.meet_dims[np.ix_(ids, ids)]
    a, b = np.nonzero(meet == 0)
    return np.stack([a, b], axis=1)


@dataclass
class A9Report:
    singular_points: int
    weight8_points: int
    weight8_pairwise_nonperp: bool
    dickson_zero: bool
    families_preserved: bool
    transposition_swaps: bool
    disjoint_pairs: int
    orbit_size: int
    pair_stabilizer_order: int
    omega_orbit_size: int | None = None

    @property
    def ok(self) -> bool:
        return (self.singular_points == 135 and self.weight8_points == 9 and self.weight8_pairwise_nonperp
                and self.dickson_zero and self.families_preserved and self.transposition_swaps
                and self.orbit_size == self.disjoint_pairs == 8640
                and self.orbit_size * self.pair_stabilizer_order == A9_ORDER
                and self.omega_orbit_size in (None, 8640))

    def to_json(self):
        out = dict(self.__dict__)
        out["ok"] = self.ok
        return out


def _family_image(fams: SolidFamilies, ps: PolarSpace, perm: np.ndarray, fam: int) -> set[int]:
    act_all = SetAction(np.array([ps.indices(s) for s in fams.solids]))
    ids = np.array(fams.members(fam))
    return set(fams.family[act_all.lookup(perm[act_all.members[ids]])].tolist())


def verify_a9_antiflag_via_solids(with_omega: bool = True) -> A9Report:
    m = build_a9()
    ps, fams = m.polar, m.families
    vecs = ps.vectors[m.weight8]
    gram = ps.form.bilinear(vecs, vecs)
    nonperp = bool((gram[~np.eye(9, dtype=bool)] != 0).all())
    dickson = all(dickson_in_omega(g, ps.form) for g in m.group.gens)
    preserved = all(_family_image(fams, ps, p, fam) == {fam} for p in m.perms for fam in (0, 1))
    swap = SemilinearMap(ps.field, permutation_matrix([1, 0, 2, 3, 4, 5, 6, 7, 8]))
    swap_perm = GroupPresentation(ps.field, 8, [swap], ps.form).point_perms(ps.omega)[0]
    swaps = (not dickson_in_omega(swap, ps.form)) and _family_image(fams, ps, swap_perm, 0) == {1}
    act, ids = family_action(fams, ps, 0)
    pairs = disjoint_pairs(fams, ids)
    pact = PairAction(act)
    seed = int(pact.encode(pairs[0, 0], pairs[0, 1]))
    orb = orbit(pact, m.perms, seed)
    stab = schreier_generators(pact, m.perms, seed)
    stab_order = len(closure(stab)) if len(stab) else 1
    rep = A9Report(ps.num_points, len(set(m.weight8.tolist())), nonperp, dickson, preserved, bool(swaps),
                   len(pairs), len(orb), stab_order)
    if with_omega:
        omega = preset_group("Omega+(8,2)")
        # transport: both spaces are O+(8,2); compare on the standard model
        std = PolarSpace(omega.form, "O+", 2)
        sf = solid_families(std)
        sact, sids = family_action(sf, std, 0)
        spairs = disjoint_pairs(sf, sids)
        sp_act = PairAction(sact)
        rep.omega_orbit_size = len(orbit(sp_act, omega.point_perms(std.omega),
                                         int(sp_act.encode(spairs[0, 0], spairs[0, 1]))))
    return rep


# -- nonsingular point stabilizer of O+(8,2) ----------------------------------------------------

@dataclass
class Omega7Report:
    nonsingular_orbit: int
    nonsingular_points: int
    stabilizer_generators: int
    singular_orbits: list[int]  # v lies in v^perp in characteristic 2, so 63 + 72
    disjoint_pairs: int
    pair_orbit: int
    pair_stabilizer_order: int
    rank: int | None
    subdegrees: list[int]
    srg: tuple[int, int, int, int]
    j: int
    jt: int
    verdict: Rank4Verdict | None

    @property
    def stabilizer_order(self) -> int:
        return self.pair_orbit * self.pair_stabilizer_order

    @property
    def ok(self) -> bool:
        return (self.nonsingular_orbit == self.nonsingular_points == 120
                and self.singular_orbits == [63, 72]
                and self.pair_orbit == self.disjoint_pairs == 8640
                and self.stabilizer_order * 120 == OMEGA_PLUS_8_2_ORDER
                and self.rank == 4 and self.verdict is not None and self.verdict.ok)

    def to_json(self):
        out = {k: v for k, v in self.__dict__.items() if k != "verdict"}
        out["srg"] = list(self.srg)
        out["stabilizer_order"] = self.stabilizer_order
        out["rank4"] = None if self.verdict is None else self.verdict.to_json()
        out["ok"] = self.ok
        return out


@lru_cache(maxsize=1)
def verify_omega7_example(family: int = 1) -> Omega7Report:
    omega = preset_group("Omega+(8,2)")
    ps = PolarSpace(omega.form, "O+", 2)
    sp = ps.space
    allp = omega.point_perms()  # all 255 points
    ns = nonsingular_points(ps)
    v = int(ns[0])
    pt = PointAction(sp.num_points)
    ns_orbit = orbit(pt, allp, v)
    gv = schreier_generators(pt, allp, v)
    # restrict to the singular points
    to_local = np.full(sp.num_points, -1, dtype=np.int64)
    to_local[ps.omega] = np.arange(ps.num_points)
    gv_sing = to_local[gv[:, ps.omega]].astype(np.int32)
    sing_orbits = sorted(len(o) for o in orbit_partition(PointAction(ps.num_points), gv_sing))
    fams = solid_families(ps)
    act, ids = family_action(fams, ps, family)
    pairs = disjoint_pairs(fams, ids)
    pact = PairAction(act)
    a, b = int(pairs[0, 0]), int(pairs[0, 1])
    pair_orbit = len(orbit(pact, gv_sing, int(pact.encode(a, b))))
    # pair stabilizer through the chain G_v > G_vA > G_vAB
    g_a = schreier_generators(act, gv_sing, a)
    g_ab = schreier_generators(act, g_a, b)
    stab_order = len(closure(g_ab)) if len(g_ab) else 1
    # rank on the family and the resulting split of the line-meeting relation
    res = rank(gv_sing, base=0, action=act)
    meet = fams.meet_dims[np.ix_(ids, ids)]
    disjoint = meet == 0
    srg = srg_parameters(disjoint)
    verdict, j, jt = None, 0, 0
    if res.rank == 4:
        lab = res.orbitals[0]
        gamma = meet[0] == 2
        split = sorted({int(x) for x in lab[gamma]}, key=lambda i: (int((lab == i).sum()), i))
        if len(split) == 2:
            g1 = lab == split[0]
            g2 = lab == split[1]
            j = int(g1.sum())
            y = int(np.nonzero(g2)[0][0])
            jt = int((g1 & disjoint[y]).sum())
            # the count must not depend on y
            counts = {int((g1 & disjoint[yy]).sum()) for yy in np.nonzero(g2)[0]}
            if len(counts) == 1:
                verdict = rank4_feasible(rank3_from_graph(*srg), j, jt)
    return Omega7Report(len(ns_orbit), len(ns), len(gv), sing_orbits, len(pairs), pair_orbit, stab_order,
                        res.rank, res.subdegrees, srg, j, jt, verdict)


# -- semilinear examples on PG(3,2) --------------------------------------------------------------

@dataclass
class GammaReport:
    name: str
    antiflag: AntiflagResult
    order: int
    regular: bool
    block_size: int | None
    blocks: int | None
    block_is_subspace: bool | None

    def to_json(self):
        return {"name": self.name, "antiflag": self.antiflag.to_json(), "order": self.order,
                "regular": self.regular, "block_size": self.block_size, "blocks": self.blocks,
                "block_is_subspace": self.block_is_subspace}


def verify_gamma_examples() -> list[GammaReport]:
    out = []
    for name in ("SL2_4", "SL2_4_semilinear"):
        g = preset_group(name)
        perms = g.point_perms()
        af = antiflag_transitive(perms, g.space)
        order = len(closure(perms))
        blk = imprimitivity_blocks(perms)
        sub = None if blk is None else block_is_subspace(g.space, np.arange(g.space.num_points), blk)
        out.append(GammaReport(name, af, order, af.transitive and order == af.total,
                               None if blk is None else len(blk),
                               None if blk is None else g.space.num_points // len(blk), sub))
    return out
