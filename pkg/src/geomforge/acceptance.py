"""The acceptance suite: numbered criteria, each a list of exact checks."""

from __future__ import annotations

import os
import subprocess
import sys
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import constraints as cons
from .ffield import field_of_order, prime_power
from .linear import all_subspaces, mat_mul, mat_rank, rref
from .polar import grid_sets, nonsingular_points, sp_o_bijection, standard_space, theorem_10_3_check, verify_9_2


@dataclass
class Verdict:
    check: str
    ok: bool
    expected: object = None
    actual: object = None
    witness: object = None

    def to_json(self):
        out = {"check": self.check, "pass": bool(self.ok), "expected": _plain(self.expected),
               "actual": _plain(self.actual)}
        if self.witness is not None:
            out["witness"] = _plain(self.witness)
        return out


def _plain(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if x is None or isinstance(x, (int, float, str, bool)):
        return x
    return str(x)


def eq(check, expected, actual, witness=None) -> Verdict:
    return Verdict(check, expected == actual, expected, actual, witness)


@dataclass
class Criterion:
    number: int
    title: str
    tags: tuple[str, ...]
    limit_s: float | None
    run: Callable[[], list[Verdict]]


@dataclass
class CriterionResult:
    criterion: Criterion
    verdicts: list[Verdict]
    elapsed_s: float

    @property
    def within_limit(self) -> bool:
        return self.criterion.limit_s is None or self.elapsed_s < self.criterion.limit_s

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts) and self.within_limit

    def to_json(self, timing: bool = False):
        out = {"criterion": self.criterion.number, "title": self.criterion.title,
               "tags": list(self.criterion.tags), "pass": self.ok,
               "verdicts": [v.to_json() for v in self.verdicts]}
        if self.criterion.limit_s is not None:
            out["limit_s"] = self.criterion.limit_s
        if timing:
            out["elapsed_ms"] = round(self.elapsed_s * 1000)
        return out


# -- criteria -----------------------------------------------------------------------------

def c1_hexagon_q2():
    from .hexagon import build_split_cayley, w2_sizes
    from .incidence import check_generalized_ngon, levi_girth
    m = build_split_cayley(2)
    g = m.geometry
    res = check_generalized_ngon(g)
    return [eq("points", 63, g.num_points), eq("lines", 63, g.num_lines),
            eq("n,s,t", (6, 2, 2), (res.n, res.s, res.t)),
            Verdict("generalized hexagon", res.ok, True, res.ok, res.failures or None),
            eq("Levi girth", 12, levi_girth(g)),
            eq("|W2(x)| for all x", [31], sorted(set(w2_sizes(m).tolist())))]


def c2_hexagon_q3():
    from .hexagon import build_split_cayley, verify_construction_steps
    m = build_split_cayley(3)
    out = [eq("points", 364, m.num_points), eq("lines", 364, m.num_lines)]
    for s in verify_construction_steps(m):
        out.append(Verdict(f"step {s.step}", s.ok, True, s.detail, s.witness))
    return out


def c3_stabilizer():
    from .grouporb import invariant_chain, rank
    from .hexagon import hexagon_stabilizer_q2, ordered_hexagon_orbit, ordered_hexagons
    st = hexagon_stabilizer_q2()
    q = 2
    want = (q ** 6 - 1) * q ** 6 * (q ** 2 - 1)
    hexes = ordered_hexagons(st.hexagon.geometry)
    orb = ordered_hexagon_orbit(st, hexes)
    r = rank(st.gen_perms)
    sp = st.hexagon.sp
    ch = invariant_chain(st.gen_perms, sp.space, sp.omega, polar=sp)
    return [eq("|Sp(6,2)| enumerated", 1451520, st.sp_order),
            eq("stabilizer order", want, st.order),
            eq("ordered hexagons", want, len(hexes)),
            eq("ordered hexagon orbit (trivial stabilizer)", len(hexes), orb),
            eq("rank", 4, r.rank), eq("subdegrees", [1, 6, 24, 32], r.subdegrees),
            eq("chain dims", [1, 3, 5, 6], ch.dims), eq("chain is subspaces", True, ch.is_chain),
            eq("W2(x) = x^perp", True, st.hexagon.polarity and ch.perp_ok)]


def c4_orbit_counts():
    from .hexagon import hexagon_line_plane_orbit_counts, hexagon_stabilizer_q2
    st = hexagon_stabilizer_q2()
    c = hexagon_line_plane_orbit_counts(st.hexagon.sp, st.gen_perms)
    return [eq("t.i. line orbits", [63, 252], c.lines), eq("t.i. plane orbits", [63, 72], c.planes),
            eq("t.i. planes total", 135, c.total_planes)]


LEMMA_9_2_TYPES = [("Sp", lambda r: 2 * r), ("O+", lambda r: 2 * r), ("O", lambda r: 2 * r + 1),
                   ("O-", lambda r: 2 * r + 2), ("U", lambda r: 2 * r), ("U", lambda r: 2 * r + 1)]


def c5_lemma_9_2():
    out = []
    for kind, dim in LEMMA_9_2_TYPES:
        for r in (2, 3):
            for q in (2, 3):
                ps = standard_space(kind, dim(r), q)
                for i in range(1, ps.rank + 1):
                    res = verify_9_2(ps, i)
                    bad = next((c for c in res if not c.ok), None)
                    out.append(Verdict(f"{kind}({dim(r)},{q}) i={i}", bad is None, res[0].expected,
                                       sorted({c.count for c in res}),
                                       None if bad is None else {"T": bad.t_basis, "W": bad.w_basis}))
    return out


def c6_a9():
    from .showcase import verify_a9_antiflag_via_solids
    rep = verify_a9_antiflag_via_solids(with_omega=False)
    return [eq("singular points", 135, rep.singular_points), eq("weight-8 points", 9, rep.weight8_points),
            eq("weight-8 pairwise nonperpendicular", True, rep.weight8_pairwise_nonperp),
            eq("generators Dickson 0", True, rep.dickson_zero),
            eq("disjoint same-family pairs", 8640, rep.disjoint_pairs),
            eq("orbit on pairs", 8640, rep.orbit_size),
            eq("pair stabilizer order", 21, rep.pair_stabilizer_order)]


def c7_omega7():
    from .showcase import verify_omega7_example
    rep = verify_omega7_example()
    v = rep.verdict
    out = [eq("nonsingular orbit", 120, rep.nonsingular_orbit),
           eq("pair orbit", 8640, rep.pair_orbit), eq("pair stabilizer order", 168, rep.pair_stabilizer_order),
           eq("rank on family", 4, rep.rank), eq("subdegrees", [1, 14, 56, 64], rep.subdegrees),
           eq("srg parameters", (64, 70, 28, 32), rep.srg)]
    side = None if v is None else next((s for s in v.sides if s.ok), None)
    for c in ("12.1", "12.2", "12.3", "12.4"):
        out.append(eq(f"condition {c}", True, side is not None and side.conditions[c],
                      None if v is None else v.to_json()))
    return out


def c8_semilinear():
    from .showcase import verify_gamma_examples
    lin, semi = verify_gamma_examples()
    return [eq("SL(2,4) antiflag orbit", 60, lin.antiflag.orbit_size),
            eq("SL(2,4) transitive", False, lin.antiflag.transitive),
            eq("SL(2,4)<sigma> antiflag orbit", 120, semi.antiflag.orbit_size),
            eq("SL(2,4)<sigma> regular", True, semi.regular),
            eq("block size", 3, semi.block_size), eq("blocks are subspaces", True, semi.block_is_subspace)]


LEMMA_4_1_GROUPS = ["SL(3,2)", "SL(4,2)", "Sp(4,2)", "Sp(6,2)", "SL(3,3)", "SL2_4", "SL2_4_semilinear",
                    "reducible_PG3_2", "SL3_4_in_GL6_2", "hexagon_stabilizer_q2"]


def c9_lemma_4_1():
    from .grouporb import antiflag_transitive, line_criterion_4_1, preset_group
    out = []
    for name in LEMMA_4_1_GROUPS:
        g = preset_group(name)
        p = g.point_perms()
        af = antiflag_transitive(p, g.space).transitive
        lc = line_criterion_4_1(p, g.space).holds
        out.append(Verdict(name, af == lc, af, lc))
    return out


def c10_section_theorem():
    out = []
    for n in (6, 8):
        ps = standard_space("O+", n, 2)
        bad = []
        ns = nonsingular_points(ps)
        for v in ns:
            phi = np.nonzero(ps.form.bilinear(ps.space.points[[v]], ps.vectors)[0] == 0)[0]
            if theorem_10_3_check(ps, phi) != [int(v)]:
                bad.append(int(v))
        out.append(Verdict(f"O+({n},2) poles recovered", not bad, len(ns), len(ns) - len(bad), bad or None))
    rem = grid_sets(4)
    out += [eq("q=4 hypothesis sets", 120, rem.hypothesis_sets), eq("q=4 conics", 60, rem.conics)]
    return out


def c11_constraints():
    rows = cons.section13_eliminate()
    survivors = [(r.q, r.h, r.m) for r in rows if not r.eliminated]
    inconsistent = [(r.q, r.h, r.m) for r in rows if not r.consistent]
    exceptions, bad_primes = set(), []
    for q in (2, 3, 4, 5, 7, 8, 9):
        for k in range(2, 13):
            z = cons.zsigmondy(q, k)
            if z.prime is None:
                exceptions.add((q, k))
            elif (z.prime - 1) % (prime_power(q)[1] * k):
                bad_primes.append((q, k, z.prime))
    want = {(q, 2) for q in (3, 7)} | {(2, 6), (4, 3), (8, 2)}
    return [eq("section 13 rows", 90, len(rows)), eq("section 13 survivors", [], survivors),
            eq("reduced vs unreduced divisibility", [], inconsistent),
            eq("Zsigmondy exceptions", sorted(want), sorted(exceptions)),
            eq("primes are 1 mod ek", [], bad_primes)]


def c12_bijection():
    out = []
    for m, q in ((2, 2), (3, 2), (2, 4)):
        _, rep = sp_o_bijection(m, q)
        out.append(Verdict(f"m={m} q={q}", rep.ok, "bijective on points and lines",
                           {"points": [rep.orthogonal_points, rep.symplectic_points],
                            "lines": [rep.orthogonal_lines, rep.symplectic_lines]}))
    return out


def _field_axioms(q: int) -> bool:
    f = field_of_order(q)
    a, m, n, inv = f.add_table, f.mul_table, f.neg_table, f.inv_table
    r = np.arange(q)
    ok = (a == a.T).all() and (m == m.T).all() and (a[:, 0] == r).all() and (m[:, 1] == r).all()
    ok &= (a[r, n] == 0).all() and (m[r[1:], inv[1:]] == 1).all()
    ok &= (a[a[:, :, None], r[None, None, :]] == a[r[:, None, None], a[None, :, :]]).all()
    ok &= (m[m[:, :, None], r[None, None, :]] == m[r[:, None, None], m[None, :, :]]).all()
    ok &= (m[r[:, None, None], a[None, :, :]] == a[m[:, :, None], m[:, None, :]]).all()
    return bool(ok)


def _report_bytes(threads: int) -> bytes:
    env = dict(os.environ, OMP_NUM_THREADS=str(threads), OPENBLAS_NUM_THREADS=str(threads),
               MKL_NUM_THREADS=str(threads))
    cmd = [sys.executable, "-m", "geomforge.cli", "hexagon", "--q", "2", "--verify", "--format", "json"]
    return subprocess.run(cmd, env=env, capture_output=True, check=True).stdout


def c13_properties():
    out = []
    orders = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29, 31, 32, 37, 41, 43, 47, 49, 53, 59,
              61, 64, 67, 71, 73, 79, 81]
    failed = [q for q in orders if not _field_axioms(q)]
    out.append(eq("field axioms for all q <= 81", [], failed))
    ps = standard_space("Sp", 4, 3)
    subs = all_subspaces(ps.field, 4)
    bad = [s.to_json() for s in subs if ps.perp(ps.perp(s)) != s]
    out.append(Verdict("S^perp^perp = S on Sp(4,3)", not bad, len(subs), len(subs) - len(bad), bad[:1] or None))
    rng = np.random.default_rng(13)
    f = field_of_order(9)
    canon = True
    for _ in range(200):
        rows = rng.integers(0, 9, size=(3, 5))
        s = rref(f, rows.tolist(), 5)
        mix = rng.integers(0, 9, size=(3, 3))
        if mat_rank(f, mix) < 3:
            continue
        canon &= rref(f, mat_mul(f, mix, rows).tolist(), 5) == s
    out.append(eq("RREF canonical under invertible row mixing", True, canon))
    reports = {t: _report_bytes(t) for t in (1, 4)}
    out.append(Verdict("byte-identical reports across thread counts and runs",
                       reports[1] == reports[4] == _report_bytes(1), True, {t: len(b) for t, b in reports.items()}))
    return out


CRITERIA = [
    Criterion(1, "hexagon q=2", ("hexagon",), 5.0, c1_hexagon_q2),
    Criterion(2, "hexagon q=3 construction steps", ("hexagon",), 60.0, c2_hexagon_q3),
    Criterion(3, "hexagon stabilizer by filtration of Sp(6,2)", ("hexagon", "group"), 600.0, c3_stabilizer),
    Criterion(4, "stabilizer orbits on t.i. lines and planes", ("hexagon", "group"), None, c4_orbit_counts),
    Criterion(5, "counting lemma table", ("polar",), 120.0, c5_lemma_9_2),
    Criterion(6, "A9 in O+(8,2)", ("showcase", "group"), 120.0, c6_a9),
    Criterion(7, "O+(8,2) nonsingular point stabilizer", ("showcase", "group", "constraints"), None, c7_omega7),
    Criterion(8, "semilinear example on PG(3,2)", ("showcase", "group"), None, c8_semilinear),
    Criterion(9, "antiflag transitivity against the line criterion", ("group",), None, c9_lemma_4_1),
    Criterion(10, "hyperplane sections and the grid remark", ("polar",), None, c10_section_theorem),
    Criterion(11, "divisibility eliminations and primitive divisors", ("constraints",), None, c11_constraints),
    Criterion(12, "Sp/O bijection in even characteristic", ("polar",), None, c12_bijection),
    Criterion(13, "property suites", ("properties",), None, c13_properties),
]

TAGS = sorted({t for c in CRITERIA for t in c.tags})


def select(numbers=None, tag=None) -> list[Criterion]:
    out = CRITERIA
    if numbers:
        out = [c for c in out if c.number in set(numbers)]
    if tag:
        out = [c for c in out if tag in c.tags]
    return out


def run_criterion(c: Criterion) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        verdicts = c.run()
    except Exception as exc:  # report, never crash the suite
        verdicts = [Verdict("exception", False, None, f"{type(exc).__name__}: {exc}")]
    return CriterionResult(c, verdicts, time.perf_counter() - t0)
