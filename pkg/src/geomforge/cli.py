"""geomforge command line: build geometries and groups, run checks, emit reports.

Exit codes: 0 when every verdict passes, 1 when some check fails, 2 for
usage errors.  JSON reports are deterministic; elapsed times appear only
with --timing.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .acceptance import TAGS, CRITERIA, Verdict, _plain, eq, run_criterion, select

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


# -- report ---------------------------------------------------------------------------------

def make_report(command: str, params: dict, verdicts: list[Verdict], counts: dict | None = None,
                extra: dict | None = None) -> dict:
    rep = {"schema_version": SCHEMA_VERSION, "command": command, "parameters": _plain(params),
           "verdicts": [v.to_json() for v in verdicts], "counts": _plain(counts or {}),
           "pass": all(v.ok for v in verdicts)}
    if extra:
        rep.update(_plain(extra))
    return rep


def render_table(rep: dict) -> str:
    lines = [f"{rep['command']} {json.dumps(rep['parameters'], sort_keys=True)}"]
    for k, v in rep["counts"].items():
        lines.append(f"  {k}: {json.dumps(v)}")
    for v in rep["verdicts"]:
        mark = "PASS" if v["pass"] else "FAIL"
        lines.append(f"  {mark}  {v['check']}: expected {json.dumps(v['expected'])}, "
                     f"actual {json.dumps(v['actual'])}")
    for c in rep.get("criteria", []):
        mark = "PASS" if c["pass"] else "FAIL"
        t = f" ({c['elapsed_ms']} ms)" if "elapsed_ms" in c else ""
        lines.append(f"  {mark}  criterion {c['criterion']}: {c['title']}{t}")
    if "elapsed_ms" in rep:
        lines.append(f"  elapsed {rep['elapsed_ms']} ms")
    lines.append("PASS" if rep["pass"] else "FAIL")
    return "\n".join(lines)


def emit(rep: dict, args) -> None:
    if args.format == "json":
        text = json.dumps(rep, sort_keys=True, indent=2) + "\n"
    else:
        text = render_table(rep) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands ------------------------------------------------------------------------------------

def cmd_field(args):
    from .acceptance import _field_axioms
    from .ffield import FieldError, field_of_order
    try:
        f = field_of_order(args.q)
    except FieldError as exc:
        raise UsageError(str(exc))
    counts = {"q": f.q, "p": f.p, "e": f.e, "modulus": list(f.modulus)}
    return make_report("field", {"q": args.q}, [eq("field axioms (exhaustive)", True, _field_axioms(f.q))],
                       counts)


def cmd_polar(args):
    from .polar import (FormError, expected_point_count, expected_rank, solid_families, standard_space,
                        verify_9_2)
    try:
        ps = standard_space(args.kind, args.n, args.q, validate=False)
        want_points = expected_point_count(args.kind, args.n, args.q)
        want_rank = expected_rank(args.kind, args.n)
    except FormError as exc:
        raise UsageError(str(exc))
    verdicts = [eq("points", want_points, ps.num_points), eq("rank", want_rank, ps.rank)]
    counts = {"points": ps.num_points, "rank": ps.rank,
              "type_constant": None if ps.type_constant is None else str(ps.type_constant)}
    if args.counting:
        for i in range(1, ps.rank + 1):
            res = verify_9_2(ps, i, chains=args.chains, seed=args.seed)
            verdicts.append(Verdict(f"|T^perp - W^perp| at i={i}", all(c.ok for c in res), res[0].expected,
                                    sorted({c.count for c in res})))
    if args.families:
        try:
            fam = solid_families(ps)
        except FormError as exc:
            raise UsageError(str(exc))
        sizes = [len(fam.members(0)), len(fam.members(1))]
        counts["families"] = sizes
        verdicts.append(eq("equal family sizes", sizes[0], sizes[1]))
    return make_report("polar", {"kind": args.kind, "n": args.n, "q": args.q}, verdicts, counts)


def cmd_ngon(args):
    from .incidence import (GeometryError, IncidenceGeometry, check_generalized_ngon, polar_geometry,
                            projective_geometry)
    from .polar import FormError, standard_space
    try:
        if args.input:
            g = IncidenceGeometry.load(args.input)
            params = {"input": args.input}
        elif args.polar:
            kind, n, q = args.polar[0], int(args.polar[1]), int(args.polar[2])
            g = polar_geometry(standard_space(kind, n, q))
            params = {"polar": [kind, n, q]}
        elif args.projective:
            n, q = args.projective
            g = projective_geometry(n, q)
            params = {"projective": [n, q]}
        else:
            raise UsageError("give --input, --polar or --projective")
    except (GeometryError, FormError, ValueError, OSError) as exc:
        raise UsageError(str(exc))
    res = check_generalized_ngon(g, allow_thin=args.allow_thin)
    verdicts = [Verdict("generalized polygon", res.ok, True, res.ok, res.failures or None)]
    if args.n is not None:
        verdicts.append(eq("n", args.n, res.n))
    if args.export:
        g.dump(args.export)
    return make_report("ngon", params, verdicts, {"points": g.num_points, "lines": g.num_lines,
                                                  "n": res.n, "s": res.s, "t": res.t})


def cmd_hexagon(args):
    from .hexagon import (build_split_cayley, hexagon_count, hexagon_in_sp6, verify_construction_steps,
                          w2_sizes)
    if args.q not in (2, 3, 4):
        raise UsageError("hexagon builds are supported for q in {2, 3, 4}")
    m = build_split_cayley(args.q)
    n = hexagon_count(args.q)
    verdicts = [eq("points", n, m.num_points), eq("lines", n, m.num_lines)]
    counts = {"points": m.num_points, "lines": m.num_lines}
    if args.verify:
        for s in verify_construction_steps(m):
            verdicts.append(Verdict(f"step {s.step}", s.ok, True, s.detail, s.witness))
        w2 = sorted(set(w2_sizes(m).tolist()))
        verdicts.append(eq("|W2(x)|", [(args.q ** 5 - 1) // (args.q - 1)], w2))
    if args.q % 2 == 0 and (args.verify or args.symplectic):
        h = hexagon_in_sp6(m)
        verdicts += [eq("lines are t.i. in Sp(6,q)", True, h.lines_ti), eq("W2(x) = x^perp", True, h.polarity)]
    if args.stabilizer:
        if args.q != 2:
            raise UsageError("the stabilizer filtration runs at q = 2 only")
        from .acceptance import c3_stabilizer, c4_orbit_counts
        verdicts += c3_stabilizer() + c4_orbit_counts()
    if args.export:
        m.geometry.dump(args.export)
    return make_report("hexagon", {"q": args.q, "verify": args.verify, "stabilizer": args.stabilizer},
                       verdicts, counts)


def cmd_group(args):
    from .grouporb import (GroupError, antiflag_transitive, block_is_subspace, imprimitivity_blocks,
                           invariant_chain, line_criterion_4_1, orbit_partition, PointAction, preset_group,
                           rank)
    try:
        g = preset_group(args.preset)
    except GroupError as exc:
        raise UsageError(str(exc))
    p = g.point_perms()
    n = p.shape[1]
    counts = {"generators": len(g.gens), "points": n,
              "point_orbits": sorted(len(o) for o in orbit_partition(PointAction(n), p))}
    verdicts = []
    polar = None
    if g.form is not None:
        from .polar import PolarSpace
        polar = PolarSpace(g.form)
    for check in args.check or ["rank"]:
        if check == "rank":
            r = rank(p)
            counts["rank"] = r.to_json()
            verdicts.append(eq("transitive on points", True, r.transitive))
        elif check == "antiflag":
            af = antiflag_transitive(p, g.space)
            counts["antiflag"] = af.to_json()
            verdicts.append(Verdict("antiflag orbit computed", True, af.total, af.orbit_size))
        elif check == "lemma":
            af = antiflag_transitive(p, g.space).transitive
            lc = line_criterion_4_1(p, g.space).holds
            counts["lemma"] = {"antiflag": af, "lines": lc}
            verdicts.append(eq("antiflag verdict equals line criterion", af, lc))
        elif check == "blocks":
            blk = imprimitivity_blocks(p)
            counts["block_size"] = None if blk is None else len(blk)
            if blk is not None:
                verdicts.append(eq("block is a subspace", True, block_is_subspace(g.space, np.arange(n), blk)))
        elif check == "chain":
            domain = polar.omega if polar is not None and polar.num_points < n else np.arange(n)
            ch = invariant_chain(g.point_perms(domain), g.space, domain,
                                 polar=polar if polar is not None and g.form.kind != "quadratic" else None)
            counts["chain"] = ch.to_json()
            verdicts.append(eq("chain members are subspaces", True, ch.is_chain))
            if ch.perp_ok is not None:
                verdicts.append(eq("W_i^perp = W_(d-i-1)", True, ch.perp_ok))
    return make_report("group", {"preset": args.preset, "check": args.check or ["rank"]}, verdicts, counts)


def cmd_constraints(args):
    from . import constraints as cons
    if args.which == "rank4":
        try:
            p = cons.rank3_from_graph(args.k, args.l, args.lam, args.mu)
            jt = None
            if args.jt is not None:
                jt = Fraction(args.jt)
            elif args.t is not None:
                jt = Fraction(args.t) * args.j
            v = cons.rank4_feasible(p, args.j, jt)
        except (cons.ParameterError, ValueError, ZeroDivisionError) as exc:
            raise UsageError(str(exc))
        verdicts = [Verdict("split feasible", v.ok, True, v.passing_side)]
        return make_report("constraints rank4", {"k": args.k, "l": args.l, "lambda": args.lam, "mu": args.mu,
                                                 "j": args.j, "jt": args.jt, "t": args.t},
                           verdicts, {"rank3": p.to_json(), "rank4": v.to_json()})
    if args.which == "zsigmondy":
        try:
            z = cons.zsigmondy(args.q, args.k)
        except (cons.ParameterError, ValueError) as exc:
            raise UsageError(str(exc))
        return make_report("constraints zsigmondy", {"q": args.q, "k": args.k},
                           [Verdict("classified", True, None, z.exception or z.prime)], z.to_json())
    rows = cons.section13_eliminate(range(3, args.m_max + 1))
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(cons.elimination_csv(rows))
    survivors = [[r.q, r.h, r.m] for r in rows if not r.eliminated]
    verdicts = [eq("no surviving rows", [], survivors),
                eq("reduced test agrees with unreduced", True, all(r.consistent for r in rows))]
    return make_report("constraints section13", {"m_max": args.m_max}, verdicts, {"rows": len(rows)})


def cmd_showcase(args):
    from . import showcase
    if args.name == "a9":
        rep = showcase.verify_a9_antiflag_via_solids()
        return make_report("showcase", {"name": "a9"}, [eq("all checks", True, rep.ok)], rep.to_json())
    if args.name == "omega7":
        rep = showcase.verify_omega7_example()
        return make_report("showcase", {"name": "omega7"}, [eq("all checks", True, rep.ok)], rep.to_json())
    reps = showcase.verify_gamma_examples()
    lin, semi = reps
    verdicts = [eq("SL(2,4) not antiflag transitive", False, lin.antiflag.transitive),
                eq("SL(2,4)<sigma> regular on antiflags", True, semi.regular),
                eq("blocks of size 3", 3, semi.block_size)]
    return make_report("showcase", {"name": "semilinear"}, verdicts, {r.name: r.to_json() for r in reps})


def cmd_acceptance(args):
    if not (args.all or args.tag or args.criterion):
        raise UsageError("give --all, --tag or --criterion")
    if args.tag and args.tag not in TAGS:
        raise UsageError(f"unknown tag {args.tag!r}; known: {', '.join(TAGS)}")
    chosen = CRITERIA if args.all else select(args.criterion, args.tag)
    results = [run_criterion(c) for c in chosen]
    rep = make_report("acceptance", {"all": args.all, "tag": args.tag, "criterion": args.criterion}, [],
                      {"criteria": len(results), "passed": sum(r.ok for r in results)},
                      {"criteria": [r.to_json(args.timing) for r in results]})
    rep["pass"] = all(r.ok for r in results)
    return rep


# -- parser ----------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["table", "json"], default="table")
    common.add_argument("--out", help="write the report to this file")
    common.add_argument("--timing", action="store_true", help="include elapsed times (not deterministic)")

    ap = argparse.ArgumentParser(prog="geomforge", description="finite geometry constructions and checks")
    ap.add_argument("--version", action="version", version=f"geomforge {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", parents=[common], help="field tables and axioms")
    p.add_argument("--q", type=int, required=True)
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("polar", parents=[common], help="standard polar spaces")
    p.add_argument("--kind", required=True, help="Sp, O+, O, O-, U")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True, help="field order (subfield order for U)")
    p.add_argument("--counting", action="store_true", help="check |T^perp - W^perp| for each i")
    p.add_argument("--chains", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--families", action="store_true", help="split maximal subspaces into two families")
    p.set_defaults(func=cmd_polar)

    p = sub.add_parser("ngon", parents=[common], help="generalized polygon check")
    p.add_argument("--input", help="incidence JSON file")
    p.add_argument("--polar", nargs=3, metavar=("KIND", "N", "Q"))
    p.add_argument("--projective", nargs=2, type=int, metavar=("N", "Q"))
    p.add_argument("--n", type=int, help="expected n")
    p.add_argument("--allow-thin", action="store_true")
    p.add_argument("--export", help="write the geometry as incidence JSON")
    p.set_defaults(func=cmd_ngon)

    p = sub.add_parser("hexagon", parents=[common], help="split Cayley hexagon")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--verify", action="store_true", help="run the construction steps")
    p.add_argument("--symplectic", action="store_true", help="transport to Sp(6,q) (even q)")
    p.add_argument("--stabilizer", action="store_true", help="stabilizer by filtration of Sp(6,2)")
    p.add_argument("--export", help="write the geometry as incidence JSON")
    p.set_defaults(func=cmd_hexagon)

    p = sub.add_parser("group", parents=[common], help="preset groups")
    p.add_argument("--preset", required=True)
    p.add_argument("--check", action="append", choices=["rank", "antiflag", "lemma", "blocks", "chain"])
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("constraints", parents=[common], help="parameter arithmetic")
    csub = p.add_subparsers(dest="which", required=True)
    r4 = csub.add_parser("rank4", parents=[common])
    r4.add_argument("--k", type=int, required=True)
    r4.add_argument("--l", type=int, required=True)
    r4.add_argument("--lambda", dest="lam", type=int, required=True)
    r4.add_argument("--mu", type=int, required=True)
    r4.add_argument("--j", type=int, required=True)
    r4.add_argument("--jt", help="j t as an integer or fraction")
    r4.add_argument("--t", help="t as an integer or fraction")
    z = csub.add_parser("zsigmondy", parents=[common])
    z.add_argument("--q", type=int, required=True)
    z.add_argument("--k", type=int, required=True)
    s13 = csub.add_parser("section13", parents=[common])
    s13.add_argument("--m-max", type=int, default=20)
    s13.add_argument("--csv", help="write the elimination table as CSV")
    p.set_defaults(func=cmd_constraints)

    p = sub.add_parser("showcase", parents=[common], help="named examples")
    p.add_argument("--name", choices=["a9", "omega7", "semilinear"], required=True)
    p.set_defaults(func=cmd_showcase)

    p = sub.add_parser("acceptance", parents=[common], help="run the acceptance suite")
    p.add_argument("--all", action="store_true")
    p.add_argument("--tag")
    p.add_argument("--criterion", type=int, action="append")
    p.set_defaults(func=cmd_acceptance)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    t0 = time.perf_counter()
    try:
        rep = args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"geomforge: error: {exc}\n")
        return 2
    if args.timing:
        rep["elapsed_ms"] = round((time.perf_counter() - t0) * 1000)
    emit(rep, args)
    return 0 if rep["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
