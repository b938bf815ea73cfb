"""Semilinear groups acting on points, orbits and stabilizers.

Group elements are ``SemilinearMap`` values x -> frob^k(x) . M acting on row
vectors.  Orbit work is done on permutations: each generator is turned into
a permutation of a finite domain (points of a projective or polar space),
and derived actions (on sets of points such as lines or solids, or on
ordered pairs) are computed from those permutations.

Composition is a right action: ``g.then(h)`` applies g first, and for
permutations the product "g then h" is ``h[g]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .ffield import FieldSpec, field_of_order
from .linear import (Subspace, encode, mat_inverse, mat_mul, mat_rank, mat_sub, normalize_rows,
                     projective_space, span)
from .polar import Form, PolarSpace, standard_form


class ActionError(ValueError):
    def __init__(self, msg, generator=None, state=None):
        super().__init__(msg)
        self.generator = generator
        self.state = state


class GroupError(ValueError):
    pass


# -- semilinear maps ------------------------------------------------------------

class SemilinearMap:
    """x -> frob^k(x) . matrix on row vectors."""

    __slots__ = ("field", "matrix", "k")

    def __init__(self, field: FieldSpec, matrix, k: int = 0, check: bool = True):
        m = np.array(matrix, dtype=np.int64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise GroupError("matrix must be square")
        if check and mat_rank(field, m) != m.shape[0]:
            raise GroupError("matrix is singular")
        m.setflags(write=False)
        self.field = field
        self.matrix = m
        self.k = k % field.e

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"SemilinearMap(k={self.k}, matrix={self.matrix.tolist()})"

    def apply(self, vectors) -> np.ndarray:
        v = np.atleast_2d(np.asarray(vectors, dtype=np.int64))
        if self.k:
            v = self.field.frob_table(self.k)[v]
        return mat_mul(self.field, v, self.matrix)

    def then(self, other: SemilinearMap) -> SemilinearMap:
        m1 = self.matrix
        if other.k:
            m1 = self.field.frob_table(other.k)[m1]
        return SemilinearMap(self.field, mat_mul(self.field, m1, other.matrix),
                             self.k + other.k, check=False)

    __mul__ = then

    def inverse(self) -> SemilinearMap:
        inv = mat_inverse(self.field, self.matrix)
        back = (-self.k) % self.field.e
        if back:
            inv = self.field.frob_table(back)[inv]
        return SemilinearMap(self.field, inv, back, check=False)

    def key(self) -> tuple:
        """Projective key: the matrix scaled to a leading 1, plus k."""
        flat = normalize_rows(self.field, self.matrix.reshape(1, -1))[0]
        return (self.k, flat.tobytes())

    def is_scalar(self) -> bool:
        m = self.matrix
        return self.k == 0 and (m == np.diag(np.diag(m))).all() and (np.diag(m) == m[0, 0]).all()

    def to_json(self):
        return {"matrix": self.matrix.tolist(), "k": self.k}


def preserves_form(form: Form, g: SemilinearMap, similitude: bool = True) -> bool:
    """B(x^g, y^g) = c B(x, y)^sigma (c = 1 unless similitude); phi likewise."""
    f = form.field
    eye = np.eye(form.n, dtype=np.int64)
    imgs = g.apply(eye)
    got = form.bilinear(imgs, imgs)
    want = f.frob_table(g.k)[form.gram]
    vals_got = form.values(imgs) if form.kind == "quadratic" else None
    vals_want = f.frob_table(g.k)[np.diag(form.quad)] if form.kind == "quadratic" else None
    if not similitude:
        return bool((got == want).all() and (vals_got is None or (vals_got == vals_want).all()))
    nz = np.nonzero(want.ravel())[0]
    if len(nz) == 0:
        return False
    c = f.mul_table[got.ravel()[nz[0]], f.inv_table[want.ravel()[nz[0]]]]
    if c == 0 or (got != f.mul_table[c, want]).any():
        return False
    if vals_got is not None and (vals_got != f.mul_table[c, vals_want]).any():
        return False
    return True


# -- presentations ---------------------------------------------------------------------

@dataclass(eq=False)
class GroupPresentation:
    field: FieldSpec
    n: int
    gens: list[SemilinearMap]
    form: Form | None = None
    name: str = ""
    order: int | None = None  # only when known by enumeration or construction

    def __post_init__(self):
        for i, g in enumerate(self.gens):
            if g.n != self.n or g.field != self.field:
                raise GroupError(f"generator {i} has the wrong shape or field")
            if self.form is not None and not preserves_form(self.form, g):
                raise GroupError(f"generator {i} does not preserve the form")

    def __repr__(self):
        return f"GroupPresentation({self.name or '?'}, {len(self.gens)} generators)"

    @cached_property
    def space(self):
        return projective_space(self.field, self.n)

    def point_perms(self, domain: np.ndarray | None = None) -> np.ndarray:
        """Generators as permutations of a point domain (all points by default).

        ``domain`` holds ambient point ids.  Raises ActionError if some
        generator maps a domain point outside the domain.
        """
        sp = self.space
        if domain is None:
            domain = np.arange(sp.num_points)
        domain = np.asarray(domain)
        lookup = np.full(sp.num_points, -1, dtype=np.int64)
        lookup[domain] = np.arange(len(domain))
        vecs = sp.points[domain]
        out = np.empty((len(self.gens), len(domain)), dtype=np.int32)
        for gi, g in enumerate(self.gens):
            img = lookup[sp.ids(g.apply(vecs))]
            if (img < 0).any():
                bad = int(np.nonzero(img < 0)[0][0])
                raise ActionError(f"generator {gi} maps domain point {bad} outside the domain",
                                  gi, bad)
            out[gi] = img
        return out


# -- permutation actions ------------------------------------------------------------------

def compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Permutation 'a then b' (works row-wise on stacks)."""
    if a.ndim == 1:
        return b[a]
    return np.take_along_axis(b, a, axis=1)


def invert(p: np.ndarray) -> np.ndarray:
    if p.ndim == 1:
        inv = np.empty_like(p)
        inv[p] = np.arange(len(p), dtype=p.dtype)
        return inv
    inv = np.empty_like(p)
    rows = np.arange(p.shape[0])[:, None]
    inv[rows, p] = np.arange(p.shape[1], dtype=p.dtype)[None, :]
    return inv


def _row_keys(rows: np.ndarray) -> np.ndarray:
    rows = np.ascontiguousarray(rows)
    return rows.view(np.dtype((np.void, rows.dtype.itemsize * rows.shape[1]))).ravel()


def unique_rows(rows: np.ndarray) -> np.ndarray:
    if len(rows) == 0:
        return rows
    _, idx = np.unique(_row_keys(rows), return_index=True)
    return rows[np.sort(idx)]


class PointAction:
    """States are the base points themselves."""

    def __init__(self, size: int):
        self.size = size

    def image(self, perm: np.ndarray, states: np.ndarray) -> np.ndarray:
        return perm[states]


class SetAction:
    """States are members of a family of equal-size point sets (lines, solids, ...)."""

    CACHE_SIZE = 8192

    def __init__(self, members: np.ndarray):
        members = np.sort(np.asarray(members, dtype=np.int64), axis=1)
        self.members = members
        self.size = len(members)
        # additive hash of a set; every hit is confirmed against the stored members
        rng = np.random.default_rng(0x5E7)
        self._salt = rng.integers(-(2 ** 62), 2 ** 62, size=int(members.max()) + 1, dtype=np.int64)
        keys = self._salt[members].sum(axis=1)
        self._order = np.argsort(keys, kind="stable")
        self._sorted = keys[self._order]
        if (np.diff(self._sorted) == 0).any():
            raise GroupError("set hash collision; members are not distinct")
        self._cache: dict[bytes, np.ndarray] = {}

    @classmethod
    def from_incidence(cls, inc: np.ndarray) -> SetAction:
        inc = np.asarray(inc, dtype=bool)
        sizes = inc.sum(axis=1)
        if (sizes != sizes[0]).any():
            raise GroupError("set family must have equal-size members")
        return cls(np.nonzero(inc)[1].reshape(len(inc), int(sizes[0])))

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        """State ids of the given point sets (-1 where the set is not a member)."""
        rows = np.asarray(rows)
        if rows.size and rows.max() >= len(self._salt):
            inside = (rows < len(self._salt)).all(axis=1)
            rows = np.where(rows < len(self._salt), rows, 0)
        else:
            inside = np.ones(len(rows), dtype=bool)
        keys = self._salt[rows].sum(axis=1)
        pos = np.minimum(np.searchsorted(self._sorted, keys), len(self._sorted) - 1)
        cand = self._order[pos]
        hit = inside & (self._sorted[pos] == keys)
        hit &= (np.sort(rows, axis=1) == self.members[cand]).all(axis=1)
        return np.where(hit, cand, -1)

    def full_image(self, perm: np.ndarray) -> np.ndarray:
        key = perm.tobytes()
        out = self._cache.get(key)
        if out is None:
            out = self.lookup(perm[self.members])
            if (out < 0).any():
                raise ActionError("set family is not invariant", state=int(np.argmax(out < 0)))
            if len(self._cache) >= self.CACHE_SIZE:
                self._cache.clear()
            self._cache[key] = out
        return out

    def image(self, perm: np.ndarray, states: np.ndarray) -> np.ndarray:
        if len(states) * 4 >= self.size:
            return self.full_image(perm)[states]
        out = self.lookup(perm[self.members[states]])
        if (out < 0).any():
            raise ActionError("set family is not invariant", state=int(states[np.argmax(out < 0)]))
        return out

    def perms(self, base_perms: np.ndarray) -> np.ndarray:
        return np.stack([self.full_image(p) for p in base_perms]).astype(np.int32)


class PairAction:
    """Ordered pairs of states of an inner action, encoded a * size + b."""

    def __init__(self, inner):
        self.inner = inner
        self.size = inner.size ** 2

    def encode(self, a, b):
        return np.asarray(a) * self.inner.size + np.asarray(b)

    def decode(self, s):
        return np.divmod(np.asarray(s), self.inner.size)

    def image(self, perm: np.ndarray, states: np.ndarray) -> np.ndarray:
        a, b = self.decode(states)
        return self.encode(self.inner.image(perm, a), self.inner.image(perm, b))


def orbit(action, gens: np.ndarray, seed: int) -> np.ndarray:
    """Orbit of a state in breadth-first order (each layer sorted)."""
    seen = np.zeros(action.size, dtype=bool)
    seen[seed] = True
    out = [np.array([seed])]
    frontier = out[0]
    while len(frontier):
        imgs = np.concatenate([action.image(g, frontier) for g in gens])
        new = np.unique(imgs[~seen[imgs]])
        seen[new] = True
        if len(new):
            out.append(new)
        frontier = new
    return np.concatenate(out)


def orbit_transversal(action, gens: np.ndarray, seed: int):
    """Orbit plus base permutations T[i] carrying seed to orbit[i]."""
    ngen, nbase = gens.shape
    pos = np.full(action.size, -1, dtype=np.int64)
    pos[seed] = 0
    orb = [np.array([seed])]
    trans = [np.arange(nbase, dtype=gens.dtype)[None, :]]
    frontier = orb[0]
    ftrans = trans[0]
    count = 1
    while len(frontier):
        # candidate (frontier element, generator) pairs in row-major order
        imgs = np.stack([action.image(g, frontier) for g in gens], axis=1).ravel()
        fresh = pos[imgs] < 0
        cand = np.nonzero(fresh)[0]
        if len(cand) == 0:
            break
        vals, first = np.unique(imgs[cand], return_index=True)
        src = cand[first]
        parent, gidx = np.divmod(src, ngen)
        new_t = np.take_along_axis(gens[gidx], ftrans[parent], axis=1)
        pos[vals] = count + np.arange(len(vals))
        count += len(vals)
        orb.append(vals)
        trans.append(new_t)
        frontier, ftrans = vals, new_t
    return np.concatenate(orb), np.concatenate(trans), pos


def orbit_partition(action, gens: np.ndarray, states: np.ndarray | None = None) -> list[np.ndarray]:
    """Orbits as sorted arrays, ordered by least element."""
    n = action.size
    allst = np.arange(n)
    labels = allst.copy()
    ncomp = n
    # merge components a batch of generators at a time to bound the edge count
    batch = max(1, (1 << 22) // max(n, 1))
    for lo in range(0, len(gens), batch):
        rows = np.concatenate([labels] * len(gens[lo:lo + batch]))
        cols = np.concatenate([labels[action.image(g, allst)] for g in gens[lo:lo + batch]])
        graph = sparse.csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)),
                                  shape=(ncomp, ncomp))
        ncomp, merged = csgraph.connected_components(graph, directed=True, connection="weak")
        labels = merged[labels]
    if states is not None:
        keep = np.zeros(n, dtype=bool)
        keep[states] = True
    else:
        keep = np.ones(n, dtype=bool)
    order = np.argsort(labels, kind="stable")
    lab_sorted = labels[order]
    splits = np.nonzero(np.diff(lab_sorted))[0] + 1
    groups = [grp[keep[grp]] for grp in np.split(order, splits)]
    groups = [g for g in groups if len(g)]
    return sorted(groups, key=lambda g: int(g[0]))


def schreier_generators(action, gens: np.ndarray, seed: int, chunk_rows: int = 1 << 21) -> np.ndarray:
    """Distinct non-identity Schreier generators of the stabilizer of ``seed``.

    These are T[y] g T[y^g]^-1 over orbit points y and generators g, as base
    permutations; by Schreier's lemma they generate the stabilizer.
    """
    orb, trans, pos = orbit_transversal(action, gens, seed)
    tinv = invert(trans)
    ident = np.arange(gens.shape[1], dtype=gens.dtype)
    found = []
    for g in gens:
        target = pos[action.image(g, orb)]
        step = max(1, chunk_rows // gens.shape[1])
        for lo in range(0, len(orb), step):
            sl = slice(lo, lo + step)
            s = np.take_along_axis(tinv[target[sl]], g[trans[sl]], axis=1)
            found.append(unique_rows(s))
        if len(found) > 64:
            found = [unique_rows(np.concatenate(found))]
    out = unique_rows(np.concatenate(found)) if found else np.zeros((0, len(ident)), dtype=gens.dtype)
    return out[(out != ident).any(axis=1)]


def closure(gens: np.ndarray, limit: int = 500_000) -> np.ndarray:
    """Every element of the group generated by the permutations, as rows."""
    n = gens.shape[1] if len(gens) else 0
    ident = np.arange(n, dtype=np.int32)[None, :]
    gens = gens.astype(np.int32)
    seen_keys = _row_keys(ident).copy()
    elems = [ident]
    frontier = ident
    total = 1
    while len(frontier):
        cand = np.concatenate([g[frontier] for g in gens]) if len(gens) else frontier[:0]
        cand = unique_rows(cand)
        keys = _row_keys(cand)
        fresh = ~np.isin(keys, seen_keys)
        frontier = cand[fresh]
        if len(frontier):
            elems.append(frontier)
            seen_keys = np.concatenate([seen_keys, keys[fresh]])
            total += len(frontier)
            if total > limit:
                raise GroupError(f"group exceeds the enumeration limit {limit}")
    return np.concatenate(elems)


def group_order(gens: np.ndarray, limit: int = 500_000) -> int:
    return len(closure(gens, limit))


# -- matrix group enumeration -----------------------------------------------------------------

ENUMERATION_LIMIT = 2_000_000


class MatrixEnumeration:
    """All elements of a linear group, keyed by packed basis-image codes."""

    def __init__(self, field: FieldSpec, n: int, maps: Sequence[SemilinearMap],
                 limit: int = ENUMERATION_LIMIT):
        if any(g.k for g in maps):
            raise GroupError("enumeration by basis images needs linear generators")
        q = field.q
        self.field, self.n = field, n
        self.base = q ** n
        if n * np.log2(self.base) >= 62:
            raise GroupError("packed keys would overflow")
        from .linear import all_vectors
        vecs = all_vectors(q, n)
        tables = [encode(q, g.apply(vecs)) for g in maps]
        ident = encode(q, np.eye(n, dtype=np.int64))
        seen = self._pack(ident[None, :])
        frontier = ident[None, :]
        while len(frontier):
            cand = np.concatenate([t[frontier] for t in tables])
            keys = np.unique(self._pack(cand))
            keys = keys[~np.isin(keys, seen, assume_unique=True)]
            if len(keys) == 0:
                break
            seen = np.union1d(seen, keys)
            if len(seen) > limit:
                raise GroupError(f"group exceeds the enumeration limit {limit}")
            frontier = self.unpack(keys)
        self.keys = seen

    def _pack(self, codes: np.ndarray) -> np.ndarray:
        key = np.zeros(len(codes), dtype=np.int64)
        for i in range(self.n - 1, -1, -1):
            key = key * self.base + codes[:, i]
        return key

    def unpack(self, keys: np.ndarray) -> np.ndarray:
        out = np.empty((len(keys), self.n), dtype=np.int64)
        k = keys.copy()
        for i in range(self.n):
            out[:, i] = k % self.base
            k //= self.base
        return out

    def __len__(self):
        return len(self.keys)

    def matrices(self, keys: np.ndarray) -> np.ndarray:
        """(m, n, n) matrices whose rows are the basis images."""
        from .linear import all_vectors
        vecs = all_vectors(self.field.q, self.n)
        return vecs[self.unpack(keys)]


# -- ranks, blocks, antiflags --------------------------------------------------------------------

@dataclass
class RankResult:
    transitive: bool
    rank: int | None
    subdegrees: list[int]
    orbitals: np.ndarray | None = None  # [x, y] -> orbital label (labels sorted by size at 0)

    def to_json(self):
        return {"transitive": self.transitive, "rank": self.rank, "subdegrees": self.subdegrees}


def rank(gens: np.ndarray, base: int = 0, action=None) -> RankResult:
    """Rank and subdegrees via orbits on ordered pairs."""
    action = action or PointAction(gens.shape[1])
    n = action.size
    if len(orbit(action, gens, base)) != n:
        return RankResult(False, None, [])
    pairs = PairAction(action)
    orbs = orbit_partition(pairs, gens)
    labels = np.empty(n * n, dtype=np.int64)
    for i, o in enumerate(orbs):
        labels[o] = i
    labels = labels.reshape(n, n)
    at_base = labels[base]
    ids, counts = np.unique(at_base, return_counts=True)
    order = sorted(range(len(ids)), key=lambda i: (counts[i], ids[i]))
    remap = np.empty(len(orbs), dtype=np.int64)
    for new, i in enumerate(order):
        remap[ids[i]] = new
    return RankResult(True, len(orbs), [int(counts[i]) for i in order], remap[labels])


def imprimitivity_blocks(gens: np.ndarray, base: int = 0) -> list[int] | None:
    """Smallest nontrivial block containing ``base``, or None if primitive."""
    n = gens.shape[1]
    best = None
    for y in range(n):
        if y == base:
            continue
        parent = np.arange(n)

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        queue = [(base, y)]
        parent[find(y)] = find(base)
        while queue:
            a, b = queue.pop()
            for g in gens:
                ra, rb = find(int(g[a])), find(int(g[b]))
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
                    queue.append((int(g[a]), int(g[b])))
        roots = np.array([find(i) for i in range(n)])
        block = np.nonzero(roots == roots[base])[0]
        if len(block) < n and (best is None or len(block) < len(best)):
            best = block.tolist()
            if len(best) == 2:
                break
    return best


def block_is_subspace(space, domain_ids: np.ndarray, block: Sequence[int]) -> bool:
    """True when the block's points are exactly the points of their span."""
    vecs = space.points[np.asarray(domain_ids)[list(block)]]
    sub = span(space.field, space.n, vecs.tolist())
    return len(space.subspace_ids(sub)) == len(block)


def antiflags_linear(space) -> tuple[SetAction, np.ndarray]:
    """Hyperplane action and the antiflag states (point, hyperplane) as pair codes."""
    inc = space.incidence_matrix()
    hyper = SetAction.from_incidence(inc)
    # hyperplane state order follows the incidence rows (normal vector ids)
    af = space.antiflags()
    return hyper, af


@dataclass
class AntiflagResult:
    total: int
    orbit_size: int

    @property
    def transitive(self) -> bool:
        return self.orbit_size == self.total

    @property
    def regular_candidate(self) -> bool:
        return self.transitive

    def to_json(self):
        return {"antiflags": self.total, "orbit": self.orbit_size, "transitive": self.transitive}


class _FlagAction:
    """States: (point, hyperplane) encoded point * H + hyperplane."""

    def __init__(self, npoints: int, hyper: SetAction):
        self.hyper = hyper
        self.h = hyper.size
        self.size = npoints * self.h

    def image(self, perm, states):
        p, h = np.divmod(states, self.h)
        return perm[p] * self.h + self.hyper.image(perm, h)


def antiflag_transitive(gens: np.ndarray, space) -> AntiflagResult:
    """Single-orbit test on the antiflags of PG(n-1, q); gens act on all points."""
    hyper, af = antiflags_linear(space)
    act = _FlagAction(space.num_points, hyper)
    seed = int(af[0, 0]) * act.h + int(af[0, 1])
    return AntiflagResult(len(af), len(orbit(act, gens, seed)))


def antiflag_transitive_polar(gens: np.ndarray, ps: PolarSpace) -> AntiflagResult:
    """Single-orbit test on ordered nonperpendicular pairs of singular points."""
    nonperp = ps.form.bilinear(ps.vectors, ps.vectors) != 0
    a, b = np.nonzero(nonperp)
    act = PairAction(PointAction(ps.num_points))
    return AntiflagResult(len(a), len(orbit(act, gens, int(act.encode(a[0], b[0])))))


def projective_lines(space) -> np.ndarray:
    """Point-id members of every line of the projective space, sorted rows."""
    f = space.field
    q = f.q
    pts = space.points
    n = len(pts)
    seen = np.zeros((n, n), dtype=bool)
    rows = []
    for a in range(n):
        for b in range(a + 1, n):
            if seen[a, b]:
                continue
            ids = [a, b]
            for lam in range(1, q):
                v = f.add_table[pts[a], f.mul_table[lam, pts[b]]]
                ids.append(int(space.ids(v)[0]))
            ids = sorted(set(ids))
            ix = np.array(ids)
            seen[np.ix_(ix, ix)] = True
            rows.append(ids)
    return np.array(rows, dtype=np.int64)


@dataclass
class LineCriterion:
    line_orbits: int
    two_transitive: list[bool]

    @property
    def holds(self) -> bool:
        return all(self.two_transitive)

    def to_json(self):
        return {"line_orbits": self.line_orbits, "two_transitive": self.two_transitive,
                "holds": self.holds}


def line_criterion_4_1(gens: np.ndarray, space, lines: np.ndarray | None = None) -> LineCriterion:
    """Whether each line stabilizer is 2-transitive on the line (per line orbit)."""
    if lines is None:
        lines = projective_lines(space)
    lact = SetAction(lines)
    orbs = orbit_partition(lact, gens)
    verdicts = []
    for o in orbs:
        rep = int(o[0])
        members = lact.members[rep]
        # stabilizer of the line, restricted to the line's points
        orb, trans, pos = orbit_transversal(lact, gens, rep)
        tinv = invert(trans)
        restricted = []
        for g in gens:
            target = pos[lact.image(g, orb)]
            imgs = np.take_along_axis(tinv[target], g[trans[:, members]], axis=1)
            restricted.append(imgs)
        local = np.unique(np.concatenate(restricted), axis=0)
        # map to local indices 0..q
        where = {int(p): i for i, p in enumerate(members)}
        lperm = np.vectorize(where.__getitem__)(local)
        m = len(members)
        pair = PairAction(PointAction(m))
        orb2 = orbit(pair, lperm, int(pair.encode(0, 1)))
        verdicts.append(len(orb2) == m * (m - 1))
    return LineCriterion(len(orbs), verdicts)


# -- invariant chains ---------------------------------------------------------------------------

@dataclass
class InvariantChain:
    base: int
    orbit_sizes: list[int]
    dims: list[int]
    subspaces: list[Subspace]
    is_chain: bool
    perp_ok: bool | None = None
    hyperplane_ok: bool | None = None

    def to_json(self):
        return {"base": self.base, "orbit_sizes": self.orbit_sizes, "dims": self.dims,
                "is_chain": self.is_chain, "perp_ok": self.perp_ok, "hyperplane_ok": self.hyperplane_ok}


def invariant_chain(gens: np.ndarray, space, domain_ids: np.ndarray, base: int = 0,
                    polar: PolarSpace | None = None) -> InvariantChain:
    """Spans of unions of point-stabilizer orbits, grown one orbit at a time.

    At each step the orbit whose addition gives the smallest span is taken.
    The chain is valid when every span meets the domain in exactly the union.
    """
    res = rank(gens, base)
    if not res.transitive:
        raise GroupError("invariant chains need a transitive group")
    labels = res.orbitals[base]
    orbits = [np.nonzero(labels == i)[0] for i in range(res.rank)]
    domain_ids = np.asarray(domain_ids)
    field_ = space.field
    in_domain = np.zeros(space.num_points, dtype=bool)
    in_domain[domain_ids] = True
    remaining = [o for o in orbits if base not in o]
    current = np.array([base])
    subs = [span(field_, space.n, space.points[domain_ids[current]].tolist())]
    sizes = [1]
    ok = True
    while remaining:
        options = []
        for i, o in enumerate(remaining):
            s = span(field_, space.n, space.points[domain_ids[np.concatenate([current, o])]].tolist())
            options.append((s.dim, len(o), i, s))
        d, size, i, s = min(options, key=lambda t: t[:3])
        o = remaining.pop(i)
        current = np.concatenate([current, o])
        pts_in = in_domain[space.subspace_ids(s)].sum()
        ok &= pts_in == len(current)
        subs.append(s)
        sizes.append(len(o))
    chain = InvariantChain(base, sizes, [s.dim for s in subs], subs, bool(ok))
    if polar is not None:
        d = len(subs) - 1
        chain.perp_ok = all(polar.perp(subs[i]) == subs[d - i - 1] for i in range(d))
        # the next-to-last member is a hyperplane
        chain.hyperplane_ok = d >= 1 and subs[d - 1].dim == space.n - 1
    return chain


# -- Dickson invariant ---------------------------------------------------------------------------

def dickson_in_omega(g: SemilinearMap | np.ndarray, form: Form) -> bool:
    """rank(g - 1) even, for a map preserving a quadratic form in characteristic 2."""
    f = form.field
    if f.p != 2:
        raise GroupError("the Dickson invariant is implemented in characteristic 2 only")
    m = g.matrix if isinstance(g, SemilinearMap) else np.asarray(g, dtype=np.int64)
    if isinstance(g, SemilinearMap) and g.k:
        raise GroupError("Dickson invariant needs a linear map")
    if form.kind != "quadratic" or not preserves_form(form, SemilinearMap(f, m), similitude=False):
        raise GroupError("map does not preserve the quadratic form")
    return mat_rank(f, mat_sub(f, m, np.eye(len(m), dtype=np.int64))) % 2 == 0


# -- generators ------------------------------------------------------------------------------------

def elementary(field: FieldSpec, n: int, i: int, j: int, t: int) -> np.ndarray:
    m = np.eye(n, dtype=np.int64)
    m[i, j] = t
    return m


def sl_generators(field: FieldSpec, n: int) -> list[SemilinearMap]:
    return [SemilinearMap(field, elementary(field, n, i, j, t))
            for i in range(n) for j in range(n) if i != j for t in field.prime_basis()]


def transvection(form: Form, v, a: int) -> np.ndarray:
    """Matrix of x -> x + a B(x, v) v."""
    f = form.field
    v = np.asarray(v, dtype=np.int64)
    col = form.pairing_vectors(v[None, :])[0]  # B(x, v) = x . col
    outer = f.mul_table[col[:, None], f.mul_table[a, v][None, :]]
    return f.add_table[np.eye(form.n, dtype=np.int64), outer]


def sp_generators(form: Form) -> list[SemilinearMap]:
    n, f = form.n, form.field
    vs = [np.eye(n, dtype=np.int64)[i] for i in range(n)]
    vs += [np.eye(n, dtype=np.int64)[i] + np.eye(n, dtype=np.int64)[j]
           for i in range(n) for j in range(i + 1, n)]
    return [SemilinearMap(f, transvection(form, v, a)) for v in vs for a in f.prime_basis()]


def su_generators(form: Form) -> list[SemilinearMap]:
    """Unitary transvections x -> x + a B(x, v) v, v isotropic, a + a^q0 = 0."""
    f = form.field
    conj = f.conj_table()
    traceless = [a for a in range(1, f.q) if f.add_table[a, conj[a]] == 0]
    ps = PolarSpace(form)
    gens = [SemilinearMap(f, transvection(form, v, a)) for v in ps.vectors for a in traceless]
    return [g for g in gens if preserves_form(form, g, similitude=False)]


def siegel(form: Form, u, w) -> np.ndarray:
    """x -> x + B(x,u) w - B(x,w) u - phi(w) B(x,u) u, for u singular and w perpendicular to u."""
    f = form.field
    u = np.asarray(u, dtype=np.int64)
    w = np.asarray(w, dtype=np.int64)
    cu = form.pairing_vectors(u[None, :])[0]
    cw = form.pairing_vectors(w[None, :])[0]
    pw = form.value(w)
    neg = f.neg_table
    # row vector convention: x . (cu^T w - cw^T u - phi(w) cu^T u)
    t1 = f.mul_table[cu[:, None], w[None, :]]
    t2 = f.mul_table[cw[:, None], neg[u][None, :]]
    t3 = f.mul_table[cu[:, None], f.mul_table[neg[pw], u][None, :]]
    m = f.add_table[f.add_table[t1, t2], t3]
    return f.add_table[np.eye(form.n, dtype=np.int64), m]


def omega_generators(form: Form) -> list[SemilinearMap]:
    """Siegel elements over singular basis vectors u and basis vectors w perpendicular to u."""
    f, n = form.field, form.n
    eye = np.eye(n, dtype=np.int64)
    sing = [i for i in range(n) if form.value(eye[i]) == 0]
    out = []
    for i in sing:
        for j in range(n):
            if j == i or form.bilinear(eye[i], eye[j])[0, 0] != 0:
                continue
            for t in f.prime_basis():
                m = siegel(form, eye[i], f.mul_table[t, eye[j]])
                g = SemilinearMap(f, m)
                if not preserves_form(form, g, similitude=False):
                    raise GroupError("Siegel element failed to preserve the form")  # pragma: no cover
                out.append(g)
    return out


def restrict_to_prime_field(g: SemilinearMap) -> SemilinearMap:
    """The same map viewed over GF(p), with GF(q) = GF(p)^e via the basis 1, x, ..., x^(e-1)."""
    f = g.field
    p, e = f.p, f.e
    small = field_of_order(p)
    basis = f.prime_basis()

    def digits(a):
        return [(a // p ** i) % p for i in range(e)]

    def mult(a):
        return np.array([digits(int(f.mul_table[b, a])) for b in basis], dtype=np.int64)

    n = g.n
    big = np.zeros((n * e, n * e), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            big[i * e:(i + 1) * e, j * e:(j + 1) * e] = mult(int(g.matrix[i, j]))
    if g.k:
        fr = f.frob_table(g.k)
        frob = np.array([digits(int(fr[b])) for b in basis], dtype=np.int64)
        big = mat_mul(small, np.kron(np.eye(n, dtype=np.int64), frob), big)
    return SemilinearMap(small, big)


# -- presets --------------------------------------------------------------------------------------

PRESET_PATTERN = re.compile(r"^(SL|Sp|SU|Omega\+|Omega-)\((\d+),(\d+)\)$")

PRESET_NAMES = ["SL(n,q)", "Sp(2m,q)", "SU(n,q0)", "Omega+(2m,q)", "Omega-(2m,q)", "A9_O8plus",
                "SL2_4", "SL2_4_semilinear", "SL3_4_in_GL6_2", "reducible_PG3_2",
                "hexagon_stabilizer_q2"]


def _reducible_pg32() -> GroupPresentation:
    # stabilizer of the hyperplane spanned by the first three basis vectors
    f = field_of_order(2)
    gens = [SemilinearMap(f, elementary(f, 4, i, j, 1)) for i in range(4) for j in range(3) if i != j]
    return GroupPresentation(f, 4, gens, name="reducible_PG3_2")


def preset_group(name: str) -> GroupPresentation:
    m = PRESET_PATTERN.match(name.replace(" ", ""))
    if m:
        kind, n, q = m.group(1), int(m.group(2)), int(m.group(3))
        if kind == "SL":
            f = field_of_order(q)
            return GroupPresentation(f, n, sl_generators(f, n), name=name)
        if kind == "Sp":
            form = standard_form("Sp", n, q)
            return GroupPresentation(form.field, n, sp_generators(form), form, name)
        if kind == "SU":
            form = standard_form("U", n, q)
            return GroupPresentation(form.field, n, su_generators(form), form, name)
        form = standard_form("O+" if kind == "Omega+" else "O-", n, q)
        gens = omega_generators(form)
        if q % 2 == 0 and not all(dickson_in_omega(g, form) for g in gens):
            raise GroupError("a generator has nonzero Dickson invariant")  # pragma: no cover
        return GroupPresentation(form.field, n, gens, form, name)
    if name == "SL2_4":
        f4 = field_of_order(4)
        gens = [restrict_to_prime_field(g) for g in sl_generators(f4, 2)]
        return GroupPresentation(gens[0].field, 4, gens, name=name)
    if name == "SL2_4_semilinear":
        f4 = field_of_order(4)
        lin = sl_generators(f4, 2) + [SemilinearMap(f4, np.eye(2, dtype=np.int64), 1)]
        gens = [restrict_to_prime_field(g) for g in lin]
        return GroupPresentation(gens[0].field, 4, gens, name=name)
    if name == "SL3_4_in_GL6_2":
        f4 = field_of_order(4)
        gens = [restrict_to_prime_field(g) for g in sl_generators(f4, 3)]
        return GroupPresentation(gens[0].field, 6, gens, name=name)
    if name == "reducible_PG3_2":
        return _reducible_pg32()
    if name == "A9_O8plus":
        from .showcase import build_a9
        return build_a9().group
    if name == "hexagon_stabilizer_q2":
        from .hexagon import hexagon_stabilizer_q2
        return hexagon_stabilizer_q2().group
    raise GroupError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")
