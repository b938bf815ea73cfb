"""Classical forms and their polar spaces.

Three kinds of form are supported:

* symplectic: an alternating Gram matrix G, B(x, y) = x G y^T;
* quadratic: a coefficient table Q with phi(x) = sum_{i<=j} Q[i, j] x_i x_j,
  and B its polarization (Gram matrix Q + Q^T);
* hermitian over GF(q0^2): B(x, y) = x G conj(y)^T with conj(a) = a^q0.

Unitary spaces are labelled by (n, q0) even though the ambient field has
q0^2 elements.

A ``PolarSpace`` wraps a form with the list of its singular (or isotropic)
points, indexed in the canonical order of the ambient projective space.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .ffield import FieldSpec, field_of_order
from .linear import (DimensionError, Subspace, dot_rows, mat_inverse, mat_mul, mat_rank, nullspace,
                     projective_space, rref, span, zero_subspace)


class FormError(ValueError):
    pass


# Lemma-table constant per geometry type: |T^perp - W^perp| = q^(2r - i + c)
TYPE_CONSTANT = {
    "Sp": Fraction(0),
    "O+": Fraction(-1),
    "O": Fraction(0),
    "O-": Fraction(1),
    "U-even": Fraction(-1, 2),
    "U-odd": Fraction(1, 2),
}

KIND_ALIASES = {
    "sp": "Sp", "symplectic": "Sp",
    "o+": "O+", "orthogonal+": "O+", "plus": "O+",
    "o-": "O-", "orthogonal-": "O-", "minus": "O-",
    "o": "O", "orthogonal": "O", "parabolic": "O",
    "u": "U", "unitary": "U", "hermitian": "U",
}


def canonical_kind(kind: str) -> str:
    try:
        return KIND_ALIASES[kind.lower()]
    except KeyError:
        raise FormError(f"unknown polar kind {kind!r}") from None


@dataclass(eq=False)
class Form:
    kind: str  # symplectic | quadratic | hermitian
    field: FieldSpec
    gram: np.ndarray
    quad: np.ndarray | None = None

    def __post_init__(self):
        self.gram = np.asarray(self.gram, dtype=np.int64)
        n = self.gram.shape[0]
        if self.gram.shape != (n, n):
            raise FormError("Gram matrix must be square")
        f = self.field
        if self.kind == "symplectic":
            if (np.diag(self.gram) != 0).any() or (self.gram != f.neg_table[self.gram.T]).any():
                raise FormError("symplectic Gram matrix must be alternating")
        elif self.kind == "quadratic":
            if self.quad is None:
                raise FormError("quadratic form needs a coefficient table")
            self.quad = np.triu(np.asarray(self.quad, dtype=np.int64))
        elif self.kind == "hermitian":
            conj = f.conj_table()
            if (self.gram != conj[self.gram.T]).any():
                raise FormError("hermitian Gram matrix must be conjugate symmetric")
        else:
            raise FormError(f"unknown form kind {self.kind!r}")

    @property
    def n(self) -> int:
        return self.gram.shape[0]

    @classmethod
    def quadratic(cls, field: FieldSpec, quad) -> Form:
        quad = np.triu(np.asarray(quad, dtype=np.int64))
        gram = field.add_table[quad, quad.T]
        return cls("quadratic", field, gram, quad)

    def _conj(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "hermitian":
            return self.field.conj_table()[x]
        return x

    def pairing_vectors(self, ys) -> np.ndarray:
        """Rows w with B(x, y) = x . w for every x."""
        ys = np.atleast_2d(np.asarray(ys, dtype=np.int64))
        return mat_mul(self.field, self._conj(ys), self.gram.T)

    def bilinear(self, xs, ys) -> np.ndarray:
        """Matrix of B(x, y) for rows x of xs and y of ys."""
        xs = np.atleast_2d(np.asarray(xs, dtype=np.int64))
        return mat_mul(self.field, xs, self.pairing_vectors(ys).T)

    def values(self, xs) -> np.ndarray:
        """phi(x) for quadratic forms, B(x, x) otherwise."""
        xs = np.atleast_2d(np.asarray(xs, dtype=np.int64))
        f = self.field
        if self.kind == "quadratic":
            out = np.zeros(xs.shape[0], dtype=np.int64)
            for i, j in zip(*np.nonzero(self.quad)):
                term = f.mul_table[f.mul_table[xs[:, i], xs[:, j]], self.quad[i, j]]
                out = f.add_table[out, term]
            return out
        return dot_rows(f, xs, self.pairing_vectors(xs))

    def value(self, x) -> int:
        return int(self.values([x])[0])

    def radical(self) -> Subspace:
        rows = self.gram.T.tolist()
        return span(self.field, self.n, nullspace(self.field, rows, self.n))

    def is_nondegenerate(self) -> bool:
        return mat_rank(self.field, self.gram) == self.n

    def preserved_by(self, matrix, k: int = 0) -> bool:
        """True when x -> frob^k(x) . matrix preserves the form exactly."""
        m = np.asarray(matrix, dtype=np.int64)
        f = self.field
        frob = f.frob_table(k)
        eye = np.eye(self.n, dtype=np.int64)
        imgs = mat_mul(f, frob[eye], m)
        if (self.bilinear(imgs, imgs) != frob[self.gram]).any():
            return False
        if self.kind == "quadratic":
            # phi agrees on the basis; B agreeing on pairs then fixes phi everywhere
            return (self.values(imgs) == frob[np.diag(self.quad)]).all()
        return True

    def to_json(self):
        out = {"kind": self.kind, "q": self.field.q, "gram": self.gram.tolist()}
        if self.quad is not None:
            out["quadratic"] = self.quad.tolist()
        return out


def least_anisotropic_constant(field: FieldSpec) -> int:
    """Least element index a with t^2 + t + a irreducible over the field."""
    add, mul = field.add_table, field.mul_table
    squares_plus = {int(add[mul[t, t], t]) for t in range(field.q)}
    neg = field.neg_table
    for a in range(field.q):
        if int(neg[a]) not in squares_plus:
            return a
    raise FormError("no anisotropic constant")  # pragma: no cover


def _hyperbolic_pairs(quad, start, r):
    for i in range(r):
        quad[start + 2 * i, start + 2 * i + 1] = 1


def standard_form(kind: str, n: int, q: int) -> Form:
    """Standard form of the given type (for unitary, q is the subfield order q0)."""
    kind = canonical_kind(kind)
    if kind == "Sp":
        if n % 2:
            raise FormError("symplectic spaces need even dimension")
        f = field_of_order(q)
        g = np.zeros((n, n), dtype=np.int64)
        for i in range(0, n, 2):
            g[i, i + 1] = 1
            g[i + 1, i] = int(f.neg_table[1])
        return Form("symplectic", f, g)
    if kind == "U":
        f = field_of_order(q * q)
        return Form("hermitian", f, np.eye(n, dtype=np.int64))
    f = field_of_order(q)
    quad = np.zeros((n, n), dtype=np.int64)
    if kind == "O+":
        if n % 2:
            raise FormError("O+ needs even dimension")
        _hyperbolic_pairs(quad, 0, n // 2)
    elif kind == "O":
        if n % 2 == 0:
            raise FormError("parabolic quadrics need odd dimension")
        quad[0, 0] = 1
        _hyperbolic_pairs(quad, 1, (n - 1) // 2)
    elif kind == "O-":
        if n % 2 or n < 2:
            raise FormError("O- needs even dimension")
        _hyperbolic_pairs(quad, 0, n // 2 - 1)
        a, b = n - 2, n - 1
        quad[a, a] = 1
        quad[a, b] = 1
        quad[b, b] = least_anisotropic_constant(f)
    return Form.quadratic(f, quad)


def expected_rank(kind: str, n: int) -> int:
    kind = canonical_kind(kind)
    if kind == "O-":
        return n // 2 - 1
    return n // 2


def expected_point_count(kind: str, n: int, q: int) -> int:
    """Closed-form number of singular/isotropic points (q0 for unitary)."""
    kind = canonical_kind(kind)
    r = expected_rank(kind, n)
    if kind in ("Sp", "O"):
        return (q ** (2 * r) - 1) // (q - 1)
    if kind == "O+":
        return (q ** (r - 1) + 1) * (q ** r - 1) // (q - 1)
    if kind == "O-":
        return (q ** (r + 1) + 1) * (q ** r - 1) // (q - 1)
    s = (-1) ** n
    return (q ** n - s) * (q ** (n - 1) + s) // (q * q - 1)


def type_label(kind: str, n: int) -> str:
    kind = canonical_kind(kind)
    if kind == "U":
        return "U-even" if n % 2 == 0 else "U-odd"
    return kind


class PolarSpace:
    """A form together with its singular points.

    ``omega`` holds ambient point ids of the singular points (isotropic for
    symplectic and hermitian forms), in canonical order; an index into
    ``omega`` is what the rest of the package calls a polar point index.
    """

    def __init__(self, form: Form, label: str | None = None, q_label: int | None = None):
        self.form = form
        self.field = form.field
        self.n = form.n
        self.label = label
        self.q_label = q_label if q_label is not None else form.field.q
        self.space = projective_space(form.field, form.n)

    def __repr__(self):
        name = self.label or self.form.kind
        return f"PolarSpace({name}({self.n},{self.q_label}))"

    @cached_property
    def omega(self) -> np.ndarray:
        vals = self.form.values(self.space.points)
        ids = np.nonzero(vals == 0)[0]
        ids.setflags(write=False)
        return ids

    @cached_property
    def vectors(self) -> np.ndarray:
        v = self.space.points[self.omega]
        v.setflags(write=False)
        return v

    @property
    def num_points(self) -> int:
        return len(self.omega)

    @cached_property
    def _ambient_to_index(self) -> np.ndarray:
        t = np.full(self.space.num_points, -1, dtype=np.int64)
        t[self.omega] = np.arange(len(self.omega))
        return t

    def index_of(self, vectors) -> np.ndarray:
        """Polar point indices of singular vectors (-1 for nonsingular)."""
        return self._ambient_to_index[self.space.ids(vectors)]

    def indices(self, s: Subspace) -> np.ndarray:
        idx = self.index_of(s.point_vectors()) if s.dim else np.zeros(0, dtype=np.int64)
        if (idx < 0).any():
            raise FormError("subspace is not totally singular")
        return np.sort(idx)

    @cached_property
    def type_constant(self) -> Fraction | None:
        if self.label is None:
            return None
        return TYPE_CONSTANT[self.label]

    def perp_mask(self, vectors) -> np.ndarray:
        """Boolean mask over omega of points perpendicular to all given vectors."""
        vectors = np.asarray(vectors, dtype=np.int64)
        if vectors.size == 0:
            return np.ones(self.num_points, dtype=bool)
        w = self.form.pairing_vectors(vectors)
        return (mat_mul(self.field, self.vectors, w.T) == 0).all(axis=1)

    @cached_property
    def collinearity(self) -> np.ndarray:
        """[a, b] is True for distinct perpendicular singular points."""
        if self.num_points > 20000:
            raise DimensionError("too many points for a dense collinearity matrix")
        adj = self.form.bilinear(self.vectors, self.vectors) == 0
        np.fill_diagonal(adj, False)
        adj.setflags(write=False)
        return adj

    # -- subspaces --

    def perp(self, s: Subspace) -> Subspace:
        if s.dim == 0:
            return span(self.field, self.n, np.eye(self.n, dtype=np.int64).tolist())
        # B(b, y) = 0  <=>  conj(b G) . y = 0 after applying conj to both sides
        rows = np.array(s.basis, dtype=np.int64)
        w = mat_mul(self.field, rows, self.form.gram)
        if self.form.kind == "hermitian":
            w = self.field.conj_table()[w]
        return span(self.field, self.n, nullspace(self.field, w.tolist(), self.n))

    def is_singular(self, s: Subspace) -> bool:
        if s.dim == 0:
            return True
        b = np.array(s.basis, dtype=np.int64)
        return bool((self.form.values(b) == 0).all() and (self.form.bilinear(b, b) == 0).all())

    @cached_property
    def rank(self) -> int:
        """Witt index, by greedy extension of a totally singular subspace."""
        s = zero_subspace(self.field, self.n)
        while True:
            cand = self.perp_mask(s.basis if s.dim else np.zeros((0, self.n)))
            if s.dim:
                cand[self.indices(s)] = False
            hits = np.nonzero(cand)[0]
            if len(hits) == 0:
                return s.dim
            s = s + span(self.field, self.n, [self.vectors[hits[0]].tolist()])

    def _span_with(self, idx: np.ndarray, y: int) -> np.ndarray:
        """Polar indices of <S, y> given the polar indices of S's points."""
        f = self.field
        v = self.vectors[idx]
        yv = self.vectors[y]
        parts = [idx, np.array([y])]
        for lam in range(1, f.q):
            parts.append(self.index_of(f.add_table[v, f.mul_table[lam, yv]]))
        return np.unique(np.concatenate(parts))

    def ts_subspaces(self, k: int) -> list[Subspace]:
        """All totally singular subspaces of dimension k, sorted by basis."""
        cache = self.__dict__.setdefault("_ts_cache", {})
        if k not in cache:
            cache[k] = self._enumerate_ts(k)
        return list(cache[k])

    def _enumerate_ts(self, k: int) -> list[Subspace]:
        if k == 0:
            return [zero_subspace(self.field, self.n)]
        # level entries: point-index tuple -> spanning polar indices
        level = {(i,): [i] for i in range(self.num_points)}
        for _ in range(k - 1):
            nxt = {}
            for key, gens in level.items():
                idx = np.array(key)
                cand = self.perp_mask(self.vectors[gens])
                covered = np.zeros(self.num_points, dtype=bool)
                covered[idx] = True
                for y in np.nonzero(cand & ~covered)[0]:
                    if covered[y]:
                        continue
                    t = self._span_with(idx, int(y))
                    covered[t] = True
                    nxt.setdefault(tuple(t.tolist()), gens + [int(y)])
            level = nxt
        out = [span(self.field, self.n, self.vectors[g].tolist()) for g in level.values()]
        return sorted(out, key=lambda s: s.basis)

    def max_ts_subspaces(self) -> list[Subspace]:
        return self.ts_subspaces(self.rank)

    def incidence(self, subspaces: Sequence[Subspace]) -> np.ndarray:
        """Boolean matrix [subspace, polar point]."""
        m = np.zeros((len(subspaces), self.num_points), dtype=bool)
        for i, s in enumerate(subspaces):
            m[i, self.indices(s)] = True
        return m

    def random_flag(self, rng: np.random.Generator, length: int) -> list[Subspace]:
        """A chain 0 < S_1 < ... < S_length of t.s. subspaces from random points."""
        s = zero_subspace(self.field, self.n)
        chain = [s]
        for _ in range(length):
            cand = self.perp_mask(s.basis if s.dim else np.zeros((0, self.n)))
            if s.dim:
                cand[self.indices(s)] = False
            hits = np.nonzero(cand)[0]
            if len(hits) == 0:
                raise FormError("flag cannot be extended beyond the rank")
            y = hits[rng.integers(len(hits))]
            s = s + span(self.field, self.n, [self.vectors[y].tolist()])
            chain.append(s)
        return chain


def standard_space(kind: str, n: int, q: int, validate: bool = True) -> PolarSpace:
    kind = canonical_kind(kind)
    form = standard_form(kind, n, q)
    ps = PolarSpace(form, label=type_label(kind, n), q_label=q)
    if validate:
        want = expected_point_count(kind, n, q)
        if ps.num_points != want:
            raise FormError(f"{ps!r}: {ps.num_points} points, expected {want}")
        if ps.rank != expected_rank(kind, n):
            raise FormError(f"{ps!r}: rank {ps.rank}, expected {expected_rank(kind, n)}")
    return ps


# -- counting lemma ------------------------------------------------------------

@dataclass
class ChainCount:
    i: int
    t_basis: list
    w_basis: list
    count: int
    expected: int

    @property
    def ok(self) -> bool:
        return self.count == self.expected


def predicted_difference(ps: PolarSpace, i: int) -> int:
    """q^(2r - i + c), with q the order of the ambient field."""
    expo = 2 * ps.rank - i + ps.type_constant
    if ps.form.kind == "hermitian":
        q0 = ps.field.sqrt_order
        e2 = 2 * expo
        if e2.denominator != 1:
            raise FormError("non-integral exponent")
        return q0 ** int(e2)
    if expo.denominator != 1:
        raise FormError("non-integral exponent")
    return ps.field.q ** int(expo)


def verify_9_2(ps: PolarSpace, i: int, chains: int = 6, seed: int = 0) -> list[ChainCount]:
    """Count |T^perp - W^perp| on singular points for random chains T < W.

    T has dimension i - 1 and W dimension i.  Returns one record per chain.
    """
    r = ps.rank
    if not 1 <= i <= r:
        raise FormError(f"i must lie in 1..{r}")
    want = predicted_difference(ps, i)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(chains):
        flag = ps.random_flag(rng, i)
        t, w = flag[i - 1], flag[i]
        mt = ps.perp_mask(t.basis if t.dim else np.zeros((0, ps.n)))
        mw = ps.perp_mask(w.basis)
        out.append(ChainCount(i, t.to_json(), w.to_json(), int((mt & ~mw).sum()), want))
    return out


# -- orthogonal solids ------------------------------------------------------------

def _dims_from_counts(counts: np.ndarray, q: int) -> np.ndarray:
    # (q^k - 1)/(q - 1) points  ->  k
    sizes = {(q ** k - 1) // (q - 1): k for k in range(0, 64)}
    return np.vectorize(sizes.__getitem__)(counts)


@dataclass
class SolidFamilies:
    solids: list[Subspace]
    family: np.ndarray  # 0 or 1 per solid
    incidence: np.ndarray  # [solid, polar point]
    meet_dims: np.ndarray  # pairwise intersection dimensions

    def members(self, fam: int) -> list[int]:
        return [int(i) for i in np.nonzero(self.family == fam)[0]]


def solid_families(ps: PolarSpace) -> SolidFamilies:
    if ps.label != "O+" and not (ps.form.kind == "quadratic" and ps.rank * 2 == ps.n):
        raise FormError("solid families exist only for O+ spaces")
    r = ps.rank
    solids = ps.max_ts_subspaces()
    inc = ps.incidence(solids)
    counts = inc.astype(np.int64) @ inc.T.astype(np.int64)
    dims = _dims_from_counts(counts, ps.field.q)
    same = (dims % 2) == (r % 2)
    family = np.where(same[0], 0, 1)
    # same-family relation must be an equivalence with these two classes
    if not (same == (family[:, None] == family[None, :])).all():
        raise FormError("intersection parity is not an equivalence relation")
    return SolidFamilies(solids, family, inc, dims)


# -- symplectic model of the parabolic quadric in even characteristic -------------

def symplectic_basis(field: FieldSpec, gram) -> np.ndarray:
    """Rows b_0..b_{2m-1} with B(b_2i, b_2i+1) = 1 and all other pairs 0.

    Uses symplectic Gram-Schmidt on the standard basis.
    """
    g = np.asarray(gram, dtype=np.int64)
    n = g.shape[0]
    if n % 2 or mat_rank(field, g) != n:
        raise FormError("need a nondegenerate alternating form")
    add, mul, neg, inv = field.add_table, field.mul_table, field.neg_table, field.inv_table

    def b(x, y):
        return int(mat_mul(field, np.array([x]), mat_mul(field, g, np.array(y)[:, None]))[0, 0])

    def comb(x, c, y):
        return [int(add[a, mul[c, bb]]) for a, bb in zip(x, y)]

    pool = [list(map(int, row)) for row in np.eye(n, dtype=np.int64)]
    out = []
    while pool:
        x = pool.pop(0)
        if not any(x):
            continue
        partner = next((j for j, y in enumerate(pool) if b(x, y)), None)
        if partner is None:
            raise FormError("degenerate remainder")  # pragma: no cover
        y = pool.pop(partner)
        y = [int(mul[inv[b(x, y)], c]) for c in y]
        out.extend([x, y])
        # project the remaining vectors onto <x, y>^perp
        new_pool = []
        for z in pool:
            z = comb(z, int(neg[b(z, y)]), x)  # now B(z, y) = 0
            z = comb(z, int(b(z, x)), y)  # now B(z, x) = 0 as well
            new_pool.append(z)
        pool = new_pool
    basis = np.array(out, dtype=np.int64)
    chk = mat_mul(field, mat_mul(field, basis, g), basis.T)
    std = standard_form("Sp", n, field.q).gram
    if (chk != std).any():
        raise FormError("symplectic Gram-Schmidt failed")  # pragma: no cover
    return basis


@dataclass
class RadicalQuotient:
    """Projection of a degenerate quadric onto a standard symplectic space."""

    source: PolarSpace
    target: PolarSpace
    projection: np.ndarray  # n x (n-1) matrix: source vector -> standard Sp coords
    point_map: np.ndarray  # source polar index -> target polar index

    def map_subspace(self, s: Subspace) -> Subspace:
        return s.image(self.projection) if s.dim else zero_subspace(self.target.field, self.target.n)

    def map_vectors(self, vecs) -> np.ndarray:
        return mat_mul(self.source.field, np.atleast_2d(vecs), self.projection)


def radical_quotient(ps: PolarSpace) -> RadicalQuotient:
    """Quotient of a quadric with one-dimensional radical, in characteristic 2."""
    f = ps.field
    if f.p != 2:
        raise FormError("radical quotient to a symplectic space needs even q")
    rad = ps.form.radical()
    if rad.dim != 1:
        raise FormError(f"radical has dimension {rad.dim}, expected 1")
    r = np.array(rad.basis[0])
    j = int(np.nonzero(r)[0][0])  # r[j] == 1 in RREF
    n = ps.n
    keep = [c for c in range(n) if c != j]
    # x -> x - x_j r, then drop coordinate j
    proj = np.zeros((n, n - 1), dtype=np.int64)
    for col, c in enumerate(keep):
        proj[c, col] = 1
        proj[j, col] = int(f.neg_table[r[c]])
    g = ps.form.gram[np.ix_(keep, keep)]
    basis = symplectic_basis(f, g)
    proj = mat_mul(f, proj, mat_inverse(f, basis))
    target = standard_space("Sp", n - 1, f.q)
    imgs = mat_mul(f, ps.vectors, proj)
    point_map = target.index_of(imgs)
    rq = RadicalQuotient(ps, target, proj, point_map)
    # the projected form must agree with the target's standard form
    if (target.form.bilinear(imgs, imgs) != ps.form.bilinear(ps.vectors, ps.vectors)).any():
        raise FormError("quotient does not carry the induced symplectic form")
    return rq


@dataclass
class BijectionReport:
    m: int
    q: int
    orthogonal_points: int
    symplectic_points: int
    bijective: bool
    orthogonal_lines: int
    symplectic_lines: int
    lines_match: bool

    @property
    def ok(self) -> bool:
        return self.bijective and self.lines_match


def sp_o_bijection(m: int, q: int) -> tuple[RadicalQuotient, BijectionReport]:
    """Singular points/lines of O(2m+1, q) against isotropic ones of Sp(2m, q), q even."""
    if q % 2:
        raise FormError("the orthogonal-symplectic bijection needs even q")
    o = standard_space("O", 2 * m + 1, q)
    rq = radical_quotient(o)
    sp = rq.target
    pm = rq.point_map
    bij = (pm >= 0).all() and len(np.unique(pm)) == len(pm) == sp.num_points
    o_lines = {tuple(sorted(pm[o.indices(l)].tolist())) for l in o.ts_subspaces(2)}
    s_lines = {tuple(sp.indices(l).tolist()) for l in sp.ts_subspaces(2)}
    report = BijectionReport(m, q, o.num_points, sp.num_points, bool(bij),
                             len(o_lines), len(s_lines), o_lines == s_lines)
    return rq, report


# -- hyperplane sections of hyperbolic quadrics -----------------------------------

class HypothesisViolation(Exception):
    def __init__(self, solid: Subspace, meet: int):
        super().__init__(f"solid {solid.to_json()} meets the set in {meet} points")
        self.solid = solid
        self.meet = meet


class NoPoleFound(Exception):
    """The hypothesis holds but no nonsingular point has the set as its section."""


def nonsingular_points(ps: PolarSpace) -> np.ndarray:
    """Ambient ids of the nonsingular points."""
    mask = np.ones(ps.space.num_points, dtype=bool)
    mask[ps.omega] = False
    return np.nonzero(mask)[0]


def section_masks(ps: PolarSpace, ambient_ids) -> np.ndarray:
    """[k, polar point]: whether the point lies in v_k^perp."""
    vs = ps.space.points[np.asarray(ambient_ids)]
    return ps.form.bilinear(vs, ps.vectors) == 0


def check_section_hypothesis(ps: PolarSpace, phi_mask: np.ndarray, solids=None, inc=None):
    """Raise HypothesisViolation unless every solid meets the set in an (r-1)-space."""
    r = ps.rank
    q = ps.field.q
    if solids is None:
        solids = ps.max_ts_subspaces()
    if inc is None:
        inc = ps.incidence(solids)
    want = (q ** (r - 1) - 1) // (q - 1)
    meets = inc.astype(np.int64) @ phi_mask.astype(np.int64)
    for s_idx in range(len(solids)):
        if meets[s_idx] != want:
            raise HypothesisViolation(solids[s_idx], int(meets[s_idx]))
        pts = ps.vectors[inc[s_idx] & phi_mask]
        if mat_rank(ps.field, pts) != r - 1:
            raise HypothesisViolation(solids[s_idx], int(meets[s_idx]))


def theorem_10_3_check(ps: PolarSpace, phi: Iterable[int], solids=None, inc=None,
                       check_rank: bool = True) -> list[int]:
    """Recover the nonsingular point(s) v with phi = Omega meet v^perp.

    ``phi`` is a collection of polar point indices.  Returns the ambient ids of
    every such v; for rank at least 3 exactly one is expected.
    """
    if check_rank and ps.rank < 3:
        raise FormError("the section theorem needs rank at least 3")
    mask = np.zeros(ps.num_points, dtype=bool)
    mask[list(phi)] = True
    check_section_hypothesis(ps, mask, solids, inc)
    cands = nonsingular_points(ps)
    secs = section_masks(ps, cands)
    hits = [int(v) for v, row in zip(cands, secs) if (row == mask).all()]
    if not hits:
        raise NoPoleFound("no nonsingular point has this section")
    return hits


@dataclass
class GridRemark:
    q: int
    hypothesis_sets: int
    conics: int


def grid_sets(q: int) -> GridRemark:
    """Sets meeting every line of the O+(4, q) grid in one point, and the conics among them."""
    import itertools

    ps = standard_space("O+", 4, q)
    fam = solid_families(ps)
    a, b = fam.members(0), fam.members(1)
    inc = fam.incidence
    # grid cell (i, j) is the point where line a_i meets line b_j
    cell = np.full((len(a), len(b)), -1)
    for i, la in enumerate(a):
        for j, lb in enumerate(b):
            both = np.nonzero(inc[la] & inc[lb])[0]
            cell[i, j] = both[0]
    conic_keys = set()
    for row in section_masks(ps, nonsingular_points(ps)):
        conic_keys.add(tuple(np.nonzero(row)[0].tolist()))
    lines = fam.solids
    total = conics = 0
    for perm in itertools.permutations(range(len(b))):
        pts = tuple(sorted(int(cell[i, perm[i]]) for i in range(len(a))))
        mask = np.zeros(ps.num_points, dtype=bool)
        mask[list(pts)] = True
        check_section_hypothesis(ps, mask, lines, inc)
        total += 1
        conics += pts in conic_keys
    return GridRemark(q, total, conics)
