"""Vectors, subspaces and projective points over GF(q).

Field elements are handled by their integer indices.  Scalar work (row
reduction on a handful of rows) goes through the field's Cayley tables in
plain Python; bulk work (transforming every point of a space) goes through
numpy with the same tables.

A subspace is stored by its reduced row echelon basis, which is canonical:
two spanning sets of the same subspace produce identical ``Subspace``
values.  Points are normalized so that the first nonzero coordinate is 1,
and a space's points are listed in lexicographic order of coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .ffield import FieldSpec

# Full vector lookup tables are built for spaces up to this many vectors.
MAX_TABLE_VECTORS = 1 << 23


class DimensionError(ValueError):
    pass


# -- bulk arithmetic ---------------------------------------------------------

def mat_mul(field: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product over the field; a is (N, n), b is (n, m)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if field.e == 1:
        return (a @ b) % field.p
    add, mul = field.add_table, field.mul_table
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for i in range(a.shape[1]):
        out = add[out, mul[a[:, i:i + 1], b[i:i + 1, :]]]
    return out


def dot_rows(field: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise sum_i a[:, i] * b[:, i] (b may broadcast)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.broadcast_to(np.asarray(b, dtype=np.int64), a.shape)
    if field.e == 1:
        return (a * b).sum(axis=1) % field.p
    add, mul = field.add_table, field.mul_table
    out = np.zeros(a.shape[0], dtype=np.int64)
    for i in range(a.shape[1]):
        out = add[out, mul[a[:, i], b[:, i]]]
    return out


def normalize_rows(field: FieldSpec, v: np.ndarray) -> np.ndarray:
    """Scale each nonzero row so its first nonzero entry is 1."""
    v = np.asarray(v, dtype=np.int64)
    nz = v != 0
    first = nz.argmax(axis=1)
    lead = v[np.arange(v.shape[0]), first]
    scale = field.inv_table[lead]
    scale[lead == 0] = 1
    if field.e == 1:
        return (v * scale[:, None]) % field.p
    return field.mul_table[v, scale[:, None]]


def encode(q: int, v: np.ndarray) -> np.ndarray:
    """Base-q code with the first coordinate most significant."""
    v = np.asarray(v, dtype=np.int64)
    code = np.zeros(v.shape[0], dtype=np.int64)
    for i in range(v.shape[1]):
        code = code * q + v[:, i]
    return code


def all_vectors(q: int, n: int) -> np.ndarray:
    """Every vector of GF(q)^n in lexicographic (code) order."""
    codes = np.arange(q ** n, dtype=np.int64)
    out = np.empty((q ** n, n), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        out[:, i] = codes % q
        codes //= q
    return out


# -- row reduction -----------------------------------------------------------

def _rref_rows(field: FieldSpec, rows: Sequence[Sequence[int]], ncols: int):
    add, mul, neg, inv = (field.add_table, field.mul_table,
                          field.neg_table, field.inv_table)
    m = [[int(x) for x in r] for r in rows]
    for r in m:
        if len(r) != ncols:
            raise DimensionError("rows of unequal length")
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        s = inv[m[r][c]]
        m[r] = [int(mul[s, x]) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = neg[m[i][c]]
                m[i] = [int(add[x, mul[f, y]]) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return tuple(tuple(row) for row in m[:r]), tuple(pivots)


def nullspace(field: FieldSpec, rows: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """Basis of {x : rows . x = 0} (x as a column)."""
    basis, pivots = _rref_rows(field, rows, ncols) if rows else ((), ())
    free = [c for c in range(ncols) if c not in pivots]
    neg = field.neg_table
    out = []
    for fcol in free:
        x = [0] * ncols
        x[fcol] = 1
        for row, pc in zip(basis, pivots):
            x[pc] = int(neg[row[fcol]])
        out.append(tuple(x))
    return out


# -- subspaces ---------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """A subspace of GF(q)^n, stored by its canonical RREF basis."""

    field: FieldSpec
    n: int
    basis: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def q(self) -> int:
        return self.field.q

    def __repr__(self):
        return f"Subspace(n={self.n}, dim={self.dim}, basis={[list(r) for r in self.basis]})"

    def __len__(self):
        """Number of projective points."""
        q = self.field.q
        return (q ** self.dim - 1) // (q - 1)

    def to_json(self):
        return [list(r) for r in self.basis]

    def _check(self, other: Subspace):
        if other.field != self.field or other.n != self.n:
            raise DimensionError("subspaces live in different ambient spaces")

    def __add__(self, other: Subspace) -> Subspace:
        self._check(other)
        return rref(self.field, self.basis + other.basis, self.n)

    def __and__(self, other: Subspace) -> Subspace:
        self._check(other)
        # x in A and B  <=>  x is orthogonal to the annihilators of both
        ann = annihilator(self) + annihilator(other)
        return rref(self.field, nullspace(self.field, ann, self.n), self.n)

    def contains_vector(self, v: Sequence[int]) -> bool:
        return rref(self.field, self.basis + (tuple(v),), self.n).dim == self.dim

    def __contains__(self, item) -> bool:
        if isinstance(item, Subspace):
            return self.contains(item)
        return self.contains_vector(item)

    def contains(self, other: Subspace) -> bool:
        self._check(other)
        return (self + other).dim == self.dim

    def vectors(self) -> np.ndarray:
        """All q^k vectors of the subspace."""
        k = self.dim
        if k == 0:
            return np.zeros((1, self.n), dtype=np.int64)
        coeffs = all_vectors(self.field.q, k)
        return mat_mul(self.field, coeffs, np.array(self.basis))

    def point_vectors(self) -> np.ndarray:
        """Normalized vectors of the points, lexicographically ordered."""
        if self.dim == 0:
            return np.zeros((0, self.n), dtype=np.int64)
        q = self.field.q
        coeffs = all_vectors(q, self.dim)[1:]
        lead = (coeffs != 0).argmax(axis=1)
        coeffs = coeffs[coeffs[np.arange(len(coeffs)), lead] == 1]
        vecs = mat_mul(self.field, coeffs, np.array(self.basis))
        order = np.argsort(encode(q, vecs), kind="stable")
        return vecs[order]

    def image(self, matrix, k: int = 0) -> Subspace:
        """Image under x -> frob^k(x) . matrix."""
        if self.dim == 0:
            return self
        rows = np.array(self.basis, dtype=np.int64)
        if k:
            rows = self.field.frob_table(k)[rows]
        return rref(self.field, mat_mul(self.field, rows, np.asarray(matrix)).tolist(), self.n)


def rref(field: FieldSpec, rows: Iterable[Sequence[int]], n: int | None = None) -> Subspace:
    rows = [tuple(int(x) for x in r) for r in rows]
    if n is None:
        if not rows:
            raise DimensionError("cannot infer ambient dimension from no rows")
        n = len(rows[0])
    basis, _ = _rref_rows(field, rows, n) if rows else ((), ())
    return Subspace(field, n, basis)


def span(field: FieldSpec, n: int, vectors: Iterable[Sequence[int]]) -> Subspace:
    return rref(field, vectors, n)


def zero_subspace(field: FieldSpec, n: int) -> Subspace:
    return Subspace(field, n, ())


def full_space(field: FieldSpec, n: int) -> Subspace:
    return rref(field, [tuple(int(i == j) for j in range(n)) for i in range(n)], n)


def annihilator(s: Subspace) -> list[tuple[int, ...]]:
    """Basis of {a : a . x = 0 for all x in s} (plain dot product)."""
    return nullspace(s.field, s.basis, s.n)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    return a & b


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    return a + b


def enumerate_points(s: Subspace) -> list[tuple[int, ...]]:
    return [tuple(int(x) for x in v) for v in s.point_vectors()]


# -- projective spaces -------------------------------------------------------

class ProjectiveSpace:
    """The points of GF(q)^n with fast vectorized point lookup.

    Point ids are positions in the canonical enumeration of the full space.
    """

    def __init__(self, field: FieldSpec, n: int):
        if n < 1:
            raise DimensionError("ambient dimension must be positive")
        self.field = field
        self.n = n
        self.q = field.q

    def __repr__(self):
        return f"PG({self.n - 1},{self.q})"

    @cached_property
    def points(self) -> np.ndarray:
        q, n = self.q, self.n
        if q ** n > MAX_TABLE_VECTORS:
            raise DimensionError(f"GF({q})^{n} is too large to enumerate")
        # blocks by position of the leading 1; later leads sort first
        blocks = []
        for i in range(n - 1, -1, -1):
            tail = all_vectors(q, n - 1 - i)
            block = np.zeros((len(tail), n), dtype=np.int64)
            block[:, i] = 1
            block[:, i + 1:] = tail
            blocks.append(block)
        pts = np.concatenate(blocks)
        pts.setflags(write=False)
        return pts

    @property
    def num_points(self) -> int:
        return (self.q ** self.n - 1) // (self.q - 1)

    @cached_property
    def _code_to_id(self) -> np.ndarray:
        q = self.q
        table = np.full(q ** self.n, -1, dtype=np.int32)
        pts = self.points
        ids = np.arange(len(pts), dtype=np.int32)
        for lam in range(1, q):
            if self.field.e == 1:
                scaled = (pts * lam) % q
            else:
                scaled = self.field.mul_table[pts, lam]
            table[encode(q, scaled)] = ids
        return table

    def ids(self, vectors: np.ndarray) -> np.ndarray:
        """Point ids of nonzero vectors (any scaling)."""
        vectors = np.asarray(vectors, dtype=np.int64)
        if vectors.ndim == 1:
            vectors = vectors[None, :]
        out = self._code_to_id[encode(self.q, vectors)]
        if (out < 0).any():
            raise DimensionError("zero vector has no point id")
        return out.astype(np.int64)

    def point_id(self, vector: Sequence[int]) -> int:
        return int(self.ids(np.array([vector]))[0])

    def subspace_ids(self, s: Subspace) -> np.ndarray:
        return self.ids(s.point_vectors()) if s.dim else np.zeros(0, dtype=np.int64)

    def point_subspace(self, pid: int) -> Subspace:
        return rref(self.field, [self.points[pid].tolist()], self.n)

    def image_ids(self, matrix, k: int = 0, ids: np.ndarray | None = None) -> np.ndarray:
        """Point ids of the images of points (all by default) under frob^k then matrix."""
        pts = self.points if ids is None else self.points[ids]
        if k:
            pts = self.field.frob_table(k)[pts]
        return self.ids(mat_mul(self.field, pts, np.asarray(matrix)))

    # hyperplanes are indexed by the point ids of their normal vectors
    def incidence_matrix(self) -> np.ndarray:
        """[h, x] is True when point x lies on hyperplane h."""
        dots = mat_mul(self.field, self.points, self.points.T)
        return dots == 0

    def hyperplanes_through(self, pid: int) -> np.ndarray:
        x = self.points[pid]
        return np.nonzero(dot_rows(self.field, self.points, x) == 0)[0]

    def hyperplane(self, hid: int) -> Subspace:
        a = self.points[hid].tolist()
        return rref(self.field, nullspace(self.field, [a], self.n), self.n)

    def antiflags(self) -> np.ndarray:
        """All (point id, hyperplane id) pairs with the point off the hyperplane."""
        inc = self.incidence_matrix()
        h, x = np.nonzero(~inc)
        order = np.lexsort((h, x))
        return np.stack([x[order], h[order]], axis=1)


@lru_cache(maxsize=64)
def projective_space(field: FieldSpec, n: int) -> ProjectiveSpace:
    return ProjectiveSpace(field, n)


def all_subspaces(field: FieldSpec, n: int) -> list[Subspace]:
    """Every subspace of GF(q)^n (small n and q only), sorted by (dim, basis)."""
    found = {zero_subspace(field, n)}
    frontier = list(found)
    pts = projective_space(field, n).points.tolist()
    while frontier:
        nxt = []
        for s in frontier:
            for v in pts:
                t = rref(field, s.basis + (tuple(v),), n)
                if t.dim == s.dim + 1 and t not in found:
                    found.add(t)
                    nxt.append(t)
        frontier = nxt
    return sorted(found, key=lambda s: (s.dim, s.basis))


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def mat_inverse(field: FieldSpec, m) -> np.ndarray:
    m = np.asarray(m, dtype=np.int64)
    n = m.shape[0]
    aug = np.concatenate([m, identity(n)], axis=1).tolist()
    basis, pivots = _rref_rows(field, aug, 2 * n)
    if len(basis) < n or tuple(pivots[:n]) != tuple(range(n)):
        raise ZeroDivisionError("singular matrix")
    return np.array([row[n:] for row in basis], dtype=np.int64)


def mat_rank(field: FieldSpec, m) -> int:
    m = np.asarray(m, dtype=np.int64)
    if m.size == 0:
        return 0
    return len(_rref_rows(field, m.tolist(), m.shape[1])[0])


def mat_sub(field: FieldSpec, a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if field.e == 1:
        return (a - b) % field.p
    return field.add_table[a, field.neg_table[b]]


def points_of_ids(space: ProjectiveSpace, ids) -> list[tuple[int, ...]]:
    return [tuple(int(x) for x in space.points[i]) for i in ids]

