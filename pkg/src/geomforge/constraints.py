"""Parameter arithmetic: strongly regular graph eigenvalues, rank 4 splits,
divisibility eliminations, primitive prime divisors, and the embedding case
split.

Everything here is exact integer (or Fraction) arithmetic.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ffield import prime_power


class ParameterError(ValueError):
    pass


# -- rank 3 -------------------------------------------------------------------

@dataclass(frozen=True)
class Rank3Params:
    k: int
    l: int
    lam: int
    mu: int
    r: int
    s: int

    @property
    def v(self) -> int:
        return 1 + self.k + self.l

    def identities(self) -> dict[str, bool]:
        k, l, lam, mu, r, s = self.k, self.l, self.lam, self.mu, self.r, self.s
        return {
            "mu = k + rs": mu == k + r * s,
            "k(k - lambda - 1) = l mu": k * (k - lam - 1) == l * mu,
            "lambda = mu + r + s": lam == mu + r + s,
            # a common misprint of the identity above; reported, never used
            "lambda = k + r + rs": lam == k + r + r * s,
        }

    def to_json(self):
        return {"k": self.k, "l": self.l, "lambda": self.lam, "mu": self.mu, "r": self.r,
                "s": self.s, "identities": self.identities()}


def rank3_from_graph(k: int, l: int, lam: int, mu: int) -> Rank3Params:
    """Eigenvalues r > s from r + s = lambda - mu and rs = mu - k."""
    if min(k, l, lam, mu) < 0:
        raise ParameterError("parameters must be nonnegative")
    if mu == 0 or mu == k or l == 0:
        raise ParameterError("degenerate parameters (disjoint cliques or complete multipartite)")
    if k * (k - lam - 1) != l * mu:
        raise ParameterError(f"k(k-lambda-1) = {k * (k - lam - 1)} differs from l mu = {l * mu}")
    b = lam - mu
    disc = b * b + 4 * (k - mu)
    root = math.isqrt(disc) if disc >= 0 else -1
    if root < 0 or root * root != disc or (b + root) % 2:
        raise ParameterError("eigenvalues are not integers")
    r, s = (b + root) // 2, (b - root) // 2
    return Rank3Params(k, l, lam, mu, r, s)


def srg_parameters(adj) -> tuple[int, int, int, int]:
    """(k, l, lambda, mu) of a strongly regular graph by counting neighbours."""
    a = np.asarray(adj, dtype=bool)
    n = a.shape[0]
    deg = a.sum(axis=1)
    if (deg != deg[0]).any():
        raise ParameterError("graph is not regular")
    common = a.astype(np.int64) @ a.astype(np.int64)
    off = ~np.eye(n, dtype=bool)
    lam_vals = np.unique(common[a])
    mu_vals = np.unique(common[~a & off])
    if len(lam_vals) != 1 or len(mu_vals) != 1:
        raise ParameterError("graph is not strongly regular")
    k = int(deg[0])
    return k, n - 1 - k, int(lam_vals[0]), int(mu_vals[0])


# -- rank 4 split ----------------------------------------------------------------

@dataclass
class SideCheck:
    side: str  # which eigenvalue's eigenspace splits: "r" or "s"
    t: Fraction
    conditions: dict[str, bool]
    phi: Fraction | None = None

    @property
    def ok(self) -> bool:
        return all(self.conditions.values())

    @property
    def first_failure(self) -> str | None:
        return next((c for c, v in self.conditions.items() if not v), None)


@dataclass
class Rank4Verdict:
    params: Rank3Params
    j: int
    jt: Fraction | None
    sides: list[SideCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return any(s.ok for s in self.sides)

    @property
    def passing_side(self) -> str | None:
        return next((s.side for s in self.sides if s.ok), None)

    def to_json(self):
        return {"j": self.j, "jt": None if self.jt is None else str(self.jt), "ok": self.ok,
                "sides": [{"side": s.side, "t": str(s.t), "phi": None if s.phi is None else str(s.phi),
                           "conditions": s.conditions} for s in self.sides]}


def rank4_feasible(p: Rank3Params, j: int, jt: Fraction | int | None = None) -> Rank4Verdict:
    """Check the rank 4 split conditions for a split of Gamma(x) into j + (l - j).

    ``jt`` is |Gamma_1(x) meet Delta(y)| for y in Gamma_2(x); when omitted,
    t is solved from the eigenvalue condition on each side.  Both assignments
    of the splitting eigenspace are tried.
    """
    if not 0 < j < p.l:
        raise ParameterError(f"need 0 < j < l = {p.l}")
    k, l, r, s = p.k, p.l, p.r, p.s
    verdict = Rank4Verdict(p, j, None if jt is None else Fraction(jt))
    for side, a, b in (("r", r, s), ("s", s, r)):
        # splitting eigenvalue a, other eigenvalue b: a(b + 1) + l t = 0
        t_forced = Fraction(-a * (b + 1), l)
        t = t_forced if jt is None else Fraction(jt) / j
        conds = {"12.1": a * (b + 1) + l * t == 0}
        phi = Fraction(-j * (b + 1), l)
        conds["12.2"] = phi.denominator == 1
        conds["12.3"] = j % (l // math.gcd(l, b + 1)) == 0
        conds["12.4"] = (j * (l - j) * a * (b + 1)) % (k * l) == 0
        verdict.sides.append(SideCheck(side, t, conds, phi))
    return verdict


# -- divisibility eliminations ----------------------------------------------------

SUBDEGREE_PAIRS = [(2, 1), (3, 1), (4, 2), (5, 1), (9, 3)]


@dataclass
class EliminationRow:
    q: int
    h: int
    m: int
    minus_divides: bool  # q^(m-1) - 1 | (q-1) h (q-h)
    plus_divides: bool  # q^(m-1) + 1 | (q-1) h (q-h)
    unreduced_r: bool  # kl | j(l-j) r(s+1)
    unreduced_s: bool  # kl | j(l-j) s(r+1)

    @property
    def eliminated(self) -> bool:
        return not (self.minus_divides or self.plus_divides)

    @property
    def consistent(self) -> bool:
        return self.eliminated == (not (self.unreduced_r or self.unreduced_s))


def elimination_row(q: int, h: int, m: int) -> EliminationRow:
    target = (q - 1) * h * (q - h)
    a = q ** (m - 1)
    k = q * (q ** (2 * m - 2) - 1) // (q - 1)
    l = q ** (2 * m - 1)
    j = q ** (2 * m - 2) * h
    r, s = a - 1, -a - 1
    return EliminationRow(
        q, h, m, target % (a - 1) == 0, target % (a + 1) == 0,
        (j * (l - j) * r * (s + 1)) % (k * l) == 0,
        (j * (l - j) * s * (r + 1)) % (k * l) == 0)


def section13_eliminate(m_range=range(3, 21), pairs=SUBDEGREE_PAIRS) -> list[EliminationRow]:
    return [elimination_row(q, h, m) for q, h in pairs for m in m_range]


def elimination_csv(rows: list[EliminationRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["q", "h", "m", "minus_divides", "plus_divides", "unreduced_r", "unreduced_s",
                "eliminated"])
    for row in rows:
        w.writerow([row.q, row.h, row.m, int(row.minus_divides), int(row.plus_divides),
                    int(row.unreduced_r), int(row.unreduced_s), int(row.eliminated)])
    return buf.getvalue()


# -- primitive prime divisors -------------------------------------------------------

def prime_factors(n: int) -> list[int]:
    """Distinct prime factors by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class ZsigmondyResult:
    q: int
    k: int
    prime: int | None
    exception: str | None  # "mersenne_k2" | "q_k_64"

    def to_json(self):
        return {"q": self.q, "k": self.k, "prime": self.prime, "exception": self.exception}


def is_primitive_divisor(r: int, q: int, k: int) -> bool:
    """r | q^k - 1 and r divides no p^i - 1 with 1 < p^i < q^k."""
    p, e = prime_power(q)
    if (q ** k - 1) % r:
        return False
    return all((p ** i - 1) % r for i in range(1, e * k))


def zsigmondy(q: int, k: int) -> ZsigmondyResult:
    p, e = prime_power(q)
    if k < 2:
        raise ParameterError("k must exceed 1")
    for r in prime_factors(q ** k - 1):
        if is_primitive_divisor(r, q, k):
            if (r - 1) % (e * k):
                raise AssertionError(f"primitive divisor {r} is not 1 mod {e * k}")  # pragma: no cover
            return ZsigmondyResult(q, k, r, None)
    if q ** k == 64:
        return ZsigmondyResult(q, k, None, "q_k_64")
    if k == 2 and e == 1 and (q + 1) & q == 0:
        return ZsigmondyResult(q, k, None, "mersenne_k2")
    raise AssertionError(f"no primitive divisor for ({q}, {k}) outside the known exceptions")


# -- embedding case split ------------------------------------------------------------

@dataclass(frozen=True)
class Case31:
    case: str  # "i" | "ii" | "infeasible"
    reason: str = ""


def classify_31_case(q: int, m: int, h: int, f1: int, e2: int) -> Case31:
    """Case split for the counting identity (q^m-q)(q^m-q^f1) = (q^h-q^m)(q^e2-1)."""
    if min(q, m, h, f1, e2) < 1:
        raise ParameterError("parameters must be positive")
    lhs = (q ** m - q) * (q ** m - q ** f1)
    rhs = (q ** h - q ** m) * (q ** e2 - 1)
    if lhs != rhs:
        return Case31("infeasible", f"identity fails: {lhs} != {rhs}")
    if f1 + 1 != m:
        return Case31("infeasible", f"1 + f1 = {1 + f1} differs from m = {m}")
    if e2 == m - 1 and h == m + 1:
        return Case31("i")
    if m - 1 == h - m and e2 == 1:
        if m - 2 == 0 or (m - 1) % (m - 2):
            return Case31("infeasible", f"m - 2 = {m - 2} does not divide m - 1 = {m - 1}")
        return Case31("ii")
    return Case31("infeasible", "matches neither case")
