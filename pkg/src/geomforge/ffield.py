"""Exact arithmetic in small finite fields GF(p^e).

Elements are residues of polynomials over GF(p) modulo a fixed monic
irreducible polynomial.  The modulus is the lexicographically least
irreducible one, comparing coefficients from the constant term upwards, so
element indices are reproducible.

An element with coefficients (c_0, ..., c_{e-1}) has integer index
sum(c_i * p**i).  The index is what appears in reports and what the
vectorized code in the other modules works with, through the Cayley tables
exposed by :class:`FieldSpec`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, e) with q == p**e, or raise FieldError."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = 2
    while q % p:
        p += 1
    e, rest = 0, q
    while rest % p == 0:
        rest //= p
        e += 1
    if rest != 1:
        raise FieldError(f"{q} is not a prime power")
    return p, e


# -- polynomial helpers over GF(p); coefficient lists, constant term first --

def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _polymod(a, m, p):
    a = _trim(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * mc) % p
        a = _trim(a)
    return a


def _is_irreducible(m, p) -> bool:
    deg = len(m) - 1
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _polymod(m, list(low) + [1], p):
                return False
    return True


@lru_cache(maxsize=None)
def _least_irreducible(p: int, e: int) -> tuple[int, ...]:
    # itertools.product varies the last slot fastest; reverse so that the
    # constant term is the most significant key
    for rev in itertools.product(range(p), repeat=e):
        low = tuple(reversed(rev))
        m = list(low) + [1]
        if _is_irreducible(m, p):
            return tuple(m)
    raise FieldError(f"no irreducible polynomial of degree {e} over GF({p})")


@dataclass(frozen=True)
class FieldSpec:
    """GF(p^e) given by a monic irreducible modulus (constant term first)."""

    p: int
    e: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise FieldError(f"{self.p} is not prime")
        if self.e < 1 or len(self.modulus) != self.e + 1 or self.modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree e")
        if any(not 0 <= c < self.p for c in self.modulus):
            raise FieldError("modulus coefficients must be reduced mod p")
        if not _is_irreducible(list(self.modulus), self.p):
            raise FieldError(f"modulus {self.modulus} is reducible over GF({self.p})")

    @property
    def q(self) -> int:
        return self.p ** self.e

    def __repr__(self):
        return f"GF({self.q})"

    # -- elements --

    def __call__(self, value) -> Fe:
        if isinstance(value, Fe):
            if value.field != self:
                raise FieldError("element belongs to a different field")
            return value
        if isinstance(value, (int, np.integer)):
            return Fe(self, self._coeffs_of_index(int(value)))
        coeffs = tuple(int(c) % self.p for c in value)
        if len(coeffs) != self.e:
            raise FieldError(f"expected {self.e} coefficients")
        return Fe(self, coeffs)

    def _coeffs_of_index(self, i: int) -> tuple[int, ...]:
        if not 0 <= i < self.q:
            raise FieldError(f"index {i} out of range for {self!r}")
        out = []
        for _ in range(self.e):
            out.append(i % self.p)
            i //= self.p
        return tuple(out)

    @property
    def zero(self) -> Fe:
        return self(0)

    @property
    def one(self) -> Fe:
        return self(1)

    @property
    def gen(self) -> Fe:
        """Residue of x (equals the field's prime-field element 0 when e == 1)."""
        if self.e == 1:
            return self((-self.modulus[0]) % self.p)
        return self(self.p)

    def elements(self) -> list[Fe]:
        return [self(i) for i in range(self.q)]

    # -- Cayley tables on indices; built once from Fe arithmetic --

    @cached_property
    def add_table(self) -> np.ndarray:
        els = self.elements()
        t = np.array([[int(a + b) for b in els] for a in els], dtype=np.int64)
        t.setflags(write=False)
        return t

    @cached_property
    def mul_table(self) -> np.ndarray:
        els = self.elements()
        t = np.array([[int(a * b) for b in els] for a in els], dtype=np.int64)
        t.setflags(write=False)
        return t

    @cached_property
    def neg_table(self) -> np.ndarray:
        t = np.array([int(-a) for a in self.elements()], dtype=np.int64)
        t.setflags(write=False)
        return t

    @cached_property
    def inv_table(self) -> np.ndarray:
        # inv(0) is stored as 0 but never used by callers
        t = np.array([0] + [int(a.inv()) for a in self.elements()[1:]], dtype=np.int64)
        t.setflags(write=False)
        return t

    def frob_table(self, k: int = 1) -> np.ndarray:
        return self._frob_tables[k % self.e]

    @cached_property
    def _frob_tables(self):
        tabs = []
        for k in range(self.e):
            t = np.array([int(frobenius(a, k)) for a in self.elements()], dtype=np.int64)
            t.setflags(write=False)
            tabs.append(t)
        return tabs

    def conj_table(self) -> np.ndarray:
        """x -> x^{q0} for a field of square order q0^2."""
        if self.e % 2:
            raise FieldError(f"{self!r} has no subfield of index 2")
        return self.frob_table(self.e // 2)

    @property
    def sqrt_order(self) -> int:
        if self.e % 2:
            raise FieldError(f"{self!r} is not of square order")
        return self.p ** (self.e // 2)

    def prime_basis(self) -> list[int]:
        """Indices of 1, x, ..., x^{e-1}: a GF(p)-basis of the field."""
        return [self.p ** i for i in range(self.e)]


@dataclass(frozen=True)
class Fe:
    field: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        f = self.field
        if len(self.coeffs) != f.e or any(not 0 <= c < f.p for c in self.coeffs):
            raise FieldError("coefficients must be e residues mod p")

    def _coerce(self, other) -> Fe:
        if isinstance(other, Fe):
            if other.field != self.field:
                raise FieldError("elements of different fields")
            return other
        if isinstance(other, int):
            # integers act through the prime field
            return self.field((other % self.field.p,) + (0,) * (self.field.e - 1))
        return NotImplemented

    def __index__(self) -> int:
        p = self.field.p
        return sum(c * p ** i for i, c in enumerate(self.coeffs))

    __int__ = __index__

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        return f"Fe({int(self)}@{self.field!r})"

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.field.p
        return Fe(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return Fe(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        f = self.field
        prod = [0] * (2 * f.e - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    prod[i + j] = (prod[i + j] + a * b) % f.p
        r = _polymod(prod, list(f.modulus), f.p)
        return Fe(f, tuple(r) + (0,) * (f.e - len(r)))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        result = self.field.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inv(self) -> Fe:
        if not self:
            raise ZeroDivisionError("inverse of zero in " + repr(self.field))
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()


def make_field(p: int, e: int = 1) -> FieldSpec:
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if e < 1:
        raise FieldError("degree must be positive")
    return FieldSpec(p, e, _least_irreducible(p, e))


@lru_cache(maxsize=None)
def field_of_order(q: int) -> FieldSpec:
    return make_field(*prime_power(q))


def frobenius(a: Fe, k: int = 1) -> Fe:
    """a^(p^k)."""
    f = a.field
    return a ** (f.p ** (k % f.e))
