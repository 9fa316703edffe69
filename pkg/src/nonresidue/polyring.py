"""Dense univariate polynomials over F_p, plus exact binomial coefficients.

A polynomial is an immutable tuple of coefficients, lowest degree first,
with trailing zeros trimmed; the zero polynomial is the empty tuple.
Multiplication is schoolbook: degrees in this package stay in the low
thousands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .fieldcore import PrimeFieldCtx


def _trim(coeffs: list[int]) -> tuple[int, ...]:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


@dataclass(frozen=True, eq=False)
class DensePoly:
    ctx: PrimeFieldCtx
    coeffs: tuple[int, ...]

    def __init__(self, ctx: PrimeFieldCtx, coeffs: Iterable[int] = ()):
        p = ctx.p
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeffs", _trim([c % p for c in coeffs]))

    # constructors

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, ())

    @classmethod
    def constant(cls, ctx, c):
        return cls(ctx, (c,))

    @classmethod
    def monomial(cls, ctx, degree, c=1):
        return cls(ctx, [0] * degree + [c])

    @classmethod
    def shifted_power(cls, ctx, a, e):
        """(x + a)**e, expanded."""
        p = ctx.p
        a %= p
        # coefficient of x^i is C(e, i) a^(e-i)
        return cls(ctx, [math.comb(e, i) % p * pow(a, e - i, p) for i in range(e + 1)])

    @classmethod
    def from_roots(cls, ctx, roots):
        f = cls.constant(ctx, 1)
        for r in roots:
            f = f * cls(ctx, (-r, 1))
        return f

    # basic queries

    @property
    def degree(self) -> int:
        """Degree, or -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __call__(self, x: int) -> int:
        p = self.ctx.p
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % p
        return acc

    def __eq__(self, other):
        if not isinstance(other, DensePoly):
            return NotImplemented
        return self.ctx.p == other.ctx.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx.p, self.coeffs))

    def __repr__(self):
        if not self.coeffs:
            return f"DensePoly(0 mod {self.ctx.p})"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if c == 1 and mono:
                terms.append(mono)
            else:
                terms.append(f"{c}{'*' if mono else ''}{mono}")
        return f"DensePoly({' + '.join(terms)} mod {self.ctx.p})"

    # ring operations

    def _coerce(self, other) -> DensePoly:
        if isinstance(other, DensePoly):
            if other.ctx.p != self.ctx.p:
                raise ValueError(f"mismatched moduli {self.ctx.p} and {other.ctx.p}")
            return other
        if isinstance(other, int):
            return DensePoly.constant(self.ctx, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return DensePoly(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return DensePoly(self.ctx, [-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return DensePoly.zero(self.ctx)
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return DensePoly(self.ctx, out)

    __rmul__ = __mul__

    def scale(self, c: int) -> DensePoly:
        return DensePoly(self.ctx, [c * x for x in self.coeffs])

    def monic(self) -> DensePoly:
        if not self.coeffs:
            return self
        return self.scale(pow(self.leading(), -1, self.ctx.p))

    def __divmod__(self, other: DensePoly):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.ctx.p
        rem = list(self.coeffs)
        db = other.degree
        inv = pow(other.leading(), -1, p)
        quot = [0] * max(len(rem) - db, 0)
        for i in range(len(rem) - 1, db - 1, -1):
            q = rem[i] * inv % p
            if q:
                quot[i - db] = q
                for j, bj in enumerate(other.coeffs):
                    rem[i - db + j] = (rem[i - db + j] - q * bj) % p
        return DensePoly(self.ctx, quot), DensePoly(self.ctx, rem[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]


def formal_derivative(f: DensePoly, times: int = 1) -> DensePoly:
    coeffs = list(f.coeffs)
    for _ in range(times):
        coeffs = [i * c for i, c in enumerate(coeffs)][1:]
    return DensePoly(f.ctx, coeffs)


def poly_gcd(f: DensePoly, g: DensePoly) -> DensePoly:
    """Monic gcd by the Euclidean algorithm."""
    if f.is_zero() and g.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    while not g.is_zero():
        f, g = g, f % g
    return f.monic()


def poly_gcd_many(polys: Sequence[DensePoly]) -> DensePoly:
    g = polys[0]
    for f in polys[1:]:
        g = poly_gcd(g, f)
        if g.degree == 0:
            break
    return g.monic()


def synthetic_divide(f: DensePoly, alpha: int) -> tuple[DensePoly, int]:
    """Quotient and remainder of f by (x - alpha)."""
    p = f.ctx.p
    coeffs = f.coeffs
    if not coeffs:
        return f, 0
    quot = [0] * (len(coeffs) - 1)
    acc = 0
    for i in range(len(coeffs) - 1, 0, -1):
        acc = (acc * alpha + coeffs[i]) % p
        quot[i - 1] = acc
    rem = (acc * alpha + coeffs[0]) % p
    return DensePoly(f.ctx, quot), rem


def root_multiplicity(f: DensePoly, alpha: int) -> int | float:
    """Largest m with (x - alpha)^m dividing f; ``math.inf`` for f = 0."""
    if f.is_zero():
        return math.inf
    m = 0
    while True:
        q, rem = synthetic_divide(f, alpha)
        if rem:
            return m
        f, m = q, m + 1


def roots_by_evaluation(f: DensePoly) -> list[int]:
    """All roots of a nonzero f in F_p, found by trying every field element."""
    if f.is_zero():
        raise ValueError("every element is a root of the zero polynomial")
    if f.degree == 0:
        return []
    return [x for x in range(f.ctx.p) if f(x) == 0]


def binom_exact(n: int, k: int) -> int:
    """C(n, k) as an exact integer, zero outside 0 <= k <= n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)
