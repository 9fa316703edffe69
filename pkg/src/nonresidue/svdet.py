"""Generalized Sylvester-Vandermonde determinants in exact integer arithmetic.

The matrix stacks, for each point a_i and each j = 0..d, the coefficient
vector of x^j (x + a_i)^T.  Columns are indexed by ascending powers of x,
so row (i, j) carries C(T, e) a_i^(T-e) in column j + e.  With
D = d + 1 and D (r - 1) = T the matrix is square of size D r, and

    det = C * prod_{i<j} (a_i - a_j)^(D^2),
    C   = prod_{l=0}^{T+d} C(T+d, l) / prod_{j=0}^{d} C(T+d, j)^r.

For r = 2 this is the Sylvester matrix of (x+a_1)^T and (x+a_2)^T; for
D = 1 it is a column-scaled Vandermonde matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from sympy import prevprime

from .modlinalg import det_mod
from .polyring import binom_exact


@dataclass(frozen=True)
class SVMatrixSpec:
    T: int
    d: int
    r: int
    points: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(int(a) for a in self.points))
        if self.d < 0 or self.T < 1 or self.r < 2:
            raise ValueError("need T >= 1, d >= 0, r >= 2")
        if self.D * (self.r - 1) != self.T:
            raise ValueError(f"matrix not square: D*(r-1) = {self.D * (self.r - 1)} != T = {self.T}")
        if len(self.points) != self.r:
            raise ValueError(f"expected {self.r} points, got {len(self.points)}")
        if len(set(self.points)) != self.r:
            raise ValueError("points must be distinct")

    @property
    def D(self) -> int:
        return self.d + 1

    @property
    def size(self) -> int:
        return self.D * self.r


def _check_square(T, d, r):
    if d < 0 or r < 2 or (d + 1) * (r - 1) != T:
        raise ValueError(f"(T, d, r) = ({T}, {d}, {r}) does not satisfy (d+1)(r-1) = T")


def build_sv_matrix(spec: SVMatrixSpec) -> list[list[int]]:
    T, D = spec.T, spec.D
    width = D + T
    rows = []
    for a in spec.points:
        base = [binom_exact(T, e) * a ** (T - e) for e in range(T + 1)]
        for j in range(D):
            rows.append([0] * j + base + [0] * (width - j - T - 1))
    return rows


def bareiss_determinant(m: Sequence[Sequence[int]]) -> int:
    """Fraction-free Gaussian elimination; every division is exact."""
    a = [list(row) for row in m]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def hadamard_bound(m: Sequence[Sequence[int]]) -> int:
    """An integer upper bound on |det m|."""
    bound = 1
    for row in m:
        bound *= math.isqrt(sum(x * x for x in row)) + 1
    return bound


def crt_determinant(m: Sequence[Sequence[int]]) -> int:
    """Determinant from residues modulo large primes, recombined by CRT."""
    limit = 2 * hadamard_bound(m) + 1
    modulus, value = 1, 0
    q = 1 << 61
    while modulus < limit:
        q = prevprime(q)
        dq = det_mod(m, q)
        # combine value mod modulus with dq mod q
        step = (dq - value) * pow(modulus, -1, q) % q
        value += modulus * step
        modulus *= q
    return value - modulus if value > modulus // 2 else value


def exact_determinant(m: Sequence[Sequence[int]], cross_check: bool = False) -> int:
    det = bareiss_determinant(m)
    if cross_check:
        other = crt_determinant(m)
        if other != det:
            raise ArithmeticError(f"Bareiss gave {det}, CRT gave {other}")
    return det


def sv_constant(T: int, d: int, r: int) -> Fraction:
    _check_square(T, d, r)
    num = math.prod(binom_exact(T + d, ell) for ell in range(T + d + 1))
    den = math.prod(binom_exact(T + d, j) for j in range(d + 1)) ** r
    return Fraction(num, den)


def difference_product(points: Sequence[int], power: int) -> int:
    return math.prod((points[i] - points[j]) ** power
                     for i in range(len(points)) for j in range(i + 1, len(points)))


@dataclass(frozen=True)
class SVIdentityReport:
    det_value: int
    predicted: int
    constant_C: int
    match: bool
    C_nonzero_mod_p: bool | None = None


def verify_sv_identity(spec: SVMatrixSpec, p: int | None = None,
                       cross_check: bool = False) -> SVIdentityReport:
    """Compare det(V) with C * prod (a_i - a_j)^(D^2), both computed exactly.

    With ``p`` given, also report whether C is a unit mod p.
    """
    det = exact_determinant(build_sv_matrix(spec), cross_check=cross_check)
    C = sv_constant(spec.T, spec.d, spec.r)
    if C.denominator != 1:
        raise ArithmeticError(f"constant C = {C} is not an integer")
    C = int(C)
    predicted = C * difference_product(spec.points, spec.D ** 2)
    return SVIdentityReport(
        det_value=det,
        predicted=predicted,
        constant_C=C,
        match=det == predicted,
        C_nonzero_mod_p=None if p is None else C % p != 0,
    )


def hankel_binom_matrix(n: int, m: int, ell: int) -> list[list[int]]:
    """(m+1) x (m+1) matrix with entry [u][v] = C(n + m - u, ell + m - v)."""
    return [[binom_exact(n + m - u, ell + m - v) for v in range(m + 1)] for u in range(m + 1)]


@dataclass(frozen=True)
class HankelReport:
    direct: int
    closed_form: Fraction
    product_form: Fraction
    match: bool


def hankel_binom_det(n: int, m: int, ell: int) -> HankelReport:
    if min(n, m, ell) < 0:
        raise ValueError("n, m, l must be non-negative")
    if ell + m > n:
        raise ValueError(f"need l + m <= n, got l={ell}, m={m}, n={n}")
    direct = bareiss_determinant(hankel_binom_matrix(n, m, ell))
    closed = Fraction(math.prod(binom_exact(n + m, ell + j) for j in range(m + 1)),
                      math.prod(binom_exact(n + m, j) for j in range(m + 1)))
    # equivalent product over the pivots produced by eliminating row by row
    product = math.prod((Fraction(binom_exact(n + j, ell), binom_exact(ell + j, ell))
                         for j in range(m + 1)), start=Fraction(1))
    return HankelReport(direct, closed, product, direct == closed == product)


def alternating_binomial_sum(s: int, m: int, i: int) -> int:
    """sum_{k=0}^{m} (-1)^k C(m, k) C(s + k, i); equals (-1)^m C(s, i - m)."""
    return sum((-1) ** k * binom_exact(m, k) * binom_exact(s + k, i) for k in range(m + 1))


def block_matrix(T: int, d: int, i: int) -> list[list[int]]:
    """H_i: binomial part of the i-th diagonal D x D block (1-based i).

    Entry [u][v] = C(T, T - D(i-1) + u - v).
    """
    D = d + 1
    top = T - D * (i - 1)
    return [[binom_exact(T, top + u - v) for v in range(D)] for u in range(D)]


def block_det_formula(T: int, d: int, i: int) -> Fraction:
    D = d + 1
    return math.prod((Fraction(binom_exact(T + d, D * (i - 1) + j), binom_exact(T + d, j))
                      for j in range(D)), start=Fraction(1))


@dataclass(frozen=True)
class BlockConstantReport:
    direct_dets: tuple[int, ...]
    formula_dets: tuple[Fraction, ...]
    product_of_H_dets: Fraction
    C: Fraction
    ends_are_one: bool
    match: bool


def block_constant_check(T: int, d: int, r: int) -> BlockConstantReport:
    _check_square(T, d, r)
    direct = tuple(bareiss_determinant(block_matrix(T, d, i)) for i in range(1, r + 1))
    formula = tuple(block_det_formula(T, d, i) for i in range(1, r + 1))
    product = math.prod(formula, start=Fraction(1))
    C = sv_constant(T, d, r)
    ends = direct[0] == 1 and direct[-1] == 1
    match = (all(x == y for x, y in zip(direct, formula))
             and product == C and math.prod(direct) == C and ends)
    return BlockConstantReport(direct, formula, product, C, ends, match)
