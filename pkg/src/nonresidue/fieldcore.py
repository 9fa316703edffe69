"""Arithmetic in a prime field F_p and brute-force k-th power residue oracles.

Every scan in the harness bottoms out in the functions here, so they are
written to be obviously correct first: Euler's criterion for membership,
plain linear scans for least non-residues and runs.  The vectorised
``power_table`` is only a faster way of evaluating Euler's criterion on a
whole period at once.

Zero is treated as neither a residue nor a non-residue.  AP terms that are
0 mod p are skipped by ``least_nonresidue_in_ap`` and break runs in
``longest_run_in_ap``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from sympy import factorint, isprime

MAX_MODULUS = (1 << 61) - 1
# int64 products of two residues stay exact below this bound
_NUMPY_MODULUS_LIMIT = 1 << 31


@dataclass(frozen=True)
class PrimeFieldCtx:
    """A prime modulus together with the factorisation of p - 1."""

    p: int
    factors_p_minus_1: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        p = self.p
        if not isinstance(p, int) or isinstance(p, bool):
            raise TypeError(f"modulus must be an int, got {type(p).__name__}")
        if p < 2 or p > MAX_MODULUS or not isprime(p):
            raise ValueError(f"{p} is not a supported prime modulus")
        factors = []
        for q, e in sorted(factorint(p - 1).items()):
            factors.extend([q] * e)
        object.__setattr__(self, "factors_p_minus_1", tuple(factors))

    def divisors_p_minus_1(self) -> list[int]:
        divs = [1]
        for q in sorted(set(self.factors_p_minus_1)):
            e = self.factors_p_minus_1.count(q)
            divs = [d * q**i for d in divs for i in range(e + 1)]
        return sorted(divs)

    def prime_divisors_p_minus_1(self) -> list[int]:
        return sorted(set(self.factors_p_minus_1))

    def divides_group_order(self, k: int) -> bool:
        return k >= 1 and (self.p - 1) % k == 0


@dataclass(frozen=True)
class ApSpec:
    """Arithmetic progression b*n + c, n = 0, 1, ...

    ``c`` is kept as given; reduction mod p happens where terms are formed.
    """

    b: int
    c: int

    def check(self, ctx: PrimeFieldCtx):
        if not 1 <= self.b < ctx.p:
            raise ValueError(f"step b={self.b} must satisfy 1 <= b < p={ctx.p}")
        if self.c < 0:
            raise ValueError(f"offset c={self.c} must be non-negative")

    def term(self, n: int) -> int:
        return self.b * n + self.c


class LeastNonresidue(NamedTuple):
    index: int
    value: int


def mod_pow(base: int, exp: int, ctx: PrimeFieldCtx) -> int:
    """base**exp mod p, with 0**0 == 1."""
    if exp < 0:
        raise ValueError("exponent must be non-negative")
    return pow(base % ctx.p, exp, ctx.p)


def _check_divisor(k: int, ctx: PrimeFieldCtx):
    if not ctx.divides_group_order(k):
        raise ValueError(f"k={k} does not divide p-1={ctx.p - 1}")


def is_kth_residue(a: int, k: int, ctx: PrimeFieldCtx) -> bool:
    _check_divisor(k, ctx)
    a %= ctx.p
    if a == 0:
        raise ValueError("0 is neither a residue nor a non-residue")
    return pow(a, (ctx.p - 1) // k, ctx.p) == 1


def kth_powers(k: int, ctx: PrimeFieldCtx) -> set[int]:
    """Exhaustive image of x -> x^k on F_p^*, the oracle for ``is_kth_residue``."""
    return {pow(x, k, ctx.p) for x in range(1, ctx.p)}


def power_table(ctx: PrimeFieldCtx, exp: int) -> np.ndarray:
    """Array whose entry x is x**exp mod p, for x in 0..p-1."""
    p = ctx.p
    if p < _NUMPY_MODULUS_LIMIT:
        base = np.arange(p, dtype=np.int64)
        result = np.ones(p, dtype=np.int64)
        e = exp
        while e:
            if e & 1:
                result = result * base % p
            base = base * base % p
            e >>= 1
        return result
    return np.array([pow(x, exp, p) for x in range(p)], dtype=object)


def character_table(ctx: PrimeFieldCtx, k: int) -> np.ndarray:
    """x^((p-1)/k) for every x; entry 1 marks a k-th power residue, 0 marks x = 0.

    Non-residues land on the other k-th roots of unity, one value per coset
    of the subgroup of k-th powers.
    """
    _check_divisor(k, ctx)
    return power_table(ctx, (ctx.p - 1) // k)


def least_nonresidue_in_ap(ctx: PrimeFieldCtx, k: int, ap: ApSpec) -> LeastNonresidue | None:
    """Smallest n >= 0 with b*n + c a k-th power non-residue mod p.

    Returns None when a full period contains no non-residue, which only
    happens for k = 1.
    """
    _check_divisor(k, ctx)
    ap.check(ctx)
    p = ctx.p
    e = (p - 1) // k
    for n in range(p):
        v = ap.term(n)
        r = v % p
        if r and pow(r, e, p) != 1:
            return LeastNonresidue(n, v)
    return None


def _zero_index(ctx: PrimeFieldCtx, ap: ApSpec) -> int:
    # the unique n in [0, p) with b*n + c == 0 mod p
    return (-ap.c) * pow(ap.b, -1, ctx.p) % ctx.p


def ap_classes(ctx: PrimeFieldCtx, k: int, ap: ApSpec, table: np.ndarray | None = None) -> np.ndarray:
    """Character values of the p - 1 nonzero terms following the zero term.

    The AP has period p and exactly one zero per period, so this window holds
    every maximal run of the infinite progression intact.
    """
    ap.check(ctx)
    if table is None:
        table = character_table(ctx, k)
    p = ctx.p
    n0 = _zero_index(ctx, ap)
    n = np.arange(n0 + 1, n0 + p, dtype=np.int64 if p < _NUMPY_MODULUS_LIMIT else object)
    return table[(ap.b * n + ap.c) % p]


def _run_lengths(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Run-length encoding: the value and length of each maximal constant block."""
    if values.size == 0:
        return values, np.zeros(0, dtype=np.int64)
    starts = np.flatnonzero(np.concatenate(([True], values[1:] != values[:-1])))
    lengths = np.diff(np.append(starts, values.size))
    return values[starts], lengths


RUN_CLASSES = ("residue", "nonresidue", "coset")


def longest_runs(chars: np.ndarray) -> dict[str, int]:
    """Longest residue, non-residue and single-coset runs in a zero-free window."""
    vals, lengths = _run_lengths(chars)
    is_res = vals == 1
    res = int(lengths[is_res].max()) if is_res.any() else 0
    coset = int(lengths[~is_res].max()) if (~is_res).any() else 0
    flags, merged = _run_lengths(chars != 1)
    nonres = int(merged[flags].max()) if flags.any() else 0
    return {"residue": res, "nonresidue": nonres, "coset": coset}


def longest_run_in_ap(ctx: PrimeFieldCtx, k: int, ap: ApSpec, cls: str,
                      table: np.ndarray | None = None) -> int:
    """Length of the longest block of consecutive AP terms in one class.

    ``cls`` is ``"residue"``, ``"nonresidue"`` (any non-residue), or
    ``"coset"`` (non-residues that all share one value of x^((p-1)/k), i.e.
    lie in a single non-trivial coset of the k-th powers).
    """
    if cls not in RUN_CLASSES:
        raise ValueError(f"unknown class {cls!r}")
    return longest_runs(ap_classes(ctx, k, ap, table))[cls]
