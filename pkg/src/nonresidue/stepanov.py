"""Auxiliary-polynomial bound on common roots of {(x + a_i)^t - theta_i}.

Given r shifts a_i and nonzero targets theta_i, we look for polynomials
G_1..G_r of degree <= d such that

    F(x) = sum_i G_i(x) (x + a_i)^T,     T = t + M - 1 + s,

vanishes to order M at every common root alpha of the system.  At such an
alpha every power (alpha + a_i)^e with e >= t can be rewritten as
theta_i (alpha + a_i)^(e - t); requiring the rewritten derivatives
F^(l), l < M, to vanish identically in x is a homogeneous linear system in
the coefficients of the G_i.  Any nonzero solution gives F != 0 (the
Sylvester-Vandermonde matrix is nonsingular) of degree <= N = d + T, so the
number of common roots is at most deg(F) / M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .fieldcore import PrimeFieldCtx
from .modlinalg import nullspace_mod, rank_mod
from .polyring import (
    DensePoly,
    formal_derivative,
    poly_gcd_many,
    root_multiplicity,
    roots_by_evaluation,
)

DEFAULT_MAX_UNKNOWNS = 20_000


class StepanovError(RuntimeError):
    pass


class NullspaceEmpty(StepanovError):
    """The constraint matrix had full column rank; the row count is wrong."""


class AuxiliaryVanished(StepanovError):
    """A nonzero choice of G_i produced F = 0."""


@dataclass(frozen=True)
class SystemSpec:
    ctx: PrimeFieldCtx
    t: int
    shifts: tuple[int, ...]
    targets: tuple[int, ...]

    def __post_init__(self):
        p = self.ctx.p
        shifts = tuple(a % p for a in self.shifts)
        targets = tuple(th % p for th in self.targets)
        object.__setattr__(self, "shifts", shifts)
        object.__setattr__(self, "targets", targets)
        if self.t < 1:
            raise ValueError("t must be positive")
        if len(shifts) != len(targets):
            raise ValueError("shifts and targets differ in length")
        if len(shifts) < 2:
            raise ValueError("need at least two equations")
        if len(set(shifts)) != len(shifts):
            raise ValueError("shifts must be distinct mod p")
        if any(th == 0 for th in targets):
            raise ValueError("targets must be nonzero")
        if p <= 2 * self.t:
            raise ValueError(f"need p > 2t, got p={p}, t={self.t}")

    @property
    def r(self) -> int:
        return len(self.shifts)

    def members(self) -> list[DensePoly]:
        return [DensePoly.shifted_power(self.ctx, a, self.t) - th
                for a, th in zip(self.shifts, self.targets)]


def within_lemma_range(t: int, r: int) -> bool:
    """r <= 2/sqrt(5) * sqrt(t) + 1, decided exactly."""
    return r <= 1 or 5 * (r - 1) ** 2 <= 4 * t


@dataclass(frozen=True)
class StepanovParams:
    t: int
    r: int
    M: int
    s: int
    d: int
    D: int
    T: int
    N: int
    condition_rank: bool  # enough unknowns for a nonzero solution
    condition_square: bool  # D*r == D + T, so the SV matrix is square
    quadratic_gate: bool
    sqrt_gate: bool
    largest_feasible_r: int

    @property
    def feasible(self) -> bool:
        return self.condition_rank and self.condition_square

    @property
    def n_constraints(self) -> int:
        return self.M * (self.d + self.s) + self.M * (self.M + 1) // 2

    @property
    def n_unknowns(self) -> int:
        return self.D * self.r


def _params_for(t: int, r: int) -> tuple[int, ...]:
    M = (r + 1) // 2
    rem = (t + M - 1) % (r - 1)
    s = 0 if rem == 0 else (r - 1) - rem
    if s > r - 2:
        raise AssertionError(f"padding s={s} exceeds r-2 for t={t}, r={r}")
    T = t + M - 1 + s
    D = T // (r - 1)
    d = D - 1
    N = d + T
    rank_ok = M * (d + s) + M * (M + 1) // 2 < D * r
    square_ok = D * (r - 1) == T and D * r == D + t + M + s - 1
    return M, s, d, D, T, N, rank_ok, square_ok


def derive_params(t: int, r: int) -> StepanovParams:
    if t <= 0:
        raise ValueError("t must be positive")
    if r < 2:
        raise ValueError("r must be at least 2")
    M, s, d, D, T, N, rank_ok, square_ok = _params_for(t, r)
    best = r
    if not (rank_ok and square_ok):
        best = r - 1
        while best > 2:
            *_, ok1, ok2 = _params_for(t, best)
            if ok1 and ok2:
                break
            best -= 1
    return StepanovParams(
        t=t, r=r, M=M, s=s, d=d, D=D, T=T, N=N,
        condition_rank=rank_ok,
        condition_square=square_ok,
        quadratic_gate=5 * r * r - 17 * r - (4 * t - 14) < 0,
        sqrt_gate=within_lemma_range(t, r),
        largest_feasible_r=best,
    )


def _check_params(spec: SystemSpec, params: StepanovParams, max_unknowns: int):
    if (params.t, params.r) != (spec.t, spec.r):
        raise ValueError("parameters were derived for a different (t, r)")
    if not params.feasible:
        raise ValueError(f"parameters infeasible for t={spec.t}, r={spec.r}")
    if params.n_unknowns > max_unknowns:
        raise ValueError(f"{params.n_unknowns} unknowns exceeds cap {max_unknowns}")
    if params.M - 1 + params.s >= spec.t:
        raise StepanovError("a single rewrite no longer brings exponents below t")
    if params.M >= spec.ctx.p:
        raise StepanovError("derivative order reaches the characteristic")


def _derive_terms(terms: dict[int, DensePoly]) -> dict[int, DensePoly]:
    # d/dx [G (x+a)^e] = G' (x+a)^e + e G (x+a)^(e-1)
    out: dict[int, DensePoly] = {}
    for e, g in terms.items():
        dg = formal_derivative(g)
        if not dg.is_zero():
            out[e] = out[e] + dg if e in out else dg
        if e:
            eg = g.scale(e)
            if not eg.is_zero():
                out[e - 1] = out[e - 1] + eg if e - 1 in out else eg
    return out


def _rewrite_and_expand(ctx, terms: dict[int, DensePoly], a: int, theta: int, t: int) -> DensePoly:
    total = DensePoly.zero(ctx)
    for e, g in terms.items():
        if e >= t:
            e -= t
            g = g.scale(theta)
            if e >= t:
                raise StepanovError(f"exponent {e + t} needs more than one rewrite")
        total = total + g * DensePoly.shifted_power(ctx, a, e)
    return total


def _coefficient_rows(polys_per_column: list[DensePoly], n_rows: int) -> list[list[int]]:
    rows = [[0] * len(polys_per_column) for _ in range(n_rows)]
    for col, poly in enumerate(polys_per_column):
        if poly.degree >= n_rows:
            raise StepanovError(f"reduced derivative has degree {poly.degree} >= {n_rows}")
        for power, c in enumerate(poly.coeffs):
            rows[power][col] = c
    return rows


def build_constraint_system(spec: SystemSpec, params: StepanovParams,
                            max_unknowns: int = DEFAULT_MAX_UNKNOWNS) -> np.ndarray:
    """Matrix whose nullspace is the set of coefficient vectors c_ij.

    Column i*D + j is the unknown coefficient of x^j in G_i.  Row block l
    (l = 0..M-1) holds the x-coefficients of the rewritten l-th derivative,
    d + M + s - l rows per block.
    """
    _check_params(spec, params, max_unknowns)
    ctx, t = spec.ctx, spec.t
    D, M, T = params.D, params.M, params.T
    # current[col] is the l-th derivative of x^j (x+a_i)^T as {exponent: cofactor}
    current = []
    for a in spec.shifts:
        for j in range(D):
            current.append({T: DensePoly.monomial(ctx, j)})
    blocks = []
    for ell in range(M):
        if ell:
            current = [_derive_terms(terms) for terms in current]
        reduced = []
        for col, terms in enumerate(current):
            i = col // D
            reduced.append(_rewrite_and_expand(ctx, terms, spec.shifts[i], spec.targets[i], t))
        blocks.extend(_coefficient_rows(reduced, params.d + M + params.s - ell))
    matrix = np.array(blocks, dtype=object)
    expected = (params.n_constraints, params.n_unknowns)
    if matrix.shape != expected:
        raise StepanovError(f"constraint matrix shape {matrix.shape} != {expected}")
    return matrix


def literal_constraint_system(spec: SystemSpec, params: StepanovParams,
                              max_unknowns: int = DEFAULT_MAX_UNKNOWNS) -> np.ndarray:
    """Constraint rows transcribed from the closed-form derivative expansion
    sum_j c_j(T) theta_i G_i^(j)(x) (x+a_i)^(M-1+s-(l-j)),
    with c_j(T) = T (T-1) ... (T-(l-j)+1) and no binomial C(l, j) factor.

    Only used to compare row spaces against ``build_constraint_system``.
    """
    _check_params(spec, params, max_unknowns)
    ctx = spec.ctx
    p = ctx.p
    D, M, T, s = params.D, params.M, params.T, params.s
    blocks = []
    for ell in range(M):
        column_polys = []
        for i, (a, theta) in enumerate(zip(spec.shifts, spec.targets)):
            for jj in range(D):
                g = DensePoly.monomial(ctx, jj)
                total = DensePoly.zero(ctx)
                for j in range(ell + 1):
                    c = math.prod(T - k for k in range(ell - j)) % p
                    gj = formal_derivative(g, j)
                    pw = DensePoly.shifted_power(ctx, a, M - 1 + s - (ell - j))
                    total = total + (gj * pw).scale(c * theta)
                column_polys.append(total)
        blocks.extend(_coefficient_rows(column_polys, params.d + M + s - ell))
    return np.array(blocks, dtype=object)


def same_row_space(a, b, p: int) -> bool:
    ra, rb = rank_mod(a, p), rank_mod(b, p)
    return ra == rb == rank_mod(np.vstack([a, b]), p)


@dataclass(frozen=True)
class AuxiliaryPolynomial:
    g_coeffs: tuple[tuple[int, ...], ...]
    F: DensePoly
    nullity: int

    def G(self, i: int) -> DensePoly:
        return DensePoly(self.F.ctx, self.g_coeffs[i])


def assemble_F(spec: SystemSpec, T: int, g_coeffs: Sequence[Sequence[int]]) -> DensePoly:
    F = DensePoly.zero(spec.ctx)
    for a, coeffs in zip(spec.shifts, g_coeffs):
        G = DensePoly(spec.ctx, coeffs)
        if not G.is_zero():
            F = F + G * DensePoly.shifted_power(spec.ctx, a, T)
    return F


def solve_auxiliary(spec: SystemSpec, params: StepanovParams,
                    max_unknowns: int = DEFAULT_MAX_UNKNOWNS) -> AuxiliaryPolynomial:
    matrix = build_constraint_system(spec, params, max_unknowns)
    basis = nullspace_mod(matrix, spec.ctx.p)
    if not basis:
        raise NullspaceEmpty(f"constraint matrix {matrix.shape} has trivial nullspace")
    v = basis[0]
    D = params.D
    g_coeffs = tuple(tuple(v[i * D:(i + 1) * D]) for i in range(spec.r))
    F = assemble_F(spec, params.T, g_coeffs)
    if F.is_zero():
        raise AuxiliaryVanished(f"F = 0 for nonzero G_i (p={spec.ctx.p}, t={spec.t}, r={spec.r})")
    if F.degree > params.N:
        raise StepanovError(f"deg F = {F.degree} exceeds N = {params.N}")
    return AuxiliaryPolynomial(g_coeffs, F, len(basis))


def common_roots_oracle(spec: SystemSpec) -> tuple[int, ...]:
    """Common roots in F_p, via the gcd of the system members."""
    g = poly_gcd_many(spec.members())
    return tuple(roots_by_evaluation(g))


def common_roots_exhaustive(spec: SystemSpec) -> tuple[int, ...]:
    p, t = spec.ctx.p, spec.t
    pairs = list(zip(spec.shifts, spec.targets))
    return tuple(x for x in range(p) if all(pow(x + a, t, p) == th for a, th in pairs))


@dataclass
class LemmaReport:
    p: int
    t: int
    r: int
    M: int
    N: int
    roots: tuple[int, ...]
    deg_F: int
    min_multiplicity: int | None
    multiplicity_ok: bool
    count_bound: int
    count_ok: bool
    lemma_bound: Fraction
    lemma_ok: bool
    nullity: int
    F: DensePoly = field(repr=False)

    @property
    def n_roots(self) -> int:
        return len(self.roots)

    @property
    def holds(self) -> bool:
        base = self.multiplicity_ok and self.count_ok and self.deg_F <= self.N
        return base and (self.lemma_ok or self.r % 2 == 1)

    @property
    def gap(self) -> Fraction:
        """Slack between the computed count bound and 2t/(r-1) + 3."""
        return self.lemma_bound - self.count_bound


def verify_lemma_commonsol(spec: SystemSpec, max_unknowns: int = DEFAULT_MAX_UNKNOWNS) -> LemmaReport:
    if not within_lemma_range(spec.t, spec.r):
        raise ValueError(f"r={spec.r} exceeds 2/sqrt(5)*sqrt(t)+1 for t={spec.t}")
    params = derive_params(spec.t, spec.r)
    aux = solve_auxiliary(spec, params, max_unknowns)
    roots = common_roots_oracle(spec)
    mults = [root_multiplicity(aux.F, alpha) for alpha in roots]
    count_bound = aux.F.degree // params.M
    lemma_bound = Fraction(2 * spec.t, spec.r - 1) + 3
    return LemmaReport(
        p=spec.ctx.p, t=spec.t, r=spec.r, M=params.M, N=params.N,
        roots=roots,
        deg_F=aux.F.degree,
        min_multiplicity=min(mults) if mults else None,
        multiplicity_ok=all(m >= params.M for m in mults),
        count_bound=count_bound,
        count_ok=len(roots) <= count_bound,
        lemma_bound=lemma_bound,
        lemma_ok=len(roots) <= lemma_bound,
        nullity=aux.nullity,
        F=aux.F,
    )
