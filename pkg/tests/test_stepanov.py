import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonresidue.fieldcore import PrimeFieldCtx
from nonresidue.modlinalg import nullspace_mod, rank_mod
from nonresidue.polyring import DensePoly, formal_derivative, root_multiplicity
from nonresidue.stepanov import (
    SystemSpec,
    assemble_F,
    build_constraint_system,
    common_roots_exhaustive,
    common_roots_oracle,
    derive_params,
    literal_constraint_system,
    same_row_space,
    solve_auxiliary,
    verify_lemma_commonsol,
    within_lemma_range,
)


def lemma_r_max(t):
    r = 2
    while within_lemma_range(t, r + 1):
        r += 1
    return r


def test_params_t100_r9():
    P = derive_params(100, 9)
    assert (P.M, P.s, P.T, P.D, P.N) == (5, 0, 104, 13, 116)
    assert P.feasible and P.condition_rank and P.condition_square
    assert P.n_constraints == 75 and P.n_unknowns == 117


@pytest.mark.parametrize("t", [1, 2, 3, 17, 250])
def test_params_r2(t):
    P = derive_params(t, 2)
    assert (P.M, P.s, P.T, P.D, P.N) == (1, 0, t, t, 2 * t - 1)
    assert P.feasible


def test_params_infeasible_t5_r9():
    P = derive_params(5, 9)
    assert not P.feasible
    assert not P.quadratic_gate and not P.sqrt_gate
    assert 5 * 81 - 17 * 9 - (4 * 5 - 14) == 246
    assert P.largest_feasible_r == 4
    assert derive_params(5, 4).feasible and not derive_params(5, 5).feasible


def test_params_errors():
    with pytest.raises(ValueError):
        derive_params(0, 3)
    with pytest.raises(ValueError):
        derive_params(5, 1)


@settings(max_examples=300)
@given(st.integers(1, 5000), st.integers(2, 40))
def test_param_identities(t, r):
    P = derive_params(t, r)
    assert 0 <= P.s <= r - 2
    assert P.D * (r - 1) == P.T
    assert P.N == P.D + P.T - 1
    assert P.M == (r + 1) // 2
    if within_lemma_range(t, r):
        assert P.feasible


@settings(max_examples=300)
@given(st.integers(1, 5000), st.data())
def test_bound_chain_even_r(t, data):
    r = data.draw(st.integers(2, lemma_r_max(t)))
    P = derive_params(t, r)
    if r % 2 == 0:
        # floor(N / M) <= 2t/(r-1) + 3
        assert (P.N // P.M) * (r - 1) <= 2 * t + 3 * (r - 1)


def test_spec_validation():
    ctx = PrimeFieldCtx(13)
    with pytest.raises(ValueError):
        SystemSpec(ctx, 3, (0, 13), (1, 1))  # shifts collide mod p
    with pytest.raises(ValueError):
        SystemSpec(ctx, 3, (0, 1), (1, 0))
    with pytest.raises(ValueError):
        SystemSpec(ctx, 7, (0, 1), (1, 1))  # p <= 2t
    with pytest.raises(ValueError):
        SystemSpec(ctx, 3, (0,), (1,))


def test_small_constraint_system():
    ctx = PrimeFieldCtx(13)
    spec = SystemSpec(ctx, 3, (0, 1), (1, 1))
    P = derive_params(3, 2)
    m = build_constraint_system(spec, P)
    assert m.shape == (3, 6)
    # l = 0 block: F reduced once is G_1 * 1 + G_2 * 1, coefficientwise
    assert m.tolist() == [[1, 0, 0, 1, 0, 0], [0, 1, 0, 0, 1, 0], [0, 0, 1, 0, 0, 1]]
    aux = solve_auxiliary(spec, P)
    assert not aux.F.is_zero() and aux.F.degree <= P.N == 5


def _column_poly(matrix, rows, col, ctx):
    return DensePoly(ctx, [int(x) for x in matrix[rows, col]])


@pytest.mark.parametrize("p, t, r, seed", [(101, 20, 3, 1), (101, 20, 4, 2), (211, 42, 6, 3), (401, 100, 7, 4)])
def test_rows_equal_derivatives_reduced_mod_members(p, t, r, seed):
    """Independent route: differentiate the expanded product, then divide by the member."""
    rng = random.Random(seed)
    ctx = PrimeFieldCtx(p)
    spec = SystemSpec(ctx, t, tuple(rng.sample(range(p), r)), tuple(rng.randrange(1, p) for _ in range(r)))
    P = derive_params(t, r)
    m = build_constraint_system(spec, P)
    members = spec.members()
    start = 0
    for ell in range(P.M):
        n_rows = P.d + P.M + P.s - ell
        assert n_rows <= t
        rows = slice(start, start + n_rows)
        for i, a in enumerate(spec.shifts):
            for j in range(P.D):
                full = DensePoly.monomial(ctx, j) * DensePoly.shifted_power(ctx, a, P.T)
                expected = formal_derivative(full, ell) % members[i]
                assert _column_poly(m, rows, i * P.D + j, ctx) == expected
        start += n_rows
    assert start == m.shape[0]


def test_nullspace_vectors_vanish_to_order_M_at_planted_root():
    rng = random.Random(5)
    p, t, r = 401, 80, 8
    ctx = PrimeFieldCtx(p)
    shifts = tuple(rng.sample(range(p), r))
    alpha = 17
    spec = SystemSpec(ctx, t, shifts, tuple(pow(alpha + a, t, p) for a in shifts))
    P = derive_params(t, r)
    basis = nullspace_mod(build_constraint_system(spec, P), p)
    assert len(basis) >= P.n_unknowns - P.n_constraints
    for v in basis[:5]:
        g = [v[i * P.D:(i + 1) * P.D] for i in range(r)]
        F = assemble_F(spec, P.T, g)
        assert not F.is_zero()
        for ell in range(P.M):
            assert formal_derivative(F, ell)(alpha) == 0
        assert root_multiplicity(F, alpha) >= P.M


def test_scaling_nullspace_vector_scales_F():
    ctx = PrimeFieldCtx(101)
    spec = SystemSpec(ctx, 20, (0, 3, 9, 40), (1, 5, 7, 1))
    P = derive_params(20, 4)
    aux = solve_auxiliary(spec, P)
    scaled = assemble_F(spec, P.T, [[7 * c for c in g] for g in aux.g_coeffs])
    assert scaled == aux.F * 7 and not scaled.is_zero()


@pytest.mark.parametrize("p, t, r", [(101, 20, 5), (211, 42, 6), (401, 80, 9), (1009, 126, 11)])
def test_literal_closed_form_rows_span_same_space(p, t, r):
    rng = random.Random(p)
    ctx = PrimeFieldCtx(p)
    spec = SystemSpec(ctx, t, tuple(rng.sample(range(p), r)), tuple(rng.randrange(1, p) for _ in range(r)))
    P = derive_params(t, r)
    assert P.M >= 3
    derived = build_constraint_system(spec, P)
    literal = literal_constraint_system(spec, P)
    assert not np.array_equal(derived % p, literal % p)
    assert same_row_space(derived, literal, p)


def test_rank_below_unknowns():
    rng = random.Random(9)
    for p in (101, 409, 1201):
        ctx = PrimeFieldCtx(p)
        for t in (6, 25, 50):
            r = lemma_r_max(t)
            spec = SystemSpec(ctx, t, tuple(rng.sample(range(p), r)), tuple(rng.randrange(1, p) for _ in range(r)))
            P = derive_params(t, r)
            m = build_constraint_system(spec, P)
            assert rank_mod(m, p) <= m.shape[0] < m.shape[1]


def test_common_roots_examples():
    ctx = PrimeFieldCtx(13)
    assert common_roots_oracle(SystemSpec(ctx, 4, (0, 1), (1, 1))) == ()
    # x^4 = 1 at {1, 5, 8, 12}; (x+5)^4 = 1 at {0, 3, 7, 9}
    spec = SystemSpec(ctx, 4, (0, 5), (1, 1))
    assert common_roots_oracle(spec) == common_roots_exhaustive(spec) == ()
    spec = SystemSpec(ctx, 4, (0, 4), (1, 1))
    assert common_roots_oracle(spec) == (1, 8)


def test_common_roots_oracle_matches_exhaustive_small():
    rng = random.Random(3)
    for p in (13, 31, 101, 241):
        ctx = PrimeFieldCtx(p)
        for _ in range(30):
            t = rng.randint(1, (p - 1) // 2)
            r = rng.randint(2, 4)
            shifts = tuple(rng.sample(range(p), r))
            if rng.random() < 0.5:
                x = rng.randrange(p)
                targets = tuple(pow(x + a, t, p) or 1 for a in shifts)
            else:
                targets = tuple(rng.randrange(1, p) for _ in range(r))
            spec = SystemSpec(ctx, t, shifts, targets)
            assert common_roots_oracle(spec) == common_roots_exhaustive(spec)


def test_verify_lemma_on_residue_system():
    # three consecutive quadratic residues mod 101: roots of {(x+i)^50 - 1}
    ctx = PrimeFieldCtx(101)
    spec = SystemSpec(ctx, 50, (0, 1, 2), (1, 1, 1))
    rep = verify_lemma_commonsol(spec)
    assert rep.roots == common_roots_exhaustive(spec)
    assert rep.n_roots > 0
    assert rep.multiplicity_ok and rep.count_ok and rep.lemma_ok and rep.holds
    assert rep.min_multiplicity >= rep.M


def test_verify_lemma_rejects_out_of_range_r():
    ctx = PrimeFieldCtx(101)
    with pytest.raises(ValueError):
        verify_lemma_commonsol(SystemSpec(ctx, 5, (0, 1, 2, 3), (1, 1, 1, 1)))


def test_r2_bound_dominates_gcd_degree():
    rng = random.Random(21)
    ctx = PrimeFieldCtx(211)
    for _ in range(10):
        t = rng.randint(1, 105)
        spec = SystemSpec(ctx, t, tuple(rng.sample(range(211), 2)), (rng.randrange(1, 211), 1))
        rep = verify_lemma_commonsol(spec)
        assert rep.n_roots <= t <= rep.lemma_bound
        assert rep.holds
