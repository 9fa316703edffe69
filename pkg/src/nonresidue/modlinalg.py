"""Gaussian elimination over F_p: row reduction, rank, nullspace, determinant.

Pivots are chosen as the first nonzero entry scanning columns left to right,
so results are reproducible for identical input.
"""

from __future__ import annotations

import numpy as np

_INT64_SAFE = 1 << 31


def as_mod_array(rows, p: int) -> np.ndarray:
    dtype = np.int64 if p < _INT64_SAFE else object
    a = np.array(rows, dtype=object) % p
    return a.astype(dtype) if dtype is not object else a


def rref(matrix, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p and the list of pivot columns."""
    a = as_mod_array(matrix, p).copy()
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    nrows, ncols = a.shape
    pivots = []
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        nz = np.flatnonzero(a[row:, col])
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            a[[row, piv]] = a[[piv, row]]
        inv = pow(int(a[row, col]), -1, p)
        a[row] = a[row] * inv % p
        others = np.flatnonzero(a[:, col])
        others = others[others != row]
        if others.size:
            factors = a[others, col].reshape(-1, 1)
            a[others] = (a[others] - factors * a[row]) % p
        pivots.append(col)
        row += 1
    return a, pivots


def rank_mod(matrix, p: int) -> int:
    return len(rref(matrix, p)[1])


def nullspace_mod(matrix, p: int) -> list[list[int]]:
    """Basis of {v : matrix @ v == 0 mod p}, one vector per free column."""
    a, pivots = rref(matrix, p)
    ncols = a.shape[1]
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [0] * ncols
        v[free] = 1
        for r, pc in enumerate(pivots):
            v[pc] = int(-a[r, free] % p)
        basis.append(v)
    return basis


def det_mod(matrix, p: int) -> int:
    """Determinant mod p by elimination with plain Python integers."""
    a = [[x % p for x in row] for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("determinant needs a square matrix")
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        pv = a[col][col]
        det = det * pv % p
        inv = pow(pv, -1, p)
        for r in range(col + 1, n):
            f = a[r][col] * inv % p
            if f:
                row_r, row_c = a[r], a[col]
                for j in range(col, n):
                    row_r[j] = (row_r[j] - f * row_c[j]) % p
    return det % p
