"""Dense GF(p) linear algebra used by persistence and block ranks.

Matrices are numpy int64 arrays with entries reduced mod p; columns are the
chain coordinates.
"""

from __future__ import annotations

import numpy as np

from .field import GF


def reduce_mod(mat: np.ndarray, p: int) -> np.ndarray:
    return np.asarray(mat, dtype=np.int64) % p


def row_echelon(mat: np.ndarray, p: int):
    """Reduced row echelon form mod p; returns (rref matrix, pivot columns)."""
    gf = GF(p)
    m = reduce_mod(mat, p).copy()
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        m[r] = (m[r] * gf.inv(int(m[r, c]))) % p
        others = np.flatnonzero(m[:, c])
        others = others[others != r]
        if others.size:
            m[others] = (m[others] - np.outer(m[others, c], m[r])) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(mat: np.ndarray, p: int) -> int:
    if mat.size == 0:
        return 0
    _, pivots = row_echelon(mat, p)
    return len(pivots)


def kernel_basis(mat: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning the null space of mat (acting on column vectors)."""
    rows, cols = mat.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if rows == 0 or mat.size == 0:
        return np.eye(cols, dtype=np.int64)
    r, pivots = row_echelon(mat, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[fc, k] = 1
        for ri, pc in enumerate(pivots):
            basis[pc, k] = (-int(r[ri, fc])) % p
    return basis
