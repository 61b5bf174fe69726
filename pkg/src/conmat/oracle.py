"""Independent dense brute-force checks backing the test suite.

Everything here recomputes from first principles (full dense matrices, its
own Gaussian elimination) and shares no code path with the algorithms it
checks. Capped at desk scale on purpose.
"""

from __future__ import annotations

import numpy as np

from .cells import CellComplex
from .field import GF
from .graded import GradedComplex

SIZE_CAP = 2000


def oracle_rank(mat: np.ndarray, p: int, reverse: bool = False) -> int:
    """Gaussian elimination rank mod p; `reverse` sweeps columns right to left."""
    gf = GF(p)
    m = (np.asarray(mat, dtype=np.int64) % p).copy()
    if m.size == 0:
        return 0
    rows, cols = m.shape
    col_order = range(cols - 1, -1, -1) if reverse else range(cols)
    r = 0
    for c in col_order:
        if r == rows:
            break
        nz = [i for i in range(r, rows) if m[i, c]]
        if not nz:
            continue
        i = nz[0]
        if i != r:
            m[[r, i]] = m[[i, r]]
        m[r] = (m[r] * gf.inv(int(m[r, c]))) % p
        for i2 in range(rows):
            if i2 != r and m[i2, c]:
                m[i2] = (m[i2] - m[i2, c] * m[r]) % p
        r += 1
    return r


def solve_mod(B: np.ndarray, vec: np.ndarray, p: int):
    """One solution x of B x = vec mod p, or None if inconsistent."""
    gf = GF(p)
    rows, cols = B.shape
    aug = np.hstack([B % p, (vec % p).reshape(-1, 1)]).astype(np.int64)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = [i for i in range(r, rows) if aug[i, c]]
        if not nz:
            continue
        i = nz[0]
        if i != r:
            aug[[r, i]] = aug[[i, r]]
        aug[r] = (aug[r] * gf.inv(int(aug[r, c]))) % p
        for i2 in range(rows):
            if i2 != r and aug[i2, c]:
                aug[i2] = (aug[i2] - aug[i2, c] * aug[r]) % p
        pivots.append(c)
        r += 1
    if np.any(aug[r:, -1]):
        return None
    x = np.zeros(cols, dtype=np.int64)
    for ri, c in enumerate(pivots):
        x[c] = aug[ri, -1]
    return x


class _Echelon:
    """Incremental echelon basis for span membership tests mod p."""

    def __init__(self, p: int):
        self.p = p
        self.gf = GF(p)
        self.rows: dict = {}  # pivot index -> unit-pivot vector

    def reduce(self, vec: np.ndarray) -> np.ndarray:
        # rows have zeros before their own pivot, so one increasing sweep suffices
        v = vec % self.p
        for piv in sorted(self.rows):
            if v[piv]:
                v = (v - v[piv] * self.rows[piv]) % self.p
        return v

    def add(self, vec: np.ndarray) -> bool:
        """Insert vec; returns True if it enlarged the span."""
        v = self.reduce(vec)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        piv = int(nz[0])
        v = (v * self.gf.inv(int(v[piv]))) % self.p
        self.rows[piv] = v
        return True


def full_boundary_matrix(X: CellComplex, j: int) -> np.ndarray:
    """Dense del_j: rows are (j-1)-cells, columns are j-cells, input order."""
    rows = np.flatnonzero(X.dims == j - 1)
    cols = np.flatnonzero(X.dims == j)
    pos = {int(r): i for i, r in enumerate(rows)}
    mat = np.zeros((rows.size, cols.size), dtype=np.int64)
    for cj, c in enumerate(cols):
        for k in range(X.bnd_ptr[c], X.bnd_ptr[c + 1]):
            f = int(X.bnd_idx[k])
            if f in pos:
                mat[pos[f], cj] = X.bnd_coef[k]
    return mat


def dense_homology(X: CellComplex) -> dict:
    """Nonzero Betti numbers per dimension via dense rank computations."""
    if X.n > SIZE_CAP:
        raise ValueError(f"oracle size cap exceeded: {X.n} > {SIZE_CAP}")
    if X.n == 0:
        return {}
    out = {}
    dmax = int(X.dims.max())
    ranks = {j: oracle_rank(full_boundary_matrix(X, j), X.p) for j in range(dmax + 2)}
    for j in range(dmax + 1):
        n_j = int(np.count_nonzero(X.dims == j))
        out[j] = n_j - ranks[j] - ranks[j + 1]
    return {j: b for j, b in out.items() if b}


def _cycle_vectors(X: CellComplex, cells, j: int, p: int):
    """Cycle basis of the j-chains supported on `cells` (a closed piece).

    Column reduction of the boundary matrix with tracked combinations; the
    kernel columns yield the cycles. Returns (vectors, jcells) where each
    vector is indexed by position in jcells.
    """
    gf = GF(p)
    jcells = [int(c) for c in cells if X.dims[c] == j]
    lower = [int(c) for c in np.flatnonzero(X.dims == j - 1)]
    pos = {c: i for i, c in enumerate(lower)}
    mat = np.zeros((len(lower), len(jcells)), dtype=np.int64)
    for cj, c in enumerate(jcells):
        for k in range(X.bnd_ptr[c], X.bnd_ptr[c + 1]):
            mat[pos[int(X.bnd_idx[k])], cj] = X.bnd_coef[k]
    comb = np.eye(len(jcells), dtype=np.int64)
    pivot_cols: dict = {}  # pivot row -> column
    kernel = []
    for c in range(len(jcells)):
        col = mat[:, c]
        while True:
            nz = np.flatnonzero(col)
            if nz.size == 0:
                kernel.append(comb[:, c].copy())
                break
            piv = int(nz[0])
            other = pivot_cols.get(piv)
            if other is None:
                inv = gf.inv(int(col[piv]))
                mat[:, c] = (col * inv) % p
                comb[:, c] = (comb[:, c] * inv) % p
                pivot_cols[piv] = c
                break
            f = int(col[piv])
            mat[:, c] = (col - f * mat[:, other]) % p
            comb[:, c] = (comb[:, c] - f * comb[:, other]) % p
            col = mat[:, c]
    return kernel, jcells


def _boundary_echelon(X: CellComplex, cells, jcells, p: int) -> _Echelon:
    """Echelon spanning del C_{j+1} of the piece, in jcells coordinates."""
    j = X.dims[jcells[0]] if jcells else 0
    pos = {c: i for i, c in enumerate(jcells)}
    ech = _Echelon(p)
    for c in cells:
        if not jcells or X.dims[c] != j + 1:
            continue
        vec = np.zeros(len(jcells), dtype=np.int64)
        for k in range(X.bnd_ptr[c], X.bnd_ptr[c + 1]):
            vec[pos[int(X.bnd_idx[k])]] = X.bnd_coef[k]
        ech.add(vec)
    return ech


def dense_persistent_betti(g: GradedComplex, a, b, j: int) -> int:
    """Rank of H_j(a) -> H_j(b) via explicit cycle and boundary bases.

    Spans b's boundary space, then counts how many a-cycles enlarge it: each
    one contributes an independent homology class in the image.
    """
    X = g.complex
    if X.n > SIZE_CAP:
        raise ValueError(f"oracle size cap exceeded: {X.n} > {SIZE_CAP}")
    p = X.p
    cells_b = np.flatnonzero(g._piece_mask(frozenset(b)))
    jcells_b = [int(c) for c in cells_b if X.dims[c] == j]
    if not jcells_b:
        return 0
    ech = _boundary_echelon(X, cells_b, jcells_b, p)
    pos_b = {c: i for i, c in enumerate(jcells_b)}
    cells_a = np.flatnonzero(g._piece_mask(frozenset(a)))
    cycles_a, jcells_a = _cycle_vectors(X, cells_a, j, p)
    count = 0
    for vec in cycles_a:
        v = np.zeros(len(jcells_b), dtype=np.int64)
        for i, c in enumerate(jcells_a):
            v[pos_b[c]] = vec[i]
        if ech.add(v):
            count += 1
    return count


def homology_reps(g: GradedComplex, a, j: int):
    """Representative cycles of H_j(nu^{-1}(a)), as vectors over its j-cells."""
    X = g.complex
    p = X.p
    cells = np.flatnonzero(g._piece_mask(frozenset(a)))
    cycles, jcells = _cycle_vectors(X, cells, j, p)
    if not jcells:
        return [], jcells
    ech = _boundary_echelon(X, cells, jcells, p)
    reps = []
    for vec in cycles:
        if ech.add(vec):
            reps.append(vec)
    return reps, jcells


def induced_homology_map(g: GradedComplex, a, b, j: int):
    """Matrix of H_j(a) -> H_j(b) in explicit representative bases.

    Column k writes the k-th a-representative in b's homology basis modulo
    b's boundaries. Returns (matrix, n_classes_a, n_classes_b).
    """
    X = g.complex
    p = X.p
    reps_a, jcells_a = homology_reps(g, a, j)
    reps_b, jcells_b = homology_reps(g, b, j)
    pos_b = {c: i for i, c in enumerate(jcells_b)}
    cells_b = np.flatnonzero(g._piece_mask(frozenset(b)))
    bdry = _boundary_echelon(X, cells_b, jcells_b, p) if jcells_b else _Echelon(p)
    basis = np.zeros((len(jcells_b), len(reps_b)), dtype=np.int64)
    for i, rep in enumerate(reps_b):
        basis[:, i] = bdry.reduce(rep)
    mat = np.zeros((len(reps_b), len(reps_a)), dtype=np.int64)
    for k, rep in enumerate(reps_a):
        v = np.zeros(len(jcells_b), dtype=np.int64)
        for i, c in enumerate(jcells_a):
            v[pos_b[c]] = rep[i]
        x = solve_mod(basis, bdry.reduce(v), p)
        if x is None:
            raise AssertionError("a-cycle not expressible in b homology basis")
        mat[:, k] = x
    return mat, len(reps_a), len(reps_b)


def assemble(evaluator, src_basis, dst_basis, p: int) -> np.ndarray:
    """Dense matrix of a sparse chain-map evaluator on explicit bases."""
    if len(src_basis) > SIZE_CAP or len(dst_basis) > SIZE_CAP:
        raise ValueError("oracle size cap exceeded")
    pos = {c: i for i, c in enumerate(dst_basis)}
    mat = np.zeros((len(dst_basis), len(src_basis)), dtype=np.int64)
    for cj, c in enumerate(src_basis):
        for d, v in evaluator({c: 1}).items():
            mat[pos[d], cj] = v % p
    return mat
