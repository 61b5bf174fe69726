"""Acyclic partial matchings, splitting homotopies, and reductions.

A matching partitions the cells into critical cells A, queens Q and kings
K = w(Q) with kappa(w(q), q) != 0 and the induced relation << on Q acyclic.
The unique splitting homotopy gamma of the matching yields the reduction

    psi = pi_A (id - del gamma),  phi = (id - gamma del) iota_A,
    del_A = psi del phi = pi_A (del - del gamma del),

whose target is the Morse complex on the critical cells.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from . import _kernels
from .cells import CellComplex, CellId, normalize_chain


class Matching:
    """Partition (A, Q, K) with bijection w: Q -> K and acyclicity witness.

    Stored as arrays over cell indices: label (0 critical, 1 queen, 2 king),
    mate (partner index), qrank (queen stamps forming a linear extension of
    the << relation; Gamma clears the largest stamp in support first).
    """

    def __init__(self, complex: CellComplex, label, mate, qrank, grading=None):
        self.complex = complex
        self.label = np.asarray(label, dtype=np.int8)
        self.mate = np.asarray(mate, dtype=np.int32)
        self.qrank = np.asarray(qrank, dtype=np.int64)
        self.grading = grading  # int32 fiber index per cell, or None
        self._w = None

    @classmethod
    def build(cls, complex: CellComplex, w: Mapping[CellId, CellId], grading=None) -> "Matching":
        """Build from an explicit pairing {queen id: king id}; validates."""
        n = complex.n
        label = np.zeros(n, dtype=np.int8)
        mate = np.full(n, -1, dtype=np.int32)
        for q, k in w.items():
            qi, ki = complex.index(q), complex.index(k)
            if label[qi] or label[ki]:
                raise ValueError(f"cell reused in matching: {q!r} -> {k!r}")
            label[qi] = 1
            label[ki] = 2
            mate[qi] = ki
            mate[ki] = qi
        m = cls(complex, label, mate, np.full(n, -1, dtype=np.int64), grading=grading)
        m._compute_ranks()
        m.verify()
        return m

    def _compute_ranks(self):
        cptr, cidx, _ = self.complex.coboundary_csr()
        ok, qrank = _kernels.kahn_queen_order(
            self.complex.bnd_ptr, self.complex.bnd_idx, cptr, cidx, self.label, self.mate
        )
        if not ok:
            raise ValueError("matching is not acyclic: << relation has a cycle")
        self.qrank = qrank

    # -- views ---------------------------------------------------------------

    @property
    def critical(self) -> tuple:
        return tuple(self.complex.id_of(int(i)) for i in np.flatnonzero(self.label == 0))

    @property
    def queens(self) -> tuple:
        return tuple(self.complex.id_of(int(i)) for i in np.flatnonzero(self.label == 1))

    @property
    def kings(self) -> tuple:
        return tuple(self.complex.id_of(int(i)) for i in np.flatnonzero(self.label == 2))

    @property
    def w(self) -> dict:
        if self._w is None:
            self._w = {
                self.complex.id_of(int(q)): self.complex.id_of(int(self.mate[q]))
                for q in np.flatnonzero(self.label == 1)
            }
        return self._w

    def n_critical(self) -> int:
        return int(np.count_nonzero(self.label == 0))

    def verify(self, check_acyclic: bool = True):
        """Re-check all matching invariants; raises on violation."""
        X = self.complex
        if np.any(self.label < 0) or np.any(self.label > 2):
            raise ValueError("labels do not partition the cells")
        queens = np.flatnonzero(self.label == 1)
        kings = np.flatnonzero(self.label == 2)
        if queens.size != kings.size:
            raise ValueError("w is not a bijection")
        for q in queens:
            k = self.mate[q]
            if k < 0 or self.label[k] != 2 or self.mate[k] != q:
                raise ValueError("w is not a bijection")
            if X.dims[k] != X.dims[q] + 1:
                raise ValueError("matched pair with non-adjacent dimensions")
            if X.kappa(X.id_of(int(k)), X.id_of(int(q))) == 0:
                raise ValueError("matched pair with zero incidence")
            if self.grading is not None and self.grading[q] != self.grading[k]:
                raise ValueError("matching crosses fibers")
        if check_acyclic:
            cptr, cidx, _ = X.coboundary_csr()
            ok, _ = _kernels.kahn_queen_order(X.bnd_ptr, X.bnd_idx, cptr, cidx, self.label, self.mate)
            if not ok:
                raise ValueError("matching is not acyclic: << relation has a cycle")


def matching_coreduction(complex: CellComplex, grading=None) -> Matching:
    """Coreduction-based acyclic partial matching (fiber by fiber if graded).

    When no coreduction pair ever forms, every cell is excised free and
    A = X; the Morse complex is then minimal (fiber-wise).
    """
    grade = np.zeros(complex.n, dtype=np.int32) if grading is None else np.asarray(grading, dtype=np.int32)
    cptr, cidx, _ = complex.coboundary_csr()
    label, mate, qrank = _kernels.coreduction_matching(
        complex.bnd_ptr, complex.bnd_idx, complex.bnd_coef, cptr, cidx, complex.dims, grade
    )
    return Matching(complex, label, mate, qrank, grading=None if grading is None else grade)


def v_map(matching: Matching, cell: CellId) -> dict:
    """V(x) = kappa(w(x), x)^{-1} w(x) for queens, 0 otherwise."""
    X = matching.complex
    i = X.index(cell)
    if matching.label[i] != 1:
        return {}
    k = int(matching.mate[i])
    kz = X.kappa(X.id_of(k), cell)
    return {X.id_of(k): X.field.inv(kz)}


def _gamma_residual(matching: Matching, chain: Mapping[CellId, int]):
    X = matching.complex
    chain = normalize_chain(chain, X.p)
    seed_cells = np.array([X.index(c) for c in chain], dtype=np.int32)
    seed_coefs = np.array([chain[c] for c in chain], dtype=np.int64)
    nq = int(np.count_nonzero(matching.label == 1))
    res_c, res_v, gam_c, gam_v = _kernels.gamma_and_residual(
        seed_cells,
        seed_coefs,
        X.bnd_ptr,
        X.bnd_idx,
        X.bnd_coef,
        matching.label,
        matching.mate,
        matching.qrank,
        X.field.inv_table(),
        np.int64(X.p),
        np.int64(nq),
        np.int64(X.bnd_idx.shape[0]),
    )
    residual = {X.id_of(int(c)): int(v) for c, v in zip(res_c, res_v)}
    gam = {X.id_of(int(c)): int(v) for c, v in zip(gam_c, gam_v)}
    return residual, gam


def gamma(matching: Matching, chain: Mapping[CellId, int]) -> dict:
    """The unique splitting homotopy of the matching, evaluated on a chain.

    Image lies in span(K), kernel contains span(A) + span(K), and
    (id - del gamma)(chain) is supported on A and K; gamma^2 = 0 and
    gamma del gamma = gamma.
    """
    _, gam = _gamma_residual(matching, chain)
    return gam


class Reduction:
    """Pair of complexes with chain maps (psi, phi) and splitting homotopy gamma.

    psi: source -> target, phi: target -> source, gamma: source -> source.
    Evaluators are backed by memoized per-basis-cell sparse columns.
    """

    def __init__(self, source: CellComplex, target: CellComplex, psi_cell, phi_cell, gamma_cell):
        self.source = source
        self.target = target
        self._psi_cell = psi_cell
        self._phi_cell = phi_cell
        self._gamma_cell = gamma_cell
        self._psi_memo: dict = {}
        self._phi_memo: dict = {}
        self._gamma_memo: dict = {}

    def _column(self, memo, fn, cell):
        col = memo.get(cell)
        if col is None:
            col = fn(cell)
            memo[cell] = col
        return col

    def _apply(self, memo, fn, chain, p) -> dict:
        acc: dict = {}
        for c, v in chain.items():
            for d, w in self._column(memo, fn, c).items():
                acc[d] = (acc.get(d, 0) + int(v) * w) % p
        return {c: v for c, v in acc.items() if v}

    def psi(self, chain: Mapping[CellId, int]) -> dict:
        return self._apply(self._psi_memo, self._psi_cell, normalize_chain(chain, self.source.p), self.source.p)

    def phi(self, chain: Mapping[CellId, int]) -> dict:
        return self._apply(self._phi_memo, self._phi_cell, normalize_chain(chain, self.source.p), self.source.p)

    def gamma(self, chain: Mapping[CellId, int]) -> dict:
        return self._apply(self._gamma_memo, self._gamma_cell, normalize_chain(chain, self.source.p), self.source.p)


def build_reduction(complex: CellComplex, matching: Matching) -> Reduction:
    """The Morse reduction of a matching; the target basis is the critical cells."""
    crit_idx = np.flatnonzero(matching.label == 0).astype(np.int32)
    nq = int(np.count_nonzero(matching.label == 1))
    dptr, didx, dcoef = _kernels.delta_sweep(
        crit_idx,
        complex.bnd_ptr,
        complex.bnd_idx,
        complex.bnd_coef,
        matching.label,
        matching.mate,
        matching.qrank,
        complex.field.inv_table(),
        np.int64(complex.p),
        np.int64(nq),
        np.int64(complex.bnd_idx.shape[0]),
    )
    remap = np.full(complex.n, -1, dtype=np.int32)
    remap[crit_idx] = np.arange(crit_idx.size, dtype=np.int32)
    if isinstance(complex._ids, np.ndarray):
        ids = complex._ids[crit_idx]
    else:
        ids = [complex._ids[int(i)] for i in crit_idx]
    target = CellComplex(
        ids,
        complex.dims[crit_idx],
        dptr,
        remap[didx],
        dcoef,
        complex.p,
        cubes=complex.cubes,
    )

    def psi_cell(cell):
        residual, _ = _gamma_residual(matching, {cell: 1})
        lab = matching.label
        X = complex
        return {c: v for c, v in residual.items() if lab[X.index(c)] == 0}

    def phi_cell(cell):
        # phi(xi) = xi - gamma(del xi), evaluated in the source complex
        _, gam = _gamma_residual(matching, complex.cell_boundary(cell))
        out = {c: (-v) % complex.p for c, v in gam.items()}
        out[cell] = (out.get(cell, 0) + 1) % complex.p
        return {c: v for c, v in out.items() if v}

    def gamma_cell(cell):
        _, gam = _gamma_residual(matching, {cell: 1})
        return gam

    return Reduction(complex, target, psi_cell, phi_cell, gamma_cell)


def identity_reduction(complex: CellComplex) -> Reduction:
    one = lambda cell: {cell: 1}
    zero = lambda cell: {}
    return Reduction(complex, complex, one, one, zero)


def compose(r1: Reduction, r2: Reduction) -> Reduction:
    """Compose reductions: phi'' = phi phi', psi'' = psi' psi, gamma'' = gamma + phi gamma' psi."""
    if r1.target is not r2.source and r1.target.ids() != r2.source.ids():
        raise ValueError("compose: r1.target and r2.source differ")
    p = r1.source.p

    def psi_cell(cell):
        return r2.psi(r1.psi({cell: 1}))

    def phi_cell(cell):
        return r1.phi(r2.phi({cell: 1}))

    def gamma_cell(cell):
        out = dict(r1.gamma({cell: 1}))
        for c, v in r1.phi(r2.gamma(r1.psi({cell: 1}))).items():
            out[c] = (out.get(c, 0) + v) % p
        return {c: v for c, v in out.items() if v}

    return Reduction(r1.source, r2.target, psi_cell, phi_cell, gamma_cell)


def is_perfect(reduction: Reduction) -> bool:
    """True iff del = del gamma del on every source basis cell."""
    X = reduction.source
    for i in range(X.n):
        cell = X.id_of(i)
        bnd = X.cell_boundary(cell)
        if X.boundary(reduction.gamma(bnd)) != bnd:
            return False
    return True
