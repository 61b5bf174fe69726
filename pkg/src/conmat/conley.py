"""Iterated (graded) Morse reductions down to a minimal / strict complex.

The homology routine repeats matching + reduction until no cell is paired;
the connection-matrix routine does the same with matchings restricted to
the fibers of the grading, so the fixpoint is a strict graded complex (the
Conley complex) whose boundary operator is a connection matrix. The tower
of reductions is retained so generators can be lifted back.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Optional

import numpy as np

from .cells import CellComplex
from .graded import FiberGraph, GradedComplex, fiber_graph, is_strict
from .linalg import rank as gf_rank
from .morse import Reduction, build_reduction, compose, identity_reduction, matching_coreduction
from .order import Poset

STRATEGIES = ("coreduction", "coordinate")


@dataclass
class ConleyResult:
    """Strict graded complex plus the reduction tower that produced it."""

    graded: GradedComplex
    tower: list = dc_field(default_factory=list)
    composed: Optional[Reduction] = None
    strategy: str = "coreduction"

    @property
    def complex(self) -> CellComplex:
        return self.graded.complex

    def fiber_polynomials(self) -> dict:
        return self.graded.fiber_f_polynomials()


def _reduce_once(current: GradedComplex, matching: Matching):
    reduction = build_reduction(current.complex, matching)
    crit_idx = np.flatnonzero(matching.label == 0)
    new_graded = GradedComplex(reduction.target, current.poset, current.grade[crit_idx])
    return reduction, new_graded


def _coreduction_rounds(current: GradedComplex, tower: list, trivial: bool):
    while True:
        grading = None if trivial else current.grade
        matching = matching_coreduction(current.complex, grading=grading)
        if matching.n_critical() == current.complex.n:
            return current
        reduction, current = _reduce_once(current, matching)
        tower.append(reduction)


def _coordinate_rounds(current: GradedComplex, tower: list):
    from .cubical import coordinate_matching

    geom = current.complex.cubes
    if geom is None:
        raise ValueError("coordinate strategy needs a complex with cubical coordinates")
    axis = 0
    stalled = 0
    while stalled < geom.d:
        matching = coordinate_matching(current, axis)
        axis = (axis + 1) % geom.d
        if matching.n_critical() == current.complex.n:
            stalled += 1
            continue
        stalled = 0
        reduction, current = _reduce_once(current, matching)
        tower.append(reduction)
    return current


def connection_matrix(g: GradedComplex, strategy: str = "coreduction", keep_tower: bool = True) -> ConleyResult:
    """Compute a Conley complex and connection matrix for a graded complex.

    Matchings never cross fibers; each round reduces onto the critical cells
    (their input ids survive) and regrades by restriction. The loop stops
    when no cell is paired, at which point every fiber is minimal and the
    result is strict.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    trivial = len(g.poset) == 1
    tower: list = []
    current = g
    if strategy == "coordinate":
        current = _coordinate_rounds(current, tower)
    current = _coreduction_rounds(current, tower, trivial)
    if not is_strict(current):
        raise AssertionError("fixpoint of the matching loop is not strict")
    composed = identity_reduction(g.complex)
    if tower:
        composed = tower[0]
        for r in tower[1:]:
            composed = compose(composed, r)
    if not keep_tower:
        return ConleyResult(current, [], composed, strategy)
    return ConleyResult(current, tower, composed, strategy)


def homology(complex: CellComplex, strategy: str = "coreduction") -> ConleyResult:
    """Iterated Morse reduction with the trivial grading; the result has zero
    boundary and its f-polynomial is the Poincare polynomial."""
    poset = Poset([0])
    g = GradedComplex(complex, poset, np.zeros(complex.n, dtype=np.int32), validate=False)
    result = connection_matrix(g, strategy=strategy)
    if result.complex.bnd_idx.size:
        raise AssertionError("homology fixpoint has nonzero boundary")
    return result


@dataclass
class Block:
    """A block of the result boundary between fiber spans, as a dense matrix."""

    row_ids: list
    col_ids: list
    matrix: np.ndarray
    p: int

    def rank(self) -> int:
        return gf_rank(self.matrix, self.p)

    @property
    def shape(self):
        return self.matrix.shape


def connecting_block(result: ConleyResult, I: Iterable, J: Iterable) -> Block:
    """The block of the result boundary from fiber-span J into fiber-span I.

    I and J must be convex in P. Rows (resp. columns) are the result cells
    graded in I (resp. J), in complex order; entries are kappa values.
    """
    g = result.graded
    P = g.poset
    I = frozenset(I)
    J = frozenset(J)
    for name, S in (("I", I), ("J", J)):
        if not P.is_convex(S):
            raise ValueError(f"{name} = {sorted(map(str, S))} is not convex in P")
    X = g.complex
    sel_i = g._piece_mask(I)
    sel_j = g._piece_mask(J)
    rows = np.flatnonzero(sel_i)
    cols = np.flatnonzero(sel_j)
    row_pos = {int(r): k for k, r in enumerate(rows)}
    mat = np.zeros((rows.size, cols.size), dtype=np.int64)
    for cj, c in enumerate(cols):
        for k in range(X.bnd_ptr[c], X.bnd_ptr[c + 1]):
            f = int(X.bnd_idx[k])
            if f in row_pos:
                mat[row_pos[f], cj] = X.bnd_coef[k]
    return Block([X.id_of(int(r)) for r in rows], [X.id_of(int(c)) for c in cols], mat, X.p)


def conley_morse_graph(result: ConleyResult) -> FiberGraph:
    """Fiber graph of the strict result (per-fiber Poincare polynomials)."""
    return fiber_graph(result.graded)
