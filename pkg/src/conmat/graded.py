"""Poset-graded cell complexes: fibers, filtered pieces, strictness checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .cells import CellComplex, CellId
from .order import Poset
from .polynomial import IntPolynomial


class GradedComplex:
    """A cell complex with an order-preserving grading nu into a finite poset.

    Order preservation (kappa(xi, xi') != 0 implies nu(xi') <= nu(xi)) is
    validated at construction; every downstream result assumes it.
    """

    def __init__(self, complex: CellComplex, poset: Poset, nu, *, validate: bool = True):
        self.complex = complex
        self.poset = poset
        if isinstance(nu, np.ndarray):
            self.grade = nu.astype(np.int32)
            if self.grade.shape != (complex.n,):
                raise ValueError("grade array has wrong length")
            if complex.n and (self.grade.min() < 0 or self.grade.max() >= len(poset)):
                raise ValueError("grade array out of range")
        else:
            grade = np.empty(complex.n, dtype=np.int32)
            for i in range(complex.n):
                cell = complex.id_of(i)
                if cell not in nu:
                    raise ValueError(f"grading not defined on cell {cell!r}")
                grade[i] = poset.index(nu[cell])
            self.grade = grade
        if validate:
            bad = self._order_violation()
            if bad is not None:
                cell, face = bad
                raise ValueError(
                    f"grading is not order-preserving: kappa({cell!r}, {face!r}) != 0 "
                    f"but nu({face!r}) is not <= nu({cell!r})"
                )

    def _order_violation(self):
        X = self.complex
        leq = self.poset.leq_matrix()
        rows = np.repeat(np.arange(X.n), np.diff(X.bnd_ptr))
        ok = leq[self.grade[X.bnd_idx], self.grade[rows]]
        if not ok.all():
            k = int(np.flatnonzero(~ok)[0])
            return X.id_of(int(rows[k])), X.id_of(int(X.bnd_idx[k]))
        ex_src, ex_dst = X.extra_faces
        if ex_src.size:
            ok = leq[self.grade[ex_dst], self.grade[ex_src]]
            if not ok.all():
                k = int(np.flatnonzero(~ok)[0])
                return X.id_of(int(ex_src[k])), X.id_of(int(ex_dst[k]))
        return None

    def nu(self, cell: CellId):
        return self.poset.elements[self.grade[self.complex.index(cell)]]

    def nu_map(self) -> dict:
        return {self.complex.id_of(i): self.poset.elements[self.grade[i]] for i in range(self.complex.n)}

    def fiber(self, p) -> CellComplex:
        """The subcomplex on nu^{-1}(p) (convex, hence a subcomplex)."""
        mask = self.grade == self.poset.index(p)
        return self.complex._restrict_mask(mask)

    def filtered_piece(self, a: Iterable) -> CellComplex:
        """The closed subcomplex nu^{-1}(a) for a down-set a of P."""
        a = frozenset(a)
        if not self.poset.is_down_set(a):
            raise ValueError(f"{sorted(map(str, a))} is not a down-set")
        return self.complex._restrict_mask(self._piece_mask(a))

    def _piece_mask(self, a: Iterable) -> np.ndarray:
        sel = np.zeros(len(self.poset), dtype=bool)
        for e in a:
            sel[self.poset.index(e)] = True
        return sel[self.grade]

    def fiber_f_polynomials(self) -> dict:
        """f-polynomial of each fiber, keyed by poset element."""
        X = self.complex
        nelem = len(self.poset)
        if X.n == 0:
            return {e: IntPolynomial() for e in self.poset.elements}
        dmax = int(X.dims.max())
        counts = np.bincount(
            self.grade.astype(np.int64) * (dmax + 1) + X.dims, minlength=nelem * (dmax + 1)
        ).reshape(nelem, dmax + 1)
        return {
            e: IntPolynomial.from_counts(counts[i]) for i, e in enumerate(self.poset.elements)
        }

    def __repr__(self):
        return f"GradedComplex(n={self.complex.n}, P={list(self.poset.elements)!r})"


def is_strict(g: GradedComplex) -> bool:
    """True iff every fiber's internal boundary vanishes."""
    X = g.complex
    rows = np.repeat(np.arange(X.n), np.diff(X.bnd_ptr))
    return not bool(np.any(g.grade[rows] == g.grade[X.bnd_idx]))


def is_strict_filtering(g: GradedComplex) -> bool:
    """Strictness in the lattice-filtered formulation.

    For every join-irreducible down-set a = down(s), the ambient boundary
    must map chains of nu^{-1}(a) into nu^{-1}(pred(a)) where pred(a) is the
    union of the principal down-sets strictly below s. Provably equivalent
    to is_strict; kept as the independent check.
    """
    X = g.complex
    rows = np.repeat(np.arange(X.n), np.diff(X.bnd_ptr))
    leq = g.poset.leq_matrix()
    for s_idx in range(len(g.poset)):
        in_a = leq[:, s_idx]  # elements <= s
        pred = in_a.copy()
        pred[s_idx] = False  # elements < s
        src_in = in_a[g.grade[rows]]
        dst_ok = pred[g.grade[X.bnd_idx]]
        if np.any(src_in & ~dst_ok):
            return False
    return True


def is_p_filtered(g_src: GradedComplex, g_dst: GradedComplex, mapping: Mapping[CellId, Mapping[CellId, int]]) -> bool:
    """True iff the per-cell linear map never raises the grade.

    mapping sends each source cell to a chain in the destination complex;
    the map is P-filtered iff every destination cell's grade is <= the
    source cell's grade.
    """
    if g_src.poset is not g_dst.poset and g_src.poset.elements != g_dst.poset.elements:
        raise ValueError("graded complexes live over different posets")
    P = g_src.poset
    for i in range(g_src.complex.n):
        cell = g_src.complex.id_of(i)
        if cell not in mapping:
            raise ValueError(f"map not defined on source cell {cell!r}")
        q = P.elements[g_src.grade[i]]
        for dst, v in mapping[cell].items():
            if int(v) % g_dst.complex.p == 0:
                continue
            if not P.leq(g_dst.nu(dst), q):
                return False
    return True


@dataclass
class FiberGraph:
    """Hasse diagram of P annotated with per-fiber f-polynomials."""

    poset: Poset
    polynomials: dict  # poset element -> IntPolynomial
    edges: tuple  # Hasse covers (lower, upper)

    def to_dot(self) -> str:
        """DOT digraph; one node per element, one edge upper -> lower per cover."""
        lines = ["digraph fibergraph {"]
        for e in self.poset.elements:
            lines.append(f'  "{e}" [label="{e}: {self.polynomials[e]}"];')
        for lo, hi in self.edges:
            lines.append(f'  "{hi}" -> "{lo}";')
        lines.append("}")
        return "\n".join(lines)


def fiber_graph(g: GradedComplex) -> FiberGraph:
    return FiberGraph(g.poset, g.fiber_f_polynomials(), g.poset.hasse_covers())
