"""Cell complexes: a finite graded set of cells with an incidence function over GF(p).

Cells are identified by user-supplied tokens (str or int). Internally a
complex stores cells in input order and keeps the boundary operator in CSR
form; chains are plain dicts {cell id: nonzero residue mod p}.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .field import GF

CellId = Hashable

MAX_VIOLATIONS = 100


def csr_gather(ptr: np.ndarray, dat: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Concatenate dat[ptr[r]:ptr[r+1]] over rows, vectorized."""
    rows = np.asarray(rows, dtype=np.int64)
    counts = ptr[rows + 1] - ptr[rows]
    total = int(counts.sum())
    if total == 0:
        return dat[:0]
    offsets = np.cumsum(counts) - counts
    pos = np.arange(total, dtype=np.int64) - np.repeat(offsets, counts) + np.repeat(ptr[rows], counts)
    return dat[pos]


def csr_transpose(n_rows: int, n_cols: int, ptr, idx, coef):
    """Transpose of a CSR incidence structure, rows kept in input order."""
    order = np.argsort(idx, kind="stable")
    rows = np.repeat(np.arange(n_rows, dtype=np.int32), np.diff(ptr))
    tptr = np.zeros(n_cols + 1, dtype=np.int64)
    np.cumsum(np.bincount(idx, minlength=n_cols), out=tptr[1:])
    return tptr, rows[order], coef[order]


def normalize_chain(chain: Mapping[CellId, int], p: int) -> dict:
    """Reduce coefficients mod p and drop zeros."""
    out = {}
    for c, v in chain.items():
        v = int(v) % p
        if v:
            out[c] = v
    return out


@dataclass
class ValidationReport:
    """Violations found by CellComplex.validate, capped at MAX_VIOLATIONS."""

    violations: list = dc_field(default_factory=list)
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str) -> bool:
        """Record a violation; returns False once the cap is hit."""
        if len(self.violations) >= MAX_VIOLATIONS:
            self.truncated = True
            return False
        self.violations.append(message)
        return True

    def __str__(self):
        if self.ok:
            return "valid"
        lines = list(self.violations)
        if self.truncated:
            lines.append("... (truncated)")
        return "\n".join(lines)


class CellComplex:
    """The cell complex (X, <=, kappa, dim); immutable after construction.

    The face partial order is the reflexive-transitive closure of the
    kappa-support relation together with any explicitly supplied face pairs.
    """

    def __init__(self, ids, dims, bnd_ptr, bnd_idx, bnd_coef, p, extra_faces=None, cubes=None):
        self.p = int(p)
        self.field = GF(self.p)
        self._ids = ids  # list or np.ndarray, input order
        self.dims = np.asarray(dims, dtype=np.int32)
        self.bnd_ptr = np.asarray(bnd_ptr, dtype=np.int64)
        self.bnd_idx = np.asarray(bnd_idx, dtype=np.int32)
        self.bnd_coef = np.asarray(bnd_coef, dtype=np.int64)
        n = len(self._ids)
        if self.dims.shape != (n,) or self.bnd_ptr.shape != (n + 1,):
            raise ValueError("inconsistent array shapes")
        # extra_faces: (cell_idx, face_idx) arrays for order relations not in kappa
        if extra_faces is None:
            extra_faces = (np.empty(0, np.int32), np.empty(0, np.int32))
        self.extra_faces = (
            np.asarray(extra_faces[0], dtype=np.int32),
            np.asarray(extra_faces[1], dtype=np.int32),
        )
        self.cubes = cubes
        self._index = None
        self._cob = None
        self._order_down = None
        self._order_up = None

    # -- construction -----------------------------------------------------

    @classmethod
    def build(
        cls,
        cells: Sequence[tuple],
        boundary: Mapping[CellId, Iterable[tuple]],
        p: int = 2,
        faces: Iterable[tuple] = (),
        cubes=None,
    ) -> "CellComplex":
        """Build from (id, dim) pairs and a boundary map {id: [(face id, coef)]}.

        Coefficients are reduced mod p; zero entries are dropped. `faces` may
        add explicit (face id, cell id) order relations beyond kappa support.
        """
        gf = GF(p)
        ids = [c for c, _ in cells]
        index = {c: i for i, c in enumerate(ids)}
        if len(index) != len(ids):
            raise ValueError("duplicate cell ids")
        dims = np.array([d for _, d in cells], dtype=np.int32)
        ptr = np.zeros(len(ids) + 1, dtype=np.int64)
        flat_idx = []
        flat_coef = []
        for i, c in enumerate(ids):
            row = []
            for f, v in boundary.get(c, ()):
                if f not in index:
                    raise KeyError(f"unknown face id {f!r} in boundary of {c!r}")
                v = int(v) % gf.p
                if v:
                    row.append((index[f], v))
            row.sort()
            seen = set()
            for j, _ in row:
                if j in seen:
                    raise ValueError(f"duplicate face {ids[j]!r} in boundary of {c!r}")
                seen.add(j)
            ptr[i + 1] = ptr[i] + len(row)
            flat_idx.extend(j for j, _ in row)
            flat_coef.extend(v for _, v in row)
        extra = None
        faces = list(faces)
        if faces:
            src = np.array([index[c] for _, c in faces], dtype=np.int32)
            dst = np.array([index[f] for f, _ in faces], dtype=np.int32)
            extra = (src, dst)
        return cls(
            ids,
            dims,
            ptr,
            np.array(flat_idx, dtype=np.int32),
            np.array(flat_coef, dtype=np.int64),
            p,
            extra_faces=extra,
            cubes=cubes,
        )

    # -- basics ------------------------------------------------------------

    def __len__(self):
        return len(self._ids)

    @property
    def n(self) -> int:
        return len(self._ids)

    def ids(self) -> list:
        if isinstance(self._ids, np.ndarray):
            return [int(x) for x in self._ids]
        return list(self._ids)

    def id_of(self, i: int) -> CellId:
        x = self._ids[i]
        return int(x) if isinstance(x, np.integer) else x

    def index(self, cell: CellId) -> int:
        if self._index is None:
            self._index = {self.id_of(i): i for i in range(self.n)}
        try:
            return self._index[cell]
        except KeyError:
            raise KeyError(f"unknown cell id {cell!r}") from None

    def __contains__(self, cell: CellId) -> bool:
        if self._index is None:
            self._index = {self.id_of(i): i for i in range(self.n)}
        return cell in self._index

    def dim_of(self, cell: CellId) -> int:
        return int(self.dims[self.index(cell)])

    @property
    def dimension(self) -> int:
        return int(self.dims.max()) if self.n else -1

    def kappa(self, cell: CellId, face: CellId) -> int:
        """Incidence number kappa(cell, face) as a residue in [0, p)."""
        i = self.index(cell)
        j = self.index(face)
        lo, hi = self.bnd_ptr[i], self.bnd_ptr[i + 1]
        hit = np.flatnonzero(self.bnd_idx[lo:hi] == j)
        if hit.size:
            return int(self.bnd_coef[lo + int(hit[0])])
        return 0

    def cell_boundary(self, cell: CellId) -> dict:
        """The chain del(cell) = sum kappa(cell, f) f."""
        i = self.index(cell)
        lo, hi = self.bnd_ptr[i], self.bnd_ptr[i + 1]
        return {self.id_of(int(j)): int(v) for j, v in zip(self.bnd_idx[lo:hi], self.bnd_coef[lo:hi])}

    def boundary(self, chain: Mapping[CellId, int]) -> dict:
        """Linear extension of del to a chain; result lives one dimension lower."""
        acc: dict = {}
        p = self.p
        for c, v in chain.items():
            i = self.index(c)
            lo, hi = self.bnd_ptr[i], self.bnd_ptr[i + 1]
            for j, w in zip(self.bnd_idx[lo:hi], self.bnd_coef[lo:hi]):
                f = self.id_of(int(j))
                acc[f] = (acc.get(f, 0) + int(v) * int(w)) % p
        return {c: v for c, v in acc.items() if v}

    def coboundary_csr(self):
        if self._cob is None:
            self._cob = csr_transpose(self.n, self.n, self.bnd_ptr, self.bnd_idx, self.bnd_coef)
        return self._cob

    # -- the face partial order --------------------------------------------

    def _order_csrs(self):
        """CSR adjacency for the face order generators, both directions."""
        if self._order_down is None:
            ex_src, ex_dst = self.extra_faces
            if ex_src.size:
                rows = np.concatenate([np.repeat(np.arange(self.n, dtype=np.int32), np.diff(self.bnd_ptr)), ex_src])
                cols = np.concatenate([self.bnd_idx, ex_dst])
            else:
                rows = np.repeat(np.arange(self.n, dtype=np.int32), np.diff(self.bnd_ptr))
                cols = self.bnd_idx
            order = np.argsort(rows, kind="stable")
            ptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(rows, minlength=self.n), out=ptr[1:])
            self._order_down = (ptr, cols[order].astype(np.int32))
            order = np.argsort(cols, kind="stable")
            uptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(cols, minlength=self.n), out=uptr[1:])
            self._order_up = (uptr, rows[order].astype(np.int32))
        return self._order_down, self._order_up

    def _sweep_mask(self, start: np.ndarray, up: bool) -> np.ndarray:
        down_csr, up_csr = self._order_csrs()
        ptr, idx = up_csr if up else down_csr
        mask = start.copy()
        frontier = np.flatnonzero(start)
        while frontier.size:
            nbrs = csr_gather(ptr, idx, frontier)
            nbrs = nbrs[~mask[nbrs]]
            if nbrs.size == 0:
                break
            frontier = np.unique(nbrs)
            mask[frontier] = True
        return mask

    def star(self, cell: CellId) -> set:
        """Up-set of the cell in the face order (includes the cell)."""
        start = np.zeros(self.n, dtype=bool)
        start[self.index(cell)] = True
        return {self.id_of(i) for i in np.flatnonzero(self._sweep_mask(start, up=True))}

    def closure(self, cell: CellId) -> set:
        """Down-set of the cell in the face order (includes the cell)."""
        start = np.zeros(self.n, dtype=bool)
        start[self.index(cell)] = True
        return {self.id_of(i) for i in np.flatnonzero(self._sweep_mask(start, up=False))}

    def top_cells(self) -> set:
        """Cells maximal in the face order, i.e. star(cell) == {cell}."""
        _, up_csr = self._order_csrs()
        ptr, _ = up_csr
        return {self.id_of(i) for i in np.flatnonzero(np.diff(ptr) == 0)}

    # -- subcomplexes --------------------------------------------------------

    def is_convex(self, subset: Iterable[CellId]) -> bool:
        mask = np.zeros(self.n, dtype=bool)
        for c in subset:
            mask[self.index(c)] = True
        down = self._sweep_mask(mask, up=False)
        up = self._sweep_mask(mask, up=True)
        return bool(np.all(mask[down & up]))

    def restrict(self, subset: Iterable[CellId], *, check_convex: bool = True) -> "CellComplex":
        """Subcomplex on a convex subset, with kappa restricted."""
        sub = list(subset)
        mask = np.zeros(self.n, dtype=bool)
        for c in sub:
            mask[self.index(c)] = True
        if check_convex:
            down = self._sweep_mask(mask, up=False)
            up = self._sweep_mask(mask, up=True)
            bad = down & up & ~mask
            if bad.any():
                witness = self.id_of(int(np.flatnonzero(bad)[0]))
                raise ValueError(f"subset is not convex in the face order: missing {witness!r}")
        return self._restrict_mask(mask)

    def _restrict_mask(self, mask: np.ndarray) -> "CellComplex":
        keep = np.flatnonzero(mask)
        remap = np.full(self.n, -1, dtype=np.int32)
        remap[keep] = np.arange(keep.size, dtype=np.int32)
        if isinstance(self._ids, np.ndarray):
            ids = self._ids[keep]
        else:
            ids = [self._ids[i] for i in keep]
        counts = np.diff(self.bnd_ptr)
        rows_keep = np.repeat(mask, counts)
        cols_keep = mask[self.bnd_idx]
        entry_keep = rows_keep & cols_keep
        new_counts = np.bincount(
            np.repeat(np.arange(self.n), counts)[entry_keep], minlength=self.n
        )[keep]
        ptr = np.zeros(keep.size + 1, dtype=np.int64)
        np.cumsum(new_counts, out=ptr[1:])
        idx = remap[self.bnd_idx[entry_keep]]
        coef = self.bnd_coef[entry_keep]
        ex_src, ex_dst = self.extra_faces
        extra = None
        if ex_src.size:
            ek = mask[ex_src] & mask[ex_dst]
            extra = (remap[ex_src[ek]], remap[ex_dst[ek]])
        return CellComplex(ids, self.dims[keep], ptr, idx, coef, self.p, extra_faces=extra, cubes=self.cubes)

    # -- polynomials & validation ---------------------------------------------

    def f_polynomial(self):
        from .polynomial import IntPolynomial

        if self.n == 0:
            return IntPolynomial()
        return IntPolynomial.from_counts(np.bincount(self.dims))

    def poincare_polynomial(self):
        """Poincare polynomial sum dim H_i t^i, via the homology reduction."""
        from .conley import homology

        report = self.validate()
        if not report.ok:
            raise ValueError(f"invalid complex:\n{report}")
        return homology(self).complex.f_polynomial()

    def euler_characteristic(self) -> int:
        return self.f_polynomial()(-1)

    def validate(self) -> ValidationReport:
        """Check the cell complex conditions; empty report iff valid."""
        report = ValidationReport()
        # condition 2: kappa nonzero only across adjacent dimensions
        rows = np.repeat(np.arange(self.n), np.diff(self.bnd_ptr))
        bad = np.flatnonzero(self.dims[rows] != self.dims[self.bnd_idx] + 1)
        for k in bad:
            if not report.add(
                "condition 2: kappa(%r, %r) != 0 but dims are %d and %d"
                % (self.id_of(int(rows[k])), self.id_of(int(self.bnd_idx[k])), self.dims[rows[k]], self.dims[self.bnd_idx[k]])
            ):
                return report
        bad_coef = np.flatnonzero((self.bnd_coef <= 0) | (self.bnd_coef >= self.p))
        for k in bad_coef:
            if not report.add(
                "coefficient out of range mod %d on kappa(%r, %r)"
                % (self.p, self.id_of(int(rows[k])), self.id_of(int(self.bnd_idx[k])))
            ):
                return report
        # explicit face relations must descend in dimension
        ex_src, ex_dst = self.extra_faces
        for s, d in zip(ex_src, ex_dst):
            if self.dims[d] >= self.dims[s]:
                if not report.add(
                    "face order: dim is not order-preserving on explicit pair (%r <= %r)"
                    % (self.id_of(int(d)), self.id_of(int(s)))
                ):
                    return report
        # condition 3: del o del = 0
        from ._kernels import first_dd_violations

        viol = first_dd_violations(
            self.bnd_ptr, self.bnd_idx, self.bnd_coef, np.int64(self.p), np.int64(MAX_VIOLATIONS)
        )
        for cell_i, face_j in viol:
            if not report.add(
                "condition 3: (del o del)(%r) has nonzero coefficient on %r"
                % (self.id_of(int(cell_i)), self.id_of(int(face_j)))
            ):
                return report
        return report

    def __repr__(self):
        return f"CellComplex(n={self.n}, p={self.p}, f={self.f_polynomial()})"
