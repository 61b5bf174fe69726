"""Cubical complexes from value-on-top-cell grids, and coordinate matchings.

Cells of a grid with shape (n_1, ..., n_d) are elementary cubes addressed by
(anchor, extent bitmask): anchor_i in [0, n_i] and anchor_i <= n_i - 1 on
extent axes. Cell ids are the integer key (anchor linear index << d) | mask,
so face and coface arithmetic is O(1) and ids survive restriction and Morse
reduction. An axis flagged open drops the cells lying entirely on its upper
boundary, which removes them from every boundary they appear in (the
standard device for avoiding critical cells on that side).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from .cells import CellComplex
from .graded import GradedComplex
from .morse import Matching
from .order import Poset, chain_poset


class CubeGeometry:
    """Encode/decode elementary cubes of a fixed grid shape as integer ids."""

    def __init__(self, shape: Sequence[int]):
        self.shape = tuple(int(n) for n in shape)
        if not self.shape or any(n < 1 for n in self.shape):
            raise ValueError(f"bad grid shape {self.shape}")
        self.d = len(self.shape)
        radix = np.array([n + 1 for n in self.shape], dtype=np.int64)
        strides = np.ones(self.d, dtype=np.int64)
        for i in range(self.d - 2, -1, -1):
            strides[i] = strides[i + 1] * radix[i + 1]
        self.strides = strides

    def encode(self, anchors: np.ndarray, mask) -> np.ndarray:
        """anchors: (..., d) int array; mask: int or int array; returns ids."""
        lin = (np.asarray(anchors, dtype=np.int64) * self.strides).sum(axis=-1)
        return (lin << self.d) | np.asarray(mask, dtype=np.int64)

    def decode(self, ids) -> tuple:
        ids = np.asarray(ids, dtype=np.int64)
        mask = ids & ((1 << self.d) - 1)
        lin = ids >> self.d
        anchors = np.empty(ids.shape + (self.d,), dtype=np.int64)
        for i in range(self.d):
            anchors[..., i] = lin // self.strides[i]
            lin = lin % self.strides[i]
        return anchors, mask

    def describe(self, cell_id: int) -> str:
        a, m = self.decode(np.array([cell_id]))
        ext = [i for i in range(self.d) if int(m[0]) >> i & 1]
        return f"cube(anchor={tuple(int(x) for x in a[0])}, extent={ext})"


@dataclass
class CubicalGrid:
    """Grid input: per-axis extents, row-major grading labels on top cells,
    and axes whose upper boundary is open."""

    shape: tuple
    values: list
    open_axes: frozenset = dc_field(default_factory=frozenset)

    def __post_init__(self):
        self.shape = tuple(int(n) for n in self.shape)
        self.open_axes = frozenset(int(a) for a in self.open_axes)
        size = int(np.prod(self.shape))
        if len(self.values) != size:
            raise ValueError(f"expected {size} values for shape {self.shape}, got {len(self.values)}")
        for a in self.open_axes:
            if not 0 <= a < len(self.shape):
                raise ValueError(f"open axis {a} out of range for shape {self.shape}")


def _mask_axes(mask: int, d: int) -> list:
    return [i for i in range(d) if mask >> i & 1]


def _enumerate_cells(geom: CubeGeometry, open_axes) -> tuple:
    """All cell ids and dims in canonical order (by dim, then mask, then anchor)."""
    d = geom.d
    masks = sorted(range(1 << d), key=lambda m: (bin(m).count("1"), m))
    ids_parts = []
    dims_parts = []
    anchors_by_mask = {}
    for m in masks:
        ranges = []
        for i in range(d):
            n = geom.shape[i]
            if m >> i & 1:
                ranges.append(np.arange(n, dtype=np.int64))
            elif i in open_axes:
                ranges.append(np.arange(n, dtype=np.int64))
            else:
                ranges.append(np.arange(n + 1, dtype=np.int64))
        grids = np.meshgrid(*ranges, indexing="ij")
        anchors = np.stack([gr.reshape(-1) for gr in grids], axis=-1)
        anchors_by_mask[m] = anchors
        ids_parts.append(geom.encode(anchors, m))
        dims_parts.append(np.full(anchors.shape[0], bin(m).count("1"), dtype=np.int32))
    return np.concatenate(ids_parts), np.concatenate(dims_parts), anchors_by_mask, masks


def _min_star_grades(geom: CubeGeometry, ranks: np.ndarray, open_axes, masks, anchors_by_mask) -> np.ndarray:
    """Grade of each cell: min value rank over top cells in its star."""
    big = np.iinfo(np.int64).max
    padded = np.pad(ranks.astype(np.int64), 1, constant_values=big)
    out = []
    for m in masks:
        g = padded
        for i in range(geom.d):
            n = geom.shape[i]
            if m >> i & 1:
                g = np.take(g, np.arange(1, n + 1), axis=i)
            else:
                lo = np.take(g, np.arange(0, n + 1), axis=i)
                hi = np.take(g, np.arange(1, n + 2), axis=i)
                g = np.minimum(lo, hi)
                if i in open_axes:
                    g = np.take(g, np.arange(0, n), axis=i)
        out.append(g.reshape(-1))
    return np.concatenate(out).astype(np.int32)


def _mask_layout(geom: CubeGeometry, open_axes, masks):
    """Index arithmetic for the canonical cell ordering: per-mask group
    offsets plus C-order strides over per-axis anchor counts."""
    d = geom.d
    offsets = {}
    strides = {}
    offset = 0
    for m in masks:
        sizes = []
        for i in range(d):
            n = geom.shape[i]
            sizes.append(n if (m >> i & 1) or i in open_axes else n + 1)
        st = np.ones(d, dtype=np.int64)
        for i in range(d - 2, -1, -1):
            st[i] = st[i + 1] * sizes[i + 1]
        offsets[m] = offset
        strides[m] = st
        offset += int(np.prod(sizes))
    return offsets, strides, offset


def _boundary_csr(geom: CubeGeometry, p: int, open_axes, masks, anchors_by_mask):
    d = geom.d
    offsets, strides, n = _mask_layout(geom, open_axes, masks)
    rows = []
    cols = []
    coefs = []
    for m in masks:
        anchors = anchors_by_mask[m]
        ncells = anchors.shape[0]
        axes = _mask_axes(m, d)
        for rho, i in enumerate(axes):
            sub = m & ~(1 << i)
            sign = 1 if rho % 2 == 0 else p - 1
            neg = (p - sign) % p
            # front face at anchor, back face at anchor + delta_i; the front
            # face is never on an open upper boundary, the back face may be
            front_idx = offsets[sub] + anchors @ strides[sub]
            back_ok = np.ones(ncells, dtype=bool)
            if i in open_axes:
                back_ok &= anchors[:, i] + 1 != geom.shape[i]
            back_idx = front_idx + strides[sub][i]
            me = np.arange(ncells, dtype=np.int64) + offsets[m]
            if neg:
                rows.append(me)
                cols.append(front_idx)
                coefs.append(np.full(ncells, neg, dtype=np.int64))
            rows.append(me[back_ok])
            cols.append(back_idx[back_ok])
            coefs.append(np.full(int(back_ok.sum()), sign, dtype=np.int64))
    if rows:
        r = np.concatenate(rows)
        fidx = np.concatenate(cols)
        v = np.concatenate(coefs)
    else:
        r = np.empty(0, np.int64)
        fidx = np.empty(0, np.int64)
        v = np.empty(0, np.int64)
    # group by row only; entries within a row keep generation order (axis asc)
    order = np.argsort(r, kind="stable")
    fidx, v = fidx[order], v[order]
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(r, minlength=n), out=ptr[1:])
    return ptr, fidx.astype(np.int32), v


def _build_cell_complex(geom: CubeGeometry, p: int, open_axes) -> tuple:
    ids, dims, anchors_by_mask, masks = _enumerate_cells(geom, open_axes)
    ptr, idx, coef = _boundary_csr(geom, p, open_axes, masks, anchors_by_mask)
    complex = CellComplex(ids, dims, ptr, idx, coef, p, cubes=geom)
    return complex, masks, anchors_by_mask


def build_complex(grid: CubicalGrid, p: int = 2) -> GradedComplex:
    """Full cubical complex of the grid, graded by min-over-star of the values.

    The grading labels are canonicalized to a chain poset on the sorted
    distinct values; nu(cell) = min{value(eta) : eta top cell in star(cell)}
    is order-preserving since stars shrink as cells grow.
    """
    geom = CubeGeometry(grid.shape)
    labels = sorted(set(grid.values))
    rank_of = {v: i for i, v in enumerate(labels)}
    ranks = np.array([rank_of[v] for v in grid.values], dtype=np.int64).reshape(grid.shape)
    complex, masks, anchors_by_mask = _build_cell_complex(geom, p, grid.open_axes)
    grade = _min_star_grades(geom, ranks, grid.open_axes, masks, anchors_by_mask)
    return GradedComplex(complex, chain_poset(labels), grade)


def grid_complex(shape: Sequence[int], p: int = 2, open_axes=()) -> CellComplex:
    """Ungraded full cubical complex of a grid shape."""
    geom = CubeGeometry(shape)
    complex, _, _ = _build_cell_complex(geom, p, frozenset(int(a) for a in open_axes))
    return complex


def interval_complex(
    n_edges: int,
    vertex_labels: Sequence,
    edge_labels: Sequence,
    poset: Optional[Poset] = None,
    p: int = 2,
) -> GradedComplex:
    """1-dimensional complex with n_edges edges and n_edges + 1 vertices.

    Labels are given per cell (vertices then edges, left to right). If no
    poset is supplied the sorted distinct labels form a chain. Raises if the
    labels are not order-consistent along the interval.
    """
    if n_edges < 1:
        raise ValueError("need at least one edge")
    if len(vertex_labels) != n_edges + 1 or len(edge_labels) != n_edges:
        raise ValueError("label counts do not match the interval")
    complex = grid_complex((n_edges,), p=p)
    if poset is None:
        labels = set(vertex_labels if isinstance(vertex_labels, (list, tuple)) else np.unique(vertex_labels).tolist())
        labels |= set(edge_labels if isinstance(edge_labels, (list, tuple)) else np.unique(edge_labels).tolist())
        poset = chain_poset(sorted(labels))
    # cells are ordered vertices (anchor 0..N) then edges (anchor 0..N-1);
    # map labels through np.unique so large inputs stay vectorized
    grade = np.empty(complex.n, dtype=np.int32)
    for target, labs in ((grade[: n_edges + 1], vertex_labels), (grade[n_edges + 1 :], edge_labels)):
        arr = np.asarray(labs)
        uniq, inverse = np.unique(arr, return_inverse=True)
        lut = np.array([poset.index(u.item() if hasattr(u, "item") else u) for u in uniq], dtype=np.int32)
        target[:] = lut[inverse]
    return GradedComplex(complex, poset, grade)


def coordinate_matching(g: GradedComplex, axis: int) -> Matching:
    """Graded acyclic matching pairing cells with their positive-axis cofaces.

    Each cube lacking extent in `axis` is paired with the cube of the same
    anchor and extent plus `axis`, when that cube is present, its incidence
    on the cell is nonzero, and both lie in the same fiber. Unpaired cells
    are critical.
    """
    X = g.complex
    geom = X.cubes
    if geom is None:
        raise ValueError("complex does not carry cubical coordinates")
    if not 0 <= axis < geom.d:
        raise ValueError(f"axis {axis} out of range for {geom.d}-dimensional grid")
    ids = np.array([X.id_of(i) for i in range(X.n)], dtype=np.int64)
    anchors, mask = geom.decode(ids)
    bit = 1 << axis
    w = {}
    for i in range(X.n):
        if mask[i] & bit:
            continue
        king_id = int(geom.encode(anchors[i], int(mask[i]) | bit))
        if king_id not in X:
            continue
        queen_id = X.id_of(i)
        if g.grade[i] != g.grade[X.index(king_id)]:
            continue
        if X.kappa(king_id, queen_id) == 0:
            continue
        w[queen_id] = king_id
    return Matching.build(X, w, grading=g.grade)
