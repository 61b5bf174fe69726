"""Finite posets, down-sets, convex sets, and the down-set lattice."""

from __future__ import annotations

from typing import Hashable, Iterable, Sequence

DOWN_SET_LATTICE_CAP = 20


class Poset:
    """Immutable finite poset given by elements and covering (lower, upper) pairs.

    The supplied pairs are treated as generators: the order is their
    reflexive-transitive closure. Reachability is precomputed as bitmasks,
    so leq is O(1).
    """

    __slots__ = ("elements", "covers", "_index", "_down_masks", "_up_masks")

    def __init__(self, elements: Iterable[Hashable], covers: Iterable[tuple] = ()):
        self.elements = tuple(elements)
        self._index = {e: i for i, e in enumerate(self.elements)}
        if len(self._index) != len(self.elements):
            raise ValueError("poset elements must be distinct")
        n = len(self.elements)
        gen = [[] for _ in range(n)]  # gen[upper] -> list of lowers
        seen = set()
        cov = []
        for lo, hi in covers:
            i, j = self.index(lo), self.index(hi)
            if i == j:
                raise ValueError(f"self-cover {lo!r}")
            if (i, j) not in seen:
                seen.add((i, j))
                gen[j].append(i)
                cov.append((lo, hi))
        self.covers = tuple(cov)
        # down_masks[i] = bitmask of {j : j <= i}, via DFS with cycle detection
        down = [0] * n
        state = [0] * n  # 0 unvisited, 1 in progress, 2 done
        order = []

        def visit(i):
            stack = [(i, 0)]
            state[i] = 1
            while stack:
                node, k = stack.pop()
                lowers = gen[node]
                if k < len(lowers):
                    stack.append((node, k + 1))
                    m = lowers[k]
                    if state[m] == 1:
                        raise ValueError("cover relation contains a cycle")
                    if state[m] == 0:
                        state[m] = 1
                        stack.append((m, 0))
                else:
                    state[node] = 2
                    order.append(node)

        for i in range(n):
            if state[i] == 0:
                visit(i)
        for i in order:
            m = 1 << i
            for lo in gen[i]:
                m |= down[lo]
            down[i] = m
        self._down_masks = tuple(down)
        up = [0] * n
        for i in range(n):
            for j in range(n):
                if down[j] >> i & 1:
                    up[i] |= 1 << j
        self._up_masks = tuple(up)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self._index

    def __iter__(self):
        return iter(self.elements)

    def index(self, x) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise KeyError(f"unknown poset element {x!r}") from None

    def leq(self, x, y) -> bool:
        """x <= y in the reflexive-transitive closure of the covers."""
        return bool(self._down_masks[self.index(y)] >> self.index(x) & 1)

    def lt(self, x, y) -> bool:
        return x != y and self.leq(x, y)

    def leq_idx(self, i: int, j: int) -> bool:
        return bool(self._down_masks[j] >> i & 1)

    def leq_matrix(self):
        """n x n bool array with [i, j] = (element i <= element j)."""
        import numpy as np

        n = len(self.elements)
        mat = np.zeros((n, n), dtype=bool)
        for j, m in enumerate(self._down_masks):
            for i in range(n):
                if m >> i & 1:
                    mat[i, j] = True
        return mat

    def _mask(self, S: Iterable) -> int:
        m = 0
        for x in S:
            m |= 1 << self.index(x)
        return m

    def _unmask(self, m: int) -> frozenset:
        return frozenset(e for i, e in enumerate(self.elements) if m >> i & 1)

    def principal_down_set(self, q) -> frozenset:
        return self._unmask(self._down_masks[self.index(q)])

    def principal_up_set(self, q) -> frozenset:
        return self._unmask(self._up_masks[self.index(q)])

    def down_closure(self, S: Iterable) -> frozenset:
        m = 0
        for x in S:
            m |= self._down_masks[self.index(x)]
        return self._unmask(m)

    def is_down_set(self, S: Iterable) -> bool:
        m = self._mask(S)
        down = 0
        for i in range(len(self.elements)):
            if m >> i & 1:
                down |= self._down_masks[i]
        return down == m

    def is_convex(self, S: Iterable) -> bool:
        """S is convex iff every interval [p, q] with endpoints in S lies in S."""
        m = self._mask(S)
        down = 0
        up = 0
        for i in range(len(self.elements)):
            if m >> i & 1:
                down |= self._down_masks[i]
                up |= self._up_masks[i]
        return (down & up) == m

    def hasse_covers(self) -> tuple:
        """True covering pairs of the closure (transitive reduction)."""
        n = len(self.elements)
        out = []
        for j in range(n):
            mj = self._down_masks[j] & ~(1 << j)
            for i in range(n):
                if not (mj >> i & 1):
                    continue
                # i < j is a cover iff no k with i < k < j
                between = mj & self._up_masks[i] & ~(1 << i) & ~(1 << j)
                if between == 0:
                    out.append((self.elements[i], self.elements[j]))
        return tuple(out)

    def down_set_lattice(self, cap: int = DOWN_SET_LATTICE_CAP) -> list:
        """All down-sets as frozensets, sorted by (size, element order).

        The order is inclusion-compatible. Raises if the poset exceeds cap
        elements (the lattice may be exponential).
        """
        n = len(self.elements)
        if n > cap:
            raise ValueError(f"down-set lattice cap exceeded: {n} > {cap}")
        masks = [0]
        # process elements in a topological order (index order refined by closure)
        topo = sorted(range(n), key=lambda i: bin(self._down_masks[i]).count("1"))
        for i in topo:
            need = self._down_masks[i] & ~(1 << i)
            masks += [m | (1 << i) for m in masks if m & need == need]
        sets = [self._unmask(m) for m in masks]
        sets.sort(key=lambda s: (len(s), sorted(self.index(x) for x in s)))
        return sets

    def linear_extensions_ok(self, seq: Sequence) -> bool:
        """seq is a linear extension: a permutation compatible with <=."""
        if len(seq) != len(self.elements) or set(seq) != set(self.elements):
            return False
        pos = {x: k for k, x in enumerate(seq)}
        for lo, hi in self.covers:
            if pos[lo] > pos[hi]:
                return False
        return True


def join_irreducibles(lattice: list, poset: Poset) -> list:
    """Join-irreducibles of the down-set lattice with their unique predecessors.

    Returns [(down_set, predecessor)] in poset element order; the
    join-irreducibles of O(P) are exactly the principal down-sets.
    """
    lattice_set = {frozenset(s) for s in lattice}
    out = []
    for q in poset.elements:
        d = poset.principal_down_set(q)
        if d not in lattice_set:
            raise ValueError("lattice does not contain all principal down-sets")
        pred = frozenset(d - {q})
        out.append((d, pred))
    return out


def order_preserving(src: Poset, dst: Poset, mapping: dict) -> bool:
    """True iff mapping preserves every comparability of src in dst."""
    for x in src.elements:
        if x not in mapping:
            raise ValueError(f"map not defined on {x!r}")
    for lo, hi in src.covers:
        if not dst.leq(mapping[lo], mapping[hi]):
            return False
    return True


def chain_poset(labels: Sequence) -> Poset:
    """Totally ordered poset with the given labels in increasing order."""
    labels = list(labels)
    return Poset(labels, [(labels[i], labels[i + 1]) for i in range(len(labels) - 1)])
