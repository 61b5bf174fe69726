"""Numba kernels for matching, splitting-homotopy evaluation and validation.

All kernels take the boundary operator in CSR form: ptr int64[n+1],
idx int32[nnz], coef int64[nnz] with residues in [1, p). Cells are row
indices; row i lists the faces of cell i.
"""

from __future__ import annotations

import numpy as np
from numba import njit

DIM_SHIFT = 40  # free-cell heap key: (dim << DIM_SHIFT) | cell index


@njit(cache=True)
def _heap_push(heap, size, key):
    heap[size] = key
    i = size
    while i > 0:
        parent = (i - 1) >> 1
        if heap[parent] <= heap[i]:
            break
        heap[parent], heap[i] = heap[i], heap[parent]
        i = parent
    return size + 1


@njit(cache=True)
def _heap_pop(heap, size):
    top = heap[0]
    size -= 1
    heap[0] = heap[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        small = left
        right = left + 1
        if right < size and heap[right] < heap[left]:
            small = right
        if heap[i] <= heap[small]:
            break
        heap[i], heap[small] = heap[small], heap[i]
        i = small
    return top, size


@njit(cache=True)
def _max_heap_push(heap, size, key):
    heap[size] = key
    i = size
    while i > 0:
        parent = (i - 1) >> 1
        if heap[parent] >= heap[i]:
            break
        heap[parent], heap[i] = heap[i], heap[parent]
        i = parent
    return size + 1


@njit(cache=True)
def _max_heap_pop(heap, size):
    top = heap[0]
    size -= 1
    heap[0] = heap[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        big = left
        right = left + 1
        if right < size and heap[right] > heap[left]:
            big = right
        if heap[i] >= heap[big]:
            break
        heap[i], heap[big] = heap[big], heap[i]
        i = big
    return top, size


@njit(cache=True)
def first_dd_violations(ptr, idx, coef, p, cap):
    """Cells where (del o del) != 0, as (cell, offending face) pairs, up to cap."""
    n = ptr.shape[0] - 1
    acc = np.zeros(n, np.int64)
    # a face can cancel to zero and re-enter, so touched may hold duplicates
    touched = np.empty(idx.shape[0] + 2, np.int32)
    out = np.empty((cap, 2), np.int64)
    nout = 0
    for i in range(n):
        nt = 0
        for k in range(ptr[i], ptr[i + 1]):
            f = idx[k]
            v = coef[k]
            for k2 in range(ptr[f], ptr[f + 1]):
                g = idx[k2]
                if acc[g] == 0:
                    touched[nt] = g
                    nt += 1
                acc[g] = (acc[g] + v * coef[k2]) % p
        for t in range(nt):
            g = touched[t]
            if acc[g] != 0 and nout < cap:
                out[nout, 0] = i
                out[nout, 1] = g
                nout += 1
            acc[g] = 0
        if nout >= cap:
            break
    return out[:nout]


@njit(cache=True)
def _excise_update(z, cptr, cidx, grade, excised, cnt, dims, queue, qt, heap, hs):
    """After excising z, update same-fiber coface counts; returns (qt, hs)."""
    for k in range(cptr[z], cptr[z + 1]):
        w = cidx[k]
        if excised[w] or grade[w] != grade[z]:
            continue
        cnt[w] -= 1
        if cnt[w] == 1:
            queue[qt] = w
            qt += 1
        elif cnt[w] == 0:
            hs = _heap_push(heap, hs, (np.int64(dims[w]) << DIM_SHIFT) | np.int64(w))
    return qt, hs


@njit(cache=True)
def coreduction_matching(ptr, idx, coef, cptr, cidx, dims, grade):
    """Coreduction-based acyclic partial matching, fiber by fiber.

    Coreduction pairs (FIFO by discovery) are excised first; when none
    remain, a free cell of minimal (dim, input order) is excised as
    critical. Counts and pairs never cross fibers of `grade`, so this is
    the disjoint union of per-fiber matchings.

    Returns (label int8: 0 critical / 1 queen / 2 king, mate int32,
    qrank int64: queen excision stamps, a linear extension of <<).
    """
    n = dims.shape[0]
    label = np.full(n, -1, np.int8)
    mate = np.full(n, -1, np.int32)
    qrank = np.full(n, -1, np.int64)
    cnt = np.zeros(n, np.int32)
    for i in range(n):
        c = 0
        for k in range(ptr[i], ptr[i + 1]):
            if grade[idx[k]] == grade[i]:
                c += 1
        cnt[i] = c
    excised = np.zeros(n, np.bool_)
    queue = np.empty(n + 1, np.int32)
    qh = 0
    qt = 0
    heap = np.empty(n + 1, np.int64)
    hs = 0
    for i in range(n):
        if cnt[i] == 1:
            queue[qt] = i
            qt += 1
    for i in range(n):
        if cnt[i] == 0:
            hs = _heap_push(heap, hs, (np.int64(dims[i]) << DIM_SHIFT) | np.int64(i))
    stamp = 0
    remaining = n
    while remaining > 0:
        while qh < qt:
            x = queue[qh]
            qh += 1
            if excised[x] or cnt[x] != 1:
                continue
            y = np.int32(-1)
            for k in range(ptr[x], ptr[x + 1]):
                f = idx[k]
                if not excised[f] and grade[f] == grade[x]:
                    y = f
                    break
            label[x] = 2
            label[y] = 1
            mate[x] = y
            mate[y] = x
            qrank[y] = stamp
            stamp += 1
            excised[x] = True
            excised[y] = True
            remaining -= 2
            qt, hs = _excise_update(x, cptr, cidx, grade, excised, cnt, dims, queue, qt, heap, hs)
            qt, hs = _excise_update(y, cptr, cidx, grade, excised, cnt, dims, queue, qt, heap, hs)
        if remaining == 0:
            break
        x = np.int32(-1)
        while hs > 0:
            key, hs = _heap_pop(heap, hs)
            cand = np.int32(key & ((np.int64(1) << DIM_SHIFT) - 1))
            if not excised[cand]:
                x = cand
                break
        if x < 0:
            break
        label[x] = 0
        excised[x] = True
        remaining -= 1
        qt, hs = _excise_update(x, cptr, cidx, grade, excised, cnt, dims, queue, qt, heap, hs)
    return label, mate, qrank


@njit(cache=True)
def kahn_queen_order(ptr, idx, cptr, cidx, label, mate):
    """Topological stamps for the << relation on queens via Kahn's algorithm.

    Returns (acyclic flag, qrank); qrank[z] < qrank[z'] whenever z << z'.
    """
    n = label.shape[0]
    qrank = np.full(n, -1, np.int64)
    indeg = np.zeros(n, np.int32)
    nq = 0
    for z in range(n):
        if label[z] != 1:
            continue
        nq += 1
        m = mate[z]
        for k in range(ptr[m], ptr[m + 1]):
            f = idx[k]
            if f != z and label[f] == 1:
                indeg[z] += 1
    queue = np.empty(nq + 1, np.int32)
    qt = 0
    for z in range(n):
        if label[z] == 1 and indeg[z] == 0:
            queue[qt] = z
            qt += 1
    head = 0
    stamp = 0
    while head < qt:
        z = queue[head]
        head += 1
        qrank[z] = stamp
        stamp += 1
        for k in range(cptr[z], cptr[z + 1]):
            eta = cidx[k]
            if label[eta] == 2:
                z2 = mate[eta]
                if z2 != z:
                    indeg[z2] -= 1
                    if indeg[z2] == 0:
                        queue[qt] = z2
                        qt += 1
    return stamp == nq, qrank


@njit(cache=True)
def _clear_queens(
    seed_cells,
    seed_coefs,
    ptr,
    idx,
    coef,
    label,
    mate,
    qrank,
    inv_tab,
    p,
    coefw,
    touched,
    heap,
    gamma_cells,
    gamma_coefs,
):
    """Apply (id - del gamma)-style queen elimination to the seeded chain.

    Seeds coefw with the input chain, then repeatedly clears the queen of
    maximal << stamp from the support by subtracting the appropriate
    multiple of del(mate), which is exactly the Gamma recursion. On return,
    touched[:ntouched] lists the support (coefficients in coefw, to be reset
    by the caller) and gamma_cells/coefs[:ngamma] hold the chain
    gamma(input chain). Returns (ntouched, ngamma).

    A non-queen cell may leave and re-enter the support (cancellation), so
    touched can hold duplicates and must have capacity n + nnz + 2; callers
    must skip entries whose coefficient is already reset to 0.
    """
    nt = 0
    hs = 0
    for s in range(seed_cells.shape[0]):
        c = seed_cells[s]
        v = seed_coefs[s] % p
        if v == 0:
            continue
        # seed cells are distinct, so coefw[c] is still 0 here
        touched[nt] = c
        nt += 1
        coefw[c] = v
        if label[c] == 1:
            hs = _max_heap_push(heap, hs, (qrank[c] << 32) | np.int64(c))
    ng = 0
    while hs > 0:
        key, hs = _max_heap_pop(heap, hs)
        z = np.int32(key & 0xFFFFFFFF)
        lam = coefw[z]
        if lam == 0:
            continue
        king = mate[z]
        # mu = lam / kappa(king, z)
        kz = np.int64(0)
        for k in range(ptr[king], ptr[king + 1]):
            if idx[k] == z:
                kz = coef[k]
                break
        mu = (lam * inv_tab[kz]) % p
        gamma_cells[ng] = king
        gamma_coefs[ng] = mu
        ng += 1
        for k in range(ptr[king], ptr[king + 1]):
            f = idx[k]
            was = coefw[f]
            coefw[f] = (was - mu * coef[k]) % p
            if was == 0 and coefw[f] != 0:
                touched[nt] = f
                nt += 1
                if label[f] == 1:
                    hs = _max_heap_push(heap, hs, (qrank[f] << 32) | np.int64(f))
    return nt, ng


@njit(cache=True)
def gamma_and_residual(seed_cells, seed_coefs, ptr, idx, coef, label, mate, qrank, inv_tab, p, nq, nnz):
    """gamma(chain) and (id - del gamma)(chain) for one chain; allocates buffers."""
    n = label.shape[0]
    coefw = np.zeros(n, np.int64)
    touched = np.empty(nnz + n + 2, np.int32)
    heap = np.empty(nnz + n + 2, np.int64)
    gamma_cells = np.empty(nq + 1, np.int32)
    gamma_coefs = np.empty(nq + 1, np.int64)
    nt, ng = _clear_queens(
        seed_cells, seed_coefs, ptr, idx, coef, label, mate, qrank, inv_tab, p,
        coefw, touched, heap, gamma_cells, gamma_coefs,
    )
    sup = touched[:nt]
    order = np.argsort(sup)
    res_cells = np.empty(nt, np.int32)
    res_coefs = np.empty(nt, np.int64)
    m = 0
    for k in range(nt):
        c = sup[order[k]]
        # duplicates in touched see 0 after the first reset
        if coefw[c] != 0:
            res_cells[m] = c
            res_coefs[m] = coefw[c]
            m += 1
        coefw[c] = 0
    g_order = np.argsort(gamma_cells[:ng])
    return res_cells[:m], res_coefs[:m], gamma_cells[:ng][g_order], gamma_coefs[:ng][g_order]


@njit(cache=True)
def delta_sweep(criticals, ptr, idx, coef, label, mate, qrank, inv_tab, p, nq, nnz):
    """Morse boundary columns Delta(xi) = pi_A((id - del gamma)(del xi)).

    Returns a CSR (over source cell indices) with one row per critical cell,
    entries restricted to critical cells and sorted by index.
    """
    n = label.shape[0]
    coefw = np.zeros(n, np.int64)
    touched = np.empty(nnz + n + 2, np.int32)
    heap = np.empty(nnz + n + 2, np.int64)
    gamma_cells = np.empty(nq + 1, np.int32)
    gamma_coefs = np.empty(nq + 1, np.int64)
    ncrit = criticals.shape[0]
    out_ptr = np.zeros(ncrit + 1, np.int64)
    cap = max(4 * ncrit, 16)
    out_idx = np.empty(cap, np.int32)
    out_coef = np.empty(cap, np.int64)
    pos = 0
    for ci in range(ncrit):
        xi = criticals[ci]
        seed_cells = idx[ptr[xi] : ptr[xi + 1]]
        seed_coefs = coef[ptr[xi] : ptr[xi + 1]]
        nt, _ = _clear_queens(
            seed_cells, seed_coefs, ptr, idx, coef, label, mate, qrank, inv_tab, p,
            coefw, touched, heap, gamma_cells, gamma_coefs,
        )
        sup = touched[:nt]
        order = np.argsort(sup)
        for k in range(nt):
            c = sup[order[k]]
            # reset as we emit so duplicate touched entries are skipped
            if coefw[c] != 0:
                if label[c] == 0:
                    if pos == cap:
                        cap = cap * 2
                        tmp_i = np.empty(cap, np.int32)
                        tmp_c = np.empty(cap, np.int64)
                        tmp_i[:pos] = out_idx[:pos]
                        tmp_c[:pos] = out_coef[:pos]
                        out_idx = tmp_i
                        out_coef = tmp_c
                    out_idx[pos] = c
                    out_coef[pos] = coefw[c]
                    pos += 1
                coefw[c] = 0
        out_ptr[ci + 1] = pos
    return out_ptr, out_idx[:pos], out_coef[:pos]


def warmup():
    """Compile all kernels on tiny inputs (JIT cost is per process)."""
    ptr = np.array([0, 0, 0, 2], dtype=np.int64)
    idx = np.array([0, 1], dtype=np.int32)
    coef = np.array([1, 1], dtype=np.int64)
    dims = np.array([0, 0, 1], dtype=np.int32)
    grade = np.zeros(3, dtype=np.int32)
    from .cells import csr_transpose

    cptr, cidx, _ = csr_transpose(3, 3, ptr, idx, coef)
    first_dd_violations(ptr, idx, coef, np.int64(2), np.int64(4))
    label, mate, qrank = coreduction_matching(ptr, idx, coef, cptr, cidx, dims, grade)
    kahn_queen_order(ptr, idx, cptr, cidx, label, mate)
    inv_tab = np.array([0, 1], dtype=np.int64)
    crit = np.flatnonzero(label == 0).astype(np.int32)
    delta_sweep(crit, ptr, idx, coef, label, mate, qrank, inv_tab, np.int64(2), np.int64(1), np.int64(2))
    gamma_and_residual(
        idx[:1], coef[:1], ptr, idx, coef, label, mate, qrank, inv_tab, np.int64(2), np.int64(1), np.int64(2)
    )
