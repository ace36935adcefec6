# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: BFS balls, subgraph induction, color refinement,
constrained canonical search.

Drop-in replacements for the pure-Python module of the same four entry
points, and tested bit-for-bit against it.  Inputs and outputs use the
same CSR convention (indptr int64, indices int32, neighbor lists sorted
ascending).

canonical_search here packs adjacency rows into single uint64 words, so
it handles at most 64 nodes; larger inputs are handed to the pure
implementation, whose integer bitsets are unbounded.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int32_t, int64_t, uint8_t, uint64_t

cnp.import_array()

IMPL_NAME = "compiled"


def bfs_ball(indptr, indices, root, k):
    """Breadth-first layers around root, whole layers, until >= k nodes.

    Returns (nodes, layers) as int64 arrays; each layer sorted by node
    id, layer index = hop distance.  The last layer is included whole.
    """
    cdef const int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int32_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef Py_ssize_t n = ip.shape[0] - 1
    cdef int64_t rt = root
    cdef int64_t kk = k
    if rt < 0 or rt >= n:
        raise IndexError(f"root {rt} out of range for {n} nodes")

    nodes_arr = np.empty(n, dtype=np.int64)
    layers_arr = np.empty(n, dtype=np.int64)
    visited_arr = np.zeros(n, dtype=np.uint8)
    cdef int64_t[::1] nodes = nodes_arr
    cdef int64_t[::1] layers = layers_arr
    cdef uint8_t[::1] visited = visited_arr
    cdef Py_ssize_t count = 1, f_lo = 0, f_hi = 1, depth = 0
    cdef Py_ssize_t fi, new_lo
    cdef int64_t u, e, v

    nodes[0] = rt
    layers[0] = 0
    visited[rt] = 1
    while count < kk and f_hi > f_lo:
        depth += 1
        new_lo = count
        for fi in range(f_lo, f_hi):
            u = nodes[fi]
            for e in range(ip[u], ip[u + 1]):
                v = ix[e]
                if not visited[v]:
                    visited[v] = 1
                    nodes[count] = v
                    layers[count] = depth
                    count += 1
        nodes_arr[new_lo:count].sort()
        f_lo = new_lo
        f_hi = count
    return nodes_arr[:count].copy(), layers_arr[:count].copy()


def induced_csr(indptr, indices, nodes):
    """CSR adjacency of the subgraph on ``nodes``; new id = position."""
    cdef const int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int32_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    nodes_arr = np.ascontiguousarray(nodes, dtype=np.int64)
    cdef const int64_t[::1] nd = nodes_arr
    cdef Py_ssize_t r = nd.shape[0]

    order_arr = np.argsort(nodes_arr, kind="stable")
    snodes_arr = nodes_arr[order_arr]
    cdef const int64_t[::1] order = order_arr
    cdef const int64_t[::1] snodes = snodes_arr

    sub_indptr = np.zeros(r + 1, dtype=np.int64)
    cdef int64_t[::1] sip = sub_indptr
    cdef int64_t cap = 0
    cdef Py_ssize_t i
    cdef int64_t u
    for i in range(r):
        u = nd[i]
        cap += ip[u + 1] - ip[u]
    flat_arr = np.empty(max(cap, 1), dtype=np.int32)
    cdef int32_t[::1] flat = flat_arr

    cdef Py_ssize_t w = 0, row_lo, lo, hi, mid, j
    cdef int64_t e, v
    cdef int32_t key
    for i in range(r):
        u = nd[i]
        row_lo = w
        for e in range(ip[u], ip[u + 1]):
            v = ix[e]
            lo = 0
            hi = r
            while lo < hi:
                mid = (lo + hi) >> 1
                if snodes[mid] < v:
                    lo = mid + 1
                else:
                    hi = mid
            if lo < r and snodes[lo] == v:
                flat[w] = <int32_t> order[lo]
                w += 1
        # new ids are positions in `nodes`, not sorted by old id: re-sort row
        for e in range(row_lo + 1, w):
            key = flat[e]
            j = e - 1
            while j >= row_lo and flat[j] > key:
                flat[j + 1] = flat[j]
                j -= 1
            flat[j + 1] = key
        sip[i + 1] = w
    return sub_indptr, flat_arr[:w].copy()


def wl_refine(indptr, indices, init_colors, max_iter):
    """Color refinement with canonical renumbering each pass.

    Same contract as the pure version: recolor by (own color, sorted
    neighbor colors), renumber signatures from 0 in sorted order, stop
    when a pass no longer splits any class or after max_iter passes
    (max_iter <= 0 means no cap).  Returns (colors, changed).
    """
    cdef const int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int32_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef Py_ssize_t n = ip.shape[0] - 1
    colors_arr = np.asarray(init_colors, dtype=np.int64)
    if colors_arr.shape != (n,):
        raise ValueError(f"init_colors shape {colors_arr.shape}, expected ({n},)")
    if n == 0:
        return colors_arr.copy(), 0
    # shift to >= 0 so the -1 pad in signature rows sorts below every
    # real color; signature order is invariant under a uniform shift
    cdef int64_t cmin = colors_arr.min()
    if cmin < 0:
        colors_arr = colors_arr - cmin
    cur_arr = np.ascontiguousarray(colors_arr)

    cdef int64_t maxit = max_iter
    cdef Py_ssize_t D = 0, d, u
    for u in range(n):
        d = ip[u + 1] - ip[u]
        if d > D:
            D = d
    sig_arr = np.empty((n, D + 1), dtype=np.int64)
    cdef int64_t[:, ::1] sig = sig_arr
    cdef const int64_t[::1] colors = cur_arr

    cdef Py_ssize_t n_classes = np.unique(cur_arr).shape[0]
    cdef Py_ssize_t changed = 0, passes = 0, new_classes
    cdef Py_ssize_t wpos, e2, j, t, cur, prev, cls
    cdef int64_t e, key
    cdef bint differs
    cdef const int64_t[::1] order
    cdef int64_t[::1] new

    while maxit <= 0 or passes < maxit:
        passes += 1
        for u in range(n):
            sig[u, 0] = colors[u]
            wpos = 1
            for e in range(ip[u], ip[u + 1]):
                sig[u, wpos] = colors[ix[e]]
                wpos += 1
            for e2 in range(2, wpos):
                key = sig[u, e2]
                j = e2 - 1
                while j >= 1 and sig[u, j] > key:
                    sig[u, j + 1] = sig[u, j]
                    j -= 1
                sig[u, j + 1] = key
            for e2 in range(wpos, D + 1):
                sig[u, e2] = -1
        # ascending signature order; column 0 is the primary key
        order_arr = np.lexsort(sig_arr.T[::-1])
        order = order_arr
        new_arr = np.empty(n, dtype=np.int64)
        new = new_arr
        prev = order[0]
        new[prev] = 0
        cls = 0
        for t in range(1, n):
            cur = order[t]
            differs = False
            for j in range(D + 1):
                if sig[cur, j] != sig[prev, j]:
                    differs = True
                    break
            if differs:
                cls += 1
            new[cur] = cls
            prev = cur
        new_classes = cls + 1
        if new_classes == n_classes:
            # partition stable; renumbered values are canonical
            return new_arr, changed
        cur_arr = new_arr
        colors = cur_arr
        n_classes = new_classes
        changed += 1
    return cur_arr, changed


cdef class _Canon:
    """State of one constrained canonical search (<= 64 nodes).

    Adjacency rows live in single uint64 words; row values reproduce the
    pure implementation's shift-built integers exactly, so the two
    search trees explore candidates in the same order and return the
    same permutation.
    """
    cdef Py_ssize_t r
    cdef uint64_t full
    cdef bint have_best
    cdef uint64_t[::1] nb
    cdef uint64_t[::1] best_row
    cdef uint8_t[::1] best_valid
    cdef int64_t[::1] best_perm
    cdef int32_t[::1] assigned
    cdef int32_t[:, ::1] cmembers   # (r+1, r): level p's remaining nodes
    cdef int32_t[:, ::1] cstarts    # (r+1, r+2): cell starts + sentinel
    cdef int32_t[::1] ccount        # cells per level
    cdef uint64_t[:, ::1] cand_row  # per-level candidate scratch
    cdef int32_t[:, ::1] cand_u
    cdef object _perm_arr

    def __cinit__(self, Py_ssize_t r):
        self.r = r
        self.full = <uint64_t> 0xFFFFFFFFFFFFFFFF if r == 64 \
            else ((<uint64_t> 1 << r) - 1)
        self.have_best = False
        self.nb = np.zeros(r, dtype=np.uint64)
        self.best_row = np.zeros(r, dtype=np.uint64)
        self.best_valid = np.zeros(r, dtype=np.uint8)
        self._perm_arr = np.zeros(r, dtype=np.int64)
        self.best_perm = self._perm_arr
        self.assigned = np.zeros(r, dtype=np.int32)
        self.cmembers = np.zeros((r + 1, r), dtype=np.int32)
        self.cstarts = np.zeros((r + 1, r + 2), dtype=np.int32)
        self.ccount = np.zeros(r + 1, dtype=np.int32)
        self.cand_row = np.zeros((r, r), dtype=np.uint64)
        self.cand_u = np.zeros((r, r), dtype=np.int32)

    cdef uint64_t place(self, Py_ssize_t p, int32_t u, bint with_remainder):
        # row for position p if u goes there; splits every later cell
        # into (neighbors of u, the rest), neighbors first, and writes
        # the child cells into level p+1
        cdef uint64_t nbu = self.nb[u]
        cdef uint64_t row = 0
        cdef Py_ssize_t q, ci, x, a, b, child = 0, nchild = 0
        cdef Py_ssize_t start_child, nadj, nnon, first_cell
        cdef int32_t m
        for q in range(p):
            row = (row << 1) | ((nbu >> self.assigned[q]) & 1)
        row <<= 1  # diagonal
        first_cell = 0 if with_remainder else 1
        for ci in range(first_cell, self.ccount[p]):
            a = self.cstarts[p, ci]
            b = self.cstarts[p, ci + 1]
            start_child = child
            nadj = 0
            for x in range(a, b):
                m = self.cmembers[p, x]
                if m == u:
                    continue
                if (nbu >> m) & 1:
                    self.cmembers[p + 1, child] = m
                    child += 1
                    nadj += 1
            nnon = 0
            for x in range(a, b):
                m = self.cmembers[p, x]
                if m == u:
                    continue
                if not ((nbu >> m) & 1):
                    self.cmembers[p + 1, child] = m
                    child += 1
                    nnon += 1
            row = (row << (nadj + nnon)) | \
                ((((<uint64_t> 1) << nadj) - 1) << nnon)
            if nadj > 0:
                self.cstarts[p + 1, nchild] = <int32_t> start_child
                nchild += 1
            if nnon > 0:
                self.cstarts[p + 1, nchild] = <int32_t> (start_child + nadj)
                nchild += 1
        self.cstarts[p + 1, nchild] = <int32_t> child
        self.ccount[p + 1] = <int32_t> nchild
        return row

    cdef void dfs(self, Py_ssize_t p):
        cdef Py_ssize_t r = self.r
        cdef Py_ssize_t q, i, j, a, b, t, kept
        cdef uint64_t row, mask
        cdef int32_t u, u2
        cdef bint twin, multi
        if p == r:
            if not self.have_best:
                for q in range(r):
                    self.best_perm[q] = self.assigned[q]
                self.have_best = True
            return
        a = self.cstarts[p, 0]
        b = self.cstarts[p, 1]
        multi = b - a > 1
        if not multi:
            u = self.cmembers[p, a]
            self.cand_row[p, 0] = self.place(p, u, False)
            self.cand_u[p, 0] = u
            t = 1
        else:
            t = 0
            for i in range(a, b):
                u = self.cmembers[p, i]
                self.cand_row[p, t] = self.place(p, u, True)
                self.cand_u[p, t] = u
                t += 1
            # stable descending sort keeps within-cell id order on ties
            for i in range(1, t):
                row = self.cand_row[p, i]
                u = self.cand_u[p, i]
                j = i - 1
                while j >= 0 and self.cand_row[p, j] < row:
                    self.cand_row[p, j + 1] = self.cand_row[p, j]
                    self.cand_u[p, j + 1] = self.cand_u[p, j]
                    j -= 1
                self.cand_row[p, j + 1] = row
                self.cand_u[p, j + 1] = u
            # drop candidates interchangeable with an earlier equal-row one
            kept = 0
            for i in range(t):
                row = self.cand_row[p, i]
                u = self.cand_u[p, i]
                twin = False
                for j in range(kept):
                    if self.cand_row[p, j] != row:
                        continue
                    u2 = self.cand_u[p, j]
                    mask = self.full ^ ((<uint64_t> 1) << u) \
                        ^ ((<uint64_t> 1) << u2)
                    if (self.nb[u] & mask) == (self.nb[u2] & mask):
                        twin = True
                        break
                if not twin:
                    self.cand_row[p, kept] = row
                    self.cand_u[p, kept] = u
                    kept += 1
            t = kept
        for i in range(t):
            row = self.cand_row[p, i]
            u = self.cand_u[p, i]
            if self.best_valid[p] and row < self.best_row[p]:
                break  # sorted descending, the rest are no better
            if not self.best_valid[p] or row > self.best_row[p]:
                self.best_valid[p] = 1
                self.best_row[p] = row
                for q in range(p + 1, r):
                    self.best_valid[q] = 0
                self.have_best = False
            self.assigned[p] = u
            self.place(p, u, multi)  # rebuild child cells for this branch
            self.dfs(p + 1)


def canonical_search(indptr, indices, nodes, prior):
    """Order maximizing the row-major adjacency bit string of the
    subgraph on ``nodes``, among orders listing prior-color classes in
    ascending color order (ties free within a class).

    Returns an int64 permutation: perm[p] = local index into ``nodes``
    of the node placed at position p.
    """
    nodes_arr = np.ascontiguousarray(nodes, dtype=np.int64)
    cdef Py_ssize_t r = nodes_arr.shape[0]
    if r == 0:
        return np.zeros(0, dtype=np.int64)
    prior_arr = np.ascontiguousarray(prior, dtype=np.int64)
    if prior_arr.shape[0] != r:
        raise ValueError(f"prior length {prior_arr.shape[0]} for {r} nodes")
    if r > 64:
        from . import _pure
        return _pure.canonical_search(indptr, indices, nodes, prior)

    cdef const int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int32_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int32)
    cdef const int64_t[::1] nd = nodes_arr
    cdef const int64_t[::1] pr = prior_arr

    order_arr = np.argsort(nodes_arr, kind="stable")
    snodes_arr = nodes_arr[order_arr]
    cdef const int64_t[::1] order = order_arr
    cdef const int64_t[::1] snodes = snodes_arr

    cdef _Canon st = _Canon(r)
    cdef Py_ssize_t i, lo, hi, mid
    cdef int64_t u, e, v
    for i in range(r):
        u = nd[i]
        for e in range(ip[u], ip[u + 1]):
            v = ix[e]
            lo = 0
            hi = r
            while lo < hi:
                mid = (lo + hi) >> 1
                if snodes[mid] < v:
                    lo = mid + 1
                else:
                    hi = mid
            if lo < r and snodes[lo] == v:
                st.nb[i] |= (<uint64_t> 1) << order[lo]

    # level-0 cells: prior classes ascending, ids ascending within
    cells_arr = np.lexsort((np.arange(r), prior_arr))
    cdef const int64_t[::1] cells = cells_arr
    cdef Py_ssize_t nchild = 0
    for i in range(r):
        st.cmembers[0, i] = <int32_t> cells[i]
        if i == 0 or pr[cells[i]] != pr[cells[i - 1]]:
            st.cstarts[0, nchild] = <int32_t> i
            nchild += 1
    st.cstarts[0, nchild] = <int32_t> r
    st.ccount[0] = <int32_t> nchild

    st.dfs(0)
    if not st.have_best:
        raise RuntimeError("search ended without a complete order")
    return st._perm_arr
