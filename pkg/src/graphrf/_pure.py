"""Pure-Python kernels: BFS balls, subgraph induction, color refinement,
constrained canonical search.

This module is the fallback used when the compiled extension is
unavailable, and the executable reference the extension is tested
against.  All four entry points operate on CSR adjacency (indptr int64,
indices int32, neighbor lists sorted ascending) so the compiled and pure
implementations are drop-in interchangeable.

Adjacency inside canonical_search is held as Python integers used as
bitsets, which keeps the row comparisons single machine operations for
neighborhood-sized inputs.
"""

import numpy as np

IMPL_NAME = "python"


def bfs_ball(indptr, indices, root, k):
    """Breadth-first layers around root, whole layers, until >= k nodes.

    Returns (nodes, layers) as int64 arrays.  Layer i is sorted by node
    id; the layer index equals the hop distance from root.  The last
    layer is always included whole, so len(nodes) may exceed k; it may
    also fall short when the component is smaller than k.
    """
    nodes = [int(root)]
    layers = [0]
    visited = {int(root)}
    frontier = [int(root)]
    depth = 0
    while len(nodes) < k and frontier:
        depth += 1
        nxt = set()
        for u in frontier:
            for v in indices[indptr[u]:indptr[u + 1]]:
                v = int(v)
                if v not in visited:
                    nxt.add(v)
        frontier = sorted(nxt)
        visited.update(frontier)
        nodes.extend(frontier)
        layers.extend([depth] * len(frontier))
    return (np.array(nodes, dtype=np.int64),
            np.array(layers, dtype=np.int64))


def induced_csr(indptr, indices, nodes):
    """CSR adjacency of the subgraph on ``nodes``; new id = position."""
    pos = {int(u): i for i, u in enumerate(nodes)}
    sub_indptr = np.zeros(len(nodes) + 1, dtype=np.int64)
    rows = []
    for i, u in enumerate(nodes):
        u = int(u)
        nb = [pos[int(v)] for v in indices[indptr[u]:indptr[u + 1]]
              if int(v) in pos]
        nb.sort()
        rows.append(nb)
        sub_indptr[i + 1] = sub_indptr[i] + len(nb)
    flat = [x for nb in rows for x in nb]
    return sub_indptr, np.array(flat, dtype=np.int32)


def wl_refine(indptr, indices, init_colors, max_iter):
    """Color refinement with canonical renumbering each pass.

    Each pass recolors node u by the signature (old color of u, sorted
    old colors of u's neighbors); signatures are sorted and renumbered
    from 0, so equal inputs give equal outputs regardless of the initial
    color values (only their order matters).  Because the own color
    leads the signature, renumbering preserves the relative order of
    surviving color classes from one pass to the next.

    Stops when a pass no longer splits any class, or after max_iter
    passes (max_iter <= 0 means no cap).  Returns (colors, changed)
    where changed counts the passes that refined the partition.
    """
    n = len(indptr) - 1
    colors = np.asarray(init_colors, dtype=np.int64)
    if colors.shape != (n,):
        raise ValueError(f"init_colors shape {colors.shape}, expected ({n},)")
    if n == 0:
        return colors.copy(), 0
    n_classes = len(set(colors.tolist()))
    changed = 0
    passes = 0
    while max_iter <= 0 or passes < max_iter:
        passes += 1
        sigs = []
        for u in range(n):
            nbr = sorted(int(colors[v]) for v in
                         indices[indptr[u]:indptr[u + 1]])
            sigs.append((int(colors[u]), tuple(nbr)))
        table = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = np.fromiter((table[s] for s in sigs), dtype=np.int64, count=n)
        new_classes = len(table)
        if new_classes == n_classes:
            # partition stable; renumbered values are canonical
            return new, changed
        colors = new
        n_classes = new_classes
        changed += 1
    return colors, changed


def canonical_search(indptr, indices, nodes, prior):
    """Order maximizing the row-major adjacency bit string of the
    subgraph on ``nodes``, among orders listing prior-color classes in
    ascending color order (ties free within a class).

    Returns an int64 permutation: perm[p] = local index into ``nodes``
    of the node placed at position p.

    Search: depth-first over ordered partitions.  Fixing a vertex at the
    next position splits every remaining cell into its neighbors (first)
    and non-neighbors, which fully determines that matrix row; rows are
    compared against the best row sequence found so far and branches
    that fall behind are cut.  Structurally interchangeable candidates
    (equal neighborhoods outside the pair) are collapsed to one.
    """
    r = len(nodes)
    if r == 0:
        return np.zeros(0, dtype=np.int64)
    prior = [int(c) for c in prior]
    if len(prior) != r:
        raise ValueError(f"prior length {len(prior)} for {r} nodes")

    pos = {int(u): i for i, u in enumerate(nodes)}
    nb = [0] * r
    for i, u in enumerate(nodes):
        u = int(u)
        m = 0
        for v in indices[indptr[u]:indptr[u + 1]]:
            j = pos.get(int(v))
            if j is not None:
                m |= 1 << j
        nb[i] = m

    cells = []
    for i in sorted(range(r), key=lambda i: (prior[i], i)):
        if cells and prior[cells[-1][0]] == prior[i]:
            cells[-1].append(i)
        else:
            cells.append([i])

    full = (1 << r) - 1
    best_rows = [-1] * r
    best_perm = [None]
    assigned = []

    def place(u, later_cells):
        # row for the next position if u is placed there; later cells
        # split into (neighbors of u, the rest), neighbors first
        nbu = nb[u]
        row = 0
        for q in assigned:
            row = (row << 1) | ((nbu >> q) & 1)
        row <<= 1  # diagonal
        new_cells = []
        for cell in later_cells:
            adj = [x for x in cell if (nbu >> x) & 1]
            non = [x for x in cell if not ((nbu >> x) & 1)]
            row = (row << len(cell)) | (((1 << len(adj)) - 1) << len(non))
            if adj:
                new_cells.append(adj)
            if non:
                new_cells.append(non)
        return row, new_cells

    def dfs(cells):
        p = len(assigned)
        if p == r:
            if best_perm[0] is None:
                best_perm[0] = list(assigned)
            return
        head = cells[0]
        rest = cells[1:]
        if len(head) == 1:
            cands = [(*place(head[0], rest), head[0])]
        else:
            cands = []
            for u in head:
                remainder = [x for x in head if x != u]
                cands.append((*place(u, [remainder] + rest), u))
            cands.sort(key=lambda t: -t[0])
            kept = []
            for row, cs, u in cands:
                twin = False
                for row2, _, u2 in kept:
                    if row2 != row:
                        continue
                    mask = full ^ (1 << u) ^ (1 << u2)
                    if (nb[u] & mask) == (nb[u2] & mask):
                        twin = True
                        break
                if not twin:
                    kept.append((row, cs, u))
            cands = kept
        for row, new_cells, u in cands:
            if row < best_rows[p]:
                break  # sorted descending, the rest are no better
            if row > best_rows[p]:
                best_rows[p] = row
                for q in range(p + 1, r):
                    best_rows[q] = -1
                best_perm[0] = None
            assigned.append(u)
            dfs(new_cells)
            assigned.pop()

    dfs(cells)
    return np.array(best_perm[0], dtype=np.int64)
