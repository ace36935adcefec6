"""Undirected attributed graphs with CSR adjacency.

The graph container used by every other module.  Nodes are integers
0..n-1.  Edges are unordered pairs without self loops; parallel edges are
collapsed at build time (first occurrence wins for edge attributes).
Node and edge attribute matrices are stored as float32 so that tensor
payloads derived from them are reproducible bit for bit.
"""

from itertools import permutations

import numpy as np

from .errors import (
    AttributeShapeError,
    DuplicateNodeError,
    NodeIndexError,
    SelfLoopError,
    TooLargeError,
)

BRUTEFORCE_MAX_NODES = 8


class Graph:
    """Immutable undirected simple graph with optional attributes.

    Attributes
    ----------
    node_count : int
    edges : (m, 2) int32 array, each row (u, v) with u < v
    node_attrs : (n, a_v) float32 array, a_v may be 0
    edge_attrs : (m, a_e) float32 array aligned with ``edges``, a_e may be 0
    node_labels : optional (n,) int64 array of discrete label ids, carried
        for labeling procedures that can seed from categorical node labels
    indptr, indices : CSR adjacency, neighbor lists sorted ascending
    """

    __slots__ = (
        "node_count",
        "edges",
        "node_attrs",
        "edge_attrs",
        "node_labels",
        "indptr",
        "indices",
        "degrees",
        "_edge_index",
    )

    def __init__(self, node_count, edges, node_attrs, edge_attrs, node_labels,
                 indptr, indices):
        self.node_count = node_count
        self.edges = edges
        self.node_attrs = node_attrs
        self.edge_attrs = edge_attrs
        self.node_labels = node_labels
        self.indptr = indptr
        self.indices = indices
        self.degrees = np.diff(indptr).astype(np.int64)
        self._edge_index = None

    @property
    def edge_count(self):
        return self.edges.shape[0]

    @property
    def attr_dim(self):
        return self.node_attrs.shape[1]

    @property
    def edge_attr_dim(self):
        return self.edge_attrs.shape[1]

    def neighbors(self, u):
        """Sorted neighbor ids of u as an int32 array view."""
        if not 0 <= u < self.node_count:
            raise NodeIndexError(f"node {u} out of range 0..{self.node_count - 1}")
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def degree(self, u):
        if not 0 <= u < self.node_count:
            raise NodeIndexError(f"node {u} out of range 0..{self.node_count - 1}")
        return int(self.degrees[u])

    def has_edge(self, u, v):
        if u > v:
            u, v = v, u
        return (u, v) in self.edge_index()

    def edge_index(self):
        """Dict mapping (u, v) with u < v to the row index in edge_attrs."""
        if self._edge_index is None:
            self._edge_index = {
                (int(u), int(v)): i for i, (u, v) in enumerate(self.edges)
            }
        return self._edge_index

    def __repr__(self):
        return (f"Graph(n={self.node_count}, m={self.edge_count}, "
                f"a_v={self.attr_dim}, a_e={self.edge_attr_dim})")


def build_graph(node_count, edge_list, node_attrs=None, edge_attrs=None,
                node_labels=None):
    """Validate and assemble a Graph.

    edge_list is any iterable of (u, v) pairs.  Self loops raise
    SelfLoopError, out-of-range ids raise NodeIndexError.  Duplicate pairs
    (in either orientation) collapse to one edge; the attribute row of the
    first occurrence is kept.

    node_attrs: (n, a_v) array-like or None for a_v = 0.
    edge_attrs: array-like aligned with edge_list (one row per *input*
    pair, rows of dropped duplicates are dropped with them) or None.
    """
    if node_count < 0:
        raise ValueError(f"node_count must be >= 0, got {node_count}")

    pairs = [(int(u), int(v)) for u, v in edge_list]
    if edge_attrs is not None:
        edge_attrs = np.asarray(edge_attrs, dtype=np.float32)
        if edge_attrs.ndim == 1:
            edge_attrs = edge_attrs.reshape(len(pairs), -1) if len(pairs) else \
                edge_attrs.reshape(0, 1)
        if edge_attrs.shape[0] != len(pairs):
            raise AttributeShapeError(
                f"edge_attrs has {edge_attrs.shape[0]} rows for "
                f"{len(pairs)} edges")

    seen = {}
    kept_rows = []
    for i, (u, v) in enumerate(pairs):
        if u == v:
            raise SelfLoopError(f"self loop at node {u}")
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise NodeIndexError(
                f"edge ({u}, {v}) out of range 0..{node_count - 1}")
        key = (u, v) if u < v else (v, u)
        if key not in seen:
            seen[key] = i
            kept_rows.append(i)

    keys = sorted(seen)
    edges = np.array(keys, dtype=np.int32).reshape(len(keys), 2)

    if edge_attrs is not None and edge_attrs.shape[1] > 0:
        order = [seen[key] for key in keys]
        edge_attrs = edge_attrs[order]
    else:
        edge_attrs = np.zeros((len(keys), 0), dtype=np.float32)

    if node_attrs is None:
        node_attrs = np.zeros((node_count, 0), dtype=np.float32)
    else:
        node_attrs = np.asarray(node_attrs, dtype=np.float32)
        if node_attrs.ndim == 1:
            node_attrs = node_attrs.reshape(-1, 1)
        if node_attrs.shape[0] != node_count:
            raise AttributeShapeError(
                f"node_attrs has {node_attrs.shape[0]} rows for "
                f"{node_count} nodes")

    if node_labels is not None:
        node_labels = np.asarray(node_labels, dtype=np.int64)
        if node_labels.shape != (node_count,):
            raise AttributeShapeError(
                f"node_labels shape {node_labels.shape} for {node_count} nodes")

    indptr, indices = _build_csr(node_count, edges)
    return Graph(node_count, edges, node_attrs, edge_attrs, node_labels,
                 indptr, indices)


def _build_csr(n, edges):
    # both directions, then counting sort by source
    if edges.shape[0] == 0:
        return np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int32)
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return indptr, dst.astype(np.int32)


def bfs_distances(g, root):
    """Hop distances from root; unreachable nodes get -1."""
    if not 0 <= root < g.node_count:
        raise NodeIndexError(f"root {root} out of range")
    dist = np.full(g.node_count, -1, dtype=np.int64)
    dist[root] = 0
    frontier = [root]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for u in frontier:
            for v in g.neighbors(u):
                v = int(v)
                if dist[v] < 0:
                    dist[v] = d
                    nxt.append(v)
        frontier = nxt
    return dist


def induced_subgraph(g, nodes):
    """Subgraph on ``nodes``; new ids follow the input order.

    Returns (subgraph, mapping) where mapping[new_id] = old_id.
    Node attrs, edge attrs and node_labels are sliced along.
    """
    nodes = [int(u) for u in nodes]
    if len(set(nodes)) != len(nodes):
        raise DuplicateNodeError("induced_subgraph got repeated nodes")
    for u in nodes:
        if not 0 <= u < g.node_count:
            raise NodeIndexError(f"node {u} out of range")
    pos = {u: i for i, u in enumerate(nodes)}
    sub_edges = []
    attr_rows = []
    index = g.edge_index()
    for u, v in index:
        if u in pos and v in pos:
            sub_edges.append((pos[u], pos[v]))
            attr_rows.append(index[(u, v)])
    mapping = np.array(nodes, dtype=np.int64)
    ea = g.edge_attrs[attr_rows] if attr_rows else \
        np.zeros((0, g.edge_attr_dim), dtype=np.float32)
    labels = g.node_labels[mapping] if g.node_labels is not None else None
    sub = build_graph(len(nodes), sub_edges,
                      node_attrs=g.node_attrs[mapping],
                      edge_attrs=ea, node_labels=labels)
    return sub, mapping


def adjacency_matrix(g):
    """Dense symmetric 0/1 uint8 matrix."""
    a = np.zeros((g.node_count, g.node_count), dtype=np.uint8)
    if g.edge_count:
        a[g.edges[:, 0], g.edges[:, 1]] = 1
        a[g.edges[:, 1], g.edges[:, 0]] = 1
    return a


class AdjacencyMatrix:
    """Dense adjacency with helpers for order-dependent comparisons."""

    __slots__ = ("dense",)

    def __init__(self, dense):
        dense = np.asarray(dense, dtype=np.uint8)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise AttributeShapeError(f"not square: {dense.shape}")
        self.dense = dense

    @classmethod
    def from_graph(cls, g, order=None):
        a = adjacency_matrix(g)
        if order is not None:
            order = np.asarray(order, dtype=np.int64)
            a = a[np.ix_(order, order)]
        return cls(a)

    def bit_string(self):
        """Row-major concatenation of 0/1 characters."""
        return "".join("1" if x else "0" for x in self.dense.reshape(-1))

    def __eq__(self, other):
        if not isinstance(other, AdjacencyMatrix):
            return NotImplemented
        return self.dense.shape == other.dense.shape and \
            bool(np.array_equal(self.dense, other.dense))

    def __repr__(self):
        return f"AdjacencyMatrix(n={self.dense.shape[0]})"


class CsrView:
    """Adjacency-only stand-in for Graph, cheap to construct.

    Labeling procedures only touch node_count, CSR arrays, degrees,
    node_labels and neighbors(); this view provides exactly that so the
    per-neighborhood pipeline avoids rebuilding attribute matrices and
    edge indexes for every receptive field.
    """

    __slots__ = ("node_count", "indptr", "indices", "node_labels", "degrees")

    def __init__(self, indptr, indices, node_labels=None):
        self.node_count = len(indptr) - 1
        self.indptr = indptr
        self.indices = indices
        self.node_labels = node_labels
        self.degrees = np.diff(indptr).astype(np.int64)

    def neighbors(self, u):
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def degree(self, u):
        return int(self.degrees[u])


def isomorphic_bruteforce(g1, g2):
    """Exact isomorphism test by permutation search, structure only.

    Guarded to BRUTEFORCE_MAX_NODES nodes; meant for validating
    canonicalization in tests, not for production use.
    """
    if g1.node_count > BRUTEFORCE_MAX_NODES or \
            g2.node_count > BRUTEFORCE_MAX_NODES:
        raise TooLargeError(
            f"bruteforce isomorphism limited to {BRUTEFORCE_MAX_NODES} nodes")
    if g1.node_count != g2.node_count or g1.edge_count != g2.edge_count:
        return False
    if sorted(g1.degrees.tolist()) != sorted(g2.degrees.tolist()):
        return False
    a1 = adjacency_matrix(g1)
    a2 = adjacency_matrix(g2)
    n = g1.node_count
    for perm in permutations(range(n)):
        p = np.array(perm)
        if np.array_equal(a1, a2[np.ix_(p, p)]):
            return True
    return False
