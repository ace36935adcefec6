"""Select, assemble, normalize: attributed graphs to fixed-size tensors.

The pipeline walks a graph's nodes in labeling order, grows a
breadth-first neighborhood around every selected root, crops or pads it
to exactly k slots, and fixes the slot order canonically.  Each field
then contributes one (k, a_v) node slice and one (k, k, a_e) edge slice
to the per-graph tensors consumed by the trainer.

The labeling argument of every entry point accepts either a Labeling
(precomputed values, used as given everywhere) or a labeling procedure
(a callable Graph -> Labeling).  With a procedure, crop and tie-break
decisions inside each neighborhood use labels recomputed on the induced
neighborhood itself rather than full-graph values; distant structure
then cannot influence which near nodes survive a crop, which is what
makes receptive fields on regular lattices line up with image patches.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .canonicalize import K_MAX
from .errors import (
    BadParamsError,
    GridTooSmallError,
    NodeIndexError,
    RootMissingError,
    ShapeMismatchError,
    TooLargeError,
)
from .graph_core import AdjacencyMatrix, CsrView
from .labeling import Labeling, WlColors

ZERO_FIELD = -1  # sequence marker
DUMMY = -1       # slot marker


@dataclass
class ReceptiveField:
    """One normalized neighborhood.

    root is the original root id, or None for an all-zero padding field.
    slots[p] is the original id of the node in position p, or DUMMY.
    The root always occupies slot 0 of a non-zero field.
    """
    root: Optional[int]
    slots: np.ndarray
    node_patch: np.ndarray
    edge_patch: np.ndarray
    adjacency: AdjacencyMatrix

    @classmethod
    def zero(cls, k, a_v, a_e):
        return cls(root=None,
                   slots=np.full(k, DUMMY, dtype=np.int64),
                   node_patch=np.zeros((k, a_v), dtype=np.float32),
                   edge_patch=np.zeros((k, k, a_e), dtype=np.float32),
                   adjacency=AdjacencyMatrix(np.zeros((k, k), dtype=np.uint8)))


@dataclass
class TensorBatch:
    """Per-graph tensor pair plus provenance.

    node_tensor: (w, k, a_v) float32; edge_tensor: (w, k, k, a_e)
    float32; roots: per-field original root id, ZERO_FIELD for padding
    fields.
    """
    width: int
    field_size: int
    node_tensor: np.ndarray
    edge_tensor: np.ndarray
    roots: np.ndarray
    labeling_name: str = "?"
    stride: int = 1

    def __post_init__(self):
        w, k = self.width, self.field_size
        if self.node_tensor.shape[:2] != (w, k):
            raise ShapeMismatchError(
                f"node tensor {self.node_tensor.shape} for w={w}, k={k}")
        if self.edge_tensor.shape[:3] != (w, k, k):
            raise ShapeMismatchError(
                f"edge tensor {self.edge_tensor.shape} for w={w}, k={k}")
        if self.roots.shape != (w,):
            raise ShapeMismatchError("one root per field required")

    @property
    def node_flat(self):
        """(w·k, a_v) view for the width-k strided convolution."""
        w, k, a_v = self.node_tensor.shape
        return self.node_tensor.reshape(w * k, a_v)

    @property
    def edge_flat(self):
        w, k, _, a_e = self.edge_tensor.shape
        return self.edge_tensor.reshape(w * k * k, a_e)


def _is_procedure(l):
    if isinstance(l, Labeling):
        return False
    if callable(l):
        return True
    raise TypeError(f"labeling must be a Labeling or a callable, got {type(l)}")


def _graph_values(l, g):
    # labeling values over the full graph, for node selection
    if _is_procedure(l):
        return l(g).values
    if len(l.values) != g.node_count:
        raise ShapeMismatchError(
            f"labeling covers {len(l.values)} nodes, graph has "
            f"{g.node_count}")
    return l.values


def _labeling_name(l):
    return getattr(l, "name", "?")


def select_node_sequence(g, l, w, s):
    """Top-w strided walk of nodes in descending label order.

    Visits positions 0, s, 2s, ... of the sorted node list and emits w
    entries; positions past the end emit ZERO_FIELD markers.
    """
    if w < 1:
        raise BadParamsError(f"w must be >= 1, got {w}")
    if s < 1:
        raise BadParamsError(f"stride must be >= 1, got {s}")
    values = _graph_values(l, g)
    ids = np.arange(g.node_count)
    order = np.lexsort((ids, -values))
    out = np.full(w, ZERO_FIELD, dtype=np.int64)
    pos = 0
    for i in range(w):
        if pos < len(order):
            out[i] = order[pos]
        pos += s
    return out


def assemble_neighborhood(g, v, k):
    """BFS layers around v, whole layers, until >= k nodes or exhaustion.

    Returns (nodes, layers); layer index is the hop distance from v.
    The result may hold more than k nodes (the final layer is never
    split) or fewer (small component).
    """
    if not 0 <= v < g.node_count:
        raise NodeIndexError(f"root {v} out of range 0..{g.node_count - 1}")
    if k < 1:
        raise BadParamsError(f"k must be >= 1, got {k}")
    return kernels.bfs_ball(g.indptr, g.indices, int(v), int(k))


def _neighborhood_values(l, g, nodes):
    # labels aligned with `nodes`: slice precomputed values, or run the
    # procedure on the induced neighborhood
    if _is_procedure(l):
        sub_indptr, sub_indices = kernels.induced_csr(
            g.indptr, g.indices, nodes)
        labels = g.node_labels[nodes] if g.node_labels is not None else None
        return l(CsrView(sub_indptr, sub_indices, labels)).values
    return l.values[nodes]


def normalize_graph(g, nodes, layers, v, l, k, k_max=None):
    """Crop/pad an assembled neighborhood to k slots and fix their order.

    Nodes are ranked by (BFS layer, label descending, node id); if more
    than k survive assembly the top k are kept and re-ranked (labels are
    recomputed on the cropped neighborhood when l is a procedure).  The
    within-class order is then fixed by canonical search with the
    (layer, label) classes as prior coloring, and patches are populated
    from the original graph's attributes.
    """
    nodes = np.asarray(nodes, dtype=np.int64)
    layers = np.asarray(layers, dtype=np.int64)
    if nodes.shape != layers.shape:
        raise ShapeMismatchError("nodes and layers must align")
    if v not in set(nodes.tolist()):
        raise RootMissingError(f"root {v} not in the neighborhood")
    if k_max is None:
        k_max = max(K_MAX, k)
    if k > k_max:
        raise TooLargeError(f"k={k} exceeds k_max={k_max}")

    values = _neighborhood_values(l, g, nodes)
    order = np.lexsort((nodes, -values, layers))
    if len(nodes) > k:
        keep = order[:k]
        sub_nodes = nodes[keep]
        sub_layers = layers[keep]
        sub_values = _neighborhood_values(l, g, sub_nodes)
        order2 = np.lexsort((sub_nodes, -sub_values, sub_layers))
        final_nodes = sub_nodes[order2]
        final_layers = sub_layers[order2]
        final_values = sub_values[order2]
    else:
        final_nodes = nodes[order]
        final_layers = layers[order]
        final_values = values[order]

    r = len(final_nodes)
    prior = np.zeros(r, dtype=np.int64)
    for i in range(1, r):
        bump = (final_layers[i] != final_layers[i - 1]) or \
            (final_values[i] != final_values[i - 1])
        prior[i] = prior[i - 1] + (1 if bump else 0)

    perm = kernels.canonical_search(g.indptr, g.indices, final_nodes, prior)
    real = final_nodes[perm]

    a_v = g.attr_dim
    a_e = g.edge_attr_dim
    slots = np.full(k, DUMMY, dtype=np.int64)
    slots[:r] = real
    node_patch = np.zeros((k, a_v), dtype=np.float32)
    if a_v:
        node_patch[:r] = g.node_attrs[real]
    edge_patch = np.zeros((k, k, a_e), dtype=np.float32)
    adj = np.zeros((k, k), dtype=np.uint8)

    sub_indptr, sub_indices = kernels.induced_csr(g.indptr, g.indices, real)
    edge_index = g.edge_index() if a_e else None
    for i in range(r):
        for j in sub_indices[sub_indptr[i]:sub_indptr[i + 1]]:
            j = int(j)
            adj[i, j] = 1
            if a_e and j > i:
                u, wv = int(real[i]), int(real[j])
                if u > wv:
                    u, wv = wv, u
                row = edge_index[(u, wv)]
                edge_patch[i, j] = g.edge_attrs[row]
                edge_patch[j, i] = g.edge_attrs[row]

    return ReceptiveField(root=int(v), slots=slots, node_patch=node_patch,
                          edge_patch=edge_patch,
                          adjacency=AdjacencyMatrix(adj))


def receptive_field(g, v, l, k, k_max=None):
    """Assemble then normalize; the per-root pipeline step."""
    nodes, layers = assemble_neighborhood(g, v, k)
    return normalize_graph(g, nodes, layers, v, l, k, k_max=k_max)


def graph_to_tensors(g, l, w, s, k, k_max=None):
    """Full pipeline for one graph: w receptive fields as two tensors."""
    sel = l(g) if _is_procedure(l) else l
    seq = select_node_sequence(g, sel, w, s)
    a_v = g.attr_dim
    a_e = g.edge_attr_dim
    node_tensor = np.zeros((w, k, a_v), dtype=np.float32)
    edge_tensor = np.zeros((w, k, k, a_e), dtype=np.float32)
    for i, v in enumerate(seq):
        if v == ZERO_FIELD:
            continue
        rf = receptive_field(g, int(v), l, k, k_max=k_max)
        node_tensor[i] = rf.node_patch
        edge_tensor[i] = rf.edge_patch
    return TensorBatch(width=w, field_size=k, node_tensor=node_tensor,
                       edge_tensor=edge_tensor, roots=seq.copy(),
                       labeling_name=_labeling_name(l), stride=s)


@dataclass
class GridReport:
    match: bool
    permutation: Optional[np.ndarray]
    field_count: int


def verify_grid_equivalence(rows, cols, m, s):
    """Check receptive fields on a lattice against image patches.

    Builds the rows×cols 4-neighbor grid whose single attribute channel
    is the unique node index, extracts (2m-1)²-slot receptive fields at
    the strided row-major sequence of interior pixels, and extracts the
    (2m-1)×(2m-1) intensity patches at the same pixels.  Reports
    match=True iff a single slot permutation maps every field onto its
    patch, value for value.
    """
    side = 2 * m - 1
    if rows < side or cols < side:
        raise GridTooSmallError(
            f"{rows}x{cols} cannot hold a {side}x{side} patch")
    if s < 1:
        raise BadParamsError(f"stride must be >= 1, got {s}")
    from .datasets import generate_grid
    g = generate_grid(rows, cols, torus=False)
    k = side * side
    proc = WlColors()

    interior = [(r, c)
                for r in range(m - 1, rows - m + 1)
                for c in range(m - 1, cols - m + 1)]
    picked = interior[::s]

    fields = []
    patches = []
    for r, c in picked:
        rf = receptive_field(g, r * cols + c, proc, k)
        fields.append(rf.node_patch[:, 0])
        patch = [float((r + dr) * cols + (c + dc))
                 for dr in range(-(m - 1), m)
                 for dc in range(-(m - 1), m)]
        patches.append(np.array(patch, dtype=np.float32))

    # one fixed slot -> patch-position map, fitted on the first field
    lookup = {float(val): j for j, val in enumerate(patches[0])}
    sigma = np.full(k, -1, dtype=np.int64)
    for i, val in enumerate(fields[0]):
        j = lookup.get(float(val))
        if j is None:
            return GridReport(match=False, permutation=None,
                              field_count=len(picked))
        sigma[i] = j

    for fv, pv in zip(fields, patches):
        if not np.array_equal(pv[sigma], fv):
            return GridReport(match=False, permutation=None,
                              field_count=len(picked))
    return GridReport(match=True, permutation=sigma,
                      field_count=len(picked))
