"""Canonical vertex orders constrained by a prior coloring.

Among all orders that list prior-color classes in ascending color order
(free choice inside a class), canonical_form picks the one whose
row-major adjacency bit string is lexicographically maximal.  Two
same-size graphs related by a color-preserving isomorphism therefore
share one canonical matrix, which is what downstream users compare.

canonical_oracle recomputes the same object by enumerating every
admissible order; it exists to validate the search and is guarded
against factorial blowup.
"""

from dataclasses import dataclass
from itertools import permutations, product
from math import factorial

import numpy as np

from . import kernels
from .errors import ShapeMismatchError, TooLargeError
from .graph_core import AdjacencyMatrix, adjacency_matrix

K_MAX = 32
ORACLE_MAX_NODES = 8
ORACLE_MAX_ORDERS = 2_000_000


class PriorColoring:
    """Per-node color constraint; lower colors come first in any
    admissible order."""

    __slots__ = ("colors",)

    def __init__(self, colors):
        colors = np.asarray(colors, dtype=np.int64)
        if colors.ndim != 1:
            raise ShapeMismatchError("prior colors must be 1-D")
        self.colors = colors

    @classmethod
    def uniform(cls, n):
        return cls(np.zeros(n, dtype=np.int64))

    @classmethod
    def from_partition(cls, classes, n):
        """classes: iterable of node-id groups, highest priority first."""
        colors = np.full(n, -1, dtype=np.int64)
        for color, members in enumerate(classes):
            for u in members:
                colors[int(u)] = color
        if (colors < 0).any():
            raise ShapeMismatchError("partition does not cover all nodes")
        return cls(colors)

    def __len__(self):
        return len(self.colors)


@dataclass
class CanonicalForm:
    """permutation[p] = original node id placed at position p."""
    permutation: np.ndarray
    matrix: AdjacencyMatrix

    @property
    def bit_string(self):
        return self.matrix.bit_string()

    def __eq__(self, other):
        if not isinstance(other, CanonicalForm):
            return NotImplemented
        return self.matrix == other.matrix


def canonical_form(g, prior=None, k_max=K_MAX):
    """Canonical order of g under the prior, via constrained search.

    Refuses graphs larger than k_max nodes; the search is exact but
    worst-case exponential, so the bound is a policy choice callers can
    raise deliberately.
    """
    n = g.node_count
    if n > k_max:
        raise TooLargeError(f"{n} nodes exceeds the canonicalization "
                            f"bound {k_max}")
    if prior is None:
        prior = PriorColoring.uniform(n)
    if len(prior) != n:
        raise ShapeMismatchError(
            f"prior has {len(prior)} colors for {n} nodes")
    perm = kernels.canonical_search(
        g.indptr, g.indices, np.arange(n, dtype=np.int64), prior.colors)
    return CanonicalForm(permutation=perm,
                         matrix=AdjacencyMatrix.from_graph(g, order=perm))


def canonical_oracle(g, prior=None, max_orders=ORACLE_MAX_ORDERS):
    """Reference result by scoring every admissible order.

    Packs each candidate's adjacency bits into one unsigned 64-bit score
    (possible because of the node bound), so the argmax is the
    lexicographically maximal bit string.  Independent of
    canonical_form's search on purpose.
    """
    n = g.node_count
    if n > ORACLE_MAX_NODES:
        raise TooLargeError(
            f"oracle limited to {ORACLE_MAX_NODES} nodes, got {n}")
    if prior is None:
        prior = PriorColoring.uniform(n)
    if len(prior) != n:
        raise ShapeMismatchError(
            f"prior has {len(prior)} colors for {n} nodes")
    if n == 0:
        return CanonicalForm(permutation=np.zeros(0, dtype=np.int64),
                             matrix=AdjacencyMatrix(np.zeros((0, 0))))

    colors = prior.colors
    values = sorted(set(colors.tolist()))
    classes = [np.flatnonzero(colors == c).tolist() for c in values]
    total = 1
    for cl in classes:
        total *= factorial(len(cl))
    if total > max_orders:
        raise TooLargeError(f"{total} admissible orders exceed the "
                            f"oracle cap {max_orders}")

    orders = np.array(
        [sum((list(p) for p in combo), [])
         for combo in product(*[permutations(cl) for cl in classes])],
        dtype=np.int64)
    a = adjacency_matrix(g)
    gathered = a[orders[:, :, None], orders[:, None, :]]
    bits = gathered.reshape(total, n * n).astype(np.uint64)
    weights = (np.uint64(1) << np.arange(n * n - 1, -1, -1, dtype=np.uint64))
    scores = (bits * weights).sum(axis=1, dtype=np.uint64)
    best = int(np.argmax(scores))
    perm = orders[best]
    return CanonicalForm(permutation=perm,
                         matrix=AdjacencyMatrix.from_graph(g, order=perm))
