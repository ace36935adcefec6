"""Node labelings: color refinement, degree, betweenness, random order.

A labeling assigns every node a comparable value; sorting by descending
value (node id as tie-break) yields the ranking that drives node
selection and neighborhood normalization.  Procedure objects wrap the
individual functions behind a common callable interface so the pipeline
can recompute labels on induced neighborhoods.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ShapeMismatchError


@dataclass
class Labeling:
    values: np.ndarray  # one comparable value per node
    name: str = "?"

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 1:
            raise ShapeMismatchError(
                f"labeling values must be 1-D, got shape {self.values.shape}")


@dataclass
class Ranking:
    """Bijective node order derived from a labeling.

    order[p] is the node placed at position p (best first: descending
    label value, ascending node id on ties).  rank is 1-based, so
    rank[order[0]] == 1.  partition groups nodes sharing a label value,
    listed from the highest value down.
    """
    order: np.ndarray
    rank: np.ndarray
    partition: list = field(default_factory=list)


def ranking_from_labeling(labeling):
    values = labeling.values if isinstance(labeling, Labeling) else \
        np.asarray(labeling)
    n = len(values)
    ids = np.arange(n)
    order = np.lexsort((ids, -values))
    rank = np.empty(n, dtype=np.int64)
    rank[order] = ids + 1
    partition = []
    start = 0
    for i in range(1, n + 1):
        if i == n or values[order[i]] != values[order[start]]:
            partition.append(order[start:i].copy())
            start = i
    return Ranking(order=order.astype(np.int64), rank=rank,
                   partition=partition)


def wl_refine(g, init_colors=None, max_iter=-1):
    """Iterative color refinement; returns (Labeling, passes that split).

    Each pass maps a node's (own color, sorted neighbor colors) pair to
    a fresh color; colors are renumbered canonically every pass and
    iteration stops once the partition is stable.  init_colors defaults
    to the graph's discrete node labels when it carries them, else to a
    single shared color.  max_iter <= 0 lifts the pass cap.
    """
    if init_colors is None:
        if g.node_labels is not None:
            init_colors = g.node_labels
        else:
            init_colors = np.zeros(g.node_count, dtype=np.int64)
    colors, changed = kernels.wl_refine(
        g.indptr, g.indices, np.asarray(init_colors, dtype=np.int64),
        int(max_iter))
    return Labeling(colors, "wl"), changed


def degree_labeling(g):
    return Labeling(g.degrees.copy(), "degree")


def betweenness(g):
    """Exact betweenness centrality, endpoints excluded.

    Accumulates one-sided dependencies per source over the shortest-path
    DAG, then halves the totals since this graph is undirected.
    """
    n = g.node_count
    bc = np.zeros(n, dtype=np.float64)
    for s in range(n):
        stack = []
        preds = [[] for _ in range(n)]
        sigma = np.zeros(n, dtype=np.float64)
        sigma[s] = 1.0
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in g.neighbors(v):
                w = int(w)
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(n, dtype=np.float64)
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    return Labeling(bc / 2.0, "betweenness")


def random_labeling(g, seed):
    """Uniform random bijective labeling (control baseline)."""
    rng = np.random.default_rng(seed)
    return Labeling(rng.permutation(g.node_count).astype(np.int64), "random")


class WlColors:
    """Stable refinement colors; the pipeline's default labeling."""

    name = "wl"

    def __init__(self, max_iter=-1):
        self.max_iter = max_iter

    def __call__(self, g):
        lab, _ = wl_refine(g, max_iter=self.max_iter)
        return lab


class DegreeCentrality:
    name = "degree"

    def __call__(self, g):
        return degree_labeling(g)


class BetweennessCentrality:
    name = "betweenness"

    def __call__(self, g):
        return betweenness(g)


class RandomOrder:
    """Independent random labeling per call, seeded once.

    Calls consume one permutation each from a fixed stream, so a fixed
    call sequence is reproducible.
    """

    name = "random"

    def __init__(self, seed=0):
        self.rng = np.random.default_rng(seed)

    def __call__(self, g):
        return Labeling(
            self.rng.permutation(g.node_count).astype(np.int64), "random")


def get_procedure(name, seed=0):
    if name == "wl":
        return WlColors()
    if name == "degree":
        return DegreeCentrality()
    if name == "betweenness":
        return BetweennessCentrality()
    if name == "random":
        return RandomOrder(seed)
    raise ValueError(f"unknown labeling {name!r}")
