"""Unsupervised labeling comparison via sampled adjacency distance.

For a collection of same-size graphs, a labeling is scored by the mean
Hamming distance between canonically ordered adjacency matrices of
uniformly sampled graph pairs: the labeling fixes a node partition, the
partition constrains a canonical order, and lower mean distance means
the labeling aligns similar graphs more consistently.  All candidate
labelings are scored on the same sampled pair sequence, so the
comparison is paired and deterministic given the seed.
"""

from dataclasses import dataclass

import numpy as np

from .canonicalize import K_MAX, PriorColoring, canonical_form
from .errors import (
    BadParamsError,
    EmptyCollectionError,
    ExhaustedError,
    MixedSizesError,
)
from .graph_core import induced_subgraph
from .labeling import WlColors, ranking_from_labeling
from .patchy import assemble_neighborhood, _neighborhood_values


@dataclass
class EstimatorReport:
    labeling_name: str
    theta_hat: float
    pair_count: int
    seed: int


def _canonical_bits(g, proc):
    lab = proc(g)
    ranking = ranking_from_labeling(lab)
    prior = PriorColoring.from_partition(ranking.partition, g.node_count)
    cf = canonical_form(g, prior, k_max=max(K_MAX, g.node_count))
    return cf.matrix.dense


def _check_collection(collection):
    if not collection:
        raise EmptyCollectionError("need at least one graph")
    sizes = {g.node_count for g in collection}
    if len(sizes) != 1:
        raise MixedSizesError(f"mixed node counts {sorted(sizes)}")
    return sizes.pop()


def _pair_distances(mats, pairs, iu):
    out = np.empty(len(pairs), dtype=np.int64)
    for t, (i, j) in enumerate(pairs):
        out[t] = int(np.count_nonzero(mats[i][iu] != mats[j][iu]))
    return out


def theta_hat(collection, labeling_proc, pair_count, seed):
    """Mean upper-triangle Hamming distance over sampled pairs.

    Pairs are drawn independently and uniformly with replacement.  The
    matrix of each graph is ordered canonically under the prior coloring
    induced by the labeling's value partition, so the estimate is
    invariant to how the collection's graphs happen to number their
    nodes.
    """
    n = _check_collection(collection)
    if pair_count < 1:
        raise BadParamsError(f"pair_count must be >= 1, got {pair_count}")
    mats = [_canonical_bits(g, labeling_proc) for g in collection]
    rng = np.random.default_rng(seed)
    pairs = rng.integers(0, len(collection), size=(pair_count, 2))
    iu = np.triu_indices(n, k=1)
    dists = _pair_distances(mats, pairs, iu)
    return EstimatorReport(
        labeling_name=getattr(labeling_proc, "name", "?"),
        theta_hat=float(dists.sum()) / pair_count,
        pair_count=pair_count, seed=seed)


def compare_labelings(collection, procs, pair_count, seed):
    """Score every candidate on one shared pair sample; best first.

    Returns EstimatorReports sorted ascending by theta_hat (stable, so
    candidates that tie keep their input order).
    """
    n = _check_collection(collection)
    if pair_count < 1:
        raise BadParamsError(f"pair_count must be >= 1, got {pair_count}")
    rng = np.random.default_rng(seed)
    pairs = rng.integers(0, len(collection), size=(pair_count, 2))
    iu = np.triu_indices(n, k=1)
    reports = []
    for proc in procs:
        mats = [_canonical_bits(g, proc) for g in collection]
        dists = _pair_distances(mats, pairs, iu)
        reports.append(EstimatorReport(
            labeling_name=getattr(proc, "name", "?"),
            theta_hat=float(dists.sum()) / pair_count,
            pair_count=pair_count, seed=seed))
    return sorted(reports, key=lambda r: r.theta_hat)


def sample_neighborhood_collection(graphs, k, count, seed, max_tries=None):
    """Draw `count` k-node neighborhood graphs from a dataset.

    Each draw picks a uniform graph and uniform root, grows the BFS
    neighborhood, and crops it to exactly k nodes with the pipeline's
    crop rule (layer, refinement color descending, node id); draws whose
    neighborhood holds fewer than k nodes are rejected.  Raises
    Exhausted when max_tries draws (default 100 per requested sample)
    cannot produce enough.
    """
    if count < 1:
        raise BadParamsError(f"count must be >= 1, got {count}")
    if not graphs:
        raise EmptyCollectionError("no graphs to sample from")
    if max_tries is None:
        max_tries = max(100 * count, 1000)
    rng = np.random.default_rng(seed)
    proc = WlColors()
    out = []
    tries = 0
    while len(out) < count:
        if tries >= max_tries:
            raise ExhaustedError(
                f"{tries} draws produced only {len(out)} of {count} "
                f"{k}-node neighborhoods")
        tries += 1
        g = graphs[int(rng.integers(len(graphs)))]
        if g.node_count == 0:
            continue
        root = int(rng.integers(g.node_count))
        nodes, layers = assemble_neighborhood(g, root, k)
        if len(nodes) < k:
            continue
        values = _neighborhood_values(proc, g, nodes)
        order = np.lexsort((nodes, -values, layers))
        kept = nodes[order[:k]]
        sub, _ = induced_subgraph(g, kept)
        out.append(sub)
    return out
