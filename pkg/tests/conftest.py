"""Shared test helpers: graph builders, slow oracles, a synthetic
TU-format fixture writer, and the acceptance summary hook."""

import os
from pathlib import Path

import numpy as np

from graphrf.graph_core import build_graph

# ------------------------------------------------------------- builders


def path_graph(n):
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves):
    """Center is node 0."""
    return build_graph(leaves + 1, [(0, i + 1) for i in range(leaves)])


def complete_graph(n):
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_graph(rng, n, p, attr_dim=0, edge_attr_dim=0):
    mask = np.triu(rng.random((n, n)) < p, 1)
    edges = [(int(u), int(v)) for u, v in np.argwhere(mask)]
    na = rng.random((n, attr_dim)).astype(np.float32) if attr_dim else None
    ea = (rng.random((len(edges), edge_attr_dim)).astype(np.float32)
          if edge_attr_dim else None)
    return build_graph(n, edges, node_attrs=na, edge_attrs=ea)


def permute_graph(g, perm):
    """Relabel nodes: old u becomes perm[u]; attributes follow their nodes."""
    perm = np.asarray(perm)
    edges = [(int(perm[u]), int(perm[v])) for u, v in g.edges]
    na = None
    if g.attr_dim:
        na = np.empty_like(g.node_attrs)
        na[perm] = g.node_attrs
    ea = g.edge_attrs.copy() if g.edge_attr_dim else None
    nl = None
    if g.node_labels is not None:
        nl = np.empty_like(g.node_labels)
        nl[perm] = g.node_labels
    return build_graph(g.node_count, edges, node_attrs=na, edge_attrs=ea,
                       node_labels=nl)


def partition_of(values):
    groups = {}
    for i, v in enumerate(values):
        groups.setdefault(int(v), []).append(i)
    return frozenset(frozenset(grp) for grp in groups.values())


# -------------------------------------------------------------- oracles


def exhaustive_betweenness(g):
    """Betweenness by brute-force enumeration of every simple path.

    For each unordered pair, every shortest path contributes 1/|shortest|
    to each interior node.  Only viable for small n; used as the
    independent check against the accumulation-based implementation.
    """
    n = g.node_count
    score = np.zeros(n)
    for s in range(n):
        for t in range(s + 1, n):
            paths = []
            stack = [(s, (s,))]
            while stack:
                u, path = stack.pop()
                if u == t:
                    paths.append(path)
                    continue
                for nxt in g.neighbors(u):
                    if int(nxt) not in path:
                        stack.append((int(nxt), path + (int(nxt),)))
            if not paths:
                continue
            shortest_len = min(len(p) for p in paths)
            shortest = [p for p in paths if len(p) == shortest_len]
            for p in shortest:
                for v in p[1:-1]:
                    score[v] += 1.0 / len(shortest)
    return score


# --------------------------------------------------- TU-format fixtures


def write_tu_fixture(directory, name="FIXT"):
    """Three graphs: triangle, P3, C4, with node/edge labels and one
    continuous attribute channel (0.5 * global 1-based node id)."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    # undirected edges, both directions listed as in the standard layout
    und = [
        (1, 2, 4), (2, 3, 9), (1, 3, 4),          # triangle
        (4, 5, 9), (5, 6, 9),                     # path
        (7, 8, 4), (8, 9, 9), (9, 10, 4), (7, 10, 9),   # 4-cycle
    ]
    a_rows, e_rows = [], []
    for u, v, lab in und:
        a_rows += [f"{u}, {v}", f"{v}, {u}"]
        e_rows += [str(lab), str(lab)]
    (d / f"{name}_A.txt").write_text("\n".join(a_rows) + "\n")
    (d / f"{name}_edge_labels.txt").write_text("\n".join(e_rows) + "\n")
    indicator = [1] * 3 + [2] * 3 + [3] * 4
    (d / f"{name}_graph_indicator.txt").write_text(
        "\n".join(map(str, indicator)) + "\n")
    (d / f"{name}_graph_labels.txt").write_text("1\n2\n1\n")
    node_labels = [7, 8, 7, 8, 8, 7, 7, 7, 8, 8]
    (d / f"{name}_node_labels.txt").write_text(
        "\n".join(map(str, node_labels)) + "\n")
    attrs = [f"{0.5 * i:.2f}" for i in range(1, 11)]
    (d / f"{name}_node_attributes.txt").write_text("\n".join(attrs) + "\n")
    return d, name


def write_tu_classify_fixture(directory, name="TOY", per_class=8):
    """Separable two-class set: triangles vs 4-cycles, node labels
    distinguish the classes so even a linear model can fit it."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    a_rows, indicator, labels, node_labels = [], [], [], []
    nid = 1
    for i in range(2 * per_class):
        cls = i % 2
        count = 3 if cls == 0 else 4
        base = nid
        for j in range(count):
            u, v = base + j, base + (j + 1) % count
            a_rows += [f"{u}, {v}", f"{v}, {u}"]
        indicator += [i + 1] * count
        node_labels += [cls] * count
        labels.append(cls)
        nid += count
    (d / f"{name}_A.txt").write_text("\n".join(a_rows) + "\n")
    (d / f"{name}_graph_indicator.txt").write_text(
        "\n".join(map(str, indicator)) + "\n")
    (d / f"{name}_graph_labels.txt").write_text(
        "\n".join(map(str, labels)) + "\n")
    (d / f"{name}_node_labels.txt").write_text(
        "\n".join(map(str, node_labels)) + "\n")
    return d, name


# -------------------------------------------------- benchmark data gate


def benchmark_dataset_dir(name="MUTAG"):
    """Locate a real TU benchmark directory, or None.

    Looks under $GRAPHRF_DATA_DIR (either the dataset directory itself
    or a parent containing it) and tests/data/.  The sandbox has no
    network access, so the archive cannot be fetched here; drop the
    extracted files in one of those places to enable the gated tests.
    """
    candidates = []
    env = os.environ.get("GRAPHRF_DATA_DIR")
    if env:
        candidates += [Path(env), Path(env) / name]
    candidates.append(Path(__file__).parent / "data" / name)
    for c in candidates:
        if (c / f"{name}_A.txt").is_file():
            return c
    return None


# ------------------------------------------------ acceptance reporting

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if report.when == "call":
        _ACCEPTANCE.append((name, report.outcome.upper()))
    elif report.when == "setup" and report.outcome != "passed":
        _ACCEPTANCE.append((name, report.outcome.upper()))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        terminalreporter.write_line(f"{outcome:7s} {name}")
