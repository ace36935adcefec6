"""Dataset ingestion, synthetic graph generators, tensor file I/O.

Ingestion reads the multi-file TU text layout (the standard distribution
format for the graph-classification benchmarks).  Generators cover the
benchmark graph families: lattices/tori, preferential attachment, and a
power-law configuration model.  All randomness flows through numpy's
default_rng (PCG64, seeded 64-bit), so identical seeds reproduce
identical graphs across platforms; see tests for frozen draw vectors.

Tensor files are a little-endian binary format: a 4-byte little-endian
unsigned header length, a JSON header {w, k, a_v, a_e, graph_count,
stride, labeling_name, version}, then float32 payload holding each
graph's node tensor followed by its edge tensor, row-major.
"""

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadParamsError,
    CorruptHeaderError,
    HeterogeneousBatchesError,
    InconsistentIndicatorError,
    MalformedLineError,
    MissingFileError,
    TooSmallError,
    TruncatedPayloadError,
)
from .graph_core import Graph, build_graph
from .patchy import TensorBatch, ZERO_FIELD


@dataclass
class DatasetBundle:
    graphs: list
    class_labels: np.ndarray
    name: str
    a_v: int
    a_e: int
    node_label_values: list = field(default_factory=list)
    edge_label_values: list = field(default_factory=list)

    def __len__(self):
        return len(self.graphs)


# ---------------------------------------------------------------- loaders

def _read_lines(path):
    if not path.is_file():
        raise MissingFileError(f"required dataset file missing: {path}")
    with open(path) as fh:
        return fh.read().splitlines()


def _parse_int(path, lineno, text):
    try:
        return int(text.strip())
    except ValueError:
        raise MalformedLineError(path, lineno, f"expected integer, got "
                                 f"{text.strip()!r}") from None


def load_tu_dataset(directory, name):
    """Load a TU-format dataset directory into a DatasetBundle.

    Required files: {name}_A.txt (1-based comma-separated edge list over
    global node ids), {name}_graph_indicator.txt (graph id per node),
    {name}_graph_labels.txt.  Optional: node labels, edge labels
    (aligned with A rows), continuous node attributes.  Discrete labels
    become one-hot attribute blocks; class labels are remapped to
    0..C-1 in sorted order.
    """
    d = Path(directory)
    a_path = d / f"{name}_A.txt"
    ind_path = d / f"{name}_graph_indicator.txt"
    lab_path = d / f"{name}_graph_labels.txt"

    indicator = [_parse_int(ind_path, i + 1, line)
                 for i, line in enumerate(_read_lines(ind_path))]
    n_total = len(indicator)
    graph_ids = sorted(set(indicator))
    n_graphs = len(graph_ids)
    if graph_ids != list(range(1, n_graphs + 1)):
        raise InconsistentIndicatorError(
            f"graph ids not contiguous from 1: {graph_ids[:5]}...")

    raw_labels = [_parse_int(lab_path, i + 1, line)
                  for i, line in enumerate(_read_lines(lab_path))]
    if len(raw_labels) != n_graphs:
        raise InconsistentIndicatorError(
            f"{len(raw_labels)} class labels for {n_graphs} graphs")
    class_values = sorted(set(raw_labels))
    class_labels = np.array([class_values.index(x) for x in raw_labels],
                            dtype=np.int64)

    edges = []
    for i, line in enumerate(_read_lines(a_path)):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise MalformedLineError(a_path, i + 1,
                                     f"expected 'u, v', got {line!r}")
        u = _parse_int(a_path, i + 1, parts[0])
        v = _parse_int(a_path, i + 1, parts[1])
        if not (1 <= u <= n_total and 1 <= v <= n_total):
            raise MalformedLineError(a_path, i + 1,
                                     f"node id out of range: {line!r}")
        edges.append((u - 1, v - 1, i))

    node_labels = None
    node_label_values = []
    nl_path = d / f"{name}_node_labels.txt"
    if nl_path.is_file():
        node_labels = [_parse_int(nl_path, i + 1, line)
                       for i, line in enumerate(_read_lines(nl_path))]
        if len(node_labels) != n_total:
            raise InconsistentIndicatorError(
                f"{len(node_labels)} node labels for {n_total} nodes")
        node_label_values = sorted(set(node_labels))

    edge_labels = None
    edge_label_values = []
    el_path = d / f"{name}_edge_labels.txt"
    if el_path.is_file():
        edge_labels = [_parse_int(el_path, i + 1, line)
                       for i, line in enumerate(_read_lines(el_path))]
        if len(edge_labels) != len(edges):
            raise InconsistentIndicatorError(
                f"{len(edge_labels)} edge labels for {len(edges)} edge rows")
        edge_label_values = sorted(set(edge_labels))

    node_attrs = None
    na_path = d / f"{name}_node_attributes.txt"
    if na_path.is_file():
        node_attrs = []
        for i, line in enumerate(_read_lines(na_path)):
            try:
                node_attrs.append([float(x) for x in line.split(",")])
            except ValueError:
                raise MalformedLineError(na_path, i + 1,
                                         f"bad attribute row {line!r}") \
                    from None
        if len(node_attrs) != n_total:
            raise InconsistentIndicatorError(
                f"{len(node_attrs)} attribute rows for {n_total} nodes")

    # split global nodes per graph, preserving global order
    members = [[] for _ in range(n_graphs)]
    for node, gid in enumerate(indicator):
        members[gid - 1].append(node)
    local = {}
    for gid, nodes in enumerate(members):
        for i, node in enumerate(nodes):
            local[node] = (gid, i)

    per_edges = [[] for _ in range(n_graphs)]
    per_edge_rows = [[] for _ in range(n_graphs)]
    for u, v, row in edges:
        gu, lu = local[u]
        gv, lv = local[v]
        if gu != gv:
            raise InconsistentIndicatorError(
                f"edge row {row + 1} joins graphs {gu + 1} and {gv + 1}")
        per_edges[gu].append((lu, lv))
        per_edge_rows[gu].append(row)

    n_nl = len(node_label_values)
    n_el = len(edge_label_values)
    n_na = len(node_attrs[0]) if node_attrs else 0
    a_v = n_nl + n_na
    a_e = n_el

    graphs = []
    for gid, nodes in enumerate(members):
        count = len(nodes)
        attrs = np.zeros((count, a_v), dtype=np.float32)
        labels = None
        if node_labels is not None:
            labels = np.array(
                [node_label_values.index(node_labels[u]) for u in nodes],
                dtype=np.int64)
            attrs[np.arange(count), labels] = 1.0
        if node_attrs is not None:
            attrs[:, n_nl:] = np.array([node_attrs[u] for u in nodes],
                                       dtype=np.float32)
        eattrs = None
        if edge_labels is not None:
            eattrs = np.zeros((len(per_edges[gid]), n_el), dtype=np.float32)
            for j, row in enumerate(per_edge_rows[gid]):
                eattrs[j, edge_label_values.index(edge_labels[row])] = 1.0
        graphs.append(build_graph(count, per_edges[gid],
                                  node_attrs=attrs, edge_attrs=eattrs,
                                  node_labels=labels))

    return DatasetBundle(graphs=graphs, class_labels=class_labels, name=name,
                         a_v=a_v, a_e=a_e,
                         node_label_values=node_label_values,
                         edge_label_values=edge_label_values)


def load_edge_list(path):
    """Two-column whitespace-separated edge list, 0-based ids."""
    p = Path(path)
    pairs = []
    top = -1
    for i, line in enumerate(_read_lines(p)):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise MalformedLineError(p, i + 1, f"expected two ids, got "
                                     f"{line!r}")
        u = _parse_int(p, i + 1, parts[0])
        v = _parse_int(p, i + 1, parts[1])
        if u < 0 or v < 0:
            raise MalformedLineError(p, i + 1, "negative node id")
        top = max(top, u, v)
        if u != v:
            pairs.append((u, v))
    return build_graph(top + 1, pairs)


# ------------------------------------------------------------- generators

def generate_grid(rows, cols, torus=False):
    """4-neighbor lattice; attribute channel 0 is the node index.

    A torus wraps both axes and needs rows, cols >= 3 so wrap edges stay
    distinct.
    """
    least = 3 if torus else 2
    if rows < least or cols < least:
        raise TooSmallError(f"{rows}x{cols} below the {least} minimum"
                            f"{' for a torus' if torus else ''}")
    n = rows * cols
    edges = []
    for r in range(rows):
        for c in range(cols):
            u = r * cols + c
            if c + 1 < cols:
                edges.append((u, u + 1))
            elif torus:
                edges.append((u, r * cols))
            if r + 1 < rows:
                edges.append((u, u + cols))
            elif torus:
                edges.append((u, c))
    attrs = np.arange(n, dtype=np.float32).reshape(n, 1)
    return build_graph(n, edges, node_attrs=attrs)


def generate_preferential_attachment(n, attach_degree, seed):
    """Degree-proportional attachment starting from a complete core.

    Nodes 0..attach_degree-1 form a clique; each later node joins
    attach_degree distinct earlier nodes drawn proportionally to degree
    (uniform draws from the stub multiset, redrawn on repeats).
    """
    m = attach_degree
    if m < 1 or n <= m:
        raise BadParamsError(f"need n > attach_degree >= 1, "
                             f"got n={n}, attach_degree={m}")
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(m) for j in range(i + 1, m)]
    pool = []  # node id repeated once per incident edge end
    for u, v in edges:
        pool.append(u)
        pool.append(v)
    if m == 1:
        pool = [0]  # single-node core has no edges; seed the pool
    for new in range(m, n):
        chosen = set()
        while len(chosen) < m:
            t = pool[int(rng.integers(len(pool)))]
            chosen.add(t)
        for t in sorted(chosen):
            edges.append((t, new))
            pool.append(t)
            pool.append(new)
    return build_graph(n, edges)


def generate_random_powerlaw(n, k_max, seed):
    """Configuration-model graph with P(degree = k) proportional to 1/k.

    Target degrees are sampled on {1..k_max}; stubs are shuffled and
    paired consecutively, rejecting self-loops and repeated pairs;
    rejected stubs go through further shuffle rounds, and irreparable
    leftovers are dropped (so realized degrees can fall below targets).
    An odd stub total loses its last post-shuffle stub.
    """
    if n < 2 or k_max < 1:
        raise BadParamsError(f"need n >= 2, k_max >= 1, got {n}, {k_max}")
    rng = np.random.default_rng(seed)
    ks = np.arange(1, k_max + 1)
    probs = (1.0 / ks) / (1.0 / ks).sum()
    degrees = rng.choice(ks, size=n, p=probs)
    stubs = np.repeat(np.arange(n), degrees)
    rng.shuffle(stubs)
    if len(stubs) % 2:
        stubs = stubs[:-1]
    seen = set()
    edges = []
    for _ in range(20):
        leftovers = []
        for i in range(0, len(stubs) - 1, 2):
            u, v = int(stubs[i]), int(stubs[i + 1])
            key = (u, v) if u < v else (v, u)
            if u == v or key in seen:
                leftovers.append(u)
                leftovers.append(v)
            else:
                seen.add(key)
                edges.append(key)
        if not leftovers:
            break
        stubs = np.array(leftovers)
        rng.shuffle(stubs)
    return build_graph(n, edges)


# ------------------------------------------------------------ tensor files

TENSOR_FILE_VERSION = 1
_HEADER_KEYS = ("w", "k", "a_v", "a_e", "graph_count", "stride",
                "labeling_name", "version")


def write_tensor_file(path, batches):
    """Serialize TensorBatch list; all batches must share w,k,a_v,a_e."""
    if batches:
        w = batches[0].width
        k = batches[0].field_size
        a_v = batches[0].node_tensor.shape[2]
        a_e = batches[0].edge_tensor.shape[3]
        stride = batches[0].stride
        lname = batches[0].labeling_name
        for b in batches:
            if (b.width, b.field_size, b.node_tensor.shape[2],
                    b.edge_tensor.shape[3]) != (w, k, a_v, a_e):
                raise HeterogeneousBatchesError(
                    "tensor batches disagree in w/k/a_v/a_e")
    else:
        w = k = a_v = a_e = 0
        stride = 1
        lname = "?"
    header = {"w": w, "k": k, "a_v": a_v, "a_e": a_e,
              "graph_count": len(batches), "stride": stride,
              "labeling_name": lname, "version": TENSOR_FILE_VERSION}
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for b in batches:
            fh.write(np.ascontiguousarray(b.node_tensor,
                                          dtype="<f4").tobytes())
            fh.write(np.ascontiguousarray(b.edge_tensor,
                                          dtype="<f4").tobytes())


def read_tensor_file(path):
    """Inverse of write_tensor_file.

    Returns (batches, header).  Field provenance is not stored on disk,
    so reloaded batches carry ZERO_FIELD markers for every root.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 4:
        raise CorruptHeaderError("file shorter than the length prefix")
    (hlen,) = struct.unpack("<I", raw[:4])
    if len(raw) < 4 + hlen:
        raise CorruptHeaderError("header extends past end of file")
    try:
        header = json.loads(raw[4:4 + hlen].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CorruptHeaderError(f"header is not valid JSON: {e}") from None
    for key in _HEADER_KEYS:
        if key not in header:
            raise CorruptHeaderError(f"header missing key {key!r}")
    w, k = header["w"], header["k"]
    a_v, a_e = header["a_v"], header["a_e"]
    count = header["graph_count"]
    if min(w, k, a_v, a_e, count) < 0:
        raise CorruptHeaderError("negative header dimension")
    per_graph = (w * k * a_v + w * k * k * a_e) * 4
    payload = raw[4 + hlen:]
    if len(payload) != per_graph * count:
        raise TruncatedPayloadError(
            f"payload holds {len(payload)} bytes, header promises "
            f"{per_graph * count}")
    batches = []
    offset = 0
    node_bytes = w * k * a_v * 4
    edge_bytes = w * k * k * a_e * 4
    for _ in range(count):
        node = np.frombuffer(payload, dtype="<f4", count=w * k * a_v,
                             offset=offset).reshape(w, k, a_v).copy()
        offset += node_bytes
        edge = np.frombuffer(payload, dtype="<f4", count=w * k * k * a_e,
                             offset=offset).reshape(w, k, k, a_e).copy()
        offset += edge_bytes
        batches.append(TensorBatch(
            width=w, field_size=k, node_tensor=node, edge_tensor=edge,
            roots=np.full(w, ZERO_FIELD, dtype=np.int64),
            labeling_name=header["labeling_name"],
            stride=header["stride"]))
    return batches, header
