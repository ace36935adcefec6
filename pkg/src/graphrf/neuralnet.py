"""From-scratch trainer for the extracted tensors.

Architecture: a width-k strided convolution (16 channels) over the
flattened node tensor -- equivalently a per-field dense layer -- then a
width-10 stride-1 convolution (8 channels), a 128-unit rectified dense
layer with dropout, and a softmax output.  The optional edge branch
applies its own first convolution (size k², stride k²) and its output is
concatenated with the node branch along the sequence axis before the
second convolution.  The linear baseline is multinomial logistic
regression on the flattened node tensor.

Everything is plain numpy: explicit forward caches, hand-derived
backprop, a root-mean-square gradient scaler, stratified k-fold cross
validation.  Weights are float32; a float64 mode exists for gradient
checking.
"""

import json
import struct
import time
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    BadParamsError,
    CorruptHeaderError,
    DegenerateLabelsError,
    MissingCacheError,
    ShapeMismatchError,
    TooFewSamplesError,
    TruncatedPayloadError,
)

CONV1_CHANNELS = 16
CONV2_CHANNELS = 8
CONV2_SIZE = 10
DENSE_UNITS = 128
PROB_CLIP = 1e-7


@dataclass
class TrainConfig:
    epochs: int = 100
    batch_size: int = 25
    learning_rate: float = 1e-3
    decay: float = 0.9          # squared-gradient moving-average factor
    epsilon: float = 1e-8
    dropout: float = 0.5
    seed: int = 0
    merge_edges: bool = False
    dtype: str = "float32"      # "float64" enables gradient-check mode

    def __post_init__(self):
        if self.epochs < 0 or self.batch_size < 1:
            raise BadParamsError("epochs must be >= 0, batch_size >= 1")
        if not (0 <= self.dropout < 1):
            raise BadParamsError(f"dropout must be in [0, 1), "
                                 f"got {self.dropout}")
        if self.learning_rate <= 0 or not (0 < self.decay < 1) or \
                self.epsilon <= 0:
            raise BadParamsError("learning_rate, decay, epsilon out of range")


@dataclass
class CnnModel:
    kind: str                   # "pscn" or "pslr"
    w: int
    k: int
    a_v: int
    a_e: int
    classes: int
    merge_edges: bool
    dropout: float
    params: dict

    @property
    def seq_len(self):
        return self.w * (2 if self.merge_edges else 1)

    @property
    def conv2_positions(self):
        return self.seq_len - CONV2_SIZE + 1

    def param_count(self):
        return sum(p.size for p in self.params.values())


@dataclass
class CvReport:
    accuracies: np.ndarray      # folds * repeats entries, repeat-major
    mean: float
    std: float
    seconds: float
    folds: int
    repeats: int


def _uniform_init(rng, shape, fan_in, dtype):
    limit = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


def init_model(kind, w, k, a_v, a_e, classes, config, rng=None):
    """Seeded model with fan-in scaled uniform weights, zero biases."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    dtype = np.dtype(config.dtype)
    if classes < 2:
        raise DegenerateLabelsError(f"need >= 2 classes, got {classes}")
    params = {}
    if kind == "pslr":
        d = w * k * a_v
        if d == 0:
            raise ShapeMismatchError("flattened node tensor is empty")
        params["out_W"] = _uniform_init(rng, (d, classes), d, dtype)
        params["out_b"] = np.zeros(classes, dtype=dtype)
        return CnnModel(kind=kind, w=w, k=k, a_v=a_v, a_e=a_e,
                        classes=classes, merge_edges=False, dropout=0.0,
                        params=params)
    if kind != "pscn":
        raise BadParamsError(f"unknown model kind {kind!r}")
    merge = config.merge_edges
    if merge and a_e == 0:
        raise ShapeMismatchError("merge_edges requires edge attributes")
    if k * a_v == 0:
        raise ShapeMismatchError("node tensor has no attribute channels")
    seq = w * (2 if merge else 1)
    if seq < CONV2_SIZE:
        raise ShapeMismatchError(
            f"sequence length {seq} shorter than the second convolution "
            f"window {CONV2_SIZE}; increase w")
    params["conv1n_W"] = _uniform_init(
        rng, (k * a_v, CONV1_CHANNELS), k * a_v, dtype)
    params["conv1n_b"] = np.zeros(CONV1_CHANNELS, dtype=dtype)
    if merge:
        params["conv1e_W"] = _uniform_init(
            rng, (k * k * a_e, CONV1_CHANNELS), k * k * a_e, dtype)
        params["conv1e_b"] = np.zeros(CONV1_CHANNELS, dtype=dtype)
    params["conv2_W"] = _uniform_init(
        rng, (CONV2_SIZE * CONV1_CHANNELS, CONV2_CHANNELS),
        CONV2_SIZE * CONV1_CHANNELS, dtype)
    params["conv2_b"] = np.zeros(CONV2_CHANNELS, dtype=dtype)
    pos = seq - CONV2_SIZE + 1
    params["dense_W"] = _uniform_init(
        rng, (pos * CONV2_CHANNELS, DENSE_UNITS), pos * CONV2_CHANNELS, dtype)
    params["dense_b"] = np.zeros(DENSE_UNITS, dtype=dtype)
    params["out_W"] = _uniform_init(rng, (DENSE_UNITS, classes),
                                    DENSE_UNITS, dtype)
    params["out_b"] = np.zeros(classes, dtype=dtype)
    return CnnModel(kind=kind, w=w, k=k, a_v=a_v, a_e=a_e, classes=classes,
                    merge_edges=merge, dropout=config.dropout, params=params)


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _windows(x):
    # (B, L, C) -> (B, L-9, 10*C), window-offset major
    b, length, ch = x.shape
    pos = length - CONV2_SIZE + 1
    view = np.lib.stride_tricks.sliding_window_view(x, CONV2_SIZE, axis=1)
    # view: (B, pos, C, 10) -> (B, pos, 10, C)
    return np.ascontiguousarray(view.transpose(0, 1, 3, 2)).reshape(
        b, pos, CONV2_SIZE * ch)


def forward(model, node_tensor, edge_tensor=None, train_mode=False, rng=None):
    """Class probabilities plus the activation cache backward() needs.

    Dropout fires only in train_mode (inverted scaling, so evaluation
    needs no correction) and draws from rng.
    """
    p = model.params
    dtype = p["out_W"].dtype
    b = node_tensor.shape[0]
    if node_tensor.shape[1:] != (model.w, model.k, model.a_v):
        raise ShapeMismatchError(
            f"node tensor {node_tensor.shape[1:]} does not match model "
            f"(w={model.w}, k={model.k}, a_v={model.a_v})")
    x_node = np.ascontiguousarray(node_tensor, dtype=dtype)
    cache = {"x_node": x_node, "train_mode": train_mode, "batch": b}

    if model.kind == "pslr":
        flat = x_node.reshape(b, -1)
        logits = flat @ p["out_W"] + p["out_b"]
        probs = _softmax(logits)
        cache.update(flat=flat, probs=probs)
        return probs, cache

    z1n = x_node.reshape(b, model.w, -1) @ p["conv1n_W"] + p["conv1n_b"]
    a1 = np.maximum(z1n, 0)
    if model.merge_edges:
        if edge_tensor is None:
            raise ShapeMismatchError("model expects an edge tensor")
        if edge_tensor.shape != (b, model.w, model.k, model.k, model.a_e):
            raise ShapeMismatchError(
                f"edge tensor shape {edge_tensor.shape} unexpected")
        x_edge = np.ascontiguousarray(edge_tensor, dtype=dtype)
        z1e = x_edge.reshape(b, model.w, -1) @ p["conv1e_W"] + p["conv1e_b"]
        a1 = np.concatenate([a1, np.maximum(z1e, 0)], axis=1)
        cache.update(x_edge=x_edge, z1e=z1e)
    win = _windows(a1)
    z2 = win @ p["conv2_W"] + p["conv2_b"]
    a2 = np.maximum(z2, 0)
    flat2 = a2.reshape(b, -1)
    zd = flat2 @ p["dense_W"] + p["dense_b"]
    ad = np.maximum(zd, 0)
    if train_mode and model.dropout > 0:
        if rng is None:
            raise BadParamsError("train_mode dropout needs an rng")
        keep = (rng.random(ad.shape) >= model.dropout).astype(dtype)
        scale = dtype.type(1.0 / (1.0 - model.dropout))
        dropped = ad * keep * scale
        cache["drop_mask"] = keep * scale
    else:
        dropped = ad
        cache["drop_mask"] = None
    logits = dropped @ p["out_W"] + p["out_b"]
    probs = _softmax(logits)
    cache.update(z1n=z1n, a1=a1, win=win, z2=z2, zd=zd, flat2=flat2,
                 dropped=dropped, probs=probs)
    return probs, cache


def cross_entropy(probs, labels):
    """Mean clipped negative log-likelihood."""
    picked = probs[np.arange(len(labels)), labels]
    return float(-np.mean(np.log(np.clip(picked, PROB_CLIP, 1.0))))


def backward(model, cache, labels):
    """Gradients of the mean cross-entropy w.r.t. every parameter.

    Uses the exact softmax gradient (probs - onehot) / batch; the
    probability clip only guards the reported loss value.
    """
    if cache is None or "probs" not in cache:
        raise MissingCacheError("forward() cache required")
    p = model.params
    b = cache["batch"]
    probs = cache["probs"]
    labels = np.asarray(labels)
    if labels.shape != (b,):
        raise ShapeMismatchError(f"labels shape {labels.shape} for batch {b}")
    dlogits = probs.copy()
    dlogits[np.arange(b), labels] -= 1.0
    dlogits /= b

    grads = {}
    if model.kind == "pslr":
        flat = cache["flat"]
        grads["out_W"] = flat.T @ dlogits
        grads["out_b"] = dlogits.sum(axis=0)
        return grads

    dropped = cache["dropped"]
    grads["out_W"] = dropped.T @ dlogits
    grads["out_b"] = dlogits.sum(axis=0)
    dad = dlogits @ p["out_W"].T
    if cache["drop_mask"] is not None:
        dad = dad * cache["drop_mask"]
    dzd = dad * (cache["zd"] > 0)
    grads["dense_W"] = cache["flat2"].T @ dzd
    grads["dense_b"] = dzd.sum(axis=0)
    dflat2 = dzd @ p["dense_W"].T
    pos = model.conv2_positions
    dz2 = dflat2.reshape(b, pos, CONV2_CHANNELS) * (cache["z2"] > 0)
    win = cache["win"]
    grads["conv2_W"] = win.reshape(-1, win.shape[2]).T @ \
        dz2.reshape(-1, CONV2_CHANNELS)
    grads["conv2_b"] = dz2.sum(axis=(0, 1))
    dwin = (dz2 @ p["conv2_W"].T).reshape(b, pos, CONV2_SIZE, CONV1_CHANNELS)
    da1 = np.zeros_like(cache["a1"])
    for t in range(pos):
        da1[:, t:t + CONV2_SIZE, :] += dwin[:, t]
    dz1n = da1[:, :model.w, :] * (cache["z1n"] > 0)
    xn = cache["x_node"].reshape(b, model.w, -1)
    grads["conv1n_W"] = np.einsum("bwi,bwo->io", xn, dz1n)
    grads["conv1n_b"] = dz1n.sum(axis=(0, 1))
    if model.merge_edges:
        dz1e = da1[:, model.w:, :] * (cache["z1e"] > 0)
        xe = cache["x_edge"].reshape(b, model.w, -1)
        grads["conv1e_W"] = np.einsum("bwi,bwo->io", xe, dz1e)
        grads["conv1e_b"] = dz1e.sum(axis=(0, 1))
    return grads


def rmsprop_step(params, grads, state, config):
    """In-place scaled gradient step.

    s <- decay*s + (1-decay)*g²;  p <- p - lr * g / sqrt(s + eps).
    """
    for key, g in grads.items():
        if key not in params:
            raise ShapeMismatchError(f"gradient for unknown parameter {key}")
        if params[key].shape != g.shape:
            raise ShapeMismatchError(
                f"{key}: parameter {params[key].shape} vs gradient {g.shape}")
        if key not in state:
            state[key] = np.zeros_like(params[key])
        s = state[key]
        s *= config.decay
        s += (1.0 - config.decay) * np.square(g)
        params[key] -= (config.learning_rate * g /
                        np.sqrt(s + config.epsilon)).astype(params[key].dtype)
    return params, state


def _stack(batches):
    node = np.stack([b.node_tensor for b in batches])
    edge = np.stack([b.edge_tensor for b in batches])
    return node, edge


def _as_arrays(batches):
    if isinstance(batches, tuple):
        return batches
    return _stack(batches)


def train(batches, labels, config, kind="pscn"):
    """Mini-batch training; returns (model, per-epoch mean loss).

    Deterministic given config.seed: initialization, the per-epoch
    shuffle and the dropout stream are three child generators of the
    seed.  batches may be a TensorBatch list or a pre-stacked
    (node, edge) array tuple.
    """
    node, edge = _as_arrays(batches)
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != node.shape[0]:
        raise ShapeMismatchError(
            f"{len(labels)} labels for {node.shape[0]} samples")
    classes = int(labels.max()) + 1 if len(labels) else 0
    if len(np.unique(labels)) < 2:
        raise DegenerateLabelsError("training needs >= 2 distinct classes")
    n, w, k, a_v = node.shape
    a_e = edge.shape[4]
    init_rng, shuffle_rng, drop_rng = [
        np.random.default_rng(s) for s in
        np.random.SeedSequence(config.seed).spawn(3)]
    model = init_model(kind, w, k, a_v, a_e, classes, config, rng=init_rng)
    state = {}
    history = []
    use_edge = model.merge_edges
    for _ in range(config.epochs):
        order = shuffle_rng.permutation(n)
        losses = []
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            eb = edge[idx] if use_edge else None
            probs, cache = forward(model, node[idx], eb, train_mode=True,
                                   rng=drop_rng)
            losses.append(cross_entropy(probs, labels[idx]))
            grads = backward(model, cache, labels[idx])
            rmsprop_step(model.params, grads, state, config)
        history.append(float(np.mean(losses)))
    return model, history


def evaluate(model, batches, labels):
    """Fraction of samples whose argmax matches the label."""
    node, edge = _as_arrays(batches)
    eb = edge if model.merge_edges else None
    probs, _ = forward(model, node, eb, train_mode=False)
    return float(np.mean(probs.argmax(axis=1) == np.asarray(labels)))


def _fold_assignment(labels, folds, rng):
    # stratified: shuffle within class, deal round-robin
    assign = np.empty(len(labels), dtype=np.int64)
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        rng.shuffle(members)
        for i, idx in enumerate(members):
            assign[idx] = i % folds
    return assign


def _derived_seed(master, repeat, fold):
    return int(np.random.SeedSequence([master, repeat, fold])
               .generate_state(1)[0])


def cross_validate(batches, labels, config, folds=10, repeats=1,
                   kind="pscn"):
    """Stratified k-fold accuracy, each fold trained from scratch.

    Per-fold training seeds derive from (config.seed, repeat, fold), so
    the whole report is reproducible and folds are independent.
    """
    if folds < 2:
        raise BadParamsError(f"folds must be >= 2, got {folds}")
    if repeats < 1:
        raise BadParamsError(f"repeats must be >= 1, got {repeats}")
    node, edge = _as_arrays(batches)
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != node.shape[0]:
        raise ShapeMismatchError(
            f"{len(labels)} labels for {node.shape[0]} samples")
    if len(labels) < folds:
        raise TooFewSamplesError(
            f"{len(labels)} samples cannot fill {folds} folds")
    if len(np.unique(labels)) < 2:
        raise DegenerateLabelsError("cross-validation needs >= 2 classes")
    t0 = time.perf_counter()
    accs = []
    for rep in range(repeats):
        rng = np.random.default_rng(
            np.random.SeedSequence([config.seed, rep]))
        assign = _fold_assignment(labels, folds, rng)
        for f in range(folds):
            test = assign == f
            train_idx = np.flatnonzero(~test)
            test_idx = np.flatnonzero(test)
            cfg = replace(config, seed=_derived_seed(config.seed, rep, f))
            model, _ = train((node[train_idx], edge[train_idx]),
                             labels[train_idx], cfg, kind=kind)
            accs.append(evaluate(model, (node[test_idx], edge[test_idx]),
                                 labels[test_idx]))
    accs = np.array(accs)
    return CvReport(accuracies=accs, mean=float(accs.mean()),
                    std=float(accs.std()), seconds=time.perf_counter() - t0,
                    folds=folds, repeats=repeats)


def train_logreg(batches, labels, config, cv_folds=None, cv_repeats=1):
    """Multinomial logistic baseline on flattened node tensors.

    Returns (model, history); with cv_folds set, returns
    (model, CvReport) where the model is trained on all data and the
    report comes from the shared cross-validation harness.
    """
    model, history = train(batches, labels, config, kind="pslr")
    if cv_folds is None:
        return model, history
    report = cross_validate(batches, labels, config, folds=cv_folds,
                            repeats=cv_repeats, kind="pslr")
    return model, report


# ------------------------------------------------------------- checkpoints

def save_checkpoint(path, model):
    """JSON header + little-endian float32 payload, parameters in sorted
    key order."""
    keys = sorted(model.params)
    header = {
        "kind": model.kind, "w": model.w, "k": model.k, "a_v": model.a_v,
        "a_e": model.a_e, "classes": model.classes,
        "merge_edges": model.merge_edges, "dropout": model.dropout,
        "params": {key: list(model.params[key].shape) for key in keys},
    }
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for key in keys:
            fh.write(np.ascontiguousarray(model.params[key],
                                          dtype="<f4").tobytes())


def load_checkpoint(path):
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
    for key in ("kind", "w", "k", "a_v", "a_e", "classes", "merge_edges",
                "dropout", "params"):
        if key not in header:
            raise CorruptHeaderError(f"header missing key {key!r}")
    payload = raw[4 + hlen:]
    params = {}
    offset = 0
    for key in sorted(header["params"]):
        shape = tuple(header["params"][key])
        count = int(np.prod(shape)) if shape else 1
        end = offset + count * 4
        if end > len(payload):
            raise TruncatedPayloadError(
                f"payload ends inside parameter {key}")
        params[key] = np.frombuffer(payload, dtype="<f4", count=count,
                                    offset=offset).reshape(shape).copy()
        offset = end
    if offset != len(payload):
        raise TruncatedPayloadError(
            f"{len(payload) - offset} trailing bytes after parameters")
    return CnnModel(kind=header["kind"], w=header["w"], k=header["k"],
                    a_v=header["a_v"], a_e=header["a_e"],
                    classes=header["classes"],
                    merge_edges=header["merge_edges"],
                    dropout=header["dropout"], params=params)
