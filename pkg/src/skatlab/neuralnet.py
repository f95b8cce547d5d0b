"""Dense ReLU networks with softmax or linear heads, trained with Adam.

Plain numpy, batch-first. Dropout is inverted and applied only to the
middle hidden layers during training.

Weight file layout (all little-endian)::

    8s   magic  b"SKATNET\\0"
    u32  format version (1)
    u32  number of dense layers L
    u32  * (L+1) layer widths, input first
    u32  head (0 softmax, 1 linear)
    f32  dropout keep probability
    f32  learning rate
    f32  feature point scale
    then per layer: weights (in x out, row-major) and bias, binary32
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"SKATNET\x00"
FORMAT_VERSION = 1
HEADS = ("softmax", "linear")


class ShapeMismatch(ValueError):
    pass


class EmptyDataset(ValueError):
    pass


class FormatError(ValueError):
    pass


class VersionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class NetworkConfig:
    input_width: int
    hidden_widths: tuple[int, ...] = (736,) * 5
    output_width: int = 13
    head: str = "softmax"
    dropout_keep: float = 0.6
    learning_rate: float = 1e-4
    max_epochs: int = 20
    batch_size: int = 256
    patience: int = 3
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "hidden_widths", tuple(int(w) for w in self.hidden_widths))
        widths = (self.input_width, *self.hidden_widths, self.output_width)
        if not self.hidden_widths or min(widths) <= 0:
            raise ValueError(f"all layer widths must be positive: {widths}")
        if self.head not in HEADS:
            raise ValueError(f"head must be one of {HEADS}")
        if not 0.0 < self.dropout_keep <= 1.0:
            raise ValueError("dropout_keep must lie in (0, 1]")
        if self.batch_size <= 0 or self.max_epochs <= 0:
            raise ValueError("batch_size and max_epochs must be positive")

    @property
    def widths(self) -> tuple[int, ...]:
        return (self.input_width, *self.hidden_widths, self.output_width)

    def dropout_layers(self) -> range:
        """Indices of hidden layers that get dropout: all but the first and last."""
        return range(1, len(self.hidden_widths) - 1)


# hidden widths chosen so the largest networks land just over 2.3M / just under 2.4M weights
PRE_CARDPLAY_DEFAULT = NetworkConfig(input_width=169, hidden_widths=(736,) * 5, output_width=13)
CARDPLAY_DEFAULT = NetworkConfig(input_width=389, hidden_widths=(722,) * 5, output_width=32)


@dataclass
class NetworkWeights:
    config: NetworkConfig
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def param_count(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)

    def params(self) -> list[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def copy(self) -> "NetworkWeights":
        return NetworkWeights(self.config, [w.copy() for w in self.weights],
                              [b.copy() for b in self.biases])

    def astype(self, dtype) -> "NetworkWeights":
        return NetworkWeights(self.config, [w.astype(dtype) for w in self.weights],
                              [b.astype(dtype) for b in self.biases])

    def equals(self, other: "NetworkWeights") -> bool:
        return (self.config.widths == other.config.widths
                and self.config.head == other.config.head
                and all(a.dtype == b.dtype and np.array_equal(a, b)
                        for a, b in zip(self.params(), other.params())))


@dataclass
class Dataset:
    """Feature matrix plus labels.

    Softmax datasets carry integer class labels. Linear datasets carry real
    targets and, for multi-output value heads, the index of the output the
    target belongs to (``actions``).
    """

    X: np.ndarray
    y: np.ndarray
    actions: np.ndarray | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float32)
        if self.X.ndim != 2:
            self.X = self.X.reshape(len(self.X), -1)
        self.y = np.asarray(self.y)
        if len(self.y) != len(self.X):
            raise ShapeMismatch("X and y lengths differ")
        if self.actions is not None:
            self.actions = np.asarray(self.actions, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.X)

    def subset(self, idx) -> "Dataset":
        return Dataset(self.X[idx], self.y[idx],
                       None if self.actions is None else self.actions[idx])

    @property
    def width(self) -> int:
        return self.X.shape[1]


def init(config: NetworkConfig, seed: int | None = None, dtype=np.float32) -> NetworkWeights:
    """Fan-in scaled normal weights, zero biases."""
    rng = np.random.default_rng(config.seed if seed is None else seed)
    ws, bs = [], []
    for fan_in, fan_out in zip(config.widths[:-1], config.widths[1:]):
        ws.append((rng.standard_normal((fan_in, fan_out)) * np.sqrt(2.0 / fan_in)).astype(dtype))
        bs.append(np.zeros(fan_out, dtype=dtype))
    return NetworkWeights(config, ws, bs)


def _softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def dropout_masks(config: NetworkConfig, batch: int, rng: np.random.Generator,
                  dtype=np.float32) -> dict[int, np.ndarray]:
    keep = config.dropout_keep
    return {i: ((rng.random((batch, config.hidden_widths[i])) < keep) / keep).astype(dtype)
            for i in config.dropout_layers()}


def _run(weights: NetworkWeights, X: np.ndarray, masks: dict[int, np.ndarray] | None):
    """Forward pass keeping pre-activations and activations for backprop."""
    acts, pres = [X], []
    h = X
    n_hidden = len(weights.weights) - 1
    for i, (W, b) in enumerate(zip(weights.weights, weights.biases)):
        z = h @ W + b
        pres.append(z)
        if i < n_hidden:
            h = np.maximum(z, 0)
            if masks and i in masks:
                h = h * masks[i]
            acts.append(h)
    return pres[-1], acts, pres


def forward(weights: NetworkWeights, x, training: bool = False,
            dropout_seed: int | None = None) -> np.ndarray:
    """Network output for one vector or a batch (rows)."""
    x = np.asarray(x, dtype=weights.weights[0].dtype)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.shape[1] != weights.config.input_width:
        raise ShapeMismatch(f"input width {X.shape[1]} != {weights.config.input_width}")
    masks = None
    if training:
        masks = dropout_masks(weights.config, len(X), np.random.default_rng(dropout_seed),
                              X.dtype)
    z, _, _ = _run(weights, X, masks)
    out = _softmax(z) if weights.config.head == "softmax" else z
    return out[0] if single else out


def _targets(config: NetworkConfig, y, actions, n):
    if config.head == "softmax":
        return np.asarray(y, dtype=np.int64), None
    if actions is None:
        if config.output_width != 1:
            raise ShapeMismatch("multi-output linear head needs action indices")
        actions = np.zeros(n, dtype=np.int64)
    return np.asarray(y, dtype=np.float64), np.asarray(actions, dtype=np.int64)


def loss_and_grads(weights: NetworkWeights, X, y, actions=None,
                   masks: dict[int, np.ndarray] | None = None):
    """Mean loss over the batch and its gradient for every weight and bias."""
    X = np.asarray(X, dtype=weights.weights[0].dtype)
    n = len(X)
    cfg = weights.config
    z, acts, pres = _run(weights, X, masks)
    y, actions = _targets(cfg, y, actions, n)
    rows = np.arange(n)
    if cfg.head == "softmax":
        p = _softmax(z)
        loss = float(-np.mean(np.log(np.maximum(p[rows, y], 1e-30))))
        dz = p
        dz[rows, y] -= 1.0
        dz /= n
    else:
        err = z[rows, actions] - y
        loss = float(np.mean(err ** 2))
        dz = np.zeros_like(z)
        dz[rows, actions] = 2.0 * err / n
    dz = dz.astype(z.dtype, copy=False)
    gW, gb = [None] * len(weights.weights), [None] * len(weights.weights)
    for i in range(len(weights.weights) - 1, -1, -1):
        gW[i] = acts[i].T @ dz
        gb[i] = dz.sum(axis=0)
        if i == 0:
            break
        da = dz @ weights.weights[i].T
        if masks and (i - 1) in masks:
            da = da * masks[i - 1]
        dz = da * (pres[i - 1] > 0)
    return loss, gW, gb


def evaluate(weights: NetworkWeights, data: Dataset, chunk: int = 8192) -> tuple[float, float]:
    """(mean loss, accuracy) in inference mode; accuracy is nan for linear heads."""
    cfg = weights.config
    total, correct = 0.0, 0
    for s in range(0, len(data), chunk):
        part = data.subset(slice(s, s + chunk))
        z, _, _ = _run(weights, part.X.astype(weights.weights[0].dtype), None)
        y, actions = _targets(cfg, part.y, part.actions, len(part))
        rows = np.arange(len(part))
        if cfg.head == "softmax":
            p = _softmax(z)
            total -= float(np.sum(np.log(np.maximum(p[rows, y], 1e-30))))
            correct += int(np.sum(np.argmax(z, axis=1) == y))
        else:
            total += float(np.sum((z[rows, actions] - y) ** 2))
    n = max(len(data), 1)
    return total / n, (correct / n if cfg.head == "softmax" else float("nan"))


@dataclass
class EpochMetrics:
    epoch: int
    train_loss: float
    train_acc: float
    val_loss: float
    val_acc: float


@dataclass
class Adam:
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        if not self.m:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.t += 1
        c1 = 1 - self.beta1 ** self.t
        c2 = 1 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1 - self.beta1) * g
            v *= self.beta2
            v += (1 - self.beta2) * (g * g)
            p -= (self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)).astype(p.dtype)


def train(config: NetworkConfig, train_data: Dataset, validation: Dataset,
          weights: NetworkWeights | None = None, log=None):
    """Minibatch Adam with early stopping on validation loss.

    Returns the weights from the best validation epoch and the per-epoch
    metrics (all epochs actually run).
    """
    if len(train_data) == 0 or len(validation) == 0:
        raise EmptyDataset("training and validation sets must be non-empty")
    if train_data.width != config.input_width:
        raise ShapeMismatch(f"data width {train_data.width} != {config.input_width}")
    w = weights.copy() if weights is not None else init(config)
    shuffle_rng = np.random.default_rng([config.seed, 1])
    drop_rng = np.random.default_rng([config.seed, 2])
    opt = Adam(config.learning_rate)
    best, best_loss, stale = w.copy(), np.inf, 0
    history: list[EpochMetrics] = []
    n = len(train_data)
    for epoch in range(1, config.max_epochs + 1):
        order = shuffle_rng.permutation(n)
        for s in range(0, n, config.batch_size):
            idx = order[s:s + config.batch_size]
            batch = train_data.subset(idx)
            masks = dropout_masks(config, len(idx), drop_rng, w.weights[0].dtype)
            _, gW, gb = loss_and_grads(w, batch.X, batch.y, batch.actions, masks)
            opt.step(w.params(), [g for pair in zip(gW, gb) for g in pair])
        tl, ta = evaluate(w, train_data)
        vl, va = evaluate(w, validation)
        history.append(EpochMetrics(epoch, tl, ta, vl, va))
        if log:
            log(history[-1])
        if vl < best_loss:
            best, best_loss, stale = w.copy(), vl, 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    return best, history


# -------------------------------------------------------------------- files

def save(weights: NetworkWeights, path, point_scale: float = 120.0) -> None:
    cfg = weights.config
    widths = cfg.widths
    buf = bytearray(MAGIC)
    buf += struct.pack("<II", FORMAT_VERSION, len(widths) - 1)
    buf += struct.pack(f"<{len(widths)}I", *widths)
    buf += struct.pack("<Ifff", HEADS.index(cfg.head), cfg.dropout_keep, cfg.learning_rate,
                       point_scale)
    for W, b in zip(weights.weights, weights.biases):
        buf += np.ascontiguousarray(W, dtype="<f4").tobytes()
        buf += np.ascontiguousarray(b, dtype="<f4").tobytes()
    Path(path).write_bytes(bytes(buf))


def load(path, expected_hidden_layers: int | None = None) -> NetworkWeights:
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise FormatError(f"{path}: bad magic")
    try:
        version, n_layers = struct.unpack_from("<II", data, 8)
        if version != FORMAT_VERSION:
            raise VersionMismatch(f"{path}: format version {version}, expected {FORMAT_VERSION}")
        if expected_hidden_layers is not None and n_layers - 1 != expected_hidden_layers:
            raise VersionMismatch(f"{path}: {n_layers - 1} hidden layers, "
                                  f"expected {expected_hidden_layers}")
        pos = 16
        widths = struct.unpack_from(f"<{n_layers + 1}I", data, pos)
        pos += 4 * (n_layers + 1)
        head, keep, lr, _scale = struct.unpack_from("<Ifff", data, pos)
        pos += 16
    except struct.error as exc:
        raise FormatError(f"{path}: truncated header") from exc
    if head >= len(HEADS):
        raise FormatError(f"{path}: unknown head {head}")
    cfg = NetworkConfig(widths[0], tuple(widths[1:-1]), widths[-1], HEADS[head],
                        dropout_keep=float(np.float32(keep)),
                        learning_rate=float(np.float32(lr)))
    ws, bs = [], []
    for fi, fo in zip(widths[:-1], widths[1:]):
        for shape in ((fi, fo), (fo,)):
            count = int(np.prod(shape))
            if pos + 4 * count > len(data):
                raise FormatError(f"{path}: truncated parameters")
            arr = np.frombuffer(data, dtype="<f4", count=count, offset=pos).reshape(shape)
            pos += 4 * count
            (ws if len(shape) == 2 else bs).append(arr.astype(np.float32))
    if pos != len(data):
        raise FormatError(f"{path}: {len(data) - pos} trailing bytes")
    return NetworkWeights(cfg, ws, bs)


def save_dataset(data: Dataset, path) -> None:
    """Feature matrix, labels and optional action indices as binary32/int32 LE."""
    n, d = data.X.shape
    has_actions = data.actions is not None
    buf = bytearray(b"SKATDAT\x00")
    buf += struct.pack("<IIII", FORMAT_VERSION, n, d, int(has_actions))
    buf += np.ascontiguousarray(data.X, dtype="<f4").tobytes()
    buf += np.ascontiguousarray(data.y, dtype="<f4").tobytes()
    if has_actions:
        buf += np.ascontiguousarray(data.actions, dtype="<i4").tobytes()
    Path(path).write_bytes(bytes(buf))


def load_dataset(path, integer_labels: bool = True) -> Dataset:
    raw = Path(path).read_bytes()
    if raw[:8] != b"SKATDAT\x00":
        raise FormatError(f"{path}: bad magic")
    version, n, d, has_actions = struct.unpack_from("<IIII", raw, 8)
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"{path}: dataset version {version}")
    pos = 24
    X = np.frombuffer(raw, "<f4", n * d, pos).reshape(n, d)
    pos += 4 * n * d
    y = np.frombuffer(raw, "<f4", n, pos)
    pos += 4 * n
    actions = np.frombuffer(raw, "<i4", n, pos).astype(np.int64) if has_actions else None
    y = y.astype(np.int64) if integer_labels and not has_actions else y.astype(np.float32)
    return Dataset(X.astype(np.float32), y, actions)
