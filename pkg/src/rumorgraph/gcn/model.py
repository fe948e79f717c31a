"""Two-layer graph convolutional network written against explicit gradients.

Layer rule: ``H' = act(A_hat @ H @ W)`` with ``A_hat`` the normalised
adjacency, sigmoid activations on both layers and a two-channel output
trained with binary cross-entropy against one-hot targets (``output="softmax"``
switches the last layer to softmax + cross-entropy).
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from ..graph import NormalizedAdjacency
from .kernels import ShapeError, hadamard, matmul, sigmoid, softmax, transpose

log = logging.getLogger(__name__)

EPS = 1e-7
CHECKPOINT_VERSION = 1


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class GcnConfig:
    layers: int = 2
    hidden_channels: int = 32
    output_channels: int = 2
    epochs: int = 300
    activation: str = "sigmoid"
    output: str = "sigmoid"  # or "softmax"
    loss: str = "binary_cross_entropy"
    dropout_rate: float = 0.5
    dropout_layers: int = 2
    learning_rate: float = 1.0
    optimizer: str = "gd"  # full-batch gradient descent, or "adam"
    seed: int = 0

    def __post_init__(self):
        if self.layers != 2:
            raise ValueError("only two-layer networks are supported")
        if self.hidden_channels < 1 or self.output_channels < 1 or self.epochs < 0:
            raise ValueError("channel counts must be positive and epochs non-negative")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")
        if self.dropout_layers not in (0, 1, 2):
            raise ValueError("dropout_layers must be 0, 1 or 2")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if self.output not in ("sigmoid", "softmax"):
            raise ValueError(f"unknown output {self.output!r}")
        if self.optimizer not in ("adam", "gd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


@dataclass
class GcnModel:
    W1: np.ndarray
    W2: np.ndarray
    config: GcnConfig
    rng: np.random.Generator = field(repr=False)

    @classmethod
    def initialize(cls, n_features: int, config: GcnConfig | None = None) -> "GcnModel":
        """Glorot-uniform weights from a generator seeded with ``config.seed``."""
        config = config or GcnConfig()
        rng = np.random.default_rng(config.seed)
        return cls(
            _glorot(rng, n_features, config.hidden_channels),
            _glorot(rng, config.hidden_channels, config.output_channels),
            config,
            rng,
        )

    def copy(self) -> "GcnModel":
        rng = np.random.default_rng()
        rng.bit_generator.state = self.rng.bit_generator.state
        return GcnModel(self.W1.copy(), self.W2.copy(), self.config, rng)


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def _adj(adj) -> sp.csr_matrix | np.ndarray:
    return adj.matrix if isinstance(adj, NormalizedAdjacency) else adj


@dataclass
class ForwardCache:
    X_in: np.ndarray  # input after dropout
    H1: np.ndarray
    mask1: np.ndarray | None
    AH1: np.ndarray  # A_hat @ dropped(H1)
    H2: np.ndarray


def _dropout(x: np.ndarray, rate: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    keep = rng.random(x.shape) >= rate
    mask = keep / (1.0 - rate)
    return x * mask, mask


def forward(model: GcnModel, adj, X: np.ndarray, training: bool = False, rng=None) -> tuple[np.ndarray, ForwardCache]:
    """Return the N x C output and the activations needed by :func:`backward`.

    During training, inverted dropout hits the input features (two dropout
    layers) and the hidden activations (one or two).
    """
    A = _adj(adj)
    cfg = model.config
    if A.shape[0] != X.shape[0] or A.shape[0] != A.shape[1]:
        raise ShapeError(f"adjacency {A.shape[0]}x{A.shape[1]} does not match {X.shape[0]} feature rows")
    if X.shape[1] != model.W1.shape[0]:
        raise ShapeError(f"features have {X.shape[1]} columns but W1 expects {model.W1.shape[0]}")
    rng = model.rng if rng is None else rng
    drop = training and cfg.dropout_rate > 0.0

    X_in = X
    if drop and cfg.dropout_layers >= 2:
        X_in, _ = _dropout(X, cfg.dropout_rate, rng)
    H1 = sigmoid(matmul(A, matmul(X_in, model.W1)))
    H1_in, mask1 = H1, None
    if drop and cfg.dropout_layers >= 1:
        H1_in, mask1 = _dropout(H1, cfg.dropout_rate, rng)
    AH1 = matmul(A, H1_in)
    Z2 = matmul(AH1, model.W2)
    H2 = softmax(Z2) if cfg.output == "softmax" else sigmoid(Z2)
    return H2, ForwardCache(X_in, H1, mask1, AH1, H2)


def one_hot(labels: Sequence[int], channels: int = 2) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    Y = np.zeros((labels.size, channels))
    Y[np.arange(labels.size), labels] = 1.0
    return Y


def _mask_rows(mask, n: int) -> np.ndarray:
    idx = np.asarray(mask, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("loss mask is empty")
    return idx


def bce_loss(H2: np.ndarray, Y: np.ndarray, mask) -> float:
    """Mean binary cross-entropy over masked rows and every output channel."""
    idx = _mask_rows(mask, H2.shape[0])
    p = np.clip(H2[idx], EPS, 1.0 - EPS)
    y = Y[idx]
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))


def ce_loss(H2: np.ndarray, Y: np.ndarray, mask) -> float:
    idx = _mask_rows(mask, H2.shape[0])
    p = np.clip(H2[idx], EPS, 1.0)
    return float(np.mean(-np.sum(Y[idx] * np.log(p), axis=1)))


def loss_fn(model: GcnModel, H2: np.ndarray, Y: np.ndarray, mask) -> float:
    return ce_loss(H2, Y, mask) if model.config.output == "softmax" else bce_loss(H2, Y, mask)


@dataclass
class Gradients:
    dW1: np.ndarray
    dW2: np.ndarray


def backward(model: GcnModel, adj, cache: ForwardCache, Y: np.ndarray, mask) -> Gradients:
    """Exact gradients of the masked loss, replaying the cached dropout masks."""
    A = _adj(adj)
    At = A.T
    idx = _mask_rows(mask, Y.shape[0])
    H2 = cache.H2
    dZ2 = np.zeros_like(H2)
    if model.config.output == "softmax":
        dZ2[idx] = (H2[idx] - Y[idx]) / idx.size
    else:
        p = H2[idx]
        inside = (p > EPS) & (p < 1.0 - EPS)
        dZ2[idx] = (p - Y[idx]) * inside / (idx.size * H2.shape[1])

    dW2 = matmul(transpose(cache.AH1), dZ2)
    dH1 = matmul(At, matmul(dZ2, transpose(model.W2)))
    if cache.mask1 is not None:
        dH1 = hadamard(dH1, cache.mask1)
    dZ1 = hadamard(dH1, cache.H1 * (1.0 - cache.H1))
    dW1 = matmul(transpose(cache.X_in), matmul(At, dZ1))
    return Gradients(dW1, dW2)


@dataclass
class _Adam:
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    def step(self, params: list[np.ndarray], grads: list[np.ndarray], lr: float) -> None:
        if not self.m:
            self.m = [np.zeros_like(p) for p in params]
            self.v = [np.zeros_like(p) for p in params]
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


@dataclass
class TrainResult:
    model: GcnModel
    losses: list[float]


def train(model: GcnModel, adj, X: np.ndarray, labels: Sequence[int], train_idx, config: GcnConfig | None = None) -> TrainResult:
    """Full-batch training on the ``train_idx`` nodes; the whole graph is propagated.

    ``model`` is updated in place. The loss trace holds the training loss of
    each epoch before its update.
    """
    if config is not None and config != model.config:
        model.config = config
    cfg = model.config
    Y = one_hot(labels, cfg.output_channels)
    idx = _mask_rows(train_idx, X.shape[0])
    adam = _Adam() if cfg.optimizer == "adam" else None
    losses = []
    for epoch in range(1, cfg.epochs + 1):
        H2, cache = forward(model, adj, X, training=True)
        loss = loss_fn(model, H2, Y, idx)
        if not np.isfinite(loss) or not np.all(np.isfinite(model.W1)) or not np.all(np.isfinite(model.W2)):
            raise TrainingError(f"non-finite loss or weights at epoch {epoch}")
        losses.append(loss)
        g = backward(model, adj, cache, Y, idx)
        if adam is not None:
            adam.step([model.W1, model.W2], [g.dW1, g.dW2], cfg.learning_rate)
        else:
            model.W1 -= cfg.learning_rate * g.dW1
            model.W2 -= cfg.learning_rate * g.dW2
    return TrainResult(model, losses)


def predict_proba(model: GcnModel, adj, X: np.ndarray) -> np.ndarray:
    return forward(model, adj, X, training=False)[0]


def predict(model: GcnModel, adj, X: np.ndarray) -> np.ndarray:
    """Argmax over the two output channels; ties go to class 1."""
    return classes_from_output(predict_proba(model, adj, X))


def classes_from_output(H2: np.ndarray) -> np.ndarray:
    return (H2[:, 1] >= H2[:, 0]).astype(np.int64)


def train_mlp(model: GcnModel, X: np.ndarray, labels, train_idx) -> TrainResult:
    """Structure ablation: the same network with the identity as adjacency."""
    return train(model, NormalizedAdjacency.identity(X.shape[0]), X, labels, train_idx)


def save_checkpoint(model: GcnModel, path: str | Path) -> Path:
    path = Path(path)
    doc = {
        "format": "rumorgraph-gcn",
        "version": CHECKPOINT_VERSION,
        "config": asdict(model.config),
        "weights": {
            name: {"shape": list(w.shape), "data": [float(v) for v in w.ravel(order="C")]}
            for name, w in (("W1", model.W1), ("W2", model.W2))
        },
    }
    path.write_text(json.dumps(doc, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_checkpoint(path: str | Path) -> GcnModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != "rumorgraph-gcn" or doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: not a version-{CHECKPOINT_VERSION} GCN checkpoint")
    cfg = GcnConfig(**doc["config"])
    w = {k: np.array(v["data"], dtype=np.float64).reshape(v["shape"]) for k, v in doc["weights"].items()}
    return GcnModel(w["W1"], w["W2"], cfg, np.random.default_rng(cfg.seed))


def write_loss_trace(losses: Sequence[float], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        f.write("epoch,loss\n")
        for i, v in enumerate(losses, start=1):
            f.write(f"{i},{v!r}\n")
    return path
