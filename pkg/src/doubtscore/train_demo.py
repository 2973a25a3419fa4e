"""Small softmax classifier trained with cross-entropy plus a doubt penalty.

Two affine layers with a ReLU between (2 -> 16 -> K), full-batch gradient
descent without momentum, loss = mean(CE) + lam * mean(raw doubt cost).
"""

import io
from dataclasses import dataclass

import numpy as np

from doubtscore.cost import batch_raw_doubt_cost
from doubtscore.errors import InvalidInputError

HIDDEN = 16
# logits start nearly tied so the label-agnostic doubt penalty cannot lock in
# an arbitrary early argmax before cross-entropy has ranked the classes
OUTPUT_INIT_STD = 0.01
RADIUS = 2.0
METRIC_COLUMNS = ("epoch", "acc", "ce", "doubt_cost", "degenerate_count")


class TrainingError(RuntimeError):
    pass


@dataclass
class SyntheticDataset:
    X: np.ndarray
    labels: np.ndarray
    classes: int
    seed: int

    def __len__(self):
        return len(self.labels)


def make_blobs(classes, n_per_class, spread, seed):
    """Gaussian blobs centred on a circle of radius 2, one per class."""
    if classes < 2:
        raise InvalidInputError(f"need at least 2 classes, got {classes}")
    if n_per_class < 1:
        raise InvalidInputError(f"n_per_class must be >= 1, got {n_per_class}")
    rng = np.random.default_rng(seed)
    angles = 2 * np.pi * np.arange(classes) / classes
    centers = RADIUS * np.column_stack([np.cos(angles), np.sin(angles)])
    labels = np.repeat(np.arange(classes), n_per_class)
    X = centers[labels] + spread * rng.standard_normal((labels.size, 2))
    return SyntheticDataset(X, labels, classes, seed)


@dataclass
class TinyNet:
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    @classmethod
    def init(cls, classes, seed, hidden=HIDDEN, inputs=2):
        rng = np.random.default_rng(seed)
        return cls(
            W1=rng.standard_normal((inputs, hidden)) * np.sqrt(2.0 / inputs),
            b1=np.zeros(hidden),
            W2=rng.standard_normal((hidden, classes)) * OUTPUT_INIT_STD,
            b2=np.zeros(classes),
        )

    def params(self):
        return [self.W1, self.b1, self.W2, self.b2]

    def copy(self):
        return TinyNet(*(p.copy() for p in self.params()))

    def forward(self, X):
        H = np.maximum(0.0, X @ self.W1 + self.b1)
        return H, H @ self.W2 + self.b2


def _softmax_rows(Y):
    Z = Y - Y.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def loss_and_grads(net, X, labels, lam):
    """Mean composite loss and its parameter gradients.

    Returns ``(loss, grads, stats)`` where ``stats`` holds the per-epoch
    metrics computed at these weights.
    """
    n = len(labels)
    rows = np.arange(n)
    H, Y = net.forward(X)
    P = _softmax_rows(Y)
    Z = Y - Y.max(axis=1, keepdims=True)
    ce = np.log(np.exp(Z).sum(axis=1)) - Z[rows, labels]
    theta, pen_grad, degenerate = batch_raw_doubt_cost(Y)

    dY = P.copy()
    dY[rows, labels] -= 1.0
    if lam:
        dY = dY + lam * pen_grad
    dY /= n
    loss = ce.mean() + lam * theta.mean()

    dW2 = H.T @ dY
    db2 = dY.sum(axis=0)
    dH = dY @ net.W2.T
    dH[H <= 0] = 0.0
    dW1 = X.T @ dH
    db1 = dH.sum(axis=0)
    stats = {
        "acc": float(np.mean(np.argmax(Y, axis=1) == labels)),
        "ce": float(ce.mean()),
        "doubt_cost": float(theta.mean()),
        "degenerate_count": int(degenerate.sum()),
    }
    return float(loss), [dW1, db1, dW2, db2], stats


def train(dataset, lam=0.0, epochs=500, learning_rate=0.1, seed=0):
    """Full-batch gradient descent; returns ``(net, metrics)``.

    ``metrics`` has one dict per epoch, measured before that epoch's update.
    """
    if lam < 0:
        raise InvalidInputError(f"lambda must be >= 0, got {lam}")
    net = TinyNet.init(dataset.classes, seed)
    metrics = []
    for epoch in range(epochs):
        loss, grads, stats = loss_and_grads(net, dataset.X, dataset.labels, lam)
        if not np.isfinite(loss):
            raise TrainingError(
                f"non-finite loss {loss} at epoch {epoch}: ce={stats['ce']}, "
                f"doubt_cost={stats['doubt_cost']}, degenerate={stats['degenerate_count']}"
            )
        metrics.append({"epoch": epoch, **stats})
        for p, g in zip(net.params(), grads):
            p -= learning_rate * g
    return net, metrics


def metrics_csv(metrics):
    buf = io.StringIO()
    buf.write(",".join(METRIC_COLUMNS) + "\n")
    for m in metrics:
        buf.write(f"{m['epoch']},{m['acc']!r},{m['ce']!r},{m['doubt_cost']!r},{m['degenerate_count']}\n")
    return buf.getvalue()
