"""Small dense classifier for plausibility prediction, trained by plain
full-batch gradient descent so the arithmetic stays reproducible."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Classifier",
    "GradCheck",
    "SingleClassData",
    "TrainResult",
    "accuracy",
    "gradient_check",
    "load_weights",
    "loss_and_grads",
    "save_weights",
    "train_classifier",
]

_EPS = 1e-12


class SingleClassData(ValueError):
    """Training data contained only one class."""


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class Classifier:
    """Feed-forward net: tanh hidden layers, sigmoid output. Raw inputs are
    rescaled to [0, 1] per coordinate using ``bounds`` before the first layer."""

    bounds: tuple[tuple[float, float], ...]
    sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def _normalize(self, points: np.ndarray) -> np.ndarray:
        lo = np.array([b[0] for b in self.bounds])
        width = np.array([max(b[1] - b[0], _EPS) for b in self.bounds])
        return (points - lo) / width

    def predict_proba(self, points) -> np.ndarray:
        x = np.atleast_2d(np.asarray(points, dtype=float))
        p = _forward(self.weights, self.biases, self._normalize(x))[-1]
        return p[:, 0]

    def proba(self, point) -> float:
        return float(self.predict_proba([point])[0])

    def predict(self, point) -> bool:
        return self.proba(point) >= 0.5

    def uncertainty(self, point) -> float:
        # Peaks at 0.5 for a maximally unsure prediction, 0 at certainty.
        return 0.5 - abs(self.proba(point) - 0.5)


def _forward(weights, biases, x: np.ndarray) -> list[np.ndarray]:
    acts = [x]
    for w, b in zip(weights[:-1], biases[:-1]):
        acts.append(np.tanh(acts[-1] @ w + b))
    acts.append(_sigmoid(acts[-1] @ weights[-1] + biases[-1]))
    return acts


def loss_and_grads(weights, biases, x: np.ndarray, y: np.ndarray):
    """Binary cross-entropy over the batch plus its gradient in every layer."""
    n = x.shape[0]
    acts = _forward(weights, biases, x)
    p = acts[-1]
    clipped = np.clip(p, _EPS, 1.0 - _EPS)
    loss = float(-np.mean(y * np.log(clipped) + (1.0 - y) * np.log(1.0 - clipped)))
    d_ws = [np.zeros_like(w) for w in weights]
    d_bs = [np.zeros_like(b) for b in biases]
    delta = (p - y) / n
    for layer in range(len(weights) - 1, -1, -1):
        d_ws[layer] = acts[layer].T @ delta
        d_bs[layer] = delta.sum(axis=0)
        if layer:
            delta = (delta @ weights[layer].T) * (1.0 - acts[layer] ** 2)
    return loss, d_ws, d_bs


def _init_layers(sizes: tuple[int, ...], rng: np.random.Generator):
    weights = []
    biases = []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        weights.append(rng.standard_normal((fan_in, fan_out)) / np.sqrt(fan_in))
        biases.append(np.zeros(fan_out))
    return weights, biases


@dataclass(frozen=True)
class TrainResult:
    classifier: Classifier
    loss_curve: tuple[float, ...]
    held_out_accuracy: float | None


def accuracy(clf: Classifier, points, labels) -> float:
    if not len(points):
        raise ValueError("empty evaluation set")
    p = clf.predict_proba(points)
    hits = sum((pi >= 0.5) == bool(li) for pi, li in zip(p, labels))
    return float(hits) / len(p)


def train_classifier(
    points,
    labels,
    *,
    bounds,
    hidden: tuple[int, ...] = (32, 32),
    epochs: int = 500,
    learning_rate: float = 0.5,
    seed: int = 0,
    held_out=None,
) -> TrainResult:
    """Fit on (points, labels) with full-batch gradient descent.

    labels are truthy for plausible. held_out, when given, is a
    (points, labels) pair scored once after training.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim != 2:
        raise ValueError("points must be a 2-D array-like")
    ys = [bool(v) for v in labels]
    if len(ys) != x.shape[0]:
        raise ValueError("points and labels differ in length")
    if len(set(ys)) < 2:
        raise SingleClassData("training data needs both classes")
    if len(bounds) != x.shape[1]:
        raise ValueError("bounds arity does not match the points")
    if epochs < 1:
        raise ValueError("epochs must be positive")

    sizes = (x.shape[1], *hidden, 1)
    rng = np.random.default_rng(seed)
    weights, biases = _init_layers(sizes, rng)
    clf = Classifier(tuple((float(a), float(b)) for a, b in bounds), sizes, weights, biases)

    xn = clf._normalize(x)
    y = np.array(ys, dtype=float).reshape(-1, 1)
    curve = []
    for _ in range(epochs):
        loss, d_ws, d_bs = loss_and_grads(weights, biases, xn, y)
        curve.append(loss)
        for w, dw in zip(weights, d_ws):
            w -= learning_rate * dw
        for b, db in zip(biases, d_bs):
            b -= learning_rate * db

    held_acc = None
    if held_out is not None:
        held_acc = accuracy(clf, held_out[0], held_out[1])
    return TrainResult(clf, tuple(curve), held_acc)


@dataclass(frozen=True)
class GradCheck:
    max_rel_err: float
    components: int


def gradient_check(seed: int = 0, *, n_points: int = 40, hidden: tuple[int, ...] = (8, 8), step: float = 1e-5) -> GradCheck:
    """Compare backprop against central differences on every weight and bias
    of a randomly initialized net over random data. Relative error uses a
    1e-3 denominator floor so near-zero gradients compare by absolute error."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, size=(n_points, 2))
    y = rng.integers(0, 2, size=(n_points, 1)).astype(float)
    sizes = (2, *hidden, 1)
    weights, biases = _init_layers(sizes, rng)

    _, d_ws, d_bs = loss_and_grads(weights, biases, x, y)
    worst = 0.0
    count = 0
    for arrays, grads in ((weights, d_ws), (biases, d_bs)):
        for arr, grad in zip(arrays, grads):
            flat = arr.reshape(-1)
            gflat = grad.reshape(-1)
            for i in range(flat.size):
                keep = flat[i]
                flat[i] = keep + step
                up = loss_and_grads(weights, biases, x, y)[0]
                flat[i] = keep - step
                down = loss_and_grads(weights, biases, x, y)[0]
                flat[i] = keep
                numeric = (up - down) / (2.0 * step)
                rel = abs(numeric - gflat[i]) / max(abs(numeric), abs(gflat[i]), 1e-3)
                worst = max(worst, rel)
                count += 1
    return GradCheck(worst, count)


def save_weights(clf: Classifier, path) -> None:
    doc = {
        "version": 1,
        "sizes": list(clf.sizes),
        "bounds": [list(b) for b in clf.bounds],
        "weights": [w.tolist() for w in clf.weights],
        "biases": [b.tolist() for b in clf.biases],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_weights(path) -> Classifier:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("version") != 1:
        raise ValueError(f"unsupported weights version {doc.get('version')!r}")
    sizes = tuple(int(s) for s in doc["sizes"])
    weights = [np.array(w, dtype=float) for w in doc["weights"]]
    biases = [np.array(b, dtype=float) for b in doc["biases"]]
    for w, b, fan_in, fan_out in zip(weights, biases, sizes, sizes[1:]):
        if w.shape != (fan_in, fan_out) or b.shape != (fan_out,):
            raise ValueError("weight shapes disagree with sizes")
    bounds = tuple((float(a), float(b)) for a, b in doc["bounds"])
    return Classifier(bounds, sizes, weights, biases)
