"""Linear-SVM document polarity classifier: training, prediction, evaluation."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .corpus import NEGATIVE, POSITIVE, POLARITIES
from .textfeat import SparseVector


@dataclass(frozen=True)
class SvmConfig:
    """Hyperparameters; class_weights=None means inverse class frequency."""

    C: float = 1.0
    tolerance: float = 1e-6
    max_epochs: int = 1000
    seed: int = 0
    class_weights: Optional[Mapping[str, float]] = None

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")


@dataclass(frozen=True, eq=False)
class LinearModel:
    weights: np.ndarray
    bias: float
    config: SvmConfig

    def __post_init__(self):
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("model weights must be finite")


@dataclass(frozen=True)
class PolarityCounts:
    pos: int
    neg: int

    def __post_init__(self):
        if self.pos < 0 or self.neg < 0:
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return self.pos + self.neg


@dataclass(frozen=True)
class EvalMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    confusion: Mapping[str, int]  # tp, fp, fn, tn with positive as target


def _dense_matrix(vectors: Sequence[SparseVector], dim: int) -> np.ndarray:
    X = np.zeros((len(vectors), dim))
    for row, vec in enumerate(vectors):
        for col, val in vec.entries:
            if col >= dim:
                raise ValueError(f"vector column {col} outside dimension {dim}")
            X[row, col] = val
    return X


def _resolve_class_weights(
    labels: Sequence[str], cfg: SvmConfig
) -> dict[str, float]:
    if cfg.class_weights is not None:
        return {p: float(cfg.class_weights[p]) for p in POLARITIES}
    n = len(labels)
    counts = {p: labels.count(p) for p in POLARITIES}
    return {p: n / (len(POLARITIES) * counts[p]) for p in POLARITIES}


def train(
    vectors: Sequence[SparseVector],
    labels: Sequence[str],
    cfg: SvmConfig = SvmConfig(),
    dim: Optional[int] = None,
) -> LinearModel:
    """Train an L2-regularized hinge-loss linear SVM with an unregularized bias.

    Solves the equality-constrained dual by deterministic coordinate descent
    on maximal-violating pairs, so the optimum (and the classical scale
    relation x -> s*x, C -> C/s^2) is exact.  Selection needs no sampling;
    runs are bitwise reproducible.  Stops when the KKT violation gap drops
    below `tolerance` or after max_epochs * n pair updates.  Per-example cost
    is C * class_weight(label).
    """
    if len(vectors) != len(labels):
        raise ValueError("vectors and labels lengths differ")
    labels = list(labels)
    for label in labels:
        if label not in POLARITIES:
            raise ValueError(f"unknown polarity {label!r}")
    if len(set(labels)) < 2:
        raise ValueError("training data must contain both classes")
    if dim is None:
        dim = 1 + max((col for v in vectors for col, _ in v.entries), default=-1)

    X = _dense_matrix(vectors, dim)
    y = np.where(np.array(labels) == POSITIVE, 1.0, -1.0)
    weights = _resolve_class_weights(labels, cfg)
    box = np.array([cfg.C * weights[label] for label in labels])
    n = len(labels)

    alpha = np.zeros(n)
    f = np.zeros(n)  # f_i = w . x_i, maintained incrementally
    diag = np.einsum("ij,ij->i", X, X)
    krows: dict[int, np.ndarray] = {}

    def krow(i: int) -> np.ndarray:
        row = krows.get(i)
        if row is None:
            row = X @ X[i]
            krows[i] = row
        return row

    for _ in range(cfg.max_epochs * n):
        grad = y * f - 1.0
        viol = -y * grad
        up = ((y > 0) & (alpha < box)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < box)) | ((y > 0) & (alpha > 0))
        if not up.any() or not low.any():
            break
        i = int(np.argmax(np.where(up, viol, -np.inf)))
        j = int(np.argmin(np.where(low, viol, np.inf)))
        if viol[i] - viol[j] < cfg.tolerance:
            break
        quad = max(diag[i] + diag[j] - 2.0 * krow(i)[j], 1e-12)
        delta = (viol[i] - viol[j]) / quad
        delta = min(delta, box[i] - alpha[i] if y[i] > 0 else alpha[i])
        delta = min(delta, alpha[j] if y[j] > 0 else box[j] - alpha[j])
        d_i, d_j = y[i] * delta, -y[j] * delta
        alpha[i] += d_i
        alpha[j] += d_j
        f += (d_i * y[i]) * krow(i) + (d_j * y[j]) * krow(j)

    w = (alpha * y) @ X
    f = X @ w  # recompute to shed incremental drift before the bias estimate
    free = (alpha > 1e-8 * box) & (alpha < box * (1.0 - 1e-8))
    if free.any():
        bias = float(np.mean(y[free] - f[free]))
    else:
        lo, hi = -np.inf, np.inf
        for t in range(n):
            bound = y[t] - f[t]
            at_zero = alpha[t] <= 1e-8 * box[t]
            if at_zero == (y[t] > 0):
                lo = max(lo, bound)
            else:
                hi = min(hi, bound)
        if np.isfinite(lo) and np.isfinite(hi):
            bias = float((lo + hi) / 2.0)
        elif np.isfinite(lo):
            bias = float(lo)
        elif np.isfinite(hi):
            bias = float(hi)
        else:
            bias = 0.0

    return LinearModel(
        weights=w,
        bias=bias,
        config=replace(cfg, class_weights=weights),
    )


def decision_value(model: LinearModel, v: SparseVector) -> float:
    total = model.bias
    for col, val in v.entries:
        if col >= model.weights.shape[0]:
            raise ValueError(f"vector column {col} outside model dimension")
        total += model.weights[col] * val
    return total


def predict(model: LinearModel, v: SparseVector) -> str:
    """Positive iff the decision value is > 0; exactly 0 classifies negative."""
    return POSITIVE if decision_value(model, v) > 0 else NEGATIVE


def evaluate(
    model: LinearModel,
    vectors: Sequence[SparseVector],
    labels: Sequence[str],
) -> EvalMetrics:
    """Confusion matrix and metrics with positive as the target class.

    Precision and recall are 0 by convention when their denominator is 0.
    """
    if not vectors:
        raise ValueError("empty test set")
    if len(vectors) != len(labels):
        raise ValueError("vectors and labels lengths differ")
    tp = fp = fn = tn = 0
    for vec, gold in zip(vectors, labels):
        pred = predict(model, vec)
        if gold == POSITIVE:
            tp, fn = tp + (pred == POSITIVE), fn + (pred == NEGATIVE)
        else:
            fp, tn = fp + (pred == POSITIVE), tn + (pred == NEGATIVE)
    n = tp + fp + fn + tn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalMetrics(
        accuracy=(tp + tn) / n,
        precision=precision,
        recall=recall,
        f1=f1,
        confusion={"tp": tp, "fp": fp, "fn": fn, "tn": tn},
    )


def save_model(model: LinearModel, path: str | Path, feature_hash: str = "") -> None:
    payload = {
        "weights": model.weights.tolist(),
        "bias": model.bias,
        "hyperparams": {
            "C": model.config.C,
            "tolerance": model.config.tolerance,
            "max_epochs": model.config.max_epochs,
            "seed": model.config.seed,
            "class_weights": dict(model.config.class_weights or {}),
        },
        "feature_hash": feature_hash,
    }
    Path(path).write_text(
        json.dumps(payload, ensure_ascii=False, sort_keys=True), encoding="utf-8"
    )


def load_model(path: str | Path) -> tuple[LinearModel, str]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    hp = data["hyperparams"]
    cfg = SvmConfig(
        C=hp["C"],
        tolerance=hp["tolerance"],
        max_epochs=hp["max_epochs"],
        seed=hp["seed"],
        class_weights=hp["class_weights"] or None,
    )
    model = LinearModel(
        weights=np.array(data["weights"]), bias=float(data["bias"]), config=cfg
    )
    return model, data.get("feature_hash", "")
