"""Binary maximum-entropy (logistic) classifier.

Full-batch gradient descent on the mean cross-entropy with L2 on the weights
(bias unregularized); deterministic given the shuffle seed. Includes
over-sampling, leave-one-out error curves, information gain, and a
finite-difference gradient check.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np


class MaxEntError(ValueError):
    pass


@dataclass
class TrainConfig:
    learning_rate: float = 1.0
    l2: float = 1e-4
    epochs: int = 2000
    tolerance: float = 1e-7
    seed: int = 0


@dataclass
class Model:
    weights: np.ndarray
    bias: float
    feature_names: list[str]
    config: TrainConfig = field(default_factory=TrainConfig)

    @property
    def schema_hash(self) -> str:
        joined = "\n".join(self.feature_names)
        return hashlib.sha256(joined.encode("utf-8")).hexdigest()[:16]

    def to_json(self) -> str:
        payload = {
            "format": "nameplan-model",
            "version": 1,
            "schema_hash": self.schema_hash,
            "feature_names": self.feature_names,
            "weights": [float(w) for w in self.weights],
            "bias": float(self.bias),
            "config": asdict(self.config),
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Model":
        payload = json.loads(text)
        if payload.get("format") != "nameplan-model":
            raise MaxEntError("not a model file")
        model = cls(
            weights=np.asarray(payload["weights"], dtype=float),
            bias=float(payload["bias"]),
            feature_names=list(payload["feature_names"]),
            config=TrainConfig(**payload["config"]),
        )
        if payload.get("schema_hash") != model.schema_hash:
            raise MaxEntError("feature schema hash mismatch")
        return model


def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def _as_matrix(rows, feature_names) -> np.ndarray:
    if isinstance(rows, np.ndarray):
        return np.asarray(rows, dtype=float)
    out = np.zeros((len(rows), len(feature_names)))
    for i, row in enumerate(rows):
        missing = set(feature_names) - set(row)
        extra = set(row) - set(feature_names)
        if missing or extra:
            raise MaxEntError(
                f"feature schema mismatch: missing={sorted(missing)[:3]} extra={sorted(extra)[:3]}"
            )
        out[i] = [row[name] for name in feature_names]
    return out


def oversample(features: np.ndarray, labels: np.ndarray, seed: int = 0):
    """Replicate positive rows until they at least match the negatives, then
    shuffle (seeded)."""
    labels = np.asarray(labels)
    pos = np.flatnonzero(labels == 1)
    neg = np.flatnonzero(labels == 0)
    if len(pos) == 0 or len(neg) == 0:
        raise MaxEntError("over-sampling needs both classes")
    idx = list(neg) + list(pos)
    if len(pos) < len(neg):
        need = len(neg) - len(pos)
        extra = [pos[i % len(pos)] for i in range(need)]
        idx += extra
    rng = np.random.RandomState(seed)
    order = rng.permutation(len(idx))
    idx = np.asarray(idx)[order]
    return features[idx], labels[idx]


def loss_and_gradient(weights, bias, features, labels, l2: float):
    z = features @ weights + bias
    p = sigmoid(z)
    eps = 1e-12
    nll = -np.mean(labels * np.log(p + eps) + (1 - labels) * np.log(1 - p + eps))
    loss = nll + 0.5 * l2 * float(weights @ weights)
    err = p - labels
    grad_w = features.T @ err / len(labels) + l2 * weights
    grad_b = float(np.mean(err))
    return loss, grad_w, grad_b


def train(features, labels, config: TrainConfig | None = None,
          feature_names: list[str] | None = None,
          apply_oversampling: bool = True) -> Model:
    config = config or TrainConfig()
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    if len(X) < 2:
        raise MaxEntError("need at least two training instances")
    if len(set(y.tolist())) < 2:
        raise MaxEntError("training data contains a single class")
    if apply_oversampling:
        X, y = oversample(X, y, seed=config.seed)
    names = feature_names or [f"f{i}" for i in range(X.shape[1])]
    w = np.zeros(X.shape[1])
    b = 0.0
    converged = False
    for _epoch in range(config.epochs):
        _loss, grad_w, grad_b = loss_and_gradient(w, b, X, y, config.l2)
        w -= config.learning_rate * grad_w
        b -= config.learning_rate * grad_b
        if max(float(np.max(np.abs(grad_w))), abs(grad_b)) < config.tolerance:
            converged = True
            break
    if not converged:
        warnings.warn("gradient descent hit the epoch limit before converging",
                      RuntimeWarning, stacklevel=2)
    return Model(w, b, names, config)


def predict_proba(model: Model, features) -> np.ndarray:
    if isinstance(features, dict):
        X = _as_matrix([features], model.feature_names)
    else:
        X = _as_matrix(features, model.feature_names)
        if X.ndim == 1:
            X = X.reshape(1, -1)
    if X.shape[1] != len(model.feature_names):
        raise MaxEntError(
            f"feature count {X.shape[1]} does not match schema {len(model.feature_names)}"
        )
    p = sigmoid(X @ model.weights + model.bias)
    return p if len(p) > 1 else float(p[0])


def gradient_check(weights, bias, features, labels, l2: float = 1e-4,
                   step: float = 1e-5) -> float:
    """Max relative deviation between the analytic gradient and central
    finite differences."""
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    w = np.asarray(weights, dtype=float)
    if len(y) == 0:
        return 0.0
    _loss, grad_w, grad_b = loss_and_gradient(w, bias, X, y, l2)
    worst = 0.0

    def loss_at(wv, bv):
        return loss_and_gradient(wv, bv, X, y, l2)[0]

    for i in range(len(w)):
        bump = np.zeros_like(w)
        bump[i] = step
        numeric = (loss_at(w + bump, bias) - loss_at(w - bump, bias)) / (2 * step)
        denom = max(abs(numeric) + abs(grad_w[i]), 1e-8)
        worst = max(worst, abs(numeric - grad_w[i]) / denom)
    numeric_b = (loss_at(w, bias + step) - loss_at(w, bias - step)) / (2 * step)
    denom = max(abs(numeric_b) + abs(grad_b), 1e-8)
    worst = max(worst, abs(numeric_b - grad_b) / denom)
    return worst


# -- leave-one-out curves ---------------------------------------------------------


@dataclass
class LooCurves:
    fractions: list[float]
    train_errors: list[float]
    test_errors: list[float]


def _slice_errors(X, y, x_test, y_test, config) -> tuple[float, float]:
    classes = set(y.tolist())
    if len(classes) < 2:
        majority = y[0]
        train_err = float(np.mean(y != majority))
        test_err = float(y_test != majority)
        return train_err, test_err
    model = train(X, y, config, apply_oversampling=False)
    train_pred = (predict_proba(model, X) >= 0.5).astype(float)
    if isinstance(train_pred, float):
        train_pred = np.asarray([train_pred])
    train_err = float(np.mean(train_pred != y))
    p = predict_proba(model, x_test.reshape(1, -1))
    p = float(p if np.isscalar(p) else np.asarray(p).ravel()[0])
    test_err = float((p >= 0.5) != bool(y_test))
    return train_err, test_err


def loo_evaluate(features, labels, config: TrainConfig | None = None,
                 fractions=None, exclude_identical: bool = True) -> LooCurves:
    """Leave-one-out curves: for every held-out instance, train on 10%..100%
    of the remaining (over-sampled, shuffled) data and average the training
    and test error per fraction. Training instances with feature vectors
    identical to the held-out one are excluded first."""
    config = config or TrainConfig()
    fractions = list(fractions or [i / 10 for i in range(1, 11)])
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    if len(X) < 2:
        raise MaxEntError("need at least two instances")
    train_sums = np.zeros(len(fractions))
    test_sums = np.zeros(len(fractions))
    counted = 0
    for i in range(len(X)):
        mask = np.ones(len(X), dtype=bool)
        mask[i] = False
        if exclude_identical:
            same = np.all(X == X[i], axis=1)
            same[i] = True
            mask &= ~same
        Xi, yi = X[mask], y[mask]
        if len(Xi) == 0:
            continue
        counted += 1
        if len(set(yi.tolist())) >= 2:
            Xi, yi = oversample(Xi, yi, seed=config.seed)
        for k, fraction in enumerate(fractions):
            n = max(1, int(round(fraction * len(Xi))))
            tr_err, te_err = _slice_errors(Xi[:n], yi[:n], X[i], y[i], config)
            train_sums[k] += tr_err
            test_sums[k] += te_err
    if counted == 0:
        raise MaxEntError("no usable folds (all instances identical)")
    return LooCurves(
        fractions,
        [float(v / counted) for v in train_sums],
        [float(v / counted) for v in test_sums],
    )


# -- information gain ----------------------------------------------------------------


def _entropy(labels: np.ndarray) -> float:
    if len(labels) == 0:
        return 0.0
    total = 0.0
    for value in (0, 1):
        p = float(np.mean(labels == value))
        if p > 0:
            total -= p * math.log2(p)
    return total


def information_gain(features, labels, feature_names: list[str] | None = None) -> dict[str, float]:
    """IG per feature with a binary split at the median (fallback to a
    strict split when the median swallows everything)."""
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    names = feature_names or [f"f{i}" for i in range(X.shape[1])]
    base = _entropy(y)
    out: dict[str, float] = {}
    for j, name in enumerate(names):
        column = X[:, j]
        median = float(np.median(column))
        left = column <= median
        if left.all() or (~left).all():
            left = column < median
        if left.all() or (~left).all():
            out[name] = 0.0
            continue
        n = len(y)
        cond = (
            left.sum() / n * _entropy(y[left])
            + (~left).sum() / n * _entropy(y[~left])
        )
        out[name] = max(0.0, base - cond)
    return out


def ig_group_report(ig: dict[str, float], groups: dict[str, str]) -> dict[str, dict[str, float]]:
    """Average/max/min IG per feature group."""
    buckets: dict[str, list[float]] = {}
    for name, value in ig.items():
        buckets.setdefault(groups.get(name, "other"), []).append(value)
    return {
        group: {
            "avg": sum(vals) / len(vals),
            "max": max(vals),
            "min": min(vals),
        }
        for group, vals in sorted(buckets.items())
    }
