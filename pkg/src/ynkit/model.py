"""Deterministic linear classifier over hashed n-gram features.

Features are lowercased token n-grams of the selected instance fields,
prefixed by field ("q:do_you"), hashed with 64-bit FNV-1a into a
power-of-two bucket space, count-accumulated, and L2-normalized. Training
is plain SGD on the multinomial logistic loss with multiplicative L2
decay, one pass per epoch dataset in plan order; everything is a pure
function of (plan, config), so retraining reproduces bitwise-identical
weights.
"""

from __future__ import annotations

import base64
import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .blend import TrainingPlan
from .corpus import LABEL_ORDER, Label, parse_label, tokenize
from .distant import QAInstance
from .errors import EmptyPlanError, InvalidConfigError, UnlabeledInstanceError

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF

FIELD_PREFIXES = {"context": "c", "question": "q", "answer": "a"}


def fnv1a_64(text: str) -> int:
    """64-bit FNV-1a over UTF-8 bytes; stable across runs and platforms."""
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    l2: float = 1e-6
    num_buckets: int = 2**18
    ngram_orders: tuple[int, ...] = (1, 2)
    fields_used: tuple[str, ...] = ("context", "question", "answer")
    max_tokens_per_field: int = 512
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise InvalidConfigError("learning_rate must be positive")
        if self.l2 < 0:
            raise InvalidConfigError("l2 must be non-negative")
        if self.num_buckets < 2 or self.num_buckets & (self.num_buckets - 1):
            raise InvalidConfigError("num_buckets must be a power of two >= 2")
        for f in self.fields_used:
            if f not in FIELD_PREFIXES:
                raise InvalidConfigError(f"unknown field {f!r}")
        if not self.ngram_orders or any(n < 1 for n in self.ngram_orders):
            raise InvalidConfigError("ngram_orders must be positive integers")

    def to_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "l2": self.l2,
            "num_buckets": self.num_buckets,
            "ngram_orders": list(self.ngram_orders),
            "fields_used": list(self.fields_used),
            "max_tokens_per_field": self.max_tokens_per_field,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "TrainConfig":
        return cls(
            learning_rate=obj["learning_rate"],
            l2=obj["l2"],
            num_buckets=obj["num_buckets"],
            ngram_orders=tuple(obj["ngram_orders"]),
            fields_used=tuple(obj["fields_used"]),
            max_tokens_per_field=obj.get("max_tokens_per_field", 512),
            seed=obj.get("seed", 0),
        )


def featurize(instance: QAInstance, config: TrainConfig = TrainConfig()) -> dict[int, float]:
    """Sparse L2-normalized bucket->weight map for one instance."""
    counts: dict[int, float] = {}
    mask = config.num_buckets - 1
    for field_name in config.fields_used:
        if field_name == "context":
            text = " ".join(instance.context)
        elif field_name == "question":
            text = instance.question
        else:
            text = instance.answer
        tokens = [t.lower() for t in tokenize(text)][: config.max_tokens_per_field]
        prefix = FIELD_PREFIXES[field_name]
        for order in sorted(config.ngram_orders):
            for i in range(len(tokens) - order + 1):
                key = prefix + ":" + "_".join(tokens[i : i + order])
                bucket = fnv1a_64(key) & mask
                counts[bucket] = counts.get(bucket, 0.0) + 1.0
    norm = float(np.sqrt(sum(v * v for v in counts.values())))
    if norm > 0:
        counts = {k: v / norm for k, v in counts.items()}
    return counts


def _as_arrays(features: dict[int, float]) -> tuple[np.ndarray, np.ndarray]:
    indices = np.fromiter(sorted(features), dtype=np.int64, count=len(features))
    values = np.array([features[i] for i in indices], dtype=np.float64)
    return indices, values


@dataclass
class LinearModel:
    class_labels: tuple[Label, ...]
    weights: np.ndarray  # (classes, num_buckets) float64
    bias: np.ndarray  # (classes,) float64
    num_buckets: int
    feature_config: TrainConfig

    def scores(self, features: dict[int, float]) -> np.ndarray:
        indices, values = _as_arrays(features)
        if len(indices) == 0:
            return self.bias.copy()
        return self.weights[:, indices] @ values + self.bias


def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


def predict(model: LinearModel, instance: QAInstance) -> tuple[Label, dict[Label, float]]:
    """Argmax label and per-class probabilities; ties break by class order."""
    return predict_features(model, featurize(instance, model.feature_config))


def predict_features(model: LinearModel, features: dict[int, float]) -> tuple[Label, dict[Label, float]]:
    probs = softmax(model.scores(features))
    winner = model.class_labels[int(np.argmax(probs))]
    return winner, {label: float(p) for label, p in zip(model.class_labels, probs)}


def train(plan: TrainingPlan, config: TrainConfig = TrainConfig()) -> LinearModel:
    """SGD over the plan's epochs in order, instance order as given.

    L2 is applied as per-step multiplicative decay, tracked lazily through
    a scalar so updates stay sparse.
    """
    if not plan.epochs or all(len(e.instances) == 0 for e in plan.epochs):
        raise EmptyPlanError("training plan contains no instances")
    labels = LABEL_ORDER
    label_index = {label: i for i, label in enumerate(labels)}
    stored = np.zeros((len(labels), config.num_buckets), dtype=np.float64)
    bias = np.zeros(len(labels), dtype=np.float64)
    scale = 1.0
    decay = 1.0 - config.learning_rate * config.l2
    lr = config.learning_rate

    cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def arrays_for(inst: QAInstance) -> tuple[np.ndarray, np.ndarray]:
        key = id(inst)
        got = cache.get(key)
        if got is None:
            got = _as_arrays(featurize(inst, config))
            cache[key] = got
        return got

    for epoch in plan.epochs:
        for inst in epoch.instances:
            if inst.label is None:
                raise UnlabeledInstanceError(
                    f"unlabeled instance with origin {inst.origin_ids}"
                )
            indices, values = arrays_for(inst)
            if len(indices) == 0:
                scores = bias.copy()
            else:
                scores = scale * (stored[:, indices] @ values) + bias
            probs = softmax(scores)
            probs[label_index[inst.label]] -= 1.0  # now the gradient wrt scores
            scale *= decay
            if scale < 1e-12:  # fold the lazy decay back in before underflow
                stored *= scale
                scale = 1.0
            if len(indices):
                stored[:, indices] -= (lr / scale) * np.outer(probs, values)
            bias -= lr * probs

    return LinearModel(
        class_labels=labels,
        weights=stored * scale,
        bias=bias,
        num_buckets=config.num_buckets,
        feature_config=config,
    )


# -- gradient verification --


def log_loss_and_gradient(
    weights: np.ndarray,
    bias: np.ndarray,
    examples: list[tuple[dict[int, float], int]],
) -> tuple[float, np.ndarray, np.ndarray]:
    """Total multinomial log-loss and its analytic gradient (no L2 term)."""
    grad_w = np.zeros_like(weights)
    grad_b = np.zeros_like(bias)
    loss = 0.0
    for features, label_idx in examples:
        indices, values = _as_arrays(features)
        scores = weights[:, indices] @ values + bias if len(indices) else bias.copy()
        shifted = scores - scores.max()
        log_z = np.log(np.exp(shifted).sum()) + scores.max()
        loss += log_z - scores[label_idx]
        probs = np.exp(scores - log_z)
        probs[label_idx] -= 1.0
        if len(indices):
            grad_w[:, indices] += np.outer(probs, values)
        grad_b += probs
    return loss, grad_w, grad_b


def _probe_gradients(
    config: TrainConfig, probe_size: int, step: float = 1e-5
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic vs central finite-difference gradients on a seeded probe
    of at most 10 distinct features. Returns the two flat gradient vectors
    over every touched parameter."""
    if probe_size < 1:
        raise InvalidConfigError("probe_size must be >= 1")
    rng = random.Random(config.seed + 7919)
    n_classes = len(LABEL_ORDER)
    pool = sorted(rng.sample(range(config.num_buckets), 10))
    examples = []
    for _ in range(probe_size):
        k = rng.randint(2, 6)
        chosen = rng.sample(pool, k)
        features = {idx: rng.uniform(0.2, 1.0) for idx in chosen}
        examples.append((features, rng.randrange(n_classes)))
    weights = np.zeros((n_classes, config.num_buckets))
    for idx in pool:
        for c in range(n_classes):
            weights[c, idx] = rng.uniform(-0.8, 0.8)
    bias = np.array([rng.uniform(-0.5, 0.5) for _ in range(n_classes)])

    _, grad_w, grad_b = log_loss_and_gradient(weights, bias, examples)
    analytic = np.concatenate([grad_w[:, pool].ravel(), grad_b])

    numeric = np.zeros_like(analytic)
    pos = 0
    for c in range(n_classes):
        for idx in pool:
            for sign in (1.0, -1.0):
                weights[c, idx] += sign * step
                loss, _, _ = log_loss_and_gradient(weights, bias, examples)
                numeric[pos] += sign * loss
                weights[c, idx] -= sign * step
            numeric[pos] /= 2 * step
            pos += 1
    for c in range(n_classes):
        for sign in (1.0, -1.0):
            bias[c] += sign * step
            loss, _, _ = log_loss_and_gradient(weights, bias, examples)
            numeric[pos] += sign * loss
            bias[c] -= sign * step
        numeric[pos] /= 2 * step
        pos += 1

    # analytic fills grad_w row-major (class, bucket); numeric filled the
    # same way above, so the two vectors are aligned
    return analytic, numeric


def max_relative_error(a: np.ndarray, b: np.ndarray) -> float:
    """Coordinate-wise |a-b| / max(1, |a|, |b|); the unit floor keeps tiny
    gradients from inflating the ratio."""
    denom = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return float(np.max(np.abs(a - b) / denom))


def gradient_check(config: TrainConfig = TrainConfig(), probe_size: int = 5) -> float:
    analytic, numeric = _probe_gradients(config, probe_size)
    return max_relative_error(analytic, numeric)


# -- serialization: one JSON container, exact round-trip --

_FORMAT = "ynkit-linear-model"
_VERSION = 1


def save_model(model: LinearModel, path: Union[str, Path]) -> None:
    payload = {
        "format": _FORMAT,
        "version": _VERSION,
        "config": model.feature_config.to_dict(),
        "class_labels": [label.value for label in model.class_labels],
        "num_buckets": model.num_buckets,
        "bias_b64": base64.b64encode(
            np.ascontiguousarray(model.bias, dtype="<f8").tobytes()
        ).decode("ascii"),
        "weights_b64": base64.b64encode(
            np.ascontiguousarray(model.weights, dtype="<f8").tobytes()
        ).decode("ascii"),
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path: Union[str, Path]) -> LinearModel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != _FORMAT or payload.get("version") != _VERSION:
        raise InvalidConfigError(f"{path}: not a {_FORMAT} v{_VERSION} file")
    config = TrainConfig.from_dict(payload["config"])
    labels = tuple(parse_label(v) for v in payload["class_labels"])
    num_buckets = payload["num_buckets"]
    bias = np.frombuffer(base64.b64decode(payload["bias_b64"]), dtype="<f8").astype(
        np.float64
    )
    weights = np.frombuffer(
        base64.b64decode(payload["weights_b64"]), dtype="<f8"
    ).astype(np.float64).reshape(len(labels), num_buckets)
    return LinearModel(
        class_labels=labels,
        weights=weights,
        bias=bias,
        num_buckets=num_buckets,
        feature_config=config,
    )
