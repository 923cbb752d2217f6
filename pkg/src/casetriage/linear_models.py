"""One-vs-rest linear classifiers trained by gradient descent with label-weighted losses."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.special import expit

from .corpus import LabeledCase, TaskSchema, balanced_weights, label_stats
from .errors import InputError, ModelFormatError, TrainingDivergedError
from .features import DEFAULT_ORDERS, FeatureVector, Vocabulary, featurize

# Probabilities are clamped to [PROB_EPS, 1 - PROB_EPS] so log terms stay finite
# and reported scores are strictly inside (0, 1).
PROB_EPS = 1e-12

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for one training run; everything that affects the result."""

    loss: str = "logistic"          # "logistic" or "svm" (squared hinge)
    weighting: str = "uniform"      # "uniform" or "balanced"
    learning_rate: float = 1.0
    epochs: int = 200
    l2: float = 0.0
    batch_size: int | None = None   # None = full batch
    seed: int = 0
    ngram_orders: tuple[int, ...] = DEFAULT_ORDERS

    def __post_init__(self) -> None:
        object.__setattr__(self, "ngram_orders", tuple(self.ngram_orders))
        if self.loss not in ("logistic", "svm"):
            raise InputError(f"loss must be 'logistic' or 'svm', got {self.loss!r}")
        if self.weighting not in ("uniform", "balanced"):
            raise InputError(f"weighting must be 'uniform' or 'balanced', got {self.weighting!r}")
        if self.learning_rate <= 0 or self.epochs < 1:
            raise InputError("learning_rate must be > 0 and epochs >= 1")


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Per-label weight vectors and biases over a fixed TF-IDF feature space."""

    schema_name: str
    labels: tuple[str, ...]
    vocab_hash: str
    config: TrainConfig
    weights: np.ndarray             # (n_labels, n_features)
    bias: np.ndarray                # (n_labels,)
    loss_history: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if self.weights.shape != (len(self.labels), self.weights.shape[1]):
            raise InputError("weight matrix must have one row per label")
        if self.bias.shape != (len(self.labels),):
            raise InputError("bias must have one entry per label")
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise InputError("model parameters must be finite")

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]


def _stack(docs: Sequence[FeatureVector], n_features: int) -> sparse.csr_matrix:
    data, indices, indptr = [], [], [0]
    for doc in docs:
        for pos in sorted(doc):
            if pos >= n_features:
                raise InputError(f"feature index {pos} out of range for {n_features} features")
            indices.append(pos)
            data.append(doc[pos])
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.asarray(data, dtype=np.float64), indices, indptr),
        shape=(len(docs), n_features),
    )


def _loss_grad(
    weights: np.ndarray,
    bias: np.ndarray,
    x: sparse.csr_matrix,
    y: np.ndarray,
    label_weights: np.ndarray,
    kind: str,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Summed loss over the batch and its exact gradients w.r.t. weights and bias.

    Logistic: -sum_k sum_i w_i (y log p + (1-y) log(1-p)), p = sigmoid(z).
    SVM: sum_k sum_i w_i max(0, 1 - t z)^2 with targets t = 2y - 1.
    """
    z = x @ weights.T + bias
    # divergence shows up as a non-finite loss; callers detect it, so the
    # overflow itself is not worth a warning
    with np.errstate(over="ignore"):
        if kind == "logistic":
            p = np.clip(expit(z), PROB_EPS, 1.0 - PROB_EPS)
            loss = -float(np.sum(label_weights * (y * np.log(p) + (1.0 - y) * np.log1p(-p))))
            dz = label_weights * (p - y)
        elif kind == "svm":
            t = 2.0 * y - 1.0
            margin = np.maximum(0.0, 1.0 - t * z)
            loss = float(np.sum(label_weights * margin**2))
            dz = label_weights * (-2.0 * t * margin)
        else:
            raise InputError(f"unknown loss kind {kind!r}")
        grad_w = np.asarray(dz.T @ x)
        grad_b = dz.sum(axis=0)
    return loss, grad_w, grad_b


def loss_and_gradient(
    model: LinearModel,
    batch: Sequence[tuple[FeatureVector, Sequence[int]]],
    label_weights: Sequence[float],
) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
    """Batch loss and analytic gradients for the model's configured loss."""
    if not batch:
        raise InputError("loss_and_gradient needs a non-empty batch")
    lw = np.asarray(label_weights, dtype=np.float64)
    if lw.shape != (len(model.labels),):
        raise InputError(f"expected {len(model.labels)} label weights, got {lw.shape}")
    x = _stack([doc for doc, _ in batch], model.n_features)
    y = np.asarray([gold for _, gold in batch], dtype=np.float64)
    if y.shape != (len(batch), len(model.labels)):
        raise InputError("gold vectors must match the label count")
    loss, grad_w, grad_b = _loss_grad(model.weights, model.bias, x, y, lw, model.config.loss)
    return loss, (grad_w, grad_b)


def train(
    cases: Sequence[LabeledCase],
    schema: TaskSchema,
    vocab: Vocabulary,
    config: TrainConfig,
) -> LinearModel:
    """Gradient-descent training of one-vs-rest linear classifiers.

    Parameters start at zero (the objective is convex) and each step uses the
    batch-mean data gradient plus l2 * weights. Mini-batch order is drawn from
    the config seed, so a fixed (data, config) pair always yields the same
    model. Raises TrainingDivergedError if the loss leaves the finite range.
    """
    if not cases:
        raise InputError("train needs a non-empty training set")
    docs = [featurize(case.text, vocab, config.ngram_orders) for case in cases]
    x_all = _stack(docs, len(vocab))
    y_all = np.asarray([case.gold for case in cases], dtype=np.float64)
    if y_all.shape[1] != schema.n_labels:
        raise InputError("case gold length does not match the schema")

    lw = np.asarray(
        balanced_weights(label_stats(list(cases)), config.weighting, schema.labels),
        dtype=np.float64,
    )
    n, d = schema.n_labels, len(vocab)
    weights = np.zeros((n, d))
    bias = np.zeros(n)
    rng = np.random.default_rng(config.seed)
    m = len(cases)
    batch = m if config.batch_size is None else min(config.batch_size, m)

    history: list[float] = []
    for epoch in range(config.epochs):
        order = np.arange(m) if batch == m else rng.permutation(m)
        epoch_loss = 0.0
        for start in range(0, m, batch):
            rows = order[start : start + batch]
            loss, grad_w, grad_b = _loss_grad(
                weights, bias, x_all[rows], y_all[rows], lw, config.loss
            )
            epoch_loss += loss
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    f"loss became non-finite at epoch {epoch} "
                    f"(learning_rate={config.learning_rate}, loss={config.loss})"
                )
            scale = config.learning_rate / len(rows)
            weights -= scale * grad_w + config.learning_rate * config.l2 * weights
            bias -= scale * grad_b
        history.append(epoch_loss)

    return LinearModel(
        schema_name=schema.name,
        labels=schema.labels,
        vocab_hash=vocab.digest(),
        config=config,
        weights=weights,
        bias=bias,
        loss_history=tuple(history),
    )


def predict_scores(model: LinearModel, doc: FeatureVector) -> np.ndarray:
    """Per-label scores sigmoid(w_i . x + b_i), strictly inside (0, 1)."""
    z = model.bias.copy()
    if doc:
        cols = np.fromiter(doc.keys(), dtype=np.int64, count=len(doc))
        if cols.max() >= model.n_features:
            raise InputError(
                f"feature index {cols.max()} out of range for {model.n_features} features"
            )
        vals = np.fromiter(doc.values(), dtype=np.float64, count=len(doc))
        z = z + model.weights[:, cols] @ vals
    return np.clip(expit(z), PROB_EPS, 1.0 - PROB_EPS)


def score_matrix(model: LinearModel, docs: Sequence[FeatureVector]) -> np.ndarray:
    """Scores for many documents at once, shape (n_docs, n_labels)."""
    x = _stack(docs, model.n_features)
    z = x @ model.weights.T + model.bias
    return np.clip(expit(z), PROB_EPS, 1.0 - PROB_EPS)


def score_cases(
    model: LinearModel, cases: Sequence[LabeledCase], vocab: Vocabulary
) -> np.ndarray:
    """Featurize and score labeled cases with the model's n-gram orders."""
    docs = [featurize(case.text, vocab, model.config.ngram_orders) for case in cases]
    return score_matrix(model, docs)


def save_model(model: LinearModel, path: str | Path) -> None:
    """Serialize to JSON; float reprs round-trip, so parameters are bit-exact."""
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "schema_name": model.schema_name,
        "labels": list(model.labels),
        "vocab_hash": model.vocab_hash,
        "config": asdict(model.config) | {"ngram_orders": list(model.config.ngram_orders)},
        "weights": [list(row) for row in model.weights.tolist()],
        "bias": model.bias.tolist(),
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> LinearModel:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    version = raw.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"model file {path} has format version {version}, expected {MODEL_FORMAT_VERSION}"
        )
    try:
        config_raw = dict(raw["config"])
        config_raw["ngram_orders"] = tuple(config_raw["ngram_orders"])
        config_raw["batch_size"] = config_raw.get("batch_size")
        return LinearModel(
            schema_name=raw["schema_name"],
            labels=tuple(raw["labels"]),
            vocab_hash=raw["vocab_hash"],
            config=TrainConfig(**config_raw),
            weights=np.asarray(raw["weights"], dtype=np.float64),
            bias=np.asarray(raw["bias"], dtype=np.float64),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"model file {path} is corrupt: {exc}") from exc
