"""User interest detection.

Clicked documents are classified into topics with a multinomial Naive
Bayes model; a session interest is the majority label; the sequence of
session interests trains a many-to-one vanilla recurrent network that
predicts the next interest. Models are immutable once trained and are
persisted as plain-text snapshots so any implementation can read them.
"""

from __future__ import annotations

import json
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InterestUnavailableError, ParseError, TrainingError


@dataclass
class ClickRecord:
    query: str
    clicked_doc_ids: list[str]
    dwell_seconds: list[float]
    timestamp: float = field(default_factory=time.time)

    def __post_init__(self) -> None:
        if len(self.clicked_doc_ids) != len(self.dwell_seconds):
            raise ValueError("dwell_seconds must align with clicked_doc_ids")
        if any(d < 0 for d in self.dwell_seconds):
            raise ValueError("dwell_seconds must be nonnegative")


# ---------------------------------------------------------------------------
# Naive Bayes document classification
# ---------------------------------------------------------------------------


@dataclass
class NBModel:
    labels: list[str]
    log_priors: dict[str, float]
    log_likelihoods: dict[str, dict[str, float]]
    vocab: set[str]


def train_nb(docs: list[tuple[list[str], str]]) -> NBModel:
    """Multinomial NB with add-one smoothing over the union vocabulary."""
    labels = sorted({label for _, label in docs})
    if len(labels) < 2:
        raise TrainingError("need at least two labels to train a classifier")

    vocab: set[str] = set()
    token_counts: dict[str, Counter] = {label: Counter() for label in labels}
    doc_counts: Counter = Counter()
    for tokens, label in docs:
        doc_counts[label] += 1
        token_counts[label].update(tokens)
        vocab.update(tokens)
    if any(doc_counts[label] == 0 for label in labels):
        raise TrainingError("every label needs at least one document")

    n_docs = len(docs)
    v = len(vocab)
    log_priors = {label: math.log(doc_counts[label] / n_docs) for label in labels}
    log_likelihoods: dict[str, dict[str, float]] = {}
    for label in labels:
        total = sum(token_counts[label].values())
        log_likelihoods[label] = {
            token: math.log((token_counts[label][token] + 1) / (total + v))
            for token in vocab
        }
    return NBModel(labels, log_priors, log_likelihoods, vocab)


def classify_doc(m: NBModel, doc: list[str]) -> str:
    """Argmax posterior label; unseen tokens skipped; ties go lexicographic."""
    if not doc:
        raise ValueError("document token bag must be non-empty")
    best_label = None
    best_score = -math.inf
    for label in m.labels:  # sorted, so first strict max is the lexicographic winner
        score = m.log_priors[label]
        lik = m.log_likelihoods[label]
        for token in doc:
            if token in m.vocab:
                score += lik[token]
        if score > best_score:
            best_label, best_score = label, score
    assert best_label is not None
    return best_label


def session_interest(m: NBModel, clicked_docs: list[list[str]]) -> str:
    """Majority label of the clicked documents.

    Callers order clicked_docs by descending dwell time: on a tie the
    label of the earliest (longest-dwelled) document wins.
    """
    if not clicked_docs:
        raise ValueError("clicked_docs must be non-empty")
    labels = [classify_doc(m, doc) for doc in clicked_docs]
    counts = Counter(labels)
    top = max(counts.values())
    tied = {label for label, count in counts.items() if count == top}
    if len(tied) == 1:
        return next(iter(tied))
    for label in labels:
        if label in tied:
            return label
    return min(tied)


# ---------------------------------------------------------------------------
# Interest history
# ---------------------------------------------------------------------------


@dataclass
class InterestHistory:
    capacity: int
    sequence: list[str] = field(default_factory=list)

    def append(self, label: str) -> None:
        self.sequence.append(label)
        if len(self.sequence) > self.capacity:
            del self.sequence[: len(self.sequence) - self.capacity]


# ---------------------------------------------------------------------------
# Many-to-one vanilla RNN
# ---------------------------------------------------------------------------


@dataclass
class RNNModel:
    labels: list[str]
    hidden_dim: int
    w_xh: np.ndarray
    w_hh: np.ndarray
    w_hy: np.ndarray
    b_h: np.ndarray
    b_y: np.ndarray

    def one_hot(self, label: str) -> np.ndarray:
        x = np.zeros(len(self.labels))
        x[self.labels.index(label)] = 1.0
        return x


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - np.max(z))
    return e / e.sum()


def _forward(model: RNNModel, sequence: list[str]) -> tuple[list[np.ndarray], np.ndarray]:
    hs = [np.zeros(model.hidden_dim)]
    for label in sequence:
        x = model.one_hot(label)
        hs.append(np.tanh(model.w_xh @ x + model.w_hh @ hs[-1] + model.b_h))
    probs = _softmax(model.w_hy @ hs[-1] + model.b_y)
    return hs, probs


def loss_and_gradients(
    model: RNNModel, sequence: list[str], target: str
) -> tuple[float, dict[str, np.ndarray]]:
    """Cross-entropy loss and full backpropagation-through-time gradients."""
    hs, probs = _forward(model, sequence)
    target_idx = model.labels.index(target)
    loss = -math.log(max(probs[target_idx], 1e-300))

    dy = probs.copy()
    dy[target_idx] -= 1.0
    grads = {
        "w_xh": np.zeros_like(model.w_xh),
        "w_hh": np.zeros_like(model.w_hh),
        "w_hy": np.outer(dy, hs[-1]),
        "b_h": np.zeros_like(model.b_h),
        "b_y": dy,
    }
    dh = model.w_hy.T @ dy
    for t in range(len(sequence), 0, -1):
        draw = (1.0 - hs[t] ** 2) * dh
        grads["w_xh"] += np.outer(draw, model.one_hot(sequence[t - 1]))
        grads["w_hh"] += np.outer(draw, hs[t - 1])
        grads["b_h"] += draw
        dh = model.w_hh.T @ draw
    return loss, grads


def rnn_train(
    histories: list[tuple[list[str], str]],
    epochs: int = 200,
    learning_rate: float = 0.5,
    seed: int = 0,
    hidden_dim: int = 16,
) -> RNNModel:
    """Train by full-batch gradient descent on cross-entropy; seed-reproducible."""
    if not histories:
        raise TrainingError("empty training set")
    if any(not seq for seq, _ in histories):
        raise TrainingError("every training sequence must have length >= 1")

    labels = sorted({label for seq, nxt in histories for label in [*seq, nxt]})
    n_labels = len(labels)
    rng = np.random.RandomState(seed)
    model = RNNModel(
        labels=labels,
        hidden_dim=hidden_dim,
        w_xh=rng.uniform(-0.1, 0.1, (hidden_dim, n_labels)),
        w_hh=rng.uniform(-0.1, 0.1, (hidden_dim, hidden_dim)),
        w_hy=rng.uniform(-0.1, 0.1, (n_labels, hidden_dim)),
        b_h=rng.uniform(-0.1, 0.1, hidden_dim),
        b_y=rng.uniform(-0.1, 0.1, n_labels),
    )

    params = ("w_xh", "w_hh", "w_hy", "b_h", "b_y")
    for _ in range(epochs):
        total = {name: np.zeros_like(getattr(model, name)) for name in params}
        for sequence, target in histories:
            _, grads = loss_and_gradients(model, sequence, target)
            for name in params:
                total[name] += grads[name]
        for name in params:
            setattr(model, name, getattr(model, name) - learning_rate * total[name] / len(histories))
    return model


def rnn_predict(model: RNNModel, sequence: list[str]) -> tuple[str, float]:
    if not sequence:
        raise ValueError("sequence must be non-empty")
    _, probs = _forward(model, sequence)
    idx = int(np.argmax(probs))
    return model.labels[idx], float(probs[idx])


def dataset_loss(model: RNNModel, histories: list[tuple[list[str], str]]) -> float:
    losses = [loss_and_gradients(model, seq, target)[0] for seq, target in histories]
    return float(sum(losses) / len(losses))


# ---------------------------------------------------------------------------
# Interest prediction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InterestProfile:
    theta: str
    confidence: float
    source: str  # RNN | MAJORITY_FALLBACK | CONFIGURED


def predict_interest(
    model: RNNModel | None,
    history: InterestHistory,
    default_label: str | None = None,
) -> InterestProfile:
    """Predict the next interest from the history.

    Falls back to the majority of the history when no model is trained,
    and to the configured default when the history is empty.
    """
    if not history.sequence:
        if default_label is not None:
            return InterestProfile(default_label, 1.0, "CONFIGURED")
        raise InterestUnavailableError("empty history and no configured interest")
    if model is not None:
        known = [label for label in history.sequence if label in model.labels]
        if known:
            theta, confidence = rnn_predict(model, known)
            return InterestProfile(theta, confidence, "RNN")
    counts = Counter(history.sequence)
    top = max(counts.values())
    theta = min(label for label, count in counts.items() if count == top)
    return InterestProfile(theta, top / len(history.sequence), "MAJORITY_FALLBACK")


# ---------------------------------------------------------------------------
# Persistence: history log and model snapshots
# ---------------------------------------------------------------------------


class HistoryStore:
    """Append-only per-user interest history under the data directory."""

    def __init__(self, data_dir: str | Path, capacity: int = 20):
        self.root = Path(data_dir) / "history"
        self.capacity = capacity

    def _path(self, user_id: str) -> Path:
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in user_id)
        return self.root / f"{safe}.jsonl"

    def append(self, user_id: str, record: ClickRecord, label: str) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        entry = {
            "query": record.query,
            "clicked_doc_ids": record.clicked_doc_ids,
            "dwell_seconds": record.dwell_seconds,
            "timestamp": record.timestamp,
            "label": label,
        }
        with self._path(user_id).open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def load_labels(self, user_id: str) -> InterestHistory:
        history = InterestHistory(capacity=self.capacity)
        path = self._path(user_id)
        if path.exists():
            for line in path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    history.append(json.loads(line)["label"])
        return history

    def load_records(self, user_id: str) -> list[dict]:
        path = self._path(user_id)
        if not path.exists():
            return []
        return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]


def save_rnn(model: RNNModel, path: str | Path) -> None:
    """Write a plain-text snapshot: label list plus weight matrices.

    The snapshot lands via rename so readers see the old or the new
    model, never a partial file.
    """
    lines = ["#edgesearch-rnn v1", "labels=" + ",".join(model.labels), f"hidden={model.hidden_dim}"]
    for name in ("w_xh", "w_hh", "w_hy"):
        lines.append(f"[{name}]")
        for row in getattr(model, name):
            lines.append(" ".join(repr(float(x)) for x in row))
    for name in ("b_h", "b_y"):
        lines.append(f"[{name}]")
        lines.append(" ".join(repr(float(x)) for x in getattr(model, name)))
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    staging = target.with_suffix(target.suffix + ".tmp")
    staging.write_text("\n".join(lines) + "\n", encoding="utf-8")
    staging.replace(target)


def load_rnn(path: str | Path) -> RNNModel:
    p = Path(path)
    lines = p.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "#edgesearch-rnn v1":
        raise ParseError(f"{p.name}:1: not a model snapshot")
    labels = lines[1].split("=", 1)[1].split(",")
    hidden = int(lines[2].split("=", 1)[1])
    sections: dict[str, list[list[float]]] = {}
    current: str | None = None
    for line in lines[3:]:
        if line.startswith("["):
            current = line.strip("[]")
            sections[current] = []
        elif line.strip() and current:
            sections[current].append([float(x) for x in line.split()])
    try:
        return RNNModel(
            labels=labels,
            hidden_dim=hidden,
            w_xh=np.array(sections["w_xh"]),
            w_hh=np.array(sections["w_hh"]),
            w_hy=np.array(sections["w_hy"]),
            b_h=np.array(sections["b_h"][0]),
            b_y=np.array(sections["b_y"][0]),
        )
    except KeyError as missing:
        raise ParseError(f"{p.name}: snapshot missing section {missing}") from None
