"""Bag-of-n-grams linear classifier (mean of hashed embeddings -> softmax)."""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .features import featurize, tokenize

STANCE_CLASSES = ("anti", "pro", "neutral")

MAGIC = b"VXNGRAM\x00"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sIQIII")  # magic, version, buckets, dim, ngram, meta length


@dataclass(frozen=True)
class StanceScore:
    p_anti: float
    p_pro: float
    p_neutral: float

    def __post_init__(self):
        probs = (self.p_anti, self.p_pro, self.p_neutral)
        if any(p < 0.0 or p > 1.0 for p in probs):
            raise ValueError(f"probabilities out of range: {probs}")
        if abs(sum(probs) - 1.0) > 1e-6:
            raise ValueError(f"probabilities do not sum to 1: {probs}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_anti, self.p_pro, self.p_neutral)


@dataclass(frozen=True)
class LabeledExample:
    text: str
    label: str


@dataclass
class NgramLinearModel:
    bucket_count: int
    dim: int
    ngram: int
    embedding: np.ndarray
    output_weights: np.ndarray
    output_bias: np.ndarray
    class_names: tuple[str, ...]
    hyperparams: dict = field(default_factory=dict)
    loss_history: list[float] = field(default_factory=list, compare=False)

    def __post_init__(self):
        self.class_names = tuple(self.class_names)
        k = len(self.class_names)
        if k < 2:
            raise ValueError("a model needs at least two classes")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.embedding.shape != (self.bucket_count, self.dim):
            raise ValueError(f"embedding shape {self.embedding.shape} != ({self.bucket_count}, {self.dim})")
        if self.output_weights.shape != (self.dim, k):
            raise ValueError(f"output_weights shape {self.output_weights.shape} != ({self.dim}, {k})")
        if self.output_bias.shape != (k,):
            raise ValueError(f"output_bias shape {self.output_bias.shape} != ({k},)")

    @classmethod
    def initialize(cls, class_names, bucket_count: int = 1 << 20, dim: int = 32, ngram: int = 2, seed: int = 0):
        """Embedding ~ U[-1/dim, 1/dim], output layer zero."""
        rng = np.random.default_rng(seed)
        bound = 1.0 / dim
        return cls(
            bucket_count=bucket_count,
            dim=dim,
            ngram=ngram,
            embedding=rng.uniform(-bound, bound, size=(bucket_count, dim)),
            output_weights=np.zeros((dim, len(class_names))),
            output_bias=np.zeros(len(class_names)),
            class_names=tuple(class_names),
        )

    @property
    def class_count(self) -> int:
        return len(self.class_names)

    def is_finite(self) -> bool:
        return bool(
            np.isfinite(self.embedding).all()
            and np.isfinite(self.output_weights).all()
            and np.isfinite(self.output_bias).all()
        )

    def features(self, text: str) -> np.ndarray:
        return featurize(tokenize(text), self.ngram, self.bucket_count)

    def proba_from_indices(self, indices: np.ndarray) -> np.ndarray:
        if len(indices) == 0:
            return np.full(self.class_count, 1.0 / self.class_count)
        hidden = self.embedding[indices].mean(axis=0)
        return softmax(hidden @ self.output_weights + self.output_bias)

    def predict_proba(self, text: str) -> np.ndarray:
        return self.proba_from_indices(self.features(text))

    def predict_label(self, text: str) -> str:
        return self.class_names[int(np.argmax(self.predict_proba(text)))]

    def copy(self) -> "NgramLinearModel":
        return NgramLinearModel(
            bucket_count=self.bucket_count,
            dim=self.dim,
            ngram=self.ngram,
            embedding=self.embedding.copy(),
            output_weights=self.output_weights.copy(),
            output_bias=self.output_bias.copy(),
            class_names=self.class_names,
            hyperparams=dict(self.hyperparams),
            loss_history=list(self.loss_history),
        )

    def to_bytes(self) -> bytes:
        meta = json.dumps(
            {"class_names": list(self.class_names), "hyperparams": self.hyperparams},
            sort_keys=True,
        ).encode("utf-8")
        header = _HEADER.pack(MAGIC, FORMAT_VERSION, self.bucket_count, self.dim, self.ngram, len(meta))
        return b"".join(
            [
                header,
                meta,
                np.ascontiguousarray(self.embedding, dtype="<f4").tobytes(),
                np.ascontiguousarray(self.output_weights, dtype="<f4").tobytes(),
                np.ascontiguousarray(self.output_bias, dtype="<f4").tobytes(),
            ]
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "NgramLinearModel":
        if len(data) < _HEADER.size:
            raise ValueError("model file truncated")
        magic, version, buckets, dim, ngram, meta_len = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ValueError("not a model file (bad magic)")
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {version}")
        offset = _HEADER.size
        meta = json.loads(data[offset : offset + meta_len].decode("utf-8"))
        offset += meta_len
        k = len(meta["class_names"])

        def take(count, shape):
            nonlocal offset
            end = offset + 4 * count
            if end > len(data):
                raise ValueError("model file truncated")
            arr = np.frombuffer(data, dtype="<f4", count=count, offset=offset)
            offset = end
            return arr.astype(np.float64).reshape(shape)

        embedding = take(buckets * dim, (buckets, dim))
        weights = take(dim * k, (dim, k))
        bias = take(k, (k,))
        if offset != len(data):
            raise ValueError("trailing bytes in model file")
        return cls(buckets, dim, ngram, embedding, weights, bias, tuple(meta["class_names"]), meta["hyperparams"])

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> "NgramLinearModel":
        return cls.from_bytes(Path(path).read_bytes())


def softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


def loss_and_gradients(model: NgramLinearModel, indices: np.ndarray, label: int):
    """Cross-entropy for one example and its gradients.

    Returns ``(loss, grad_weights, grad_bias, rows, grad_rows)``; ``rows`` are the
    unique embedding rows touched and ``grad_rows`` their gradients. Embedding
    gradients account for repeated bucket indices.
    """
    hidden = model.embedding[indices].mean(axis=0)
    probs = softmax(hidden @ model.output_weights + model.output_bias)
    loss = -np.log(max(probs[label], 1e-300))
    delta = probs.copy()
    delta[label] -= 1.0
    grad_w = np.outer(hidden, delta)
    grad_hidden = model.output_weights @ delta
    rows, counts = np.unique(indices, return_counts=True)
    grad_rows = (counts / len(indices))[:, None] * grad_hidden[None, :]
    return loss, grad_w, delta, rows, grad_rows


def predict(model: NgramLinearModel, text: str) -> StanceScore:
    """Stance simplex for ``text``; requires a model over the anti/pro/neutral classes."""
    missing = set(STANCE_CLASSES) - set(model.class_names)
    if missing:
        raise ValueError(f"model lacks stance classes: {sorted(missing)}")
    probs = model.predict_proba(text)
    by_name = dict(zip(model.class_names, probs))
    anti, pro, neutral = (float(by_name[c]) for c in STANCE_CLASSES)
    total = anti + pro + neutral
    return StanceScore(anti / total, pro / total, neutral / total)
