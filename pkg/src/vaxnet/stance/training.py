"""SGD training, class balancing, hashtag pretraining and staged transfer."""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .features import featurize, tokenize
from .model import STANCE_CLASSES, LabeledExample, NgramLinearModel, loss_and_gradients

logger = logging.getLogger(__name__)

DEFAULT_HASHTAGS = (
    "endautismnow", "antivax", "autism", "autismismedical", "cat", "cdctruth",
    "cdcwhistleblower", "dog", "ebola", "flu", "health", "hearthiswell", "hpv",
    "immunization", "livemusic", "measles", "medication", "music", "polio",
    "sb277", "science", "vaccination", "vaccine", "vaccines",
    "vaccinescauseautism", "vaccineswork", "vaxxed",
)


@dataclass(frozen=True)
class Hyperparams:
    dim: int = 32
    n: int = 2
    bucket_count: int = 1 << 20
    lr: float = 0.5
    epochs: int = 20
    seed: int = 0
    # transfer only
    stage1_epochs: int = 10
    stage2_epochs: int = 10
    stage2_lr: float = 0.1
    chain_thaw: bool = True

    def __post_init__(self):
        for name in ("dim", "n", "bucket_count"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer, got {getattr(self, name)!r}")
        for name in ("epochs", "stage1_epochs", "stage2_epochs"):
            if not isinstance(getattr(self, name), int) or getattr(self, name) < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {getattr(self, name)!r}")
        if not (self.lr >= 0 and self.stage2_lr >= 0):
            raise ValueError("learning rates must be nonnegative")

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> "Hyperparams":
        d = dict(d or {})
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown hyperparameter(s): {sorted(unknown)}")
        return cls(**d)


def _sgd(
    model: NgramLinearModel,
    docs: Sequence[np.ndarray],
    labels: Sequence[int],
    lr: float,
    epochs: int,
    seed: int,
    train_embedding: bool = True,
) -> list[float]:
    """Per-example SGD with linearly decaying learning rate.

    The visiting order is shuffled once and reused every epoch. Empty documents
    carry no signal and are skipped. Returns the mean loss of each epoch.
    """
    order = [i for i in np.random.default_rng(seed).permutation(len(docs)) if len(docs[i])]
    total = max(1, epochs * len(order))
    history = []
    step = 0
    for _ in range(epochs):
        epoch_loss = 0.0
        for i in order:
            rate = lr * (1.0 - step / total)
            step += 1
            loss, grad_w, grad_b, rows, grad_rows = loss_and_gradients(model, docs[i], labels[i])
            epoch_loss += loss
            if rate == 0.0:
                continue
            if train_embedding:
                model.embedding[rows] -= rate * grad_rows
            model.output_weights -= rate * grad_w
            model.output_bias -= rate * grad_b
        history.append(float(epoch_loss / max(1, len(order))))
    return history


def _featurize_all(texts: Iterable[str], hp: Hyperparams) -> list[np.ndarray]:
    return [featurize(tokenize(t), hp.n, hp.bucket_count) for t in texts]


def _class_list(labels: Iterable[str], preferred: Sequence[str] = STANCE_CLASSES) -> tuple[str, ...]:
    present = set(labels)
    ordered = [c for c in preferred if c in present]
    ordered += sorted(present - set(ordered))
    return tuple(ordered)


def train_indices(
    docs: Sequence[np.ndarray],
    labels: Sequence[str],
    hp: Hyperparams,
    class_names: Optional[Sequence[str]] = None,
) -> NgramLinearModel:
    class_names = tuple(class_names) if class_names else _class_list(labels)
    if len(set(labels)) < 2:
        raise ValueError("training data must contain at least two classes")
    lookup = {c: i for i, c in enumerate(class_names)}
    unknown = set(labels) - set(lookup)
    if unknown:
        raise ValueError(f"labels not in class set: {sorted(unknown)}")
    model = NgramLinearModel.initialize(class_names, hp.bucket_count, hp.dim, hp.n, hp.seed)
    model.hyperparams = asdict(hp)
    model.loss_history = _sgd(model, docs, [lookup[y] for y in labels], hp.lr, hp.epochs, hp.seed)
    return model


def train(examples: Sequence[LabeledExample], hp: Hyperparams = Hyperparams()) -> NgramLinearModel:
    """Fit a fresh model on labeled texts. Deterministic for a given ``hp.seed``."""
    examples = list(examples)
    return train_indices(_featurize_all((e.text for e in examples), hp), [e.label for e in examples], hp)


def upsample_balance(examples: Sequence, seed: int = 0, label_of=lambda e: e.label) -> list:
    """Resample minority classes with replacement up to the majority count.

    Originals are kept in their input order; the draws are appended per class in
    sorted class order.
    """
    examples = list(examples)
    if not examples:
        raise ValueError("cannot balance an empty example set")
    by_class = defaultdict(list)
    for e in examples:
        by_class[label_of(e)].append(e)
    target = max(len(v) for v in by_class.values())
    rng = np.random.default_rng(seed)
    out = list(examples)
    for label in sorted(by_class):
        members = by_class[label]
        deficit = target - len(members)
        if deficit > 0:
            picks = rng.integers(0, len(members), size=deficit)
            out.extend(members[i] for i in picks)
    return out


def hashtag_examples(texts: Iterable[str], hashtag_classes: Sequence[str]) -> list[tuple[list[str], str]]:
    """One ``(tokens, tag)`` pair per target tag present in each text.

    The target tag token is removed from its own example; other hashtags stay.
    """
    wanted = {h.lower().lstrip("#") for h in hashtag_classes}
    out = []
    for text in texts:
        tokens = tokenize(text)
        present = sorted({t[1:] for t in tokens if t.startswith("#")} & wanted)
        for tag in present:
            out.append(([t for t in tokens if t != "#" + tag], tag))
    return out


def pretrain_hashtags(
    corpus: Iterable[str],
    hashtag_classes: Sequence[str] = DEFAULT_HASHTAGS,
    hp: Hyperparams = Hyperparams(),
) -> NgramLinearModel:
    """Train a hashtag predictor, the source task for transfer.

    Tags with no occurrence in the corpus are dropped with a warning. Classes
    are balanced by random upsampling before training.
    """
    classes = [h.lower().lstrip("#") for h in hashtag_classes]
    pairs = hashtag_examples(corpus, classes)
    seen = {tag for _, tag in pairs}
    absent = [tag for tag in classes if tag not in seen]
    if absent:
        logger.warning("hashtag classes absent from pretraining corpus, dropped: %s", ", ".join(absent))
    classes = [c for c in classes if c in seen]
    if len(classes) < 2:
        raise ValueError("pretraining needs at least two hashtag classes present in the corpus")
    pairs = upsample_balance(pairs, seed=hp.seed, label_of=lambda p: p[1])
    docs = [featurize(tokens, hp.n, hp.bucket_count) for tokens, _ in pairs]
    return train_indices(docs, [tag for _, tag in pairs], hp, class_names=classes)


def transfer(
    pretrained: NgramLinearModel,
    stance_examples: Sequence[LabeledExample],
    hp: Hyperparams = Hyperparams(),
    return_stages: bool = False,
):
    """Reuse a pretrained embedding for the stance task.

    Stage 1 fits a new output layer on top of the frozen embedding. Stage 2
    (when ``hp.chain_thaw``) unfreezes everything and fine-tunes at
    ``hp.stage2_lr``. With ``return_stages`` the stage-1 model is returned too.
    """
    if (pretrained.bucket_count, pretrained.dim, pretrained.ngram) != (hp.bucket_count, hp.dim, hp.n):
        raise ValueError(
            "pretrained model shape (buckets=%d, dim=%d, n=%d) does not match hyperparams (%d, %d, %d)"
            % (pretrained.bucket_count, pretrained.dim, pretrained.ngram, hp.bucket_count, hp.dim, hp.n)
        )
    examples = list(stance_examples)
    labels = [e.label for e in examples]
    if len(set(labels)) < 2:
        raise ValueError("training data must contain at least two classes")
    class_names = _class_list(labels)
    lookup = {c: i for i, c in enumerate(class_names)}
    docs = _featurize_all((e.text for e in examples), hp)
    y = [lookup[l] for l in labels]

    stage1 = NgramLinearModel(
        bucket_count=hp.bucket_count,
        dim=hp.dim,
        ngram=hp.n,
        embedding=pretrained.embedding.copy(),
        output_weights=np.zeros((hp.dim, len(class_names))),
        output_bias=np.zeros(len(class_names)),
        class_names=class_names,
        hyperparams=asdict(hp),
    )
    stage1.loss_history = _sgd(stage1, docs, y, hp.lr, hp.stage1_epochs, hp.seed, train_embedding=False)
    if not hp.chain_thaw:
        return (stage1, stage1) if return_stages else stage1

    stage2 = stage1.copy()
    stage2.loss_history = stage1.loss_history + _sgd(
        stage2, docs, y, hp.stage2_lr, hp.stage2_epochs, hp.seed + 1, train_embedding=True
    )
    return (stage1, stage2) if return_stages else stage2


def consensus_filter(ratings: Iterable[tuple[str, Sequence[str]]]) -> list[LabeledExample]:
    """Keep texts whose three ratings agree."""
    kept = []
    for text, labels in ratings:
        if len(labels) != 3:
            raise ValueError(f"expected 3 ratings, got {len(labels)} for {text!r}")
        if labels[0] == labels[1] == labels[2]:
            kept.append(LabeledExample(text, labels[0]))
    return kept


def label_counts(examples: Iterable[LabeledExample]) -> Counter:
    return Counter(e.label for e in examples)


def with_seed(hp: Hyperparams, seed: int) -> Hyperparams:
    return replace(hp, seed=seed)
