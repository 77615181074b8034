"""Stratified k-fold evaluation with counts aggregated across folds."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .model import LabeledExample
from .training import Hyperparams, train, with_seed

NOT_ANTI = "not_anti"


@dataclass
class EvalReport:
    counts: dict[str, dict[str, int]]
    micro_f1: float
    accuracy: float
    fold_count: int
    n: int
    binary: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "binary": self.binary,
            "fold_count": self.fold_count,
            "n": self.n,
            "micro_f1": self.micro_f1,
            "accuracy": self.accuracy,
            "counts": {c: dict(v) for c, v in sorted(self.counts.items())},
            **({"extra": self.extra} if self.extra else {}),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def micro_f1_from_counts(tp: int, fp: int, fn: int) -> float:
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def score_predictions(y_true: Sequence[str], y_pred: Sequence[str], classes: Sequence[str]) -> dict:
    """Per-class TP/FP/FN for single-label predictions."""
    counts = {c: {"tp": 0, "fp": 0, "fn": 0} for c in classes}
    for t, p in zip(y_true, y_pred, strict=True):
        if t == p:
            counts[t]["tp"] += 1
        else:
            counts.setdefault(p, {"tp": 0, "fp": 0, "fn": 0})["fp"] += 1
            counts[t]["fn"] += 1
    return counts


def report_from_counts(counts: dict, fold_count: int, binary: bool = False) -> EvalReport:
    tp = sum(c["tp"] for c in counts.values())
    fp = sum(c["fp"] for c in counts.values())
    fn = sum(c["fn"] for c in counts.values())
    n = tp + fn
    return EvalReport(
        counts=counts,
        micro_f1=micro_f1_from_counts(tp, fp, fn),
        accuracy=tp / n if n else 0.0,
        fold_count=fold_count,
        n=n,
        binary=binary,
    )


def stratified_folds(labels: Sequence[str], k: int, seed: int) -> list[int]:
    """Fold id per example; each class is shuffled then dealt round-robin."""
    by_class = defaultdict(list)
    for i, y in enumerate(labels):
        by_class[y].append(i)
    for y, members in by_class.items():
        if len(members) < k:
            raise ValueError(f"class {y!r} has {len(members)} examples, fewer than k={k}")
    rng = np.random.default_rng(seed)
    fold_of = [0] * len(labels)
    offset = 0
    for y in sorted(by_class):
        members = by_class[y]
        for j, pos in enumerate(rng.permutation(len(members))):
            # offset staggers classes so small folds do not all start at fold 0
            fold_of[members[pos]] = (j + offset) % k
        offset += len(members)
    return fold_of


def collapse_binary(examples: Sequence[LabeledExample]) -> list[LabeledExample]:
    return [e if e.label == "anti" else LabeledExample(e.text, NOT_ANTI) for e in examples]


def cross_validate(
    examples: Sequence[LabeledExample],
    k: int = 10,
    binary: bool = False,
    seed: int = 0,
    fit: Optional[Callable] = None,
    hp: Hyperparams = Hyperparams(),
) -> EvalReport:
    """Stratified k-fold CV; TP/FP/FN are summed over folds before the F1 ratio.

    ``fit`` maps a training list to anything with ``predict_label(text)``; by
    default a fresh model is trained with ``hp`` (its seed replaced by ``seed``).
    In binary mode labels collapse to ``anti`` vs ``not_anti`` before fitting.
    """
    examples = list(examples)
    if k < 2:
        raise ValueError("k must be >= 2")
    if binary:
        examples = collapse_binary(examples)
    if fit is None:
        def fit(train_set):
            return train(train_set, with_seed(hp, seed))

    labels = [e.label for e in examples]
    classes = sorted(set(labels))
    folds = stratified_folds(labels, k, seed)
    y_true, y_pred = [], []
    for fold in range(k):
        train_set = [e for e, f in zip(examples, folds) if f != fold]
        test_set = [e for e, f in zip(examples, folds) if f == fold]
        model = fit(train_set)
        y_true.extend(e.label for e in test_set)
        y_pred.extend(model.predict_label(e.text) for e in test_set)
    return report_from_counts(score_predictions(y_true, y_pred, classes), k, binary)
