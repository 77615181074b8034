"""Three-class vaccine stance classifier built on hashed n-gram embeddings."""

from .evaluation import EvalReport, cross_validate, micro_f1_from_counts
from .features import featurize, fnv1a_64, tokenize
from .model import STANCE_CLASSES, LabeledExample, NgramLinearModel, StanceScore, predict
from .training import (
    DEFAULT_HASHTAGS,
    Hyperparams,
    consensus_filter,
    pretrain_hashtags,
    train,
    transfer,
    upsample_balance,
)

__all__ = [
    "DEFAULT_HASHTAGS",
    "EvalReport",
    "Hyperparams",
    "LabeledExample",
    "NgramLinearModel",
    "STANCE_CLASSES",
    "StanceScore",
    "consensus_filter",
    "cross_validate",
    "featurize",
    "fnv1a_64",
    "micro_f1_from_counts",
    "predict",
    "pretrain_hashtags",
    "tokenize",
    "train",
    "transfer",
    "upsample_balance",
]
