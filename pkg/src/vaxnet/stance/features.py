"""Tokenization and hashed n-gram features."""

from __future__ import annotations

import re
from functools import lru_cache

import numpy as np

USER_TOKEN = "⟨user⟩"
URL_TOKEN = "⟨url⟩"

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1

_TOKEN_RE = re.compile(
    r"(?P<url>(?:https?://|www\.)\S+)"
    r"|(?P<user>@\w+)"
    r"|(?P<tag>#\w+)"
    r"|(?P<word>\w+(?:'\w+)*)"
    r"|(?P<punct>[^\w\s])",
    re.UNICODE,
)


def tokenize(text: str) -> list[str]:
    """Lowercase, placeholder mentions and URLs, split punctuation off.

    Hashtags stay single tokens with their leading ``#``.

    >>> tokenize("Vaccines WORK!")
    ['vaccines', 'work', '!']
    """
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind == "url":
            tokens.append(URL_TOKEN)
        elif kind == "user":
            tokens.append(USER_TOKEN)
        else:
            tokens.append(m.group().lower())
    return tokens


@lru_cache(maxsize=1 << 18)
def fnv1a_64(s: str) -> int:
    h = FNV64_OFFSET
    for byte in s.encode("utf-8"):
        h ^= byte
        h = (h * FNV64_PRIME) & _MASK64
    return h


def ngrams(tokens: list[str], n: int) -> list[str]:
    """All 1..n-grams, joined by single spaces (tokens never contain spaces)."""
    if n < 1:
        raise ValueError("n-gram order must be >= 1")
    grams = []
    for order in range(1, n + 1):
        for i in range(len(tokens) - order + 1):
            grams.append(" ".join(tokens[i : i + order]))
    return grams


def featurize(tokens: list[str], n: int, bucket_count: int) -> np.ndarray:
    """Bucket indices (with multiplicity) of every 1..n-gram in ``tokens``."""
    if bucket_count < 1:
        raise ValueError("bucket_count must be >= 1")
    return np.array([fnv1a_64(g) % bucket_count for g in ngrams(tokens, n)], dtype=np.int64)
