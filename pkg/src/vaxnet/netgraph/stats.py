"""Degree statistics, stretched-exponential fit, edge-set Jaccard and assortativity."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .graph import AggregateGraph, WindowedGraph


@dataclass
class DegreeDistribution:
    counts: dict[int, int]
    ccdf: list[tuple[int, float]]
    excluded: int = 0

    @property
    def n(self) -> int:
        return sum(self.counts.values())


def degree_distribution(g: AggregateGraph, truncate_at: Optional[int] = 500) -> DegreeDistribution:
    """Degree histogram and CCDF P(K >= k) over nodes with degree <= ``truncate_at``."""
    degrees = list(g.degrees().values())
    kept = [d for d in degrees if truncate_at is None or d <= truncate_at]
    counts = dict(sorted(Counter(kept).items()))
    n = len(kept)
    ccdf = []
    remaining = n
    for k, c in counts.items():
        ccdf.append((k, remaining / n))
        remaining -= c
    return DegreeDistribution(counts, ccdf, excluded=len(degrees) - n)


def ccdf_from_samples(samples) -> list[tuple[int, float]]:
    values, counts = np.unique(np.asarray(samples), return_counts=True)
    tail = np.cumsum(counts[::-1])[::-1] / counts.sum()
    return [(int(v), float(t)) for v, t in zip(values, tail)]


@dataclass(frozen=True)
class WeibullFit:
    lam: float
    beta: float
    residual: float
    points: int

    def ccdf(self, k) -> np.ndarray:
        return np.exp(-((np.asarray(k, dtype=float) / self.lam) ** self.beta))


def fit_stretched_exponential(ccdf: Sequence[tuple[float, float]]) -> WeibullFit:
    """Fit P(K >= k) = exp(-(k / lam) ** beta) by least squares on
    log(-log P) = beta * log k - beta * log lam.

    Only points with k > 0 and 0 < P < 1 are used. ``residual`` is the RMS
    error of the linearized fit.
    """
    pts = [(float(k), float(p)) for k, p in ccdf if k > 0 and 0.0 < p < 1.0]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 usable CCDF points, got {len(pts)}")
    x = np.log([k for k, _ in pts])
    if np.ptp(x) == 0.0:
        raise ValueError("degenerate CCDF: all degrees equal")
    y = np.log(-np.log([p for _, p in pts]))
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    if not slope > 0:
        raise ValueError(f"fit produced non-positive stretch exponent {slope}")
    lam = float(np.exp(-intercept / slope))
    residual = float(np.sqrt(np.mean((design @ np.array([slope, intercept]) - y) ** 2)))
    if not np.isfinite(lam) or lam <= 0:
        raise ValueError("fit produced an invalid scale")
    return WeibullFit(lam=lam, beta=float(slope), residual=residual, points=len(pts))


def edge_jaccard(a: frozenset, b: frozenset) -> float:
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def edge_jaccard_matrix(graphs: Sequence[WindowedGraph]) -> np.ndarray:
    """Pairwise Jaccard index of window edge sets.

    Two empty windows compare as 0 off the diagonal; the diagonal is always 1.
    """
    if not graphs:
        raise ValueError("need at least one window graph")
    m = len(graphs)
    out = np.eye(m)
    for i in range(m):
        for j in range(i + 1, m):
            out[i, j] = out[j, i] = edge_jaccard(graphs[i].edges, graphs[j].edges)
    return out


def mixing_counts(g: AggregateGraph, labels: Mapping[str, str]) -> tuple[np.ndarray, list[str]]:
    """Symmetric endpoint-label count matrix; each edge is counted in both directions."""
    cats = sorted({str(labels[n]) for e in g.edges for n in e})
    pos = {c: i for i, c in enumerate(cats)}
    counts = np.zeros((len(cats), len(cats)), dtype=np.int64)
    for u, v in g.edges:
        i, j = pos[str(labels[u])], pos[str(labels[v])]
        counts[i, j] += 1
        counts[j, i] += 1
    return counts, cats


def mixing_matrix(g: AggregateGraph, labels: Mapping[str, str]) -> tuple[np.ndarray, list[str]]:
    counts, cats = mixing_counts(g, labels)
    total = counts.sum()
    return (counts / total if total else counts.astype(float)), cats


def assortativity_binary(g: AggregateGraph, labels: Optional[Mapping[str, str]] = None) -> float:
    """Categorical assortativity r = (tr e - sum a_i b_i) / (1 - sum a_i b_i).

    Labels default to the node attributes of ``g``. Evaluated on integer
    counts, so the homophilous and fully disassortative extremes come out as
    exactly 1 and -1.
    """
    if labels is None:
        labels = g.nodes
    if not g.edges:
        raise ValueError("assortativity needs at least one edge")
    missing = [n for e in g.edges for n in e if labels.get(n) is None]
    if missing:
        raise ValueError(f"unlabeled node(s): {sorted(set(missing))[:5]}")
    counts, cats = mixing_counts(g, labels)
    if len(cats) < 2:
        raise ValueError("assortativity undefined: only one label among edge endpoints")
    total = int(counts.sum())
    rows = [int(x) for x in counts.sum(axis=1)]
    cols = [int(x) for x in counts.sum(axis=0)]
    expected = sum(a * b for a, b in zip(rows, cols))
    same = int(np.trace(counts))
    return (total * same - expected) / (total * total - expected)
