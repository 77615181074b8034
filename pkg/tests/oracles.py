"""Slow, obviously-correct reference implementations used to cross-check the package."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations


def gini_pairwise(values) -> float:
    """G = sum_ij |x_i - x_j| / (2 n^2 mean), O(n^2)."""
    xs = [float(v) for v in values]
    n = len(xs)
    mean = sum(xs) / n
    total = sum(abs(a - b) for a in xs for b in xs)
    return total / (2 * n * n * mean)


def share_for_half_scan(values) -> float:
    xs = sorted((float(v) for v in values), reverse=True)
    total = sum(xs)
    acc = 0.0
    for k, x in enumerate(xs, start=1):
        acc += x
        if acc >= total / 2:
            return k / len(xs)
    return 1.0


def assortativity_bruteforce(edges, labels) -> float:
    """Newman's categorical r from an explicit e_ij table built edge by edge, in exact rationals."""
    cats = sorted({labels[n] for e in edges for n in e})
    e = {(a, b): Fraction(0) for a in cats for b in cats}
    m = len(edges)
    for u, v in edges:
        e[(labels[u], labels[v])] += Fraction(1, 2 * m)
        e[(labels[v], labels[u])] += Fraction(1, 2 * m)
    trace = sum(e[(c, c)] for c in cats)
    a = {c: sum(e[(c, d)] for d in cats) for c in cats}
    b = {c: sum(e[(d, c)] for d in cats) for c in cats}
    ab = sum(a[c] * b[c] for c in cats)
    return float((trace - ab) / (1 - ab))


def union_find_components(nodes, edges) -> list[set]:
    parent = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    groups: dict = {}
    for n in nodes:
        groups.setdefault(find(n), set()).add(n)
    return list(groups.values())


def jaccard_sets(a, b) -> float:
    a, b = set(a), set(b)
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def mutual_edges(events, start, end) -> set:
    """Edges {u, v} with u->v and v->u inside [start, end)."""
    directed = {(s, t) for s, t, ts in events if start <= ts < end and s != t}
    return {tuple(sorted((s, t))) for s, t in directed if (t, s) in directed}


def all_pairs(xs):
    return list(combinations(xs, 2))
