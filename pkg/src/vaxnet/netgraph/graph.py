"""Mutual-interaction graphs per time window and their aggregate."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from ..corpus import Interaction, TimeWindow, bucket_interactions

Edge = tuple[str, str]


def edge_key(u: str, v: str) -> Edge:
    if u == v:
        raise ValueError(f"self-loop on {u!r}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class WindowedGraph:
    index: int
    nodes: frozenset[str]
    edges: frozenset[Edge]

    def __post_init__(self):
        for u, v in self.edges:
            if u == v:
                raise ValueError("self-loop in window graph")
            if u not in self.nodes or v not in self.nodes:
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside the node set")


@dataclass
class AggregateGraph:
    """Undirected graph whose edges remember the windows they occurred in.

    ``nodes`` maps author id to an optional stance attribute.
    """

    nodes: dict[str, Optional[str]] = field(default_factory=dict)
    edges: dict[Edge, frozenset[int]] = field(default_factory=dict)

    def __post_init__(self):
        for (u, v), windows in self.edges.items():
            if u == v:
                raise ValueError("self-loop in aggregate graph")
            if not windows:
                raise ValueError(f"edge ({u}, {v}) has an empty window set")
            self.nodes.setdefault(u, None)
            self.nodes.setdefault(v, None)

    def adjacency(self) -> dict[str, set[str]]:
        adj = {n: set() for n in self.nodes}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degrees(self) -> dict[str, int]:
        return {n: len(nbrs) for n, nbrs in self.adjacency().items()}

    def number_of_nodes(self) -> int:
        return len(self.nodes)

    def number_of_edges(self) -> int:
        return len(self.edges)


def build_window_graph(events: Iterable[Interaction], window: TimeWindow) -> WindowedGraph:
    """Edge {u, v} iff both u->v and v->u occur inside ``window``.

    Nodes are the endpoints of mutual edges.
    """
    directed = set()
    for ev in events:
        if ev.source != ev.target and window.contains(ev.timestamp):
            directed.add((ev.source, ev.target))
    edges = frozenset(edge_key(u, v) for u, v in directed if (v, u) in directed)
    nodes = frozenset(n for e in edges for n in e)
    return WindowedGraph(window.index, nodes, edges)


def build_window_graphs(
    events: Iterable[Interaction], schedule: Sequence[TimeWindow]
) -> list[WindowedGraph]:
    buckets = bucket_interactions(events, schedule)
    return [build_window_graph(buckets[w.index], w) for w in schedule]


def aggregate(graphs: Iterable[WindowedGraph]) -> AggregateGraph:
    windows: dict[Edge, set[int]] = defaultdict(set)
    for g in graphs:
        for e in g.edges:
            windows[e].add(g.index)
    return AggregateGraph(edges={e: frozenset(w) for e, w in sorted(windows.items())})


def merge_aggregates(*parts: AggregateGraph) -> AggregateGraph:
    windows: dict[Edge, set[int]] = defaultdict(set)
    nodes: dict[str, Optional[str]] = {}
    for part in parts:
        for n, attr in part.nodes.items():
            if nodes.get(n) is None:
                nodes[n] = attr
        for e, w in part.edges.items():
            windows[e] |= w
    return AggregateGraph(
        nodes=dict(sorted(nodes.items())),
        edges={e: frozenset(w) for e, w in sorted(windows.items())},
    )


def filter_repeated_edges(agg: AggregateGraph, min_windows: int = 2) -> AggregateGraph:
    """Keep edges seen in at least ``min_windows`` windows; drop nodes left isolated."""
    edges = {e: w for e, w in agg.edges.items() if len(w) >= min_windows}
    touched = {n for e in edges for n in e}
    nodes = {n: attr for n, attr in agg.nodes.items() if n in touched}
    return AggregateGraph(nodes=nodes, edges=edges)


def induce_labeled_subgraph(agg: AggregateGraph, labels: Mapping[str, str], keep=("Anti", "Pro")) -> AggregateGraph:
    """Restrict to nodes whose label is in ``keep``; the label becomes the node attribute."""
    keep = {str(getattr(k, "value", k)) for k in keep}

    def label_of(n):
        lab = labels.get(n)
        return None if lab is None else str(getattr(lab, "value", lab))

    nodes = {n: label_of(n) for n in agg.nodes if label_of(n) in keep}
    edges = {(u, v): w for (u, v), w in agg.edges.items() if u in nodes and v in nodes}
    return AggregateGraph(nodes=nodes, edges=edges)


def connected_components(agg: AggregateGraph) -> list[set[str]]:
    adj = agg.adjacency()
    seen: set[str] = set()
    components = []
    for start in sorted(adj):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        seen.add(start)
        while stack:
            for nbr in adj[stack.pop()]:
                if nbr not in seen:
                    seen.add(nbr)
                    comp.add(nbr)
                    stack.append(nbr)
        components.append(comp)
    return components


def giant_component(g: AggregateGraph) -> AggregateGraph:
    """Largest component by node count; ties go to the one holding the smallest id."""
    if not g.nodes:
        raise ValueError("graph is empty")
    best = min(connected_components(g), key=lambda c: (-len(c), min(c)))
    return AggregateGraph(
        nodes={n: a for n, a in g.nodes.items() if n in best},
        edges={(u, v): w for (u, v), w in g.edges.items() if u in best},
    )
