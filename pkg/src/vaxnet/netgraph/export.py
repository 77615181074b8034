"""GraphML and CSV output for graph artifacts."""

from __future__ import annotations

import csv
from typing import Mapping, Optional, Sequence

import networkx as nx
import numpy as np

from .graph import AggregateGraph
from .stats import DegreeDistribution, WeibullFit


def to_networkx(
    g: AggregateGraph,
    labels: Optional[Mapping[str, str]] = None,
    coords: Optional[Mapping[str, tuple[float, float]]] = None,
) -> nx.Graph:
    """Build a networkx graph with nodes and edges inserted in sorted order."""
    out = nx.Graph()
    for node in sorted(g.nodes):
        attrs = {}
        stance = labels.get(node) if labels is not None else g.nodes[node]
        if stance is not None:
            attrs["stance"] = str(getattr(stance, "value", stance))
        if coords is not None and node in coords:
            attrs["x"], attrs["y"] = (float(c) for c in coords[node])
        out.add_node(node, **attrs)
    for (u, v) in sorted(g.edges):
        windows = sorted(g.edges[(u, v)])
        out.add_edge(u, v, window_count=len(windows), windows=",".join(map(str, windows)))
    return out


def export_graph(
    g: AggregateGraph,
    path,
    labels: Optional[Mapping[str, str]] = None,
    coords: Optional[Mapping[str, tuple[float, float]]] = None,
) -> None:
    nx.write_graphml_xml(to_networkx(g, labels, coords), str(path), encoding="utf-8", prettyprint=True)


def import_graph(path) -> tuple[AggregateGraph, dict[str, tuple[float, float]]]:
    """Inverse of :func:`export_graph`; returns the graph and any stored coordinates."""
    raw = nx.read_graphml(str(path))
    nodes = {str(n): data.get("stance") for n, data in raw.nodes(data=True)}
    coords = {
        str(n): (float(data["x"]), float(data["y"]))
        for n, data in raw.nodes(data=True)
        if "x" in data and "y" in data
    }
    edges = {}
    for u, v, data in raw.edges(data=True):
        u, v = (str(u), str(v)) if str(u) < str(v) else (str(v), str(u))
        windows = frozenset(int(w) for w in str(data.get("windows", "")).split(",") if w != "")
        edges[(u, v)] = windows
    return AggregateGraph(nodes=nodes, edges=edges), coords


def write_degree_csv(dist: DegreeDistribution, path) -> None:
    ccdf = dict(dist.ccdf)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["degree", "count", "ccdf"])
        for k, c in dist.counts.items():
            w.writerow([k, c, f"{ccdf[k]:.8f}"])


def write_jaccard_csv(matrix: np.ndarray, path, window_ids: Optional[Sequence[int]] = None) -> None:
    ids = list(window_ids) if window_ids is not None else list(range(len(matrix)))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["window", *ids])
        for i, row in zip(ids, matrix):
            w.writerow([i, *(f"{x:.6f}" for x in row)])


def write_fit_csv(fit: Optional[WeibullFit], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "beta", "residual", "points"])
        if fit is not None:
            w.writerow([f"{fit.lam:.8f}", f"{fit.beta:.8f}", f"{fit.residual:.8f}", fit.points])


def write_layout_csv(coords: Mapping[str, tuple[float, float]], labels: Mapping[str, str], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "x", "y", "stance"])
        for node in sorted(coords):
            x, y = coords[node]
            stance = labels.get(node)
            w.writerow([node, f"{x:.6f}", f"{y:.6f}", "" if stance is None else str(getattr(stance, "value", stance))])
