"""Windowed mutual-interaction graphs and their statistics."""

from .export import export_graph, import_graph
from .graph import (
    AggregateGraph,
    WindowedGraph,
    aggregate,
    build_window_graph,
    build_window_graphs,
    filter_repeated_edges,
    giant_component,
    induce_labeled_subgraph,
)
from .layout import layout_force_directed
from .stats import (
    DegreeDistribution,
    WeibullFit,
    assortativity_binary,
    degree_distribution,
    edge_jaccard_matrix,
    fit_stretched_exponential,
)

__all__ = [
    "AggregateGraph",
    "DegreeDistribution",
    "WeibullFit",
    "WindowedGraph",
    "aggregate",
    "assortativity_binary",
    "build_window_graph",
    "build_window_graphs",
    "degree_distribution",
    "edge_jaccard_matrix",
    "export_graph",
    "filter_repeated_edges",
    "fit_stretched_exponential",
    "giant_component",
    "import_graph",
    "induce_labeled_subgraph",
    "layout_force_directed",
]
