import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import assortativity_bruteforce, mutual_edges, union_find_components
from vaxnet.corpus import Interaction, TimeWindow, TweetRecord, extract_interactions, read_records, window_schedule
from vaxnet.netgraph import (
    AggregateGraph,
    WindowedGraph,
    aggregate,
    assortativity_binary,
    build_window_graph,
    build_window_graphs,
    degree_distribution,
    edge_jaccard_matrix,
    export_graph,
    filter_repeated_edges,
    fit_stretched_exponential,
    giant_component,
    import_graph,
    induce_labeled_subgraph,
    layout_force_directed,
)
from vaxnet.netgraph.graph import connected_components, merge_aggregates
from vaxnet.netgraph.stats import ccdf_from_samples, edge_jaccard

W0 = TimeWindow(0, 0.0, 100.0)
W1 = TimeWindow(1, 100.0, 200.0)


def _graph(edges, labels=None):
    nodes = {n: (labels or {}).get(n) for e in edges for n in e}
    return AggregateGraph(nodes=nodes, edges={tuple(sorted(e)): frozenset({0}) for e in edges})


def test_mutual_rule_examples():
    g = build_window_graph([Interaction("u", "v", 1), Interaction("v", "u", 5)], W0)
    assert g.edges == {("u", "v")}
    assert build_window_graph([Interaction("u", "v", 1)], W0).edges == frozenset()
    events = [Interaction("u", "v", 50), Interaction("v", "u", 150)]
    assert all(not g.edges for g in (build_window_graph(events, W0), build_window_graph(events, W1)))


def test_mention_and_retweet_mix():
    recs = [TweetRecord("1", "u", 10, "x", mention_ids=["v"]), TweetRecord("2", "v", 20, "y", retweet_of="u")]
    events = [e for r in recs for e in extract_interactions(r)]
    assert build_window_graph(events, W0).edges == {("u", "v")}


event_lists = st.lists(
    st.tuples(st.sampled_from("abcdef"), st.sampled_from("abcdef"), st.floats(0, 99.9)), max_size=40
)


@given(event_lists, st.randoms())
def test_window_graph_symmetry_and_oracle(raw, rnd):
    events = [Interaction(*e) for e in raw]
    g = build_window_graph(events, W0)
    assert set(g.edges) == mutual_edges(raw, 0, 100)
    shuffled = list(events)
    rnd.shuffle(shuffled)
    assert build_window_graph(shuffled, W0) == g
    flipped = [Interaction(e.target, e.source, e.timestamp) for e in events]
    twice = [Interaction(e.target, e.source, e.timestamp) for e in flipped]
    assert build_window_graph(twice, W0) == g
    assert build_window_graph(flipped, W0).edges == g.edges  # mutuality is direction-free


def test_filter_repeated_edges():
    agg = AggregateGraph(edges={("a", "b"): frozenset({0, 2}), ("c", "d"): frozenset({1})})
    out = filter_repeated_edges(agg, 2)
    assert set(out.edges) == {("a", "b")} and set(out.nodes) == {"a", "b"}
    assert filter_repeated_edges(agg, 1).edges == agg.edges


def test_filter_matches_recount(fixtures):
    records = read_records(fixtures / "corpus.jsonl")
    events = [e for r in records for e in extract_interactions(r)]
    sched = window_schedule()
    windows = build_window_graphs(events, sched)
    agg = aggregate(windows)
    raw = [(e.source, e.target, e.timestamp) for e in events]
    per_window = [mutual_edges(raw, w.start, w.end) for w in sched]
    counts = {}
    for edges in per_window:
        for e in edges:
            counts[e] = counts.get(e, 0) + 1
    assert set(filter_repeated_edges(agg, 2).edges) == {e for e, c in counts.items() if c >= 2}
    assert merge_aggregates(aggregate(windows[:6]), aggregate(windows[6:])).edges == agg.edges


def test_induce_labeled_subgraph():
    g = _graph([("a", "b"), ("b", "c")])
    out = induce_labeled_subgraph(g, {"a": "Anti", "b": "Pro", "c": "Unlabeled"})
    assert set(out.nodes) == {"a", "b"} and set(out.edges) == {("a", "b")}
    full = induce_labeled_subgraph(g, {"a": "Anti", "b": "Pro", "c": "Pro"})
    assert set(full.edges) == set(g.edges)


def test_giant_component_examples():
    g = _graph([("a", "b"), ("b", "c")])
    assert set(giant_component(g).nodes) == {"a", "b", "c"}
    g = _graph([("x", "y"), ("y", "z"), ("a", "b")])
    assert set(giant_component(g).nodes) == {"x", "y", "z"}
    tie = _graph([("c", "d"), ("a", "b")])
    assert set(giant_component(tie).nodes) == {"a", "b"}
    with pytest.raises(ValueError):
        giant_component(AggregateGraph())


def test_giant_component_union_find():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(2, 40))
        edges = {tuple(sorted((f"n{a}", f"n{b}"))) for a, b in rng.integers(0, n, size=(n, 2)) if a != b}
        if not edges:
            continue
        g = _graph(edges)
        comps = union_find_components(sorted(g.nodes), edges)
        best = min(comps, key=lambda c: (-len(c), min(c)))
        assert set(giant_component(g).nodes) == best
        assert sorted(map(sorted, connected_components(g))) == sorted(map(sorted, comps))


def test_degree_distribution():
    tri = _graph([("a", "b"), ("b", "c"), ("a", "c")])
    d = degree_distribution(tri)
    assert d.counts == {2: 3} and d.ccdf == [(2, 1.0)]
    star = _graph([("hub", f"l{i:03d}") for i in range(600)])
    d = degree_distribution(star, 500)
    assert d.counts == {1: 600} and d.excluded == 1
    ccdf = [p for _, p in degree_distribution(_graph([("a", "b"), ("b", "c"), ("c", "d"), ("b", "d")])).ccdf]
    assert all(b <= a for a, b in zip(ccdf, ccdf[1:]))


def test_weibull_exact_and_errors():
    ks = np.arange(1, 400)
    ccdf = [(int(k), math.exp(-((k / 10) ** 0.5))) for k in ks]
    fit = fit_stretched_exponential(ccdf)
    assert abs(fit.lam - 10) < 1e-6 and abs(fit.beta - 0.5) < 1e-6
    with pytest.raises(ValueError):
        fit_stretched_exponential([(1, 1.0), (2, 0.5)])
    with pytest.raises(ValueError):
        fit_stretched_exponential([(3, 0.5), (3, 0.5), (3, 0.5)])


def test_weibull_exponential_special_case():
    rng = np.random.default_rng(1)
    samples = np.ceil(rng.exponential(20, size=50_000)).astype(int)
    fit = fit_stretched_exponential(ccdf_from_samples(samples))
    assert abs(fit.beta - 1) < 0.1


def test_jaccard_examples():
    a = frozenset({("a", "b"), ("b", "c")})
    b = frozenset({("b", "c"), ("c", "d")})
    assert edge_jaccard(a, b) == pytest.approx(1 / 3)
    m = edge_jaccard_matrix([WindowedGraph(0, frozenset("abc"), a), WindowedGraph(1, frozenset("abc"), a)])
    assert m.tolist() == [[1, 1], [1, 1]]
    m = edge_jaccard_matrix([WindowedGraph(0, frozenset(), frozenset()), WindowedGraph(1, frozenset(), frozenset())])
    assert m.tolist() == [[1, 0], [0, 1]]
    disjoint = frozenset({("x", "y")})
    assert edge_jaccard(a, disjoint) == 0
    with pytest.raises(ValueError):
        edge_jaccard_matrix([])


def _random_labeled(rng, n):
    labels = {f"n{i}": ("Anti" if rng.random() < 0.4 else "Pro") for i in range(n)}
    p = rng.uniform(0.05, 0.5)
    edges = [(u, v) for u, v in combinations(sorted(labels), 2) if rng.random() < p]
    return edges, labels


def test_assortativity_matches_bruteforce():
    rng = np.random.default_rng(2)
    checked = 0
    while checked < 50:
        edges, labels = _random_labeled(rng, int(rng.integers(4, 51)))
        if not edges or len({labels[n] for e in edges for n in e}) < 2:
            continue
        g = _graph(edges, labels)
        r = assortativity_binary(g)
        assert abs(r - assortativity_bruteforce(edges, labels)) <= 1e-12
        assert -1 <= r <= 1
        swapped = {k: ("Pro" if v == "Anti" else "Anti") for k, v in labels.items()}
        assert abs(assortativity_binary(g, swapped) - r) <= 1e-12
        checked += 1


def test_assortativity_extremes_and_errors():
    cliques = [(f"a{i}", f"a{j}") for i, j in combinations(range(4), 2)]
    cliques += [(f"p{i}", f"p{j}") for i, j in combinations(range(5), 2)]
    labels = {n: ("Anti" if n[0] == "a" else "Pro") for e in cliques for n in e}
    assert assortativity_binary(_graph(cliques, labels)) == 1.0
    bip = [(f"a{i}", f"p{j}") for i in range(3) for j in range(4)]
    labels = {n: ("Anti" if n[0] == "a" else "Pro") for e in bip for n in e}
    assert assortativity_binary(_graph(bip, labels)) == -1.0
    with pytest.raises(ValueError):
        assortativity_binary(_graph([("a", "b")], {"a": "Pro", "b": "Pro"}))
    with pytest.raises(ValueError):
        assortativity_binary(AggregateGraph())


def test_layout():
    assert layout_force_directed(AggregateGraph(nodes={"x": None})) == {"x": (0.0, 0.0)}
    pair = layout_force_directed(_graph([("a", "b")]), iterations=500)
    (xa, ya), (xb, yb) = pair["a"], pair["b"]
    assert math.hypot(xa - xb, ya - yb) == pytest.approx(1.0, abs=0.02)
    g = _graph([("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c")])
    c1 = layout_force_directed(g, seed=4)
    assert c1 == layout_force_directed(g, seed=4)
    assert all(math.isfinite(v) for xy in c1.values() for v in xy)


def test_export_roundtrip(tmp_path):
    g = AggregateGraph(
        nodes={"a": "Anti", "b": "Pro", "c": None},
        edges={("a", "b"): frozenset({0, 3}), ("b", "c"): frozenset({2})},
    )
    coords = layout_force_directed(g, seed=1)
    export_graph(g, tmp_path / "g.graphml", coords=coords)
    back, back_coords = import_graph(tmp_path / "g.graphml")
    assert back == g
    assert back_coords == coords
    export_graph(g, tmp_path / "h.graphml", coords=coords)
    assert (tmp_path / "g.graphml").read_bytes() == (tmp_path / "h.graphml").read_bytes()
    export_graph(AggregateGraph(nodes={"z": None}), tmp_path / "e.graphml")
    assert import_graph(tmp_path / "e.graphml")[0] == AggregateGraph(nodes={"z": None})
