"""Spring-electrical force layout with linear cooling."""

from __future__ import annotations

import numpy as np

from .graph import AggregateGraph


def layout_force_directed(
    g: AggregateGraph,
    iterations: int = 200,
    seed: int = 0,
    rest_length: float = 1.0,
    initial_temperature: float = 0.1,
) -> dict[str, tuple[float, float]]:
    """Place nodes so that connected pairs sit near ``rest_length`` apart.

    Edges pull with d^2 / k and every pair pushes with k^2 / d (k is the rest
    length), which balances at d = k for an isolated pair. Each node moves along
    its net force by at most the current temperature, and the temperature
    decays linearly from ``initial_temperature * sqrt(n) * k`` to zero.
    """
    nodes = sorted(g.nodes)
    n = len(nodes)
    if n == 0:
        return {}
    if n == 1:
        return {nodes[0]: (0.0, 0.0)}
    index = {node: i for i, node in enumerate(nodes)}
    edges = np.array([(index[u], index[v]) for u, v in sorted(g.edges)], dtype=np.int64).reshape(-1, 2)
    k = float(rest_length)
    rng = np.random.default_rng(seed)
    pos = rng.uniform(-1.0, 1.0, size=(n, 2)) * k * np.sqrt(n)
    t0 = initial_temperature * np.sqrt(n) * k

    for it in range(iterations):
        temperature = t0 * (1.0 - it / iterations)
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((delta**2).sum(axis=-1))
        np.fill_diagonal(dist, 1.0)
        dist = np.maximum(dist, 1e-9)
        # repulsion k^2/d along the unit vector delta/d
        disp = ((k * k / dist**2)[:, :, None] * delta).sum(axis=1)
        if len(edges):
            d = pos[edges[:, 0]] - pos[edges[:, 1]]
            length = np.maximum(np.sqrt((d**2).sum(axis=1)), 1e-9)
            pull = (length / k)[:, None] * d  # (length^2/k) * d/length
            np.add.at(disp, edges[:, 0], -pull)
            np.add.at(disp, edges[:, 1], pull)
        norm = np.sqrt((disp**2).sum(axis=1))
        step = np.minimum(norm, temperature) / np.maximum(norm, 1e-12)
        pos += disp * step[:, None]

    pos -= pos.mean(axis=0)
    return {node: (float(pos[i, 0]), float(pos[i, 1])) for node, i in index.items()}
