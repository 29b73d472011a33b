"""Seeded random DAGs and binary nets for tests, benchmarks and the CLI."""

from __future__ import annotations

import random
from typing import Sequence

import numpy as np

from .bayes import CPT, DiscreteBayesNet
from .dag import Dag

BINARY = ("false", "true")


def node_names(n: int, prefix: str = "v") -> list[str]:
    width = len(str(max(n - 1, 0)))
    return [f"{prefix}{i:0{width}d}" for i in range(n)]


def random_dag(nodes: Sequence[str], density: float, rng: random.Random) -> Dag:
    """Shuffle ``nodes`` into a random topological order, then keep each
    forward pair as an arc with probability ``density``."""
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {density}")
    order = list(nodes)
    rng.shuffle(order)
    arcs = []
    for i, u in enumerate(order):
        for v in order[i + 1 :]:
            if rng.random() < density:
                arcs.append((u, v))
    return Dag(order, arcs)


def complete_dag(nodes: Sequence[str]) -> Dag:
    """All forward arcs of ``nodes`` taken in the given order."""
    return Dag(nodes, [(u, v) for i, u in enumerate(nodes) for v in nodes[i + 1 :]])


def random_pair(rng: random.Random, max_nodes: int = 12, density: float | None = None,
                overlap: bool | None = None) -> tuple[Dag, Dag]:
    """Two random DAGs for fusion.

    With ``overlap`` (picked at random when None) the node sets are random,
    partially shared subsets of one pool; otherwise both use the same nodes.
    """
    if density is None:
        density = rng.choice([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    if overlap is None:
        overlap = rng.random() < 0.5
    pool = node_names(max_nodes)
    if overlap:
        v1 = rng.sample(pool, rng.randint(1, max_nodes))
        v2 = rng.sample(pool, rng.randint(1, max_nodes))
    else:
        v1 = v2 = pool[: rng.randint(1, max_nodes)]
    return random_dag(v1, density, rng), random_dag(v2, density, rng)


def random_cpts(dag: Dag, rng: random.Random, states: Sequence[str] = BINARY,
                extreme: float = 0.0) -> DiscreteBayesNet:
    """Attach random CPTs; ``extreme`` is the chance a column is deterministic."""
    k = len(states)
    cpts = {}
    for v in dag.sorted_nodes():
        parents = tuple(sorted(dag.predecessors(v)))
        shape = (k,) * len(parents) + (k,)
        values = np.empty(shape)
        for idx in np.ndindex(*shape[:-1]):
            if rng.random() < extreme:
                col = [0.0] * k
                col[rng.randrange(k)] = 1.0
            else:
                raw = [rng.random() + 1e-3 for _ in range(k)]
                total = sum(raw)
                col = [x / total for x in raw]
            values[idx] = col
        cpts[v] = CPT(parents, values)
    return DiscreteBayesNet(dag, {v: tuple(states) for v in dag.nodes}, cpts)
