"""Deterministic test corpora: seeded random graph collections and an
exhaustive enumerator of small connected unweighted graphs.

Everything here is a pure function of its arguments (fixed default seeds), so
bound-domination and calibration test sets are reproducible byte for byte.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from .graph_core import WeightedGraph

_BASE_SEED = 0x5EED2026


def _weight(rng: np.random.Generator) -> float:
    # spread weights over ~2 decades so normalization is exercised
    return float(2.0 ** rng.uniform(-3.0, 3.0))


def selfloopfree_weighted_digraphs(
    count: int = 200, max_n: int = 7, seed: int = _BASE_SEED
) -> list[WeightedGraph]:
    """Strongly connected weighted digraphs without self-loops.

    A random Hamiltonian cycle guarantees strong connectivity; extra arcs are
    added independently.
    """
    out = []
    for i in range(count):
        rng = np.random.default_rng((seed, 1, i))
        n = int(rng.integers(3, max_n + 1))
        edges = {}
        perm = rng.permutation(n)
        for j in range(n):
            u, v = int(perm[j]), int(perm[(j + 1) % n])
            edges[(u, v)] = _weight(rng)
        for u in range(n):
            for v in range(n):
                if u != v and (u, v) not in edges and rng.random() < 0.35:
                    edges[(u, v)] = _weight(rng)
        out.append(WeightedGraph.from_weights(n, [(u, v, w) for (u, v), w in edges.items()]))
    return out


def symmetric_selfloop_graphs(
    count: int = 20, max_n: int = 8, min_n: int = 3, seed: int = _BASE_SEED
) -> list[WeightedGraph]:
    """Connected symmetric weighted graphs with a weighted self-loop everywhere."""
    out = []
    for i in range(count):
        rng = np.random.default_rng((seed, 2, i))
        n = int(rng.integers(min_n, max_n + 1))
        pairs = set()
        order = rng.permutation(n)
        for j in range(1, n):
            u = int(order[j])
            v = int(order[rng.integers(0, j)])
            pairs.add((min(u, v), max(u, v)))
        for u in range(n):
            for v in range(u + 1, n):
                if (u, v) not in pairs and rng.random() < 0.4:
                    pairs.add((u, v))
        edges = [(u, v, _weight(rng)) for u, v in sorted(pairs)]
        edges.extend((u, u, _weight(rng)) for u in range(n))
        out.append(WeightedGraph.from_undirected(n, edges))
    return out


def degree_bounded_graphs(
    count: int = 60,
    max_degree: int = 4,
    max_n: int = 7,
    unweighted: bool = False,
    self_loops: bool = False,
    seed: int = _BASE_SEED,
) -> list[WeightedGraph]:
    """Connected undirected graphs with max degree (self-loops counted) <= c.

    Weighted variants stay self-loop-free; unweighted variants optionally get
    a random subset of self-loops within the degree budget.
    """
    out = []
    for i in range(count):
        rng = np.random.default_rng((seed, 3, i, int(unweighted), int(self_loops)))
        n = int(rng.integers(4, max_n + 1))
        struct_cap = max_degree - 1 if self_loops else max_degree
        deg = np.zeros(n, dtype=int)
        pairs = set()
        perm = rng.permutation(n)
        for j in range(n):  # cycle: degree 2 everywhere, connected
            u, v = int(perm[j]), int(perm[(j + 1) % n])
            pairs.add((min(u, v), max(u, v)))
            deg[u] += 1
            deg[v] += 1
        for _ in range(2 * n):
            u, v = int(rng.integers(n)), int(rng.integers(n))
            if u == v or (min(u, v), max(u, v)) in pairs:
                continue
            if deg[u] < struct_cap and deg[v] < struct_cap:
                pairs.add((min(u, v), max(u, v)))
                deg[u] += 1
                deg[v] += 1
        edges = [
            (u, v, 1.0 if unweighted else _weight(rng)) for u, v in sorted(pairs)
        ]
        if self_loops:
            loops = [u for u in range(n) if rng.random() < 0.5]
            edges.extend((u, u, 1.0) for u in loops)
        out.append(WeightedGraph.from_undirected(n, edges))
    return out


def _with_loop_subset(n: int, pairs: list[tuple[int, int]], mask: int) -> WeightedGraph:
    edges = [(u, v, 1.0) for u, v in pairs]
    edges.extend((u, u, 1.0) for u in range(n) if (mask >> u) & 1)
    return WeightedGraph.from_undirected(n, edges)


def exhaustive_unweighted(max_n: int = 6) -> Iterator[WeightedGraph]:
    """Every connected unweighted graph with 2..max_n vertices, crossed with
    every subset of unit self-loops."""
    import networkx as nx

    for G in nx.graph_atlas_g():
        n = G.number_of_nodes()
        if n < 2 or n > max_n:
            continue
        if not nx.is_connected(G):
            continue
        pairs = [(int(u), int(v)) for u, v in sorted(G.edges())]
        for mask in range(1 << n):
            yield _with_loop_subset(n, pairs, mask)


def unweighted_samples(
    count: int = 50, n: int = 7, seed: int = _BASE_SEED
) -> list[WeightedGraph]:
    """Random connected unweighted n-vertex graphs with random self-loop subsets."""
    out = []
    for i in range(count):
        rng = np.random.default_rng((seed, 4, i))
        pairs = set()
        order = rng.permutation(n)
        for j in range(1, n):
            u = int(order[j])
            v = int(order[rng.integers(0, j)])
            pairs.add((min(u, v), max(u, v)))
        for u in range(n):
            for v in range(u + 1, n):
                if (u, v) not in pairs and rng.random() < 0.3:
                    pairs.add((u, v))
        mask = int(rng.integers(0, 1 << n))
        out.append(_with_loop_subset(n, sorted(pairs), mask))
    return out
