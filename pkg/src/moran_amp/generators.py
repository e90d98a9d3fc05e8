"""Deterministic graph-family generators and JSON (de)serialization.

All families are undirected and unweighted (unit weights) with optional unit
self-loops, so row normalization reproduces uniform neighbor choice exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph_core import NEG_INF, GraphError, WeightedGraph


@dataclass(frozen=True)
class FamilySpec:
    family: str  # complete | star | cycle | grid | random
    n: int
    self_loops: bool = False
    rows: Optional[int] = None
    cols: Optional[int] = None
    torus: bool = False
    p: Optional[float] = None
    seed: Optional[int] = None


def _finish(n: int, pairs: list[tuple[int, int]], self_loops: bool) -> WeightedGraph:
    edges = [(u, v, 1.0) for u, v in pairs]
    if self_loops:
        edges.extend((u, u, 1.0) for u in range(n))
    return WeightedGraph.from_undirected(n, edges)


def complete_graph(n: int, self_loops: bool = False) -> WeightedGraph:
    if n < 2:
        raise GraphError("complete graph needs n >= 2")
    return _finish(n, [(u, v) for u in range(n) for v in range(u + 1, n)], self_loops)


def star_graph(n: int, self_loops: bool = False) -> WeightedGraph:
    """Center is vertex 0, leaves 1..n-1."""
    if n < 2:
        raise GraphError("star graph needs n >= 2")
    return _finish(n, [(0, v) for v in range(1, n)], self_loops)


def cycle_graph(n: int, self_loops: bool = False) -> WeightedGraph:
    if n < 3:
        raise GraphError("cycle graph needs n >= 3")
    return _finish(n, [(u, (u + 1) % n) for u in range(n)], self_loops)


def grid_graph(rows: int, cols: int, torus: bool = False, self_loops: bool = False) -> WeightedGraph:
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise GraphError("grid needs at least two vertices")
    if torus and (rows < 3 or cols < 3):
        raise GraphError("torus grid needs rows, cols >= 3")
    n = rows * cols
    idx = lambda i, j: i * cols + j
    pairs = []
    for i in range(rows):
        for j in range(cols):
            if j + 1 < cols:
                pairs.append((idx(i, j), idx(i, j + 1)))
            elif torus:
                pairs.append((idx(i, j), idx(i, 0)))
            if i + 1 < rows:
                pairs.append((idx(i, j), idx(i + 1, j)))
            elif torus:
                pairs.append((idx(i, j), idx(0, j)))
    return _finish(n, pairs, self_loops)


def random_connected_graph(n: int, p: float, seed: int, self_loops: bool = False) -> WeightedGraph:
    """G(n,p) edges unioned with a random spanning tree to force connectivity."""
    if n < 2:
        raise GraphError("random graph needs n >= 2")
    if not (0 < p <= 1):
        raise GraphError("edge probability must be in (0, 1]")
    rng = np.random.default_rng(seed)
    pairs = set()
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                pairs.add((u, v))
    # random spanning tree: attach each vertex (in random order) to an
    # already-placed vertex chosen uniformly
    order = rng.permutation(n)
    for i in range(1, n):
        u = int(order[i])
        v = int(order[rng.integers(0, i)])
        pairs.add((min(u, v), max(u, v)))
    return _finish(n, sorted(pairs), self_loops)


def generate(spec: FamilySpec) -> WeightedGraph:
    fam = spec.family.lower()
    if fam == "complete":
        return complete_graph(spec.n, spec.self_loops)
    if fam == "star":
        return star_graph(spec.n, spec.self_loops)
    if fam == "cycle":
        return cycle_graph(spec.n, spec.self_loops)
    if fam == "grid":
        rows = spec.rows if spec.rows is not None else int(math.isqrt(spec.n))
        cols = spec.cols if spec.cols is not None else rows
        if rows * cols != spec.n:
            raise GraphError("grid rows*cols must equal n")
        return grid_graph(rows, cols, spec.torus, spec.self_loops)
    if fam == "random":
        if spec.p is None or spec.seed is None:
            raise GraphError("random family needs p and seed")
        return random_connected_graph(spec.n, spec.p, spec.seed, spec.self_loops)
    raise GraphError(f"unknown graph family {spec.family!r}")


# -- JSON serialization ------------------------------------------------------------


def save_graph(g: WeightedGraph) -> bytes:
    flags = _structure_flags(g)
    edges = []
    if flags["directed"]:
        it = zip(g.esrc.tolist(), g.edst.tolist(), g.elogw.tolist())
    else:
        it = (
            (u, v, lw)
            for u, v, lw in zip(g.esrc.tolist(), g.edst.tolist(), g.elogw.tolist())
            if u <= v
        )
    for u, v, lw in it:
        edges.append([u, v, "-inf" if lw == NEG_INF else lw])
    doc = {
        "n": g.n,
        "directed": flags["directed"],
        "self_loops": flags["self_loops"],
        "edges": edges,
        "log_weights": True,
    }
    return (json.dumps(doc, indent=1) + "\n").encode()


def _structure_flags(g: WeightedGraph) -> dict:
    return {
        "directed": not g.is_undirected_symmetric(tol=0.0),
        "self_loops": any(int(u) == int(v) for u, v in zip(g.esrc, g.edst)),
    }


def load_graph(data: bytes) -> WeightedGraph:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GraphError(f"malformed graph JSON: {exc}") from exc
    for key in ("n", "edges"):
        if key not in doc:
            raise GraphError(f"graph JSON missing field {key!r}")
    n = doc["n"]
    if not isinstance(n, int) or n < 1:
        raise GraphError("graph JSON field 'n' must be a positive integer")
    directed = bool(doc.get("directed", True))
    log_weights = bool(doc.get("log_weights", False))

    edges: list[tuple[int, int, float]] = []
    seen = set()

    def push(u: int, v: int, lw: float, i: int) -> None:
        if (u, v) in seen:
            raise GraphError(f"edge {i}: duplicate edge ({u},{v})")
        seen.add((u, v))
        edges.append((u, v, lw))

    for i, e in enumerate(doc["edges"]):
        if not (isinstance(e, list) and len(e) == 3):
            raise GraphError(f"edge {i}: expected [u, v, weight]")
        u, v, w = e
        if not (isinstance(u, int) and isinstance(v, int)):
            raise GraphError(f"edge {i}: endpoints must be integers")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge {i}: endpoint outside [0,{n})")
        if log_weights:
            if w == "-inf":
                lw = NEG_INF
            elif isinstance(w, (int, float)):
                lw = float(w)
            else:
                raise GraphError(f"edge {i}: bad log weight {w!r}")
        else:
            if not isinstance(w, (int, float)) or w < 0:
                raise GraphError(f"edge {i}: weight must be a nonnegative number")
            lw = math.log2(w) if w > 0 else NEG_INF
        push(u, v, lw, i)
        if not directed and u != v:
            push(v, u, lw, i)
    try:
        return WeightedGraph(n, edges)
    except GraphError as exc:
        raise GraphError(f"graph JSON invalid: {exc}") from exc
