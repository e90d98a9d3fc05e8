"""Upper bounds on fixation probabilities for structured graph classes.

Four closed-form bounds cover the {temperature, uniform} initialization x
{self-loop-free, unweighted} structure grid, backed by a per-vertex
comparison-chain bound: starting from one mutant at u, the probability the
mutant count ever reaches n is at most x/(x+y), where x and y are the
one-step probabilities of the count going up and down.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exact import three_state_bound
from .graph_core import ClassificationFlags, GraphError, WeightedGraph, classify, temperature


def _check_r(r: float) -> None:
    if r < 1:
        raise ValueError("bounds require advantageous fitness r >= 1")


def temp_bound_selfloopfree(r: float) -> float:
    """Temperature initialization, self-loop-free graphs: 1 - 1/(r+1)."""
    _check_r(r)
    return 1.0 - 1.0 / (r + 1.0)


def temp_bound_unweighted(r: float) -> float:
    """Temperature initialization, unweighted graphs: 1 - 1/(4r+2)."""
    _check_r(r)
    return 1.0 - 1.0 / (4.0 * r + 2.0)


def uniform_bound_selfloopfree(r: float, c: int) -> float:
    """Uniform initialization, self-loop-free graphs of degree <= c."""
    _check_r(r)
    if c < 1:
        raise ValueError("degree bound c must be at least 1")
    return 1.0 - 1.0 / (c + r * c * c)


def uniform_bound_unweighted(r: float, c: int) -> float:
    """Uniform initialization, unweighted graphs of degree <= c."""
    _check_r(r)
    if c < 1:
        raise ValueError("degree bound c must be at least 1")
    return 1.0 - 1.0 / (1.0 + r * c)


def vertex_upper_bound(g: WeightedGraph, u: int, r: float) -> tuple[float, float, float]:
    """(x, y, x/(x+y)) for the single-mutant configuration {u}.

    x = P[count goes 1 -> 2] = r*(1 - W[u,u]) / F and
    y = P[count goes 1 -> 0] = (T(u) - W[u,u]) / F with F = r + n - 1.
    """
    if r <= 0:
        raise ValueError("fitness r must be positive")
    F = r + (g.n - 1)
    wuu = g.transition_prob(u, u)
    x = r * (1.0 - wuu) / F
    y = (temperature(g, u) - wuu) / F
    return x, y, three_state_bound(x, y)


def t_prime(g: WeightedGraph, u: int) -> float:
    """Sum over non-self in-neighbors v of 1/|Out(v)| (unweighted graphs)."""
    if not classify(g).unweighted:
        raise GraphError("t_prime is defined for unweighted graphs only")
    total = 0.0
    for v in g.in_neighbors(u):
        v = int(v)
        if v != u:
            total += 1.0 / len(g.out_neighbors(v))
    return total


def hot_vertices(g: WeightedGraph) -> set[int]:
    """Vertices receiving weight >= 1/c from someone, c the degree bound."""
    flags = classify(g)
    if not flags.self_loop_free:
        raise GraphError("hot_vertices is defined for self-loop-free graphs only")
    gamma = 1.0 / flags.max_degree
    hot: set[int] = set()
    for u in range(g.n):
        targets, _ = g.out_edges(u)
        for v in targets.tolist():
            if g.transition_prob(u, v) >= gamma - 1e-15:
                hot.add(v)
    return hot


@dataclass
class BoundsReport:
    flags: ClassificationFlags
    applicable: list[tuple[str, float]] = field(default_factory=list)
    per_vertex: list[tuple[int, float, float, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "flags": {
                "self_loop_free": self.flags.self_loop_free,
                "unweighted": self.flags.unweighted,
                "undirected": self.flags.undirected,
                "max_degree": self.flags.max_degree,
            },
            "applicable": [{"bound": name, "value": v} for name, v in self.applicable],
            "per_vertex": [
                {"u": u, "x": x, "y": y, "bound": b} for u, x, y, b in self.per_vertex
            ],
        }


def bounds_report(g: WeightedGraph, r: float) -> BoundsReport:
    """Evaluate every bound whose structural hypothesis the graph satisfies."""
    flags = classify(g)
    report = BoundsReport(flags=flags)
    if r >= 1:
        c = flags.max_degree
        if flags.self_loop_free:
            report.applicable.append(
                ("temperature_selfloopfree", temp_bound_selfloopfree(r))
            )
            report.applicable.append(
                ("uniform_selfloopfree", uniform_bound_selfloopfree(r, c))
            )
        if flags.unweighted:
            report.applicable.append(("temperature_unweighted", temp_bound_unweighted(r)))
            report.applicable.append(("uniform_unweighted", uniform_bound_unweighted(r, c)))
    for u in range(g.n):
        x, y, b = vertex_upper_bound(g, u, r)
        report.per_vertex.append((u, x, y, b))
    return report
