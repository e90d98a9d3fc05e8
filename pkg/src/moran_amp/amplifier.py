"""Weight construction turning a low-diameter undirected graph with self-loops
into a selection amplifier.

Pipeline: BFS spanning tree -> separator via a bottom-up subtree-size rule ->
hub (root-to-separator paths, padded to target size) -> frontier, tree
distances, branch decomposition -> six weight rules.  The resulting hub is
isothermal and every hub vertex has total weight mu * 2^{-kappa} + nu, which
is checked exactly in rational arithmetic.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .graph_core import (
    GraphError,
    SymbolicTerm,
    WeightedGraph,
    eval_symbolic,
    log2_fraction,
)


def ceil_power(n: int, exponent: float) -> int:
    """ceil(n**exponent), robust to float noise at integer values."""
    return max(1, math.ceil(n**exponent - 1e-9))


@dataclass
class SpanningTree:
    root: int
    parent: np.ndarray  # -1 at the root
    depth: np.ndarray
    order: list[int]  # BFS visitation order
    children: list[list[int]]

    @property
    def n(self) -> int:
        return len(self.parent)


@dataclass
class AmplifierLayout:
    tree: SpanningTree
    separator: set[int]
    hub: set[int]
    frontier: set[int]
    lam: np.ndarray  # tree distance to the nearest frontier vertex
    mu: int
    nu: int
    branches: list[tuple[int, set[int]]]  # (branch root, members)
    epsilon: float
    c: float
    gamma: float
    hub_overflow: bool = False
    kappa: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "root": self.tree.root,
            "S": sorted(self.separator),
            "H": sorted(self.hub),
            "F": sorted(self.frontier),
            "lambda": self.lam.tolist(),
            "mu": self.mu,
            "nu": self.nu,
            "branches": [
                {"root": y, "members": sorted(members)} for y, members in self.branches
            ],
            "epsilon": self.epsilon,
            "kappa": self.kappa,
            "hub_overflow": self.hub_overflow,
        }


def _structural_neighbors(g: WeightedGraph, u: int) -> list[int]:
    return [int(v) for v in g.out_neighbors(u) if int(v) != u]


def bfs_spanning_tree(g: WeightedGraph, root: int) -> SpanningTree:
    """BFS tree over structural (non-self-loop) edges, ascending-index ties."""
    n = g.n
    if not (0 <= root < n):
        raise GraphError(f"root {root} outside [0,{n})")
    parent = np.full(n, -1, dtype=np.int64)
    depth = np.full(n, -1, dtype=np.int64)
    depth[root] = 0
    order = [root]
    children: list[list[int]] = [[] for _ in range(n)]
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        for v in sorted(_structural_neighbors(g, u)):
            if depth[v] < 0:
                depth[v] = depth[u] + 1
                parent[v] = u
                children[u].append(v)
                order.append(v)
    if len(order) < n:
        raise GraphError("graph is not connected; spanning tree impossible")
    return SpanningTree(root=root, parent=parent, depth=depth, order=order, children=children)


def partition_separator(t: SpanningTree, threshold: int) -> set[int]:
    """Bottom-up size accumulation; a vertex whose residual subtree exceeds
    the threshold joins the separator and detaches its subtree."""
    if threshold < 1:
        raise ValueError("threshold must be at least 1")
    size = np.ones(t.n, dtype=np.int64)
    S: set[int] = set()
    for u in reversed(t.order):
        for ch in t.children[u]:
            if ch not in S:
                size[u] += size[ch]
        if size[u] > threshold:
            S.add(u)
            size[u] = 0
    return S


def build_hub(t: SpanningTree, S: set[int], gamma: float) -> tuple[set[int], bool]:
    """Union of root-to-separator tree paths, padded along tree edges (BFS,
    ascending index) to min(n, ceil(n^{1-gamma})) vertices.

    Returns (hub, overflow) where overflow means the paths alone already
    exceeded the size target, in which case no padding happens.
    """
    target = min(t.n, ceil_power(t.n, 1.0 - gamma))
    H: set[int] = {t.root}
    for s in S:
        u = s
        while u != -1 and u not in H:
            H.add(u)
            u = int(t.parent[u])
    if len(H) > target:
        return H, True
    # pad: BFS from the current hub along tree edges, ascending index ties
    queue = sorted(H)
    head = 0
    while len(H) < target and head < len(queue):
        u = queue[head]
        head += 1
        adj = list(t.children[u])
        if t.parent[u] != -1:
            adj.append(int(t.parent[u]))
        for v in sorted(adj):
            if v not in H:
                H.add(v)
                queue.append(v)
                if len(H) == target:
                    break
    return H, False


def _tree_adjacency(t: SpanningTree) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(t.n)]
    for v in range(t.n):
        p = int(t.parent[v])
        if p != -1:
            adj[v].append(p)
            adj[p].append(v)
    return adj


def compute_layout(
    g: WeightedGraph, epsilon: float, root: int = 0, kappa: Optional[int] = None
) -> AmplifierLayout:
    """Run the full structural pipeline (everything except weight values)."""
    if not (0.0 < epsilon < 1.0):
        raise ValueError("epsilon must lie strictly between 0 and 1")
    if kappa is None:
        kappa = g.n
    if not g.is_undirected_symmetric():
        raise GraphError("construction requires symmetric weights")
    for u in range(g.n):
        if not g.has_edge(u, u):
            raise GraphError(f"construction requires a self-loop at every vertex ({u} lacks one)")
    n = g.n
    c = 2.0 * epsilon / 3.0
    gamma = epsilon / 3.0
    tree = bfs_spanning_tree(g, root)
    S = partition_separator(tree, ceil_power(n, 1.0 - c))
    H, overflow = build_hub(tree, S, gamma)
    if overflow:
        warnings.warn(
            "root-to-separator paths exceed the hub size target; hub kept connected",
            stacklevel=2,
        )

    frontier = {
        u for u in H if any(v not in H for v in _structural_neighbors(g, u))
    }

    # lambda: multi-source BFS over tree edges from the frontier
    lam = np.zeros(n, dtype=np.int64)
    if frontier:
        adj = _tree_adjacency(tree)
        lam[:] = -1
        queue = sorted(frontier)
        for u in queue:
            lam[u] = 0
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for v in adj[u]:
                if lam[v] < 0:
                    lam[v] = lam[u] + 1
                    queue.append(v)

    chl_count = np.zeros(n, dtype=np.int64)
    for u in H:
        chl_count[u] = sum(1 for ch in tree.children[u] if ch not in H)
    deg = np.zeros(n, dtype=np.int64)
    for u in H:
        deg[u] = sum(1 for v in _structural_neighbors(g, u) if v in H)
    mu = int(max((chl_count[u] for u in frontier), default=0))
    nu = int(max((deg[u] for u in H), default=0))

    # branches: tree components hanging off the hub
    branches: list[tuple[int, set[int]]] = []
    seen: set[int] = set()
    for y in tree.order:
        if y in H or y in seen:
            continue
        if int(tree.parent[y]) in H:
            members = set()
            stack = [y]
            while stack:
                v = stack.pop()
                members.add(v)
                seen.add(v)
                stack.extend(ch for ch in tree.children[v] if ch not in H)
            branches.append((y, members))
    assert seen | H == set(range(n))

    return AmplifierLayout(
        tree=tree,
        separator=S,
        hub=H,
        frontier=frontier,
        lam=lam,
        mu=mu,
        nu=nu,
        branches=branches,
        epsilon=epsilon,
        c=c,
        gamma=gamma,
        hub_overflow=overflow,
        kappa=kappa,
    )


def assign_weights(g: WeightedGraph, layout: AmplifierLayout) -> WeightedGraph:
    """Apply the six weight rules; log + exact symbolic values per edge.

    Rules, for the undirected edge set of g (self-loops at every vertex):
      hub self-loop      (mu - |chl(u)|) * 2^{-kappa} + nu - deg(u)
      hub-internal edge  1
      tree parent-child  2^{-kappa} * n^{-4 lambda(parent)} (parent not in hub
                         side handled by lambda; hub parents have lambda 0)
      non-hub self-loop  n^{-2 lambda(u)}
      every other edge   0 (dropped)
    """
    n = g.n
    if len(layout.lam) != n:
        raise GraphError("layout does not match the graph")
    kappa = layout.kappa if layout.kappa is not None else n
    H, F = layout.hub, layout.frontier
    tree = layout.tree
    mu, nu = layout.mu, layout.nu

    sym: dict[tuple[int, int], list[SymbolicTerm]] = {}

    def put(u: int, v: int, terms: list[SymbolicTerm]) -> None:
        terms = [t for t in terms if t[0] != 0]
        if terms:
            sym[(u, v)] = terms
            if u != v:
                sym[(v, u)] = terms

    chl_count = {u: sum(1 for ch in tree.children[u] if ch not in H) for u in H}
    for u in range(n):
        if u in H:
            a = mu - chl_count[u]
            b = nu - sum(1 for v in _structural_neighbors(g, u) if v in H)
            if a < 0 or b < 0:
                raise GraphError("hub self-loop weight would be negative; layout inconsistent")
            put(u, u, [(Fraction(a), kappa, 0), (Fraction(b), 0, 0)])
        else:
            put(u, u, [(Fraction(1), 0, int(2 * layout.lam[u]))])
    for us, vs in zip(g.esrc.tolist(), g.edst.tolist()):
        if us >= vs:
            continue
        u, v = us, vs
        in_h_u, in_h_v = u in H, v in H
        if in_h_u and in_h_v:
            put(u, v, [(Fraction(1), 0, 0)])
            continue
        # tree parent-child edge?
        if int(tree.parent[v]) == u:
            par = u
        elif int(tree.parent[u]) == v:
            par = v
        else:
            continue  # rule 1 / hub-boundary non-tree edge: weight 0
        put(u, v, [(Fraction(1), kappa, int(4 * layout.lam[par]))])

    edges = []
    for (u, v), terms in sym.items():
        val = eval_symbolic(terms, n)
        edges.append((u, v, log2_fraction(val)))
    return WeightedGraph(n, edges, symbolic=sym)


def construct_amplifier(
    g: WeightedGraph, epsilon: float, root: int = 0, kappa: Optional[int] = None
) -> tuple[WeightedGraph, AmplifierLayout]:
    layout = compute_layout(g, epsilon, root=root, kappa=kappa)
    return assign_weights(g, layout), layout


def diameter(g: WeightedGraph) -> int:
    """Exact diameter over structural (non-self-loop) edges, all-pairs BFS."""
    n = g.n
    worst = 0
    for s in range(n):
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        queue = [s]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for v in _structural_neighbors(g, u):
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        if (dist < 0).any():
            raise GraphError("graph is not connected")
        worst = max(worst, int(dist.max()))
    return worst


def check_diameter(g: WeightedGraph, epsilon: float) -> bool:
    """True iff diameter(g) <= n^{1-epsilon}."""
    return diameter(g) <= g.n ** (1.0 - epsilon) + 1e-9
