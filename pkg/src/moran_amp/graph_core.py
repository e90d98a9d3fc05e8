"""Weighted directed graphs with log-domain weights and temperature machinery.

Weights are kept as log base 2 (``-inf`` marks a structurally removed edge and
is dropped on construction).  Edges may optionally carry an exact symbolic
value, a sum of terms ``coeff * 2**(-a) * n**(-b)`` with rational ``coeff``,
which the amplifier construction uses so that identities like the hub weight
can be checked without floating-point tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

NEG_INF = float("-inf")

# One symbolic term: (coefficient, a, b) meaning coefficient * 2**(-a) * n**(-b).
SymbolicTerm = tuple[Fraction, int, int]


def eval_symbolic(terms: Sequence[SymbolicTerm], n: int) -> Fraction:
    """Exact rational value of a symbolic weight for population size n."""
    total = Fraction(0)
    for coeff, a, b in terms:
        if coeff < 0:
            raise ValueError("symbolic coefficients must be nonnegative")
        total += coeff / (Fraction(2) ** a * Fraction(n) ** b)
    return total


def log2_fraction(x: Fraction) -> float:
    """log2 of a positive rational, safe for huge numerators/denominators."""
    if x <= 0:
        return NEG_INF
    p, q = x.numerator, x.denominator
    # Split off the bit lengths so neither int overflows float conversion.
    sp, sq = p.bit_length() - 1, q.bit_length() - 1
    return (sp - sq) + math.log2(p / (1 << sp)) - math.log2(q / (1 << sq))


@dataclass(frozen=True)
class ClassificationFlags:
    self_loop_free: bool
    unweighted: bool
    undirected: bool
    max_degree: int


class GraphError(ValueError):
    """Structural problem with a graph or an operation's input."""


class WeightedGraph:
    """Directed graph with positive log2-domain edge weights.

    Only positive-weight edges are stored; assigning weight zero removes the
    edge from the support (it cannot create interactions, matching the model
    where the weight matrix is positive exactly on existing edges).
    """

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int, float]],
        symbolic: Optional[dict[tuple[int, int], list[SymbolicTerm]]] = None,
    ):
        if n < 1:
            raise GraphError("graph must have at least one vertex")
        self.n = n
        cleaned = []
        seen = set()
        for u, v, lw in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) has endpoint outside [0,{n})")
            if (u, v) in seen:
                raise GraphError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            if lw == NEG_INF:
                continue  # zero weight: edge effectively removed
            cleaned.append((u, v, float(lw)))
        cleaned.sort(key=lambda e: (e[0], e[1]))
        m = len(cleaned)
        self.esrc = np.array([e[0] for e in cleaned], dtype=np.int64)
        self.edst = np.array([e[1] for e in cleaned], dtype=np.int64)
        self.elogw = np.array([e[2] for e in cleaned], dtype=np.float64)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.indptr, self.esrc + 1, 1)
        np.cumsum(self.indptr, out=self.indptr)
        if m == 0 or np.any(self.indptr[1:] == self.indptr[:-1]):
            raise GraphError("every vertex needs at least one positive out-edge")
        self.symbolic = {}
        if symbolic:
            for (u, v), terms in symbolic.items():
                if (u, v) in seen:
                    self.symbolic[(u, v)] = list(terms)
        self._row_log = self._compute_row_log()
        self._check_symbolic()
        self._temps: Optional[np.ndarray] = None

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_weights(cls, n: int, edges: Iterable[tuple[int, int, float]]) -> "WeightedGraph":
        """Build from linear-domain nonnegative weights."""
        logs = []
        for u, v, w in edges:
            if w < 0:
                raise GraphError(f"negative weight on edge ({u},{v})")
            logs.append((u, v, math.log2(w) if w > 0 else NEG_INF))
        return cls(n, logs)

    @classmethod
    def from_undirected(cls, n: int, edges: Iterable[tuple[int, int, float]]) -> "WeightedGraph":
        """Build a symmetric graph from linear weights on undirected edges."""
        directed = []
        for u, v, w in edges:
            directed.append((u, v, w))
            if u != v:
                directed.append((v, u, w))
        return cls.from_weights(n, directed)

    def _compute_row_log(self) -> np.ndarray:
        row_log = np.empty(self.n, dtype=np.float64)
        for u in range(self.n):
            lo, hi = self.indptr[u], self.indptr[u + 1]
            row_log[u] = logsumexp2(self.elogw[lo:hi])
        return row_log

    def _check_symbolic(self) -> None:
        for (u, v), terms in self.symbolic.items():
            val = eval_symbolic(terms, self.n)
            lw = self.weight_log2(u, v)
            if val == 0:
                raise GraphError(f"symbolic weight for stored edge ({u},{v}) is zero")
            ref = log2_fraction(val)
            # relative error 1e-12 on the weight <-> ~1.5e-12 absolute on log2
            if abs(lw - ref) > 1.5e-12:
                raise GraphError(
                    f"symbolic weight for edge ({u},{v}) disagrees with log value"
                )

    # -- basic access ----------------------------------------------------------

    @property
    def m(self) -> int:
        """Number of stored (positive-weight) edges."""
        return len(self.esrc)

    def out_edges(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        """(targets, log2 weights) of u's positive out-edges."""
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return self.edst[lo:hi], self.elogw[lo:hi]

    def weight_log2(self, u: int, v: int) -> float:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        pos = np.searchsorted(self.edst[lo:hi], v)
        if pos < hi - lo and self.edst[lo + pos] == v:
            return float(self.elogw[lo + pos])
        return NEG_INF

    def has_edge(self, u: int, v: int) -> bool:
        return self.weight_log2(u, v) != NEG_INF

    def row_log_weight(self, u: int) -> float:
        """log2 of the total out-weight w(u)."""
        return float(self._row_log[u])

    def out_neighbors(self, u: int) -> np.ndarray:
        return self.out_edges(u)[0]

    def in_neighbors(self, u: int) -> np.ndarray:
        return np.unique(self.esrc[self.edst == u])

    def transition_prob(self, u: int, v: int) -> float:
        """Row-normalized W[u,v] = w(u,v)/w(u)."""
        lw = self.weight_log2(u, v)
        return 0.0 if lw == NEG_INF else 2.0 ** (lw - self._row_log[u])

    def row_probs(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        """(targets, probabilities) of the stochastic row for u."""
        targets, logs = self.out_edges(u)
        p = np.exp2(logs - np.max(logs))
        return targets, p / p.sum()

    def stochastic_matrix(self) -> np.ndarray:
        """Dense row-stochastic matrix W (intended for small graphs)."""
        W = np.zeros((self.n, self.n))
        for u in range(self.n):
            t, p = self.row_probs(u)
            W[u, t] = p
        return W

    def symbolic_row_weight(self, u: int) -> Optional[Fraction]:
        """Exact w(u) when every out-edge of u carries symbolic terms."""
        total = Fraction(0)
        targets, _ = self.out_edges(u)
        for v in targets:
            terms = self.symbolic.get((u, int(v)))
            if terms is None:
                return None
            total += eval_symbolic(terms, self.n)
        return total

    # -- structure predicates ----------------------------------------------------

    def is_undirected_symmetric(self, tol: float = 1e-12) -> bool:
        for u, v, lw in zip(self.esrc, self.edst, self.elogw):
            if u == v:
                continue
            back = self.weight_log2(int(v), int(u))
            if back == NEG_INF or abs(back - lw) > tol:
                return False
        return True

    def is_connected(self) -> bool:
        """Strong connectivity over the positive-weight support."""
        if not _reachable_all(self):
            return False
        # walk the reverse adjacency directly; the reversed graph may have
        # vertices with no out-edges, which the constructor rejects
        radj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in zip(self.esrc.tolist(), self.edst.tolist()):
            radj[v].append(u)
        seen = [False] * self.n
        seen[0] = True
        stack = [0]
        while stack:
            w = stack.pop()
            for x in radj[w]:
                if not seen[x]:
                    seen[x] = True
                    stack.append(x)
        return all(seen)

    def reversed(self) -> "WeightedGraph":
        return WeightedGraph(
            self.n, zip(self.edst.tolist(), self.esrc.tolist(), self.elogw.tolist())
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, WeightedGraph)
            and self.n == other.n
            and np.array_equal(self.esrc, other.esrc)
            and np.array_equal(self.edst, other.edst)
            and np.array_equal(self.elogw, other.elogw)
        )


def logsumexp2(logs: np.ndarray) -> float:
    """log2 of a sum of 2**logs values, max-shifted for stability."""
    if len(logs) == 0:
        return NEG_INF
    hi = np.max(logs)
    if hi == NEG_INF:
        return NEG_INF
    return float(hi + np.log2(np.sum(np.exp2(logs - hi))))


def _reachable_all(g: WeightedGraph) -> bool:
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    stack = [0]
    while stack:
        u = stack.pop()
        for v in g.out_neighbors(u):
            if not seen[v]:
                seen[v] = True
                stack.append(int(v))
    return bool(seen.all())


# -- temperature ----------------------------------------------------------------


def temperatures(g: WeightedGraph) -> np.ndarray:
    """T(u) = sum over in-edges of W[v,u], self-loop included."""
    contrib = np.exp2(g.elogw - g._row_log[g.esrc])
    t = np.zeros(g.n)
    np.add.at(t, g.edst, contrib)
    return t


def temperature(g: WeightedGraph, u: int) -> float:
    if g._temps is None:
        g._temps = temperatures(g)
    return float(g._temps[u])


def is_isothermal(g: WeightedGraph, tol: float = 1e-9) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return bool(np.all(np.abs(temperatures(g) - 1.0) <= tol))


# -- induced subgraphs (symmetric graphs with self-loops) -------------------------


def induced_subgraph(g: WeightedGraph, subset: Iterable[int]) -> WeightedGraph:
    """Restrict a symmetric self-looped graph to a vertex set.

    Weights on edges leaving the set fold into the self-loop, so each kept
    vertex's total weight is unchanged.  Vertices are relabeled to 0..|X|-1
    in ascending original order.
    """
    keep = sorted(set(int(x) for x in subset))
    if not keep:
        raise GraphError("induced subgraph needs a nonempty vertex set")
    if keep[0] < 0 or keep[-1] >= g.n:
        raise GraphError("vertex set contains invalid ids")
    relabel = {u: i for i, u in enumerate(keep)}
    inside = frozenset(keep)

    edges = []
    symbolic: dict[tuple[int, int], list[SymbolicTerm]] = {}
    for u in keep:
        targets, logs = g.out_edges(u)
        self_logs = []
        self_terms: list[SymbolicTerm] = []
        self_symbolic_ok = True
        for v, lw in zip(targets.tolist(), logs.tolist()):
            terms = g.symbolic.get((u, v))
            if v == u or v not in inside:
                self_logs.append(lw)
                if terms is None:
                    self_symbolic_ok = False
                else:
                    self_terms.extend(terms)
            else:
                edges.append((relabel[u], relabel[v], lw))
                if terms is not None:
                    symbolic[(relabel[u], relabel[v])] = list(terms)
        if self_logs:
            ru = relabel[u]
            edges.append((ru, ru, logsumexp2(np.array(self_logs))))
            if self_symbolic_ok and self_terms:
                symbolic[(ru, ru)] = self_terms
    return WeightedGraph(len(keep), edges, symbolic=symbolic)


def restricted_temperature(g: WeightedGraph, subset: Iterable[int], u: int) -> float:
    keep = sorted(set(int(x) for x in subset))
    if u not in keep:
        raise GraphError(f"vertex {u} not in the restriction set")
    sub = induced_subgraph(g, keep)
    return temperature(sub, keep.index(u))


def restricted_temperature_exact(
    g: WeightedGraph, subset: Iterable[int], u: int
) -> Optional[Fraction]:
    """Exact restricted temperature, when symbolic terms cover the subgraph."""
    keep = sorted(set(int(x) for x in subset))
    if u not in keep:
        raise GraphError(f"vertex {u} not in the restriction set")
    sub = induced_subgraph(g, keep)
    iu = keep.index(u)
    total = Fraction(0)
    for v in range(sub.n):
        terms = sub.symbolic.get((v, iu))
        if not sub.has_edge(v, iu):
            continue
        wv = sub.symbolic_row_weight(v)
        if terms is None or wv is None:
            return None
        total += eval_symbolic(terms, sub.n) / wv
    return total


# -- classification ----------------------------------------------------------------


def classify(g: WeightedGraph) -> ClassificationFlags:
    self_loop_free = not any(int(u) == int(v) for u, v in zip(g.esrc, g.edst))
    unweighted = True
    for u in range(g.n):
        _, logs = g.out_edges(u)
        if np.max(logs) - np.min(logs) > 1e-12:
            unweighted = False
            break
    out_deg = g.indptr[1:] - g.indptr[:-1]
    in_deg = np.bincount(g.edst, minlength=g.n)
    return ClassificationFlags(
        self_loop_free=self_loop_free,
        unweighted=unweighted,
        undirected=g.is_undirected_symmetric(),
        max_degree=int(max(out_deg.max(), in_deg.max())),
    )
