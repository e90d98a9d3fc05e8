"""Exact fixation probabilities on small graphs, plus closed forms.

The absorbing-chain solver enumerates all 2^n configurations as bit-packed
integers and solves the linear system rho(S) = sum_S' P(S -> S') rho(S') with
boundary rho(V)=1, rho(empty)=0.  Both the full chain and the embedded jump
chain (self-transitions removed) are supported; they must agree on absorption
probabilities.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .dynamics import Scheme, initial_distribution
from .graph_core import GraphError, WeightedGraph

DEFAULT_LIMIT = 14


class CapacityError(ValueError):
    """State space exceeds the configured solver capacity."""


def fixation_vector(
    g: WeightedGraph, r: float, limit: int = DEFAULT_LIMIT, mode: str = "jump"
) -> np.ndarray:
    """rho({u}) for every vertex u, by linear solve over all configurations."""
    n = g.n
    if n > limit:
        raise CapacityError(f"n={n} exceeds exact-solver capacity {limit}")
    if r <= 0:
        raise ValueError("fitness r must be positive")
    if mode not in ("full", "jump"):
        raise ValueError(f"unknown mode {mode!r}")
    if not g.is_connected():
        raise GraphError("exact solve requires strong connectivity on positive weights")
    if n == 1:
        return np.ones(1)

    W = g.stochastic_matrix()
    nstates = 1 << n
    full = nstates - 1
    bits = 1 << np.arange(n)

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    rhs = np.zeros(nstates - 2)

    # transient states are 1 .. 2^n-2; index shift by -1
    for s in range(1, full):
        mut = (s & bits) > 0
        k = int(mut.sum())
        F = r * k + (n - k)
        # gain[v] for v not in S: sum_{u in S} r * W[u,v] / F
        gain = r * (W[mut].sum(axis=0)) / F
        gain[mut] = 0.0
        # loss[v] for v in S: sum_{u not in S} W[u,v] / F
        loss = W[~mut].sum(axis=0) / F
        loss[~mut] = 0.0
        rate = gain + loss
        tot = rate.sum()
        if tot <= 0:
            raise GraphError("configuration with no outgoing transition; graph disconnected")
        if mode == "jump":
            rate = rate / tot
        succ = np.where(mut, s & ~bits, s | bits)
        active = rate > 0
        sv, rv = succ[active], rate[active]
        boundary = sv == full
        if boundary.any():
            rhs[s - 1] += rv[boundary].sum()
        interior = ~boundary & (sv != 0)
        rows.append(np.full(int(interior.sum()), s - 1, dtype=np.int64))
        cols.append(sv[interior] - 1)
        vals.append(rv[interior])
        if mode == "full":
            # diagonal self-transition probability
            rows.append(np.array([s - 1], dtype=np.int64))
            cols.append(np.array([s - 1], dtype=np.int64))
            vals.append(np.array([1.0 - tot]))

    P = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nstates - 2, nstates - 2),
    ).tocsr()
    A = scipy.sparse.identity(nstates - 2, format="csr") - P
    if n <= 10:
        rho = np.linalg.solve(A.toarray(), rhs)
    else:
        rho = scipy.sparse.linalg.spsolve(A.tocsc(), rhs)
    out = rho[(1 << np.arange(n)) - 1]
    return np.clip(out, 0.0, 1.0)


def fixation_under_scheme(
    g: WeightedGraph, r: float, scheme: Scheme, limit: int = DEFAULT_LIMIT
) -> float:
    """Scheme-weighted fixation probability from the exact per-vertex vector."""
    vec = fixation_vector(g, r, limit=limit)
    return float(initial_distribution(g, scheme) @ vec)


def well_mixed_closed_form(n: int, r: float) -> float:
    """(1 - 1/r) / (1 - r^{-n}); the neutral case r=1 returns 1/n."""
    if n < 1:
        raise ValueError("population size must be at least 1")
    if r <= 0:
        raise ValueError("fitness r must be positive")
    if abs(r - 1.0) < 1e-12:
        return 1.0 / n
    return (1.0 - 1.0 / r) / (1.0 - r ** (-n))


def biased_walk_absorption(k: int, beta: float, start: int) -> float:
    """P[hit k before 0] for a walk with per-step down/up probability ratio beta."""
    if k < 1 or not (0 <= start <= k):
        raise ValueError("need k >= 1 and 0 <= start <= k")
    if beta <= 0:
        raise ValueError("beta must be positive")
    if abs(beta - 1.0) < 1e-12:
        return start / k
    return (1.0 - beta**start) / (1.0 - beta**k)


def three_state_bound(x: float, y: float) -> float:
    """x / (x + y), the absorption bound of the up/down/stay comparison chain."""
    if x < 0 or y < 0:
        raise ValueError("x and y must be nonnegative")
    if x + y == 0:
        raise ValueError("x + y must be positive")
    return x / (x + y)


def mj_transition_matrix(m_j: int, alpha: float, q: float) -> np.ndarray:
    """Transition matrix of the ladder chain on states 0..m_j, H, D.

    From ladder state i < m_j: up to i+1 with probability alpha, otherwise to
    the holding state H.  From H: to the dead state D with probability q,
    otherwise back to ladder state 0.  States m_j and D are absorbing.
    """
    if m_j < 1:
        raise ValueError("ladder length must be at least 1")
    if not (0 < alpha < 1 and 0 < q < 1):
        raise ValueError("alpha and q must lie in (0,1)")
    nstates = m_j + 3  # 0..m_j, H=m_j+1, D=m_j+2
    H, D = m_j + 1, m_j + 2
    P = np.zeros((nstates, nstates))
    for i in range(m_j):
        P[i, i + 1] = alpha
        P[i, H] = 1.0 - alpha
    P[m_j, m_j] = 1.0
    P[H, D] = q
    P[H, 0] = 1.0 - q
    P[D, D] = 1.0
    return P


def mj_absorption(m_j: int, alpha: float, q: float) -> float:
    """P[the ladder chain started at 0 absorbs at the top state m_j].

    Eliminating the interior states gives
    x_0 = alpha^{m_j} / (1 - (1-q)(1-alpha^{m_j})).
    """
    mj_transition_matrix(m_j, alpha, q)  # validate parameters
    a = alpha**m_j
    return a / (1.0 - (1.0 - q) * (1.0 - a))
