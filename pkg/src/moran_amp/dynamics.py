"""Birth-death dynamics: single steps, the embedded jump chain, trajectories,
and initial-mutant sampling schemes.

Configurations are bit-packed integers (bit u set iff vertex u is a mutant),
which keeps the exact solver's state enumeration and the simulator in the same
representation.  These are reference implementations; the bulk Monte Carlo
path lives in the compiled kernels (see _kernels.py).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .graph_core import GraphError, WeightedGraph, temperatures

Scheme = Union[str, tuple[str, float]]


@dataclass(frozen=True)
class TrajectoryOutcome:
    result: str  # "fixed" | "extinct" | "timeout"
    steps_full_chain: Optional[int]
    steps_jump_chain: int


def popcount(s: int) -> int:
    return bin(s).count("1")


def total_fitness(s: int, r: float, n: int) -> float:
    """F(S) = r|S| + n - |S| for a bit-packed configuration."""
    if r <= 0:
        raise ValueError("fitness r must be positive")
    k = popcount(s)
    return r * k + (n - k)


def step(g: WeightedGraph, s: int, r: float, rng: np.random.Generator) -> int:
    """One full-chain event: reproducer ~ fitness, then target ~ W row."""
    if r <= 0:
        raise ValueError("fitness r must be positive")
    n = g.n
    full = (1 << n) - 1
    if s == 0 or s == full:
        return s
    fit = np.where((s >> np.arange(n)) & 1, r, 1.0)
    u = int(rng.choice(n, p=fit / fit.sum()))
    targets, probs = g.row_probs(u)
    v = int(targets[rng.choice(len(targets), p=probs)])
    if (s >> u) & 1:
        return s | (1 << v)
    return s & ~(1 << v)


def jump_candidates(g: WeightedGraph, s: int, r: float) -> list[tuple[int, int, float]]:
    """Type-changing transitions (u, v, log2 of fitness(u)*W[u,v])."""
    log2r = np.log2(r)
    cands = []
    for u in range(g.n):
        u_mut = (s >> u) & 1
        lf = log2r if u_mut else 0.0
        targets, logs = g.out_edges(u)
        base = lf - g.row_log_weight(u)
        for v, lw in zip(targets.tolist(), logs.tolist()):
            if ((s >> v) & 1) != u_mut:
                cands.append((u, v, base + lw))
    return cands


def jump_step(g: WeightedGraph, s: int, r: float, rng: np.random.Generator) -> int:
    """One jump-chain event: sample among configuration-changing moves only."""
    if r <= 0:
        raise ValueError("fitness r must be positive")
    n = g.n
    full = (1 << n) - 1
    if s == 0 or s == full:
        raise GraphError("jump_step requires a non-absorbing configuration")
    cands = jump_candidates(g, s, r)
    if not cands:
        raise GraphError("no configuration-changing transition has positive weight")
    logs = np.array([c[2] for c in cands])
    w = np.exp2(logs - logs.max())
    i = int(rng.choice(len(cands), p=w / w.sum()))
    u, v, _ = cands[i]
    if (s >> u) & 1:
        return s | (1 << v)
    return s & ~(1 << v)


def simulate(
    g: WeightedGraph,
    s0: int,
    r: float,
    rng: np.random.Generator,
    mode: str = "jump",
    max_steps: int = 10**9,
) -> TrajectoryOutcome:
    """Run one trajectory to absorption (or max_steps); Timeout is an outcome."""
    if max_steps <= 0:
        raise ValueError("max_steps must be positive")
    if mode not in ("full", "jump"):
        raise ValueError(f"unknown mode {mode!r}")
    n = g.n
    full = (1 << n) - 1
    s = s0
    steps_full = 0
    steps_jump = 0
    while s != 0 and s != full:
        if (steps_full if mode == "full" else steps_jump) >= max_steps:
            return TrajectoryOutcome(
                "timeout", steps_full if mode == "full" else None, steps_jump
            )
        if mode == "full":
            t = step(g, s, r, rng)
            steps_full += 1
            if t != s:
                steps_jump += 1
            s = t
        else:
            s = jump_step(g, s, r, rng)
            steps_jump += 1
    result = "fixed" if s == full else "extinct"
    return TrajectoryOutcome(result, steps_full if mode == "full" else None, steps_jump)


# -- initialization schemes ---------------------------------------------------------


def parse_scheme(scheme: Scheme) -> tuple[str, float]:
    """Canonicalize a scheme spec to ("uniform"|"temperature"|"convex", eta)."""
    if isinstance(scheme, tuple):
        name, eta = scheme
    elif ":" in scheme:
        name, _, tail = scheme.partition(":")
        try:
            eta = float(tail)
        except ValueError:
            raise ValueError(f"bad scheme parameter in {scheme!r}") from None
    else:
        name, eta = scheme, 0.0
    name = name.lower()
    if name == "uniform":
        return ("uniform", 0.0)
    if name == "temperature":
        return ("temperature", 1.0)
    if name == "convex":
        if not (0.0 <= eta <= 1.0):
            raise ValueError("convex mixing parameter must lie in [0,1]")
        return ("convex", eta)
    raise ValueError(f"unknown initialization scheme {scheme!r}")


def initial_distribution(g: WeightedGraph, scheme: Scheme) -> np.ndarray:
    """Probability of each vertex being the initial mutant under the scheme."""
    name, eta = parse_scheme(scheme)
    uniform = np.full(g.n, 1.0 / g.n)
    if name == "uniform":
        return uniform
    temp = temperatures(g) / g.n
    if name == "temperature":
        return temp
    return (1.0 - eta) * uniform + eta * temp


def sample_initial(g: WeightedGraph, scheme: Scheme, rng: np.random.Generator) -> int:
    """Singleton configuration {u} with u drawn per the scheme."""
    p = initial_distribution(g, scheme)
    u = int(rng.choice(g.n, p=p / p.sum()))
    return 1 << u
