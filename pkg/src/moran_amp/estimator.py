"""Monte Carlo fixation-probability estimation.

Each trial index maps deterministically to its own random stream, so the
estimate is identical for any number of worker threads and any scheduling
order.  Wilson score intervals are reported at 95% and 99%; timed-out trials
are excluded from the point estimate and flagged when they exceed 5%.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .dynamics import Scheme, initial_distribution
from .graph_core import WeightedGraph

Z95 = 1.959963984540054
Z99 = 2.5758293035489004

DEFAULT_MAX_STEPS = 10**9


def wilson_interval(successes: int, trials: int, z: float) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        return (0.0, 1.0)
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return (lo, hi)


@dataclass(frozen=True)
class FixationEstimate:
    trials: int
    fixations: int
    timeouts: int
    point: float
    wilson95: tuple[float, float]
    wilson99: tuple[float, float]
    seed: int
    mean_jump_steps: float
    unreliable: bool

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "fixations": self.fixations,
            "timeouts": self.timeouts,
            "point": self.point,
            "w95_lo": self.wilson95[0],
            "w95_hi": self.wilson95[1],
            "w99_lo": self.wilson99[0],
            "w99_hi": self.wilson99[1],
            "seed": self.seed,
            "mean_jump_steps": self.mean_jump_steps,
            "unreliable": self.unreliable,
        }


def resolve_threads(threads: Optional[int] = None) -> int:
    if threads is None:
        env = os.environ.get("MORAN_AMP_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, threads)


def estimate_fixation(
    g: WeightedGraph,
    r: float,
    scheme: Scheme,
    trials: int,
    seed: int,
    mode: str = "jump",
    max_steps: int = DEFAULT_MAX_STEPS,
    threads: Optional[int] = None,
) -> FixationEstimate:
    """Estimate the fixation probability from `trials` independent trajectories."""
    if trials < 1:
        raise ValueError("need at least one trial")
    if r <= 0:
        raise ValueError("fitness r must be positive")
    if mode not in ("full", "jump"):
        raise ValueError(f"unknown mode {mode!r}")
    threads = resolve_threads(threads)

    init = initial_distribution(g, scheme)
    init_cum = np.cumsum(init / init.sum())
    init_cum[-1] = 1.0
    seeds = _kernels.trial_seeds(seed, 0, trials)
    outcomes = np.empty(trials, dtype=np.int64)
    jump_steps = np.empty(trials, dtype=np.int64)
    jump_mode = mode == "jump"

    def work(lo: int, hi: int) -> None:
        _kernels.run_block(
            g.esrc, g.edst, g.elogw, g._row_log, g.indptr, g.n, float(r),
            init_cum, seeds[lo:hi], jump_mode, max_steps,
            outcomes[lo:hi], jump_steps[lo:hi],
        )

    if threads == 1 or trials < 2 * threads:
        work(0, trials)
    else:
        block = (trials + threads - 1) // threads
        bounds = [(i, min(i + block, trials)) for i in range(0, trials, block)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(work, lo, hi) for lo, hi in bounds]
            for f in futures:
                f.result()

    fixations = int(np.sum(outcomes == _kernels.OUTCOME_FIXED))
    timeouts = int(np.sum(outcomes == _kernels.OUTCOME_TIMEOUT))
    effective = trials - timeouts
    point = fixations / effective if effective > 0 else 0.0
    return FixationEstimate(
        trials=trials,
        fixations=fixations,
        timeouts=timeouts,
        point=point,
        wilson95=wilson_interval(fixations, effective, Z95),
        wilson99=wilson_interval(fixations, effective, Z99),
        seed=seed,
        mean_jump_steps=float(jump_steps.mean()),
        unreliable=timeouts > 0.05 * trials,
    )


def sweep(
    specs: list[tuple[WeightedGraph, float, Scheme, int]],
    seed: int,
    mode: str = "jump",
    max_steps: int = DEFAULT_MAX_STEPS,
    threads: Optional[int] = None,
) -> list[FixationEstimate | Exception]:
    """Evaluate each (graph, r, scheme, trials) row with its own derived seed.

    Per-row errors are recorded in the output list; the sweep continues.
    """
    if not specs:
        raise ValueError("sweep needs at least one row")
    rows: list[FixationEstimate | Exception] = []
    for i, (g, r, scheme, trials) in enumerate(specs):
        row_seed = int(_kernels.trial_seeds(seed ^ 0xA5A5A5A5, i, 1)[0])
        try:
            rows.append(
                estimate_fixation(
                    g, r, scheme, trials, row_seed,
                    mode=mode, max_steps=max_steps, threads=threads,
                )
            )
        except Exception as exc:  # recorded, run continues
            rows.append(exc)
    return rows
