import math
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moran_amp import generators
from moran_amp._kernels import trial_seeds
from moran_amp.estimator import (
    Z95,
    Z99,
    estimate_fixation,
    resolve_threads,
    sweep,
    wilson_interval,
)
from moran_amp.exact import fixation_under_scheme, well_mixed_closed_form


def test_wilson_interval_known_value():
    # 40/100 at z=1.96: classic textbook interval
    lo, hi = wilson_interval(40, 100, 1.959963984540054)
    assert lo == pytest.approx(0.3093, abs=5e-4)
    assert hi == pytest.approx(0.4979, abs=5e-4)


def test_wilson_interval_edge_cases():
    lo, hi = wilson_interval(0, 50, Z95)
    assert lo == 0.0 and 0 < hi < 0.1
    lo, hi = wilson_interval(50, 50, Z95)
    assert 0.9 < lo < 1 and hi == 1.0


def test_trial_seeds_deterministic_and_sliceable():
    a = trial_seeds(123, 0, 100)
    b = trial_seeds(123, 0, 100)
    assert np.array_equal(a, b)
    # block decomposition matches the flat enumeration
    c = np.concatenate([trial_seeds(123, 0, 40), trial_seeds(123, 40, 60)])
    assert np.array_equal(a, c)
    assert len(np.unique(a)) == 100


def test_estimate_matches_exact_small_graph():
    g = generators.complete_graph(6)
    exact = well_mixed_closed_form(6, 1.5)
    est = estimate_fixation(g, 1.5, "uniform", trials=40000, seed=42, threads=1)
    assert est.wilson99[0] <= exact <= est.wilson99[1]
    assert est.trials == 40000
    assert est.timeouts == 0
    assert not est.unreliable


def test_estimate_thread_count_invariance():
    g = generators.random_connected_graph(7, 0.35, seed=9, self_loops=True)
    a = estimate_fixation(g, 1.8, "temperature", trials=5000, seed=7, threads=1)
    b = estimate_fixation(g, 1.8, "temperature", trials=5000, seed=7, threads=4)
    assert a == b


def test_estimate_seed_sensitivity():
    g = generators.complete_graph(5)
    a = estimate_fixation(g, 1.5, "uniform", trials=2000, seed=1, threads=1)
    b = estimate_fixation(g, 1.5, "uniform", trials=2000, seed=2, threads=1)
    assert a.fixations != b.fixations or a.mean_jump_steps != b.mean_jump_steps


def test_full_and_jump_modes_agree_statistically():
    g = generators.star_graph(6)
    exact = fixation_under_scheme(g, 2.0, "uniform")
    for mode in ("jump", "full"):
        est = estimate_fixation(g, 2.0, "uniform", trials=30000, seed=5,
                                threads=1, mode=mode)
        assert est.wilson99[0] <= exact <= est.wilson99[1], mode


def test_timeouts_excluded_and_flagged():
    g = generators.complete_graph(8, self_loops=True)
    est = estimate_fixation(g, 1.0, "uniform", trials=500, seed=3, threads=1,
                            mode="full", max_steps=5)
    assert est.timeouts > 0
    assert est.fixations + est.timeouts <= est.trials
    if est.timeouts > 0.05 * est.trials:
        assert est.unreliable
    denom = est.trials - est.timeouts
    expect_point = est.fixations / denom if denom else 0.0
    assert est.point == pytest.approx(expect_point, abs=1e-15)


def test_convex_scheme_interpolates():
    g = generators.star_graph(7)
    r = 1.6
    exact = fixation_under_scheme(g, r, "convex:0.5")
    est = estimate_fixation(g, r, "convex:0.5", trials=40000, seed=8, threads=1)
    assert est.wilson99[0] <= exact <= est.wilson99[1]


def test_sweep_returns_row_per_spec_and_survives_errors():
    g = generators.complete_graph(5)
    bad = generators.complete_graph(5)
    rows = sweep(
        [
            (g, 1.5, "uniform", 500),
            (bad, -2.0, "uniform", 500),  # invalid fitness: recorded, not raised
            (g, 2.0, "temperature", 500),
        ],
        seed=11,
        threads=1,
    )
    assert len(rows) == 3
    assert isinstance(rows[1], Exception)
    assert rows[0].trials == 500 and rows[2].trials == 500
    # row seeds differ, so equal configs would still be independent draws
    rows2 = sweep([(g, 1.5, "uniform", 500), (g, 1.5, "uniform", 500)], seed=11)
    assert rows2[0].seed != rows2[1].seed


def test_resolve_threads_env(monkeypatch):
    monkeypatch.setenv("MORAN_AMP_THREADS", "3")
    assert resolve_threads(None) == 3
    assert resolve_threads(2) == 2
    monkeypatch.delenv("MORAN_AMP_THREADS")
    assert resolve_threads(None) >= 1


def test_estimate_to_dict_columns():
    g = generators.complete_graph(4)
    est = estimate_fixation(g, 1.5, "uniform", trials=100, seed=1, threads=1)
    d = est.to_dict()
    for key in ("trials", "fixations", "timeouts", "point", "w95_lo", "w95_hi",
                "w99_lo", "w99_hi", "seed", "mean_jump_steps"):
        assert key in d


@given(st.integers(min_value=0, max_value=200), st.integers(min_value=1, max_value=200))
@settings(max_examples=100, deadline=None)
def test_wilson_interval_properties(k, n):
    if k > n:
        k = n
    lo95, hi95 = wilson_interval(k, n, Z95)
    lo99, hi99 = wilson_interval(k, n, Z99)
    assert 0 <= lo95 <= k / n <= hi95 <= 1
    # the 99% interval contains the 95% interval
    assert lo99 <= lo95 and hi95 <= hi99
