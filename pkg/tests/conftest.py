import re

import pytest


def pytest_runtest_logreport(report):
    """Print one summary line per acceptance criterion as results come in."""
    if report.when != "call":
        return
    m = re.search(r"test_criterion_(\d+)", report.nodeid)
    if m:
        status = "PASS" if report.passed else "FAIL"
        print(f"\n[criterion {int(m.group(1))}] {status}", flush=True)


@pytest.fixture(scope="session")
def warm_kernels():
    """Compile the Monte Carlo kernels once so timings reflect steady state."""
    from moran_amp import estimator, generators

    g = generators.complete_graph(4)
    estimator.estimate_fixation(g, r=1.5, scheme="uniform", trials=8, seed=1, threads=1)
    estimator.estimate_fixation(
        g, r=1.5, scheme="uniform", trials=8, seed=1, threads=1, mode="full"
    )
    return True
