"""Shared fixtures: the two benchmark runs several test modules read from.

Session-scoped so the expensive 100-replication experiments run once;
any test needing per-replication AUC/sensitivity records indexes them
through :func:`records_by_method`.
"""

import pytest

from gamroc.harness import METHOD_NAMES, ExperimentConfig, run_simulation

ACCEPTANCE_SEED = 20260808


def records_by_method(report):
    """records as {method: {rep: record}} for paired comparisons."""
    out = {}
    for rec in report.records:
        out.setdefault(rec["method"], {})[rec["rep"]] = rec
    return out


@pytest.fixture(scope="session")
def set1_report():
    """Set 1, d=5, 100 reps, every method: the main comparison run."""
    cfg = ExperimentConfig(
        mode="simulate",
        methods=METHOD_NAMES,
        reps=100,
        seed=ACCEPTANCE_SEED,
        set_id=1,
        dim=5,
        train_n=100,
        test_n=1000,
        jobs=2,
    )
    return run_simulation(cfg)


@pytest.fixture(scope="session")
def set2_report():
    """Set 2, d=5, 100 reps, the attenuated-dominance comparison."""
    cfg = ExperimentConfig(
        mode="simulate",
        methods=("glm", "backfit", "gamboost"),
        reps=100,
        seed=ACCEPTANCE_SEED,
        set_id=2,
        dim=5,
        train_n=100,
        test_n=1000,
        jobs=2,
    )
    return run_simulation(cfg)


@pytest.fixture(scope="session")
def set1_by_method(set1_report):
    return records_by_method(set1_report)


@pytest.fixture(scope="session")
def set2_by_method(set2_report):
    return records_by_method(set2_report)
