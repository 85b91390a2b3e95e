import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from excursion.rng import RngStream
from excursion.samplers import sample_joint_weighted, sample_lambda, sample_xi

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SEED = 20240917
BIG = 10**6


def zscore(mean, target, se):
    return (mean - target) / se if se > 0 else (0.0 if mean == target else math.inf)


def mean_se(x):
    x = np.asarray(x, dtype=float)
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


@pytest.fixture(scope="session")
def xi_big():
    return sample_xi(RngStream(SEED, 1), BIG)


@pytest.fixture(scope="session")
def lambda_big():
    """10^6 draws of lambda(x) for x in {0.5, 1, 2}."""
    return {x: sample_lambda(x, RngStream(SEED, 2 + i), BIG) for i, x in enumerate((0.5, 1.0, 2.0))}


@pytest.fixture(scope="session")
def weighted_big():
    return sample_joint_weighted(1.0, RngStream(SEED, 10), BIG)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: list[tuple[str, bool, str]] = []


def record(label: str, ok: bool, detail: str) -> bool:
    ok = bool(ok)
    ACCEPTANCE.append((label, ok, detail))
    print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in sorted(ACCEPTANCE, key=lambda r: _order(r[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")


def _order(label):
    head = label.split()[1] if label.startswith("criterion ") else label
    num = "".join(ch for ch in head if ch.isdigit())
    return (int(num) if num else 99, label)
