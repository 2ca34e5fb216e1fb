import numpy as np
import pytest

from sbmperturb.montecarlo import benchmark_config, run_replications
from sbmperturb.spectral import STATISTIC_NAMES

SEED = 20240601
_CRITERIA = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    _CRITERIA.append((number, line))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_CRITERIA):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def benchmark_table():
    """n=400, K=2, 1000 oracle-label replications recording every statistic plus eta'."""
    stats = tuple(s for s in STATISTIC_NAMES if s != "tw_lambda1") + ("eta_prime", "eta")
    return run_replications(benchmark_config(K=2, reps=1000, seed=SEED, statistics=stats))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
