import numpy as np
import pytest

from dbxmoea.population import Individual

# criterion id -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def make_individual(objectives, genome=None, infeasibility=None, rank=None, crowding=None):
    objectives = np.asarray(objectives, dtype=float)
    if genome is None:
        genome = np.zeros(2)
    return Individual(
        genome=np.asarray(genome, dtype=float),
        objectives=objectives,
        infeasibility=infeasibility,
        rank=rank,
        crowding=crowding,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0])):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {key}: {detail}")
