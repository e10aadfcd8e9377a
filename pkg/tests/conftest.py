import numpy as np
import pytest

from geosched.environment import ClusterEnv

from helpers import job, make_world


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance(request):
    """Records one visible pass/fail line per acceptance criterion."""

    def record(label: str, passed: bool, detail: str = ""):
        line = f"[{'PASS' if passed else 'FAIL'}] {label}"
        if detail:
            line += f": {detail}"
        request.config._acceptance_lines.append(line)
        if not passed:
            pytest.fail(line, pytrace=False)

    return record


@pytest.fixture
def two_dc_world():
    """2 regions, flat series, one job at each region, generous slack."""
    jobs = [
        job(0, 0, gpus=2, dur=3, slack=60, data=10.0, model=2.0),
        job(1, 1, gpus=1, dur=2, slack=60, data=4.0, model=1.0),
    ]
    return make_world(
        r_max=[4, 4],
        prices=[60.0, 30.0],
        carbons=[400.0, 200.0],
        pues=[1.2, 1.1],
        horizon_min=120,
        jobs=jobs,
    )


@pytest.fixture
def two_dc_env(two_dc_world):
    return ClusterEnv(two_dc_world, two_dc_world.jobs_for(0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
