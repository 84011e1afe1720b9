import numpy as np
import pytest

from pinchlink.config import SystemConfig


@pytest.fixture
def cfg_c3e8():
    """Default parameter set with c rounded to 3e8, as used for quoted dB values."""
    return SystemConfig(c=3.0e8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(autouse=True)
def _no_seed_env(monkeypatch):
    monkeypatch.delenv("PINCHLINK_SEED", raising=False)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def record_criterion(request):
    """Log one PASS/FAIL line per acceptance criterion and echo it to stdout."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(label: str, passed: bool, detail: str, elapsed: float, limit: float):
        timed = elapsed < limit
        tag = "PASS" if passed and timed else "FAIL"
        line = f"[{tag}] {label}: {detail} ({elapsed:.2f} s, limit {limit:.0f} s)"
        lines.append(line)
        print(line)
        return passed and timed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
