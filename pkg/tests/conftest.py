"""Session fixtures for the expensive symbolic pipelines, plus hypothesis profiles."""
import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=200, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("fast", max_examples=25, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def classic_trace():
    from ebequiv.derivation import derive_classic
    return derive_classic()


@pytest.fixture(scope="session")
def generalized_trace():
    from ebequiv.derivation import verify_theorem2_generalized
    return verify_theorem2_generalized()


@pytest.fixture(scope="session")
def theorem1_image():
    from ebequiv.derivation import assemble_theorem1
    return assemble_theorem1()


@pytest.fixture(scope="session")
def k7_obstruction():
    from ebequiv.derivation import k7_obstruction as run
    return run()


@pytest.fixture(scope="session")
def setups():
    from ebequiv.oracle import theorem_setup
    return {n: theorem_setup(n) for n in (1, 2, 3)}


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion."""
    def report(number, title, ok, detail, seconds):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}  [{detail}]  ({seconds:.1f} s)"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
