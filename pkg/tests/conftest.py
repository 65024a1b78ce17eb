import pytest
from hypothesis import HealthCheck, settings

from nearperfect import TerminalMatrix

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def mat(*rows: str) -> TerminalMatrix:
    return TerminalMatrix.from_strings(list(rows))


@pytest.fixture
def path3():
    return mat("000", "100", "110", "111")


@pytest.fixture
def square():
    return mat("00", "01", "10", "11")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
