from fractions import Fraction

import pytest
from hypothesis import settings

settings.register_profile("conelab", max_examples=60, deadline=None)
settings.load_profile("conelab")


@pytest.fixture
def F():
    return Fraction


ACCEPTANCE: dict[int, tuple[str, float, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(n, passed, seconds, detail)``."""

    def note(n, passed, seconds, detail=""):
        ACCEPTANCE[n] = ("PASS" if passed else "FAIL", seconds, detail)

    return note


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, seconds, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {seconds:7.2f}s  {detail}")
