from importlib import resources

import pytest

from csm.interp import TimedTelecommand
from csm.model import validate_model
from csm.parser import parse_csm


def fixture_text(name):
    return resources.files("csm").joinpath(f"data/{name}").read_text("utf-8")


@pytest.fixture(scope="session")
def listing1_text():
    return fixture_text("listing1.csm")


@pytest.fixture(scope="session")
def minisat():
    return validate_model(parse_csm(fixture_text("minisat.csm"), "minisat.csm"))


@pytest.fixture(scope="session")
def fullsat():
    return validate_model(parse_csm(fixture_text("fullsat.csm"), "fullsat.csm"))


def seq(*items):
    """seq(("AMPON", 0), ("CLEARFILE", 2, 4)) -> list of TimedTelecommand."""
    return [TimedTelecommand(*item) for item in items]


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """report(n, ok, detail) records one acceptance line and asserts ``ok``."""
    def _report(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
