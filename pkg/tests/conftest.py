import numpy as np
import pytest

from ratrecover.field import FieldParams

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def F7():
    return FieldParams(7)


@pytest.fixture
def F13():
    return FieldParams(13)


@pytest.fixture
def F101():
    return FieldParams(101)


@pytest.fixture
def F10007():
    return FieldParams(10007)


@pytest.fixture
def F65537():
    return FieldParams(65537)


@pytest.fixture
def acceptance_report():
    def record(name: str, passed: bool, detail: str = ""):
        _ACCEPTANCE.append((name, passed, detail))
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
