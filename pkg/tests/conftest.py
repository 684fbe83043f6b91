from fractions import Fraction

import pytest

from rankforge import Matrix


def M(rows, ncols=None):
    return Matrix(rows, ncols=ncols)


@pytest.fixture
def uvt():
    """``u v^T`` with ``u = (1, 2)``, ``v = (3, 4)``."""
    return Matrix([[3, 4], [6, 8]])


@pytest.fixture
def half():
    return Fraction(1, 2)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion_report(capsys):
    """Record one pass/fail line per acceptance criterion, echoed live and in the summary."""

    def record(number, title, failures, detail=""):
        status = "PASS" if not failures else "FAIL"
        line = f"[{status}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
        if failures:
            line += f"; first failures: {failures[:3]}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print(f"\n{line}")
        return not failures

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
