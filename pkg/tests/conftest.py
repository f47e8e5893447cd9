import numpy as np
import pytest

from palab import Instance, Params


@pytest.fixture
def line3():
    return Instance(Params(1, 2.0), np.array([[0.0], [0.5], [1.0]]))


def pytest_report_header(config):
    from palab import BACKEND
    return f"palab kernel backend: {BACKEND}"


@pytest.fixture
def criterion(request):
    """Record and print one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.__dict__.setdefault("_criteria", [])
    capman = request.config.pluginmanager.getplugin("capturemanager")

    def report(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        with capman.global_and_fixture_disabled():
            print("\n" + line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.__dict__.get("_criteria")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
