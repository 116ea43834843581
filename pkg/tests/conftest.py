import pytest

_LINES = {}


@pytest.fixture
def report(request):
    """Record one summary line per acceptance criterion."""

    def emit(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _LINES[number] = line
        print(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance summary")
        for number in sorted(_LINES):
            terminalreporter.write_line(_LINES[number])
