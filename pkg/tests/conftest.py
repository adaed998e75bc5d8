import pytest

_LINES: list[str] = []


@pytest.fixture
def report():
    """Collects acceptance lines; they are echoed in the terminal summary."""
    return _LINES.append


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
