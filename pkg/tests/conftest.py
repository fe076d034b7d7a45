import pytest

_LINES = []


@pytest.fixture
def criterion(capsys):
    """Print ``ACCEPTANCE <name>: PASS|FAIL (detail)`` and return the verdict."""

    def record(name: str, ok: bool, detail: str = "") -> bool:
        line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
        _LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
