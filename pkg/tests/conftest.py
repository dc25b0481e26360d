import pytest

_CRITERIA: list[str] = []


@pytest.fixture
def criterion():
    """``criterion(n, ok, detail)`` prints and records one PASS/FAIL line."""

    def record(n: int, ok: bool, detail: str) -> bool:
        line = f"[criterion {n:2d}] {'PASS' if ok else 'FAIL'}: {detail}"
        print(line)
        _CRITERIA.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
