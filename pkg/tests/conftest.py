import pytest

_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record one acceptance line; echoed in the terminal summary."""
    def record(tag: str, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {tag}  {detail}"
        print(line)
        _VERDICTS.append(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
