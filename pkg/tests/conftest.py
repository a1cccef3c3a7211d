import pytest

_LINES = []


class Criteria:
    """Collects one pass/fail line per acceptance criterion."""

    def record(self, number, title, passed, detail=""):
        line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}  [{detail}]"
        _LINES.append((number, line))
        print(line)
        return passed


@pytest.fixture(scope="session")
def criteria():
    return Criteria()


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_LINES, key=lambda t: t[0]):
        terminalreporter.write_line(line)
