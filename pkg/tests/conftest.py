import pytest

_LINES = {}


class AcceptanceRecorder:
    """Collects named sub-checks of one acceptance criterion and prints one verdict line."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.checks = []

    def check(self, name, ok, value=None):
        self.checks.append((name, bool(ok), value))
        return bool(ok)

    @property
    def passed(self):
        return bool(self.checks) and all(ok for _, ok, _ in self.checks)

    def line(self):
        bad = [n for n, ok, _ in self.checks if not ok]
        detail = "all checks ok" if not bad else "failed: " + ", ".join(bad)
        return f"criterion {self.number:>2} {self.title}: {'PASS' if self.passed else 'FAIL'} ({detail})"

    def finish(self):
        _LINES[self.number] = self.line()
        print(self.line())
        for name, ok, value in self.checks:
            print(f"    {'ok ' if ok else 'BAD'} {name}: {value}")
        failed = [(n, v) for n, ok, v in self.checks if not ok]
        assert not failed, failed


@pytest.fixture
def acceptance():
    return AcceptanceRecorder


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_LINES):
            terminalreporter.write_line(_LINES[k])
