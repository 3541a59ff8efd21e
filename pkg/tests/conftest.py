import pytest

from hbsge.cli import main

BENCH_SEEDS = "41,42,43,44,45"


@pytest.fixture(scope="session")
def reference_bench(tmp_path_factory):
    """Full reference grid over five seeds, written once per session."""
    out = tmp_path_factory.mktemp("bench")
    assert main(["bench", "--paper-grid", "--seeds", BENCH_SEEDS, "--out", str(out), "--jobs", "1"]) == 0
    return out


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record a one-line PASS/FAIL for a criterion, print it, then assert it."""
    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
