import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def brute_force_u(x, y, half=False):
    """O(n*m) double loop over every pair; the independent oracle for U."""
    total = 0.0
    for a in x:
        for b in y:
            if a < b:
                total += 1.0
            elif half and a == b:
                total += 0.5
    return total / (len(x) * len(y))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def record_acceptance(criterion: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
