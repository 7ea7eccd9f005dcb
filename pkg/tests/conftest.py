import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from tourney.core import Tournament

settings.register_profile("repo", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@st.composite
def tournaments(draw, min_n=1, max_n=9):
    n = draw(st.integers(min_n, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    A = np.zeros((n, n), dtype=bool)
    it = iter(bits)
    for u in range(n):
        for v in range(u + 1, n):
            if next(it):
                A[u, v] = True
            else:
                A[v, u] = True
    return Tournament(A)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
