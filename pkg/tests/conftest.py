import numpy as np
import pytest

from lexplan.search import LexGraph

# filled by test_acceptance.py, printed once at the end of the session
ACCEPTANCE_LINES: list[str] = []


def random_lex_graph(rng: np.random.Generator, n: int, k: int, p_edge: float = 0.35,
                     denominator: int = 8, max_units: int = 24) -> LexGraph:
    """Random digraph with non-negative dyadic costs and a strictly positive last level.

    Dyadic rationals add exactly in floating point, so path sums are
    order-independent and exact equality is a fair oracle check.
    """
    edges = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p_edge:
                c = [int(rng.integers(0, max_units // 3 + 1)) * (1 if rng.random() < 0.5 else 0)
                     for _ in range(k - 1)]
                c.append(int(rng.integers(1, max_units + 1)))
                edges.append((u, v, [x / denominator for x in c]))
    return LexGraph.from_edges(n, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
